#include "raceway/objective.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace raceway {

void validate(const Controls& x) {
  if (!std::isfinite(x.height) || !(x.height > 0.0)) {
    throw ConfigError(fmt::format("control height H must be finite and positive, got {}", x.height));
  }
  if (!std::isfinite(x.omega) || !(x.omega > 0.0)) {
    throw ConfigError(fmt::format("control omega must be finite and positive, got {}", x.omega));
  }
}

void validate(const ControlBounds& b) {
  if (!(b.h_min > 0.0 && b.h_min <= b.h_max)) {
    throw ConfigError("control bounds need 0 < h_min <= h_max");
  }
  if (!(b.w_min > 0.0 && b.w_min <= b.w_max)) {
    throw ConfigError("control bounds need 0 < w_min <= w_max");
  }
}

void validate(const ObjectiveSpec& spec) {
  if (!(spec.c1 >= 0.0) || !(spec.c2 >= 0.0)) {
    throw ConfigError("objective: thresholds C1, C2 must be nonnegative");
  }
  if (!(spec.m1 > 0.0) || !(spec.m2 > 0.0)) {
    throw ConfigError("objective: penalty weights M1, M2 must be positive");
  }
  if (!(spec.horizon >= 0.0)) throw ConfigError("objective: horizon T must be nonnegative");
}

void validate(const Scenario& sc) {
  validate(sc.hydro);
  validate(sc.paddle);
  validate(sc.bio);
  validate(sc.forcings);
  validate(sc.objective);
  if (!((sc.initial.array() >= 0.0).all() && sc.initial.allFinite())) {
    throw ConfigError("initial species values must be finite and nonnegative");
  }
  step_count(sc.objective.horizon, sc.hydro.dt);
}

Index step_count(double horizon, double dt) {
  const double ratio = horizon / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, n)) {
    throw ConfigError(fmt::format("horizon T={} is not a whole number of steps dt={}", horizon, dt));
  }
  return static_cast<Index>(n);
}

double volume_integral(const Mesh& mesh, const VectorX& field, const VectorX& surface_height) {
  if (field.size() != mesh.n_cells() || surface_height.size() != mesh.n_columns()) {
    throw std::invalid_argument("volume_integral: field or surface shape does not match mesh");
  }
  return cell_volumes(mesh, surface_height).dot(field);
}

StepDiagnostics diagnose(const Mesh& mesh, const FlowState& flow, const SpeciesState& species,
                         Index step) {
  StepDiagnostics d;
  d.step = step;
  d.time = flow.time;
  const VectorX vol = cell_volumes(mesh, flow.surface_height);
  d.total_A = vol.dot(species.fields.row(kA).transpose());
  d.total_O = vol.dot(species.fields.row(kO).transpose());
  d.kinetic_energy = 0.5 * flow.velocity.colwise().squaredNorm().transpose().dot(vol);
  d.volume = water_volume(mesh, flow.surface_height);
  d.speed_integral = flow.velocity.colwise().norm().transpose().dot(vol);
  return d;
}

double cost_raw(const Mesh& mesh, const SpeciesState& final_species,
                const VectorX& surface_height, const std::vector<StepDiagnostics>& series,
                const ObjectiveSpec& spec, double dt) {
  if (!spec.use_time_integrated_cost) {
    return -volume_integral(mesh, final_species.fields.row(kA).transpose(), surface_height);
  }
  double sum = 0.0;
  for (std::size_t n = 1; n < series.size(); ++n) sum += dt * series[n].total_A;
  return -sum;
}

double constraint_velocity(const std::vector<StepDiagnostics>& series, double dt) {
  double sum = 0.0;
  for (std::size_t n = 1; n < series.size(); ++n) sum += dt * series[n].speed_integral;
  return sum;
}

double constraint_oxygen(const std::vector<StepDiagnostics>& series) {
  if (series.empty()) throw std::invalid_argument("constraint_oxygen: empty diagnostics");
  if (series.size() == 1) return series.front().total_O;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < series.size(); ++n) m = std::min(m, series[n].total_O);
  return m;
}

void penalized_cost(ObjectiveReport& report, const ObjectiveSpec& spec) {
  report.penalty_velocity = spec.m1 * std::max(spec.c1 - report.velocity_integral, 0.0);
  report.penalty_oxygen = spec.m2 * std::max(spec.c2 - report.oxygen_min_integral, 0.0);
  report.j_tilde = report.j_raw + report.penalty_velocity + report.penalty_oxygen;
}

SimulationResult simulate(const Mesh& mesh, const Scenario& sc, const Controls& x,
                          const StepObserver& observer) {
  validate(x);
  validate(sc);
  const double dt = sc.hydro.dt;
  const Index n_steps = step_count(sc.objective.horizon, dt);

  SimulationResult res;
  res.flow = rest_state(mesh, x.height, sc.hydro.gravity);
  res.species = uniform_species(mesh, sc.initial);
  ObjectiveReport& rep = res.report;
  rep.controls = x;
  rep.timeseries.reserve(static_cast<std::size_t>(n_steps + 1));
  rep.timeseries.push_back(diagnose(mesh, res.flow, res.species, 0));
  if (observer) observer(0, res.flow, res.species);

  FlowSolver solver(mesh, sc.hydro, sc.paddle);
  double vel_cum = 0.0;
  for (Index n = 1; n <= n_steps; ++n) {
    try {
      solver.step(res.flow, x.omega);
      const SpeciesStepInfo info =
          step_species(mesh, res.species, res.flow, sc.bio, sc.forcings, dt, sc.bio_numerics);
      if (info.clipping_defect) ++rep.clipping_defects;
      if (info.total_mass > 0.0) {
        rep.max_clip_ratio = std::max(rep.max_clip_ratio, info.clipped_mass / info.total_mass);
      }
    } catch (const StepFailure& e) {
      throw StepFailure(fmt::format("step {} (H={}, omega={}): {}", n, x.height, x.omega, e.what()));
    }
    StepDiagnostics d = diagnose(mesh, res.flow, res.species, n);
    vel_cum += dt * d.speed_integral;
    d.vel_integral_cum = vel_cum;
    rep.timeseries.push_back(d);
    if (observer) observer(n, res.flow, res.species);
  }

  rep.j_raw = cost_raw(mesh, res.species, res.flow.surface_height, rep.timeseries,
                       sc.objective, dt);
  rep.velocity_integral = constraint_velocity(rep.timeseries, dt);
  rep.oxygen_min_integral = constraint_oxygen(rep.timeseries);
  const StepDiagnostics& last = rep.timeseries.back();
  rep.final_mean_A = last.volume > 0.0 ? last.total_A / last.volume : 0.0;
  penalized_cost(rep, sc.objective);
  return res;
}

}  // namespace raceway
