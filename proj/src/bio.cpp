#include "raceway/bio.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace raceway {

void validate(const BioParams& p) {
  const double values[] = {p.diff_A,        p.diff_P,          p.diff_N,
                           p.diff_D,        p.diff_O,          p.death_rate,
                           p.respiration_rate, p.half_sat_N,    p.half_sat_P,
                           p.stoich_N,      p.stoich_P,        p.frac_assim_P,
                           p.rate_P2_to_PO4, p.sed_rate,       p.nitrif_rate,
                           p.frac_assim_N,  p.rate_N2_to_NO3,  p.photo_O2,
                           p.degrad_rate_D, p.O2_per_nitrif,   p.benthic_demand,
                           p.reaeration_rate, p.mu_max,        p.atten_depth,
                           p.atten_algae};
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("bio parameters must be finite and nonnegative");
    }
  }
  if (!(p.theta_coeff > 0.0)) throw ConfigError("bio.theta_coeff must be positive");
  if (!(p.O2_saturation > 0.0)) throw ConfigError("bio.O2_saturation must be positive");
  if (p.frac_assim_P > 1.0 || p.frac_assim_N > 1.0) {
    throw ConfigError("bio assimilable fractions must lie in [0, 1]");
  }
}

void validate(const Forcings& f) {
  if (f.kind == Forcings::Kind::Constant && !(f.light >= 0.0)) {
    throw ConfigError("forcing light intensity must be nonnegative");
  }
  if (!(f.period > 0.0)) throw ConfigError("forcing period must be positive");
}

SpeciesState uniform_species(const Mesh& mesh, const SpeciesVector<double>& values) {
  SpeciesState s;
  s.fields = values.replicate(1, mesh.n_cells());
  return s;
}

SpeciesStepInfo step_species(const Mesh& mesh, SpeciesState& state, const FlowState& flow,
                             const BioParams& p, const Forcings& f, double dt,
                             const BioNumerics& numerics) {
  SpeciesStepInfo info;
  const TransportStep step = last_step_transport(mesh, flow, dt);

  double max_diff = 0.0;
  for (int s = 0; s < kNumSpecies; ++s) max_diff = std::max(max_diff, p.diffusivity(s));
  info.transport_number = explicit_transport_number(mesh, step, max_diff);
  if (info.transport_number > numerics.cfl_max) {
    throw StepFailure(fmt::format(
        "species CFL violation at t={}: transport number {:.4g} > {:.4g}; suggested dt <= {:.4g}",
        state.time, info.transport_number, numerics.cfl_max,
        0.9 * dt * numerics.cfl_max / info.transport_number));
  }

  for (int s = 0; s < kNumSpecies; ++s) {
    VectorX field = state.fields.row(s).transpose();
    transport_scalar(mesh, step, p.diffusivity(s), field);
    state.fields.row(s) = field.transpose();
  }

  const Index ns = mesh.n_sigma();
  const int sub = std::max(1, numerics.reaction_substeps);
  const double h = dt / sub;
  const VectorX& eta = flow.surface_height;
  for (Index c = 0; c < mesh.n_columns(); ++c) {
    for (Index k = 0; k < ns; ++k) {
      const Index cell = mesh.cell(c, k);
      const double z = mesh.layer_center_z(k, eta[c]);
      const double depth = p.attenuation_from_surface ? eta[c] - z : z;
      SpeciesVector<double> y = state.fields.col(cell);
      double t = state.time;
      for (int i = 0; i < sub; ++i) {
        y += h * reaction_rhs<double>(p, f, y, depth, t);
        t += h;
      }
      state.fields.col(cell) = y;
    }
  }

  const VectorX vol = cell_volumes(mesh, eta);
  for (Index cell = 0; cell < mesh.n_cells(); ++cell) {
    for (int s = 0; s < kNumSpecies; ++s) {
      double& v = state.fields(s, cell);
      if (!std::isfinite(v) || v > numerics.ceiling) {
        const Index col = cell / ns;
        throw StepFailure(fmt::format(
            "species {} non-finite or above ceiling ({}) at t={}, column {}, layer {}",
            kSpeciesNames[static_cast<std::size_t>(s)], v, state.time, col, cell % ns));
      }
      if (v < 0.0) {
        info.clipped_mass += -v * vol[cell];
        v = 0.0;
      }
      info.total_mass += v * vol[cell];
    }
  }
  info.clipping_defect = info.clipped_mass > numerics.clip_tolerance * info.total_mass;
  state.time += dt;
  return info;
}

Vector2 nutrient_pools(const Mesh& mesh, const SpeciesState& s, const VectorX& surface_height,
                       const BioParams& p) {
  const VectorX vol = cell_volumes(mesh, surface_height);
  const VectorX phosphorus = (s.fields.row(kP1) + s.fields.row(kP2) +
                              p.stoich_P * s.fields.row(kA)).transpose();
  const VectorX nitrogen = (s.fields.row(kN1) + s.fields.row(kN2) + s.fields.row(kN3) +
                            p.stoich_N * s.fields.row(kA)).transpose();
  return {vol.dot(phosphorus), vol.dot(nitrogen)};
}

}  // namespace raceway
