#pragma once

#include "raceway/bio.hpp"
#include "raceway/geometry.hpp"
#include "raceway/hydro.hpp"
#include "raceway/types.hpp"

#include <functional>
#include <vector>

namespace raceway {

struct Controls {
  double height = 0.3;  // H, m
  double omega = 0.4;   // rad/s
};

void validate(const Controls& x);

struct ControlBounds {
  double h_min = 0.2;
  double h_max = 0.5;
  double w_min = 0.1;
  double w_max = 0.9;
};

void validate(const ControlBounds& b);

struct ObjectiveSpec {
  double c1 = 0.0;  // lower bound on the space-time velocity integral
  double c2 = 4.0;  // lower bound on the oxygen integral at every step
  double m1 = 1.0;
  double m2 = 1.0;
  double horizon = 86400.0;  // T, s
  bool use_time_integrated_cost = false;
};

void validate(const ObjectiveSpec& spec);

/// Everything a simulation needs besides the mesh and the controls.
struct Scenario {
  HydroConfig hydro;
  PaddlewheelSpec paddle;
  BioParams bio;
  Forcings forcings;
  BioNumerics bio_numerics;
  SpeciesVector<double> initial =
      (SpeciesVector<double>() << 70.0, 1.0, 0.5, 5.0, 2.0, 2.0, 5.0, 8.0).finished();
  ObjectiveSpec objective;
};

void validate(const Scenario& sc);

/// Number of steps N = T / dt; throws ConfigError if T is not a whole number of steps.
Index step_count(double horizon, double dt);

struct StepDiagnostics {
  Index step = 0;
  double time = 0.0;
  double total_A = 0.0;
  double total_O = 0.0;
  double kinetic_energy = 0.0;
  double volume = 0.0;
  double speed_integral = 0.0;    // integral of |v| over the domain at this step
  double vel_integral_cum = 0.0;  // dt-weighted sum of speed_integral over steps 1..n
};

struct ObjectiveReport {
  Controls controls;
  double j_raw = 0.0;
  double velocity_integral = 0.0;
  double oxygen_min_integral = 0.0;
  double penalty_velocity = 0.0;
  double penalty_oxygen = 0.0;
  double j_tilde = 0.0;
  double final_mean_A = 0.0;  // volume mean of A at T
  double max_clip_ratio = 0.0;
  Index clipping_defects = 0;
  std::vector<StepDiagnostics> timeseries;  // steps 0..N
};

/// Sum over cells of value * cell volume.
double volume_integral(const Mesh& mesh, const VectorX& field, const VectorX& surface_height);

/// Diagnostics of one state; the cumulative velocity integral is left at zero.
StepDiagnostics diagnose(const Mesh& mesh, const FlowState& flow, const SpeciesState& species,
                         Index step);

/// -integral of A at T, or -sum_{n=1..N} dt * integral of A^n for the time-integrated variant.
double cost_raw(const Mesh& mesh, const SpeciesState& final_species,
                const VectorX& surface_height, const std::vector<StepDiagnostics>& series,
                const ObjectiveSpec& spec, double dt);

/// sum_{n=1..N} dt * integral of |v^n|.
double constraint_velocity(const std::vector<StepDiagnostics>& series, double dt);

/// min over n = 1..N of the oxygen integral (the initial state when N = 0).
double constraint_oxygen(const std::vector<StepDiagnostics>& series);

/// Fills the penalties and j_tilde from j_raw and the constraint values.
void penalized_cost(ObjectiveReport& report, const ObjectiveSpec& spec);

struct SimulationResult {
  FlowState flow;
  SpeciesState species;
  ObjectiveReport report;
};

/// Called after initialization (step 0) and after every step.
using StepObserver =
    std::function<void(Index step, const FlowState& flow, const SpeciesState& species)>;

/// Runs the coupled flow and species model from rest at height H with paddle speed omega.
SimulationResult simulate(const Mesh& mesh, const Scenario& sc, const Controls& x,
                          const StepObserver& observer = {});

}  // namespace raceway
