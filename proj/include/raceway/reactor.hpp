#pragma once

#include "raceway/bio.hpp"
#include "raceway/types.hpp"

#include <vector>

namespace raceway {

/// Well-mixed 0-D reduction of the species system.
struct ReactorState {
  SpeciesVector<double> values = SpeciesVector<double>::Zero();
  double time = 0.0;
};

/// One classical RK4 step of the reaction system; throws StepFailure on non-finite results.
ReactorState rk4_step(const ReactorState& state, const BioParams& p, const Forcings& f,
                      double depth, double dt);

/// Trajectory of n_steps RK4 steps, including the initial state (n_steps + 1 samples).
std::vector<ReactorState> integrate(const ReactorState& state0, const BioParams& p,
                                    const Forcings& f, double depth, double dt,
                                    Index n_steps);

}  // namespace raceway
