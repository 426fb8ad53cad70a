#include "raceway/reactor.hpp"

#include <fmt/format.h>

namespace raceway {

namespace {

std::string dump(const ReactorState& s) {
  std::string out = fmt::format("t={}", s.time);
  for (int i = 0; i < kNumSpecies; ++i) {
    out += fmt::format(" {}={}", kSpeciesNames[i], s.values[i]);
  }
  return out;
}

}  // namespace

ReactorState rk4_step(const ReactorState& state, const BioParams& p, const Forcings& f,
                      double depth, double dt) {
  if (!(dt > 0.0)) throw ConfigError("rk4_step requires dt > 0");
  const double t = state.time;
  const SpeciesVector<double>& y = state.values;
  const SpeciesVector<double> k1 = reaction_rhs<double>(p, f, y, depth, t);
  const SpeciesVector<double> k2 = reaction_rhs<double>(p, f, y + 0.5 * dt * k1, depth, t + 0.5 * dt);
  const SpeciesVector<double> k3 = reaction_rhs<double>(p, f, y + 0.5 * dt * k2, depth, t + 0.5 * dt);
  const SpeciesVector<double> k4 = reaction_rhs<double>(p, f, y + dt * k3, depth, t + dt);

  ReactorState next;
  next.values = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next.time = t + dt;
  if (!next.values.allFinite()) {
    throw StepFailure("reactor step produced non-finite values; state before step: " +
                      dump(state));
  }
  return next;
}

std::vector<ReactorState> integrate(const ReactorState& state0, const BioParams& p,
                                    const Forcings& f, double depth, double dt,
                                    Index n_steps) {
  if (n_steps < 1) throw ConfigError("integrate requires n_steps >= 1");
  std::vector<ReactorState> out;
  out.reserve(static_cast<std::size_t>(n_steps + 1));
  out.push_back(state0);
  for (Index n = 0; n < n_steps; ++n) out.push_back(rk4_step(out.back(), p, f, depth, dt));
  return out;
}

}  // namespace raceway
