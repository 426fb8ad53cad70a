#include "raceway/reactor.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace raceway;

namespace {

BioParams fast_params() {
  BioParams p;
  p.mu_max = 2e-3;
  p.death_rate = 1e-4;
  p.respiration_rate = 2e-4;
  p.rate_P2_to_PO4 = 3e-4;
  p.sed_rate = 0.0;
  p.nitrif_rate = 2e-4;
  p.rate_N2_to_NO3 = 1.5e-4;
  p.degrad_rate_D = 2.5e-4;
  p.reaeration_rate = 5e-4;
  return p;
}

ReactorState start() {
  ReactorState s;
  s.values << 70.0, 1.0, 0.5, 5.0, 2.0, 2.0, 5.0, 8.0;
  return s;
}

Vector2 pools(const BioParams& p, const SpeciesVector<double>& v) {
  return Vector2(v[kP1] + v[kP2] + p.stoich_P * v[kA],
                 v[kN1] + v[kN2] + v[kN3] + p.stoich_N * v[kA]);
}

}  // namespace

TEST_CASE("zero rates leave the state unchanged") {
  BioParams p;
  p.mu_max = p.death_rate = p.respiration_rate = p.rate_P2_to_PO4 = p.sed_rate = 0.0;
  p.nitrif_rate = p.rate_N2_to_NO3 = p.degrad_rate_D = p.reaeration_rate = 0.0;
  p.benthic_demand = 0.0;
  const ReactorState s0 = start();
  const ReactorState s1 = rk4_step(s0, p, Forcings{}, 0.1, 30.0);
  CHECK((s1.values - s0.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s1.time == 30.0);
}

TEST_CASE("RK4 converges at fourth order") {
  const BioParams p = fast_params();
  const Forcings f;
  const double horizon = 400.0;  // P1 runs out near 800 s and the trajectory kinks there
  auto endpoint = [&](int n) {
    return integrate(start(), p, f, 0.1, horizon / n, n).back().values;
  };
  const SpeciesVector<double> e1 = endpoint(25), e2 = endpoint(50), e4 = endpoint(100);
  const double order = std::log2((e1 - e2).norm() / (e2 - e4).norm());
  CHECK(order >= 3.7);
}

TEST_CASE("pools are conserved per step without sedimentation") {
  const BioParams p = fast_params();
  ReactorState s = start();
  for (int n = 0; n < 200; ++n) {
    const ReactorState next = rk4_step(s, p, Forcings{}, 0.1, 10.0);
    const Vector2 a = pools(p, s.values), b = pools(p, next.values);
    REQUIRE(std::abs(b[0] - a[0]) <= 1e-12 * a[0]);
    REQUIRE(std::abs(b[1] - a[1]) <= 1e-12 * a[1]);
    s = next;
  }
}

TEST_CASE("integrate contract") {
  const BioParams p = fast_params();
  CHECK_THROWS_AS(integrate(start(), p, Forcings{}, 0.1, 1.0, 0), ConfigError);
  CHECK_THROWS_AS(rk4_step(start(), p, Forcings{}, 0.1, 0.0), ConfigError);
  const auto traj = integrate(start(), p, Forcings{}, 0.1, 2.0, 5);
  CHECK(traj.size() == 6);
  CHECK(traj.back().time == doctest::Approx(10.0));
  // Bitwise deterministic.
  const auto again = integrate(start(), p, Forcings{}, 0.1, 2.0, 5);
  CHECK((again.back().values - traj.back().values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("algae grow initially with ample nutrients and light") {
  BioParams p = fast_params();
  p.atten_depth = 0.0;
  p.atten_algae = 0.0;
  ReactorState s = start();
  s.values[kP1] = 50.0;
  s.values[kN1] = 50.0;
  s.values[kN3] = 50.0;
  const auto traj = integrate(s, p, Forcings{}, 0.0, 5.0, 20);
  for (std::size_t n = 1; n < traj.size(); ++n) {
    REQUIRE(traj[n].values[kA] > traj[n - 1].values[kA]);
  }
}

TEST_CASE("oxygen never rises in the dark without reaeration") {
  BioParams p = fast_params();
  p.reaeration_rate = 0.0;
  p.benthic_demand = 0.0;
  Forcings f;
  f.light = 0.0;
  const auto traj = integrate(start(), p, f, 0.1, 10.0, 300);
  for (std::size_t n = 1; n < traj.size(); ++n) {
    REQUIRE(traj[n].values[kO] <= traj[n - 1].values[kO]);
  }
  CHECK(traj.back().values[kO] < traj.front().values[kO]);
}

TEST_CASE("non-finite state is reported with a dump") {
  BioParams p = fast_params();
  ReactorState s = start();
  s.values[kD] = std::numeric_limits<double>::infinity();
  try {
    rk4_step(s, p, Forcings{}, 0.1, 1.0);
    FAIL("expected failure");
  } catch (const StepFailure& e) {
    CHECK(std::string(e.what()).find("D=") != std::string::npos);
  }
}
