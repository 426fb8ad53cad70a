#include "raceway/optimizer.hpp"

#include <doctest.h>

#include <cmath>

using namespace raceway;

namespace {

RacewayGeometry pond() { return RacewayGeometry{20.0, 2.0, 0.2, 2.2}; }

template <int Dim>
bool best_is_monotone(const NelderMeadResult<Dim>& r) {
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    if (r.trace[i].best_value > r.trace[i - 1].best_value) return false;
  }
  return true;
}

Scenario tiny_scenario() {
  Scenario sc;
  sc.objective.horizon = 20.0;
  sc.hydro.dt = 0.5;
  sc.bio.mu_max = 2e-3;
  sc.bio.respiration_rate = 2e-4;
  return sc;
}

}  // namespace

TEST_CASE("bound_penalty examples") {
  const ControlBounds b{0.2, 0.5, 0.1, 0.9};
  CHECK(bound_penalty(Vector2(0.3, 0.5), b, 1e3) == 0.0);
  CHECK(bound_penalty(Vector2(0.1, 0.5), b, 1e3) == doctest::Approx(10.0));
  CHECK(bound_penalty(Vector2(0.6, 1.0), b, 1.0) == doctest::Approx(0.02));
  double prev = bound_penalty(Vector2(0.1, 0.5), b, 1e3);
  for (int i = 1; i <= 40; ++i) {
    const double v = bound_penalty(Vector2(0.2 - 0.1 / std::pow(2.0, i), 0.5), b, 1e3);
    REQUIRE(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-20);
  CHECK_THROWS(bound_penalty(Vector2(0.3, 0.5), b, 0.0));
  CHECK(clamp_to_box(Vector2(0.1, 1.2), b) == Vector2(0.2, 0.9));
}

TEST_CASE("quadratic bowl") {
  NelderMeadOptions<2> o;
  o.x_tol = 1e-9;
  o.f_tol = 0.0;
  o.max_iters = 200;
  const auto r = nelder_mead<2>(
      [](const Vector2& x) { return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 2.0) * (x[1] - 2.0); },
      Vector2(0.0, 0.0), o);
  CHECK((r.x - Vector2(1.0, 2.0)).norm() <= 1e-6);
  CHECK(r.trace.back().iteration <= 200);
  CHECK(r.converged);
  CHECK(best_is_monotone(r));
}

TEST_CASE("Rosenbrock valley") {
  NelderMeadOptions<2> o;
  o.x_tol = 1e-10;
  o.f_tol = 0.0;
  o.max_iters = 500;
  const auto r = nelder_mead<2>(
      [](const Vector2& x) {
        return (1.0 - x[0]) * (1.0 - x[0]) + 100.0 * std::pow(x[1] - x[0] * x[0], 2);
      },
      Vector2(-1.2, 1.0), o);
  CHECK((r.x - Vector2(1.0, 1.0)).norm() <= 1e-4);
  CHECK(r.trace.back().iteration <= 500);
  CHECK(best_is_monotone(r));
}

TEST_CASE("linear objective is driven onto the lower H face") {
  const ControlBounds b{0.2, 0.5, 0.1, 0.9};
  const double weight = 1e4;
  auto f = [&](const Vector2& x) { return x[0] + bound_penalty(x, b, weight); };
  NelderMeadOptions<2> o;
  o.x_tol = 1e-10;
  o.f_tol = 0.0;
  o.max_iters = 500;
  const auto r = nelder_mead<2>(f, Vector2(0.35, 0.5), o);
  CHECK(std::abs(r.x[0] - 0.2) <= 1e-3);
  CHECK(best_is_monotone(r));

  // Dense scan of the penalized function along H.
  double best_h = 0.0, best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100000; ++i) {
    const double h = 0.15 + 0.1 * i / 100000.0;
    const double v = f(Vector2(h, 0.5));
    if (v < best_f) {
      best_f = v;
      best_h = h;
    }
  }
  CHECK(std::abs(r.x[0] - best_h) <= 1e-3);
}

TEST_CASE("stop rules and budget") {
  NelderMeadOptions<2> o;
  o.x_tol = 0.0;
  o.f_tol = 0.0;
  o.max_iters = 7;
  auto bowl = [](const Vector2& x) { return x.squaredNorm(); };
  const auto r = nelder_mead<2>(bowl, Vector2(3.0, 4.0), o);
  CHECK(r.trace.back().iteration == 7);
  CHECK_FALSE(r.converged);

  o.max_iters = 1000;
  o.max_evals = 25;
  const auto s = nelder_mead<2>(bowl, Vector2(3.0, 4.0), o);
  CHECK(s.evaluations <= 25);
  CHECK(s.trace.back().evaluations == s.evaluations);

  o.max_evals = 0;
  o.reflection = -1.0;
  CHECK_THROWS_AS(nelder_mead<2>(bowl, Vector2(3.0, 4.0), o), ConfigError);
}

TEST_CASE("NaN values count as +infinity") {
  NelderMeadOptions<2> o;
  o.max_iters = 200;
  const auto r = nelder_mead<2>(
      [](const Vector2& x) {
        return x[0] < 0.0 ? std::nan("") : (x[0] - 0.5) * (x[0] - 0.5) + x[1] * x[1];
      },
      Vector2(1.0, 1.0), o);
  CHECK(std::isfinite(r.f));
  CHECK(r.x[0] >= 0.0);
  CHECK_THROWS_AS(nelder_mead<2>([](const Vector2&) { return std::nan(""); }, Vector2(0, 0), o),
                  std::runtime_error);
}

TEST_CASE("works in other dimensions") {
  using V3 = Eigen::Vector3d;
  NelderMeadOptions<3> o;
  o.x_tol = 1e-9;
  o.f_tol = 0.0;
  o.max_iters = 2000;
  const auto r = nelder_mead<3>([](const V3& x) { return (x - V3(1, -2, 3)).squaredNorm(); },
                                V3::Zero(), o);
  CHECK((r.x - V3(1, -2, 3)).norm() <= 1e-6);
}

TEST_CASE("degenerate bounds give a single simulation") {
  const Mesh mesh = build_mesh(pond(), 24, 4, 4);
  const ControlBounds b{0.3, 0.3, 0.4, 0.4};
  NelderMeadOptions<2> o;
  const RacewayOptimum opt = optimize_raceway(mesh, tiny_scenario(), b, Controls{0.3, 0.4}, o);
  CHECK(opt.evaluations.size() == 1);
  CHECK(opt.best.height == 0.3);
  CHECK(opt.best.omega == 0.4);
}

TEST_CASE("raceway search stays in the box and matches a coarse grid") {
  const Mesh mesh = build_mesh(pond(), 24, 4, 4);
  const Scenario sc = tiny_scenario();
  const ControlBounds b{0.2, 0.5, 0.1, 0.9};
  NelderMeadOptions<2> o;
  o.x_tol = 1e-4;
  o.f_tol = 1e-6;
  o.max_iters = 100;
  o.max_evals = 60;
  const RacewayOptimum opt = optimize_raceway(mesh, sc, b, Controls{0.3, 0.4}, o, 2);
  CHECK(opt.best.height >= b.h_min);
  CHECK(opt.best.height <= b.h_max);
  CHECK(opt.best.omega >= b.w_min);
  CHECK(opt.best.omega <= b.w_max);
  CHECK(opt.evaluations.size() <= 60);
  CHECK(best_is_monotone(opt.search));
  CHECK(opt.report.j_tilde <= opt.evaluations.front().report.j_tilde);

  ObjectiveEvaluator grid(mesh, sc, b);
  double grid_best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      grid_best = std::min(grid_best, grid.evaluate(Vector2(0.2 + 0.075 * i, 0.1 + 0.2 * j)));
    }
  }
  // omega barely moves this short run (about 1e-7 of the H sensitivity), so only the
  // relative agreement is meaningful here.
  CHECK(opt.report.j_tilde <= grid_best + 1e-6 * std::abs(grid_best));

  // Same search on one worker gives the same answer bit for bit.
  const RacewayOptimum serial = optimize_raceway(mesh, sc, b, Controls{0.3, 0.4}, o, 1);
  CHECK(serial.report.j_tilde == opt.report.j_tilde);
  CHECK(serial.search.trace.size() == opt.search.trace.size());
}

TEST_CASE("evaluator caches by clamped point and charges the bound penalty") {
  const Mesh mesh = build_mesh(pond(), 24, 4, 4);
  const ControlBounds b{0.2, 0.5, 0.1, 0.9};
  ObjectiveEvaluator ev(mesh, tiny_scenario(), b);
  ev.set_bound_weight(100.0);
  const double inside = ev.evaluate(Vector2(0.2, 0.5));
  const double outside = ev.evaluate(Vector2(0.1, 0.5));
  CHECK(ev.simulations() == 1);
  CHECK(outside == doctest::Approx(inside + 100.0 * 0.01).epsilon(1e-14));
  CHECK(ev.lookup(Vector2(0.15, 0.5)) != nullptr);
  CHECK(ev.lookup(Vector2(0.3, 0.5)) == nullptr);
}
