#include "raceway/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace raceway;

namespace {

RacewayGeometry pond() { return RacewayGeometry{20.0, 2.0, 0.2, 2.2}; }

}  // namespace

TEST_CASE("contains_plan examples") {
  const RacewayGeometry g = pond();
  CHECK(contains_plan(g, 10.0, 1.2));
  CHECK(contains_plan(g, 10.0, -1.2));
  CHECK_FALSE(contains_plan(g, 0.0, 0.0));
  CHECK_FALSE(contains_plan(g, 10.0, 0.0));
  CHECK_FALSE(contains_plan(g, -3.0, 0.0));
  CHECK_FALSE(contains_plan(g, 20.0 + 3.0 / std::sqrt(2.0), 3.0 / std::sqrt(2.0)));
  // Boundary points count as inside.
  CHECK(contains_plan(g, 10.0, 2.2));
  CHECK(contains_plan(g, -2.2, 0.0));
}

TEST_CASE("contains_plan is symmetric about the long axis") {
  const RacewayGeometry g = pond();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-3.0, 23.0), uy(-3.0, 3.0);
  for (int n = 0; n < 100000; ++n) {
    const double x = ux(rng), y = uy(rng);
    REQUIRE(contains_plan(g, x, y) == contains_plan(g, x, -y));
  }
}

TEST_CASE("plan_area closed form") {
  const RacewayGeometry g = pond();
  CHECK(plan_area(g) == doctest::Approx(80.0 + 4.8 * std::numbers::pi).epsilon(1e-14));

  // Degenerate oval with no straights and no island is a disk.
  const RacewayGeometry disk{0.0, 1.5, 0.0, 1.5};
  CHECK(plan_area(disk) == doctest::Approx(std::numbers::pi * 1.5 * 1.5).epsilon(1e-14));

  const RacewayGeometry twice{40.0, 4.0, 0.4, 4.4};
  CHECK(plan_area(twice) == doctest::Approx(4.0 * plan_area(g)).epsilon(1e-14));
}

TEST_CASE("plan_area matches a Monte Carlo inclusion estimate") {
  const RacewayGeometry g = pond();
  std::mt19937_64 rng(12345);
  const double x0 = -2.2, x1 = 22.2, y0 = -2.2, y1 = 2.2;
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  const int n = 10'000'000;
  long hits = 0;
  for (int i = 0; i < n; ++i) hits += contains_plan(g, ux(rng), uy(rng)) ? 1 : 0;
  const double estimate = (x1 - x0) * (y1 - y0) * static_cast<double>(hits) / n;
  CHECK(std::abs(estimate - plan_area(g)) / plan_area(g) < 1e-3);
}

TEST_CASE("validate enforces positivity and R = r + W") {
  CHECK_NOTHROW(validate(pond()));
  CHECK_THROWS_AS(validate(RacewayGeometry{20.0, 2.0, 0.2, 2.3}), ConfigError);
  CHECK_THROWS_AS(validate(RacewayGeometry{0.0, 2.0, 0.2, 2.2}), ConfigError);
  CHECK_THROWS_AS(validate(RacewayGeometry{20.0, 2.0, -0.2, 1.8}), ConfigError);
  try {
    validate(RacewayGeometry{20.0, 2.0, 0.2, 2.5});
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("R = r + W") != std::string::npos);
  }
}

TEST_CASE("coarse mesh of the reference pond") {
  const Mesh mesh = build_mesh(pond(), 48, 6, 6);
  CHECK(mesh.n_columns() == 48 * 6);
  CHECK(mesh.n_cells() == 48 * 6 * 6);
  CHECK(mesh.plan_cell_areas().sum() == doctest::Approx(plan_area(pond())).epsilon(0.02));
  CHECK(mesh.centerline_length() == doctest::Approx(centerline_length(pond())).epsilon(1e-10));
  CHECK(centerline_length(pond()) == doctest::Approx(40.0 + 2.4 * std::numbers::pi));
  CHECK(centerline_length(pond()) == doctest::Approx(47.540).epsilon(1e-4));

  for (Index c = 0; c < mesh.n_columns(); ++c) {
    const auto x = mesh.cell_centers_plan().col(c);
    REQUIRE(contains_plan(pond(), x.x(), x.y()));
    REQUIRE(mesh.plan_cell_areas()[c] > 0.0);
  }
}

TEST_CASE("fine mesh area is exact to 1e-6") {
  const Mesh mesh = build_mesh(pond(), 96, 8, 2);
  CHECK(std::abs(mesh.plan_cell_areas().sum() - plan_area(pond())) / plan_area(pond()) < 1e-6);
}

TEST_CASE("streamwise neighbours form a single cycle") {
  const Mesh mesh = build_mesh(pond(), 48, 6, 6);
  std::set<Index> seen;
  Index i = 0;
  for (Index n = 0; n < mesh.n_streamwise(); ++n) {
    seen.insert(i);
    REQUIRE(mesh.prev_streamwise(mesh.next_streamwise(i)) == i);
    i = mesh.next_streamwise(i);
  }
  CHECK(i == 0);
  CHECK(static_cast<Index>(seen.size()) == mesh.n_streamwise());
  CHECK(mesh.next_streamwise(mesh.n_streamwise() - 1) == 0);
}

TEST_CASE("faces connect the periodic loop and carry exact normals") {
  const Mesh mesh = build_mesh(pond(), 48, 6, 6);
  // Last streamwise column is adjacent to the first.
  bool wraps = false;
  for (const PlanFace& f : mesh.faces()) {
    const Index a = f.owner / mesh.n_transverse();
    const Index b = f.neighbour / mesh.n_transverse();
    if ((a == mesh.n_streamwise() - 1 && b == 0) || (b == mesh.n_streamwise() - 1 && a == 0)) {
      wraps = true;
    }
    REQUIRE(f.normal.norm() == doctest::Approx(1.0));
    REQUIRE(f.length > 0.0);
    REQUIRE(f.distance > 0.0);
  }
  CHECK(wraps);
  const Index streamwise_faces = mesh.n_streamwise() * mesh.n_transverse();
  const Index transverse_faces = mesh.n_streamwise() * (mesh.n_transverse() - 1);
  CHECK(static_cast<Index>(mesh.faces().size()) == streamwise_faces + transverse_faces);

  // Closed cells: the integrated normals of each cell including walls sum to zero, so the
  // interior faces of a column balance the wall contribution. For interior columns (away
  // from walls) the interior faces alone must close.
  for (Index i = 0; i < mesh.n_streamwise(); ++i) {
    for (Index j = 1; j + 1 < mesh.n_transverse(); ++j) {
      const Index c = mesh.column(i, j);
      Vector2 sum = Vector2::Zero();
      for (Index fi : mesh.column_faces(c)) {
        const PlanFace& f = mesh.faces()[static_cast<std::size_t>(fi)];
        sum += (f.owner == c ? 1.0 : -1.0) * f.length * f.normal;
      }
      REQUIRE(sum.norm() < 1e-12);
    }
  }
}

TEST_CASE("sigma layers partition the column uniformly") {
  const Mesh mesh = build_mesh(pond(), 48, 6, 6);
  const double eta = 0.3;
  for (Index k = 0; k < 6; ++k) {
    CHECK(mesh.layer_center_z(k, eta) == doctest::Approx((k + 0.5) * eta / 6.0));
  }
}

TEST_CASE("mesh rejects counts below the minimum") {
  CHECK_THROWS_AS(build_mesh(pond(), 48, 1, 6), ConfigError);
  CHECK_THROWS_AS(build_mesh(pond(), 48, 6, 1), ConfigError);
  CHECK_THROWS_AS(build_mesh(pond(), 47, 6, 6), ConfigError);
  CHECK_THROWS_AS(build_mesh(pond(), 2, 6, 6), ConfigError);
  CHECK_NOTHROW(build_mesh(pond(), 4, 2, 2));
}

TEST_CASE("summary names counts, area and centerline length") {
  const Mesh mesh = build_mesh(pond(), 48, 6, 6);
  const std::string s = mesh.summary();
  CHECK(s.find("48") != std::string::npos);
  CHECK(s.find("95.0") != std::string::npos);
  CHECK(s.find("47.5398") != std::string::npos);
}
