#include "raceway/config.hpp"
#include "raceway/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace raceway;
namespace fs = std::filesystem;

namespace {

const std::string kExample = std::string(RACEWAY_SOURCE_DIR) + "/config/example.cfg";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("raceway_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("shipped example loads with the reference scenario") {
  const RunConfig cfg = load_config(kExample);
  CHECK(cfg.optimizer.bounds.h_min == 0.2);
  CHECK(cfg.optimizer.bounds.h_max == 0.5);
  CHECK(cfg.optimizer.bounds.w_min == 0.1);
  CHECK(cfg.optimizer.bounds.w_max == 0.9);
  CHECK(cfg.scenario.objective.c1 == 0.0);
  CHECK(cfg.scenario.objective.c2 == 4.0);
  CHECK(cfg.scenario.objective.horizon == 86400.0);
  CHECK(cfg.geometry.straight_length == 20.0);
  CHECK(cfg.geometry.outer_radius == 2.2);
  CHECK(cfg.scenario.paddle.force_magnitude == 10.0);
  CHECK(cfg.scenario.paddle.paddle_length == 0.4);
  CHECK(cfg.scenario.paddle.axis == Vector3(5.0, 1.2, 0.5));
  CHECK(cfg.scenario.initial[kA] == 70.0);
  CHECK(cfg.scenario.forcings.kind == Forcings::Kind::Constant);
  CHECK(cfg.scenario.forcings.temperature == 20.0);
  CHECK(cfg.mesh.n_streamwise == 48);
}

TEST_CASE("validation names the violated identity") {
  const std::string msg = error_of("geometry.R = 2.5\n");
  CHECK(msg.find("R = r + W") != std::string::npos);
  CHECK(msg.find("t.cfg") != std::string::npos);
}

TEST_CASE("strict parsing") {
  CHECK(error_of("geometry.Q = 1\n").find("unknown key 'geometry.Q'") != std::string::npos);
  CHECK(error_of("\n\ngeometry.L = abc\n").find("t.cfg:3") != std::string::npos);
  CHECK(error_of("hydro.dt = 0.5\nhydro.dt = 0.25\n").find("repeated") != std::string::npos);
  CHECK(error_of("geometry.L 20\n").find("expected") != std::string::npos);
  CHECK(error_of("mesh.n_sigma = 2.5\n").find("bad value") != std::string::npos);
  CHECK(error_of("bio.forcing = sometimes\n").find("bad value") != std::string::npos);
  CHECK(error_of("# only a comment\n   \n").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/raceway.cfg"), ConfigError);
}

TEST_CASE("resolved echo reloads to an identical config") {
  const RunConfig a = load_config(kExample);
  const std::string text = format_config(a);
  const RunConfig b = parse_config(text, "echo");
  CHECK(format_config(b) == text);

  // Every registered key appears exactly once in the echo.
  const std::string lines = "\n" + text;
  for (const std::string& key : config_keys()) {
    const auto first = lines.find("\n" + key + " = ");
    REQUIRE_MESSAGE(first != std::string::npos, key);
    REQUIRE(lines.find("\n" + key + " = ", first + 1) == std::string::npos);
  }

  // Values that need all 17 digits survive.
  const RunConfig c = parse_config("hydro.mu = 0.1000000000000000055511151231257827\n"
                                   "bio.mu_max = 1.2345678901234567e-05\n");
  const RunConfig d = parse_config(format_config(c));
  CHECK(d.scenario.hydro.viscosity == c.scenario.hydro.viscosity);
  CHECK(d.scenario.bio.mu_max == c.scenario.bio.mu_max);
}

TEST_CASE("CSV headers") {
  CHECK(timeseries_csv({}) == "step,t,total_A,total_O,kinetic_energy,volume,vel_integral_cum\n");
  CHECK(report_csv({}) ==
        "H,omega,j_raw,vel_integral,oxy_min_integral,penalty_vel,penalty_oxy,j_tilde\n");
  CHECK(trace_csv({}) == "iter,move,H,omega,j_raw,penalty_total,j_tilde_best\n");
  CHECK(reactor_csv({}) == "t,A,P1,P2,N1,N2,N3,D,O\n");

  ObjectiveReport r;
  r.controls = Controls{0.1, 0.3};
  r.j_raw = 1.0 / 3.0;
  const std::string csv = report_csv({r, r});
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    REQUIRE(std::count(line.begin(), line.end(), ',') == 7);
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(csv.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("snapshot layout, determinism and round trip") {
  const Mesh mesh = build_mesh(RacewayGeometry{20.0, 2.0, 0.2, 2.2}, 4, 2, 2);
  HydroConfig hc;
  PaddlewheelSpec paddle;
  FlowSolver solver(mesh, hc, paddle);
  FlowState flow = rest_state(mesh, 0.6, hc.gravity);
  for (int n = 0; n < 3; ++n) solver.step(flow, 0.7);
  SpeciesState species = uniform_species(mesh, SpeciesVector<double>::LinSpaced(1.0, 8.0));
  for (Index c = 0; c < mesh.n_cells(); ++c) species.fields(kA, c) = 70.0 + 0.125 * c;

  const fs::path dir = scratch("snapshot");
  const std::string path = (dir / "snapshot_3.dat").string();
  write_snapshot(path, mesh, flow, species, 3);
  const std::string first = slurp(path);
  write_snapshot(path, mesh, flow, species, 3);
  CHECK(slurp(path) == first);
  CHECK(first.rfind("# raceway snapshot\n", 0) == 0);
  CHECK(first.find(std::string("# ") + kSnapshotColumns) != std::string::npos);

  const Snapshot snap = read_snapshot(path);
  CHECK(snap.n_streamwise == 4);
  CHECK(snap.n_transverse == 2);
  CHECK(snap.n_sigma == 2);
  CHECK(snap.step == 3);
  CHECK(snap.time == doctest::Approx(flow.time));
  REQUIRE(snap.records.rows() == 16);
  REQUIRE(snap.records.cols() == 18);

  const Matrix3X centers = cell_centers(mesh, flow.surface_height);
  Index row = 0;
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 2; ++j) {
      for (Index k = 0; k < 2; ++k, ++row) {
        const Index c = mesh.cell(mesh.column(i, j), k);
        REQUIRE(snap.records(row, 0) == i);
        REQUIRE(snap.records(row, 1) == j);
        REQUIRE(snap.records(row, 2) == k);
        for (int d = 0; d < 3; ++d) {
          REQUIRE(snap.records(row, 3 + d) == doctest::Approx(centers(d, c)).epsilon(1e-8));
          REQUIRE(snap.records(row, 6 + d) == doctest::Approx(flow.velocity(d, c)).epsilon(1e-8));
        }
        REQUIRE(snap.records(row, 9) == doctest::Approx(flow.pressure[c]).epsilon(1e-8));
        for (int s = 0; s < kNumSpecies; ++s) {
          REQUIRE(snap.records(row, 10 + s) ==
                  doctest::Approx(species.fields(s, c)).epsilon(1e-8));
        }
      }
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("write failures name the path") {
  try {
    write_text("/nonexistent-dir/x.csv", "a");
    FAIL("expected failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
  }
}
