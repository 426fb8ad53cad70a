#pragma once

#include "raceway/bio.hpp"
#include "raceway/geometry.hpp"
#include "raceway/hydro.hpp"
#include "raceway/objective.hpp"
#include "raceway/optimizer.hpp"

#include <string>

namespace raceway {

struct MeshCounts {
  Index n_streamwise = 48;
  Index n_transverse = 6;
  Index n_sigma = 6;
};

struct ReactorConfig {
  double dt = 60.0;
  Index steps = 1440;
  double depth = 0.0;  // attenuation coordinate used by the 0-D model
};

struct OutputConfig {
  std::string directory = "out";
  Index snapshot_stride = 0;  // 0 writes no snapshots
};

struct OptimizerConfig {
  ControlBounds bounds;
  Controls start;
  NelderMeadOptions<2> nelder_mead;
  double bound_weight = 0.0;  // <= 0: automatic
};

/// Complete run configuration; every field has a key in the text format.
struct RunConfig {
  RacewayGeometry geometry;
  MeshCounts mesh;
  Scenario scenario;  // hydro, paddle, bio, forcing, initial species, objective
  double initial_height = 0.3;
  double omega = 0.4;  // paddle speed used by `simulate`
  OptimizerConfig optimizer;
  ReactorConfig reactor;
  OutputConfig output;

  Controls controls() const { return {initial_height, omega}; }
};

/// Checks every block; throws ConfigError naming the violated invariant.
void validate(const RunConfig& cfg);

/// Parses `block.key = value` lines ('#' starts a comment). Unknown or repeated keys and
/// malformed values throw ConfigError with the source name and line number. Keys that
/// are absent keep their defaults. The result is validated.
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

/// Every key with its resolved value, in a form parse_config reads back identically.
std::string format_config(const RunConfig& cfg);

/// All accepted keys in canonical order.
std::vector<std::string> config_keys();

Mesh build_mesh(const RunConfig& cfg);

}  // namespace raceway
