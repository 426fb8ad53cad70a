#include "raceway/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace raceway {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected a number");
  return out;
}

Index parse_index(const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected an integer");
  return static_cast<Index>(out);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected true or false");
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Access>
Field real(std::string key, Access access) {
  return {std::move(key),
          [access](RunConfig& c, const std::string& v) { access(c) = parse_double(v); },
          [access](const RunConfig& c) {
            return fmt::format("{}", access(const_cast<RunConfig&>(c)));
          }};
}

template <typename Access>
Field integer(std::string key, Access access) {
  return {std::move(key),
          [access](RunConfig& c, const std::string& v) {
            access(c) = static_cast<std::remove_reference_t<decltype(access(c))>>(parse_index(v));
          },
          [access](const RunConfig& c) {
            return fmt::format("{}", access(const_cast<RunConfig&>(c)));
          }};
}

template <typename Access>
Field boolean(std::string key, Access access) {
  return {std::move(key),
          [access](RunConfig& c, const std::string& v) { access(c) = parse_bool(v); },
          [access](const RunConfig& c) {
            return std::string(access(const_cast<RunConfig&>(c)) ? "true" : "false");
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    // geometry
    t.push_back(real("geometry.L", [](RunConfig& c) -> double& { return c.geometry.straight_length; }));
    t.push_back(real("geometry.W", [](RunConfig& c) -> double& { return c.geometry.channel_width; }));
    t.push_back(real("geometry.r", [](RunConfig& c) -> double& { return c.geometry.inner_radius; }));
    t.push_back(real("geometry.R", [](RunConfig& c) -> double& { return c.geometry.outer_radius; }));
    // mesh
    t.push_back(integer("mesh.n_streamwise", [](RunConfig& c) -> Index& { return c.mesh.n_streamwise; }));
    t.push_back(integer("mesh.n_transverse", [](RunConfig& c) -> Index& { return c.mesh.n_transverse; }));
    t.push_back(integer("mesh.n_sigma", [](RunConfig& c) -> Index& { return c.mesh.n_sigma; }));
    // paddle
    t.push_back(real("paddle.F", [](RunConfig& c) -> double& { return c.scenario.paddle.force_magnitude; }));
    t.push_back(real("paddle.rho", [](RunConfig& c) -> double& { return c.scenario.paddle.paddle_length; }));
    t.push_back(real("paddle.x1_0", [](RunConfig& c) -> double& { return c.scenario.paddle.axis.x(); }));
    t.push_back(real("paddle.x2_0", [](RunConfig& c) -> double& { return c.scenario.paddle.axis.y(); }));
    t.push_back(real("paddle.x3_0", [](RunConfig& c) -> double& { return c.scenario.paddle.axis.z(); }));
    t.push_back(real("paddle.omega", [](RunConfig& c) -> double& { return c.omega; }));
    // hydro
    t.push_back(real("hydro.mu", [](RunConfig& c) -> double& { return c.scenario.hydro.viscosity; }));
    t.push_back(real("hydro.dt", [](RunConfig& c) -> double& { return c.scenario.hydro.dt; }));
    t.push_back(real("hydro.div_tol", [](RunConfig& c) -> double& { return c.scenario.hydro.div_tol; }));
    t.push_back(real("hydro.pressure_tol", [](RunConfig& c) -> double& { return c.scenario.hydro.pressure_solver_tol; }));
    t.push_back(integer("hydro.pressure_max_iters", [](RunConfig& c) -> int& { return c.scenario.hydro.pressure_max_iters; }));
    t.push_back(real("hydro.gravity", [](RunConfig& c) -> double& { return c.scenario.hydro.gravity; }));
    t.push_back(real("hydro.cfl_max", [](RunConfig& c) -> double& { return c.scenario.hydro.cfl_max; }));
    t.push_back(integer("hydro.force_quadrature", [](RunConfig& c) -> int& { return c.scenario.hydro.force_quadrature; }));
    // bio parameters
#define RACEWAY_BIO(name) \
  t.push_back(real("bio." #name, [](RunConfig& c) -> double& { return c.scenario.bio.name; }))
    RACEWAY_BIO(diff_A);
    RACEWAY_BIO(diff_P);
    RACEWAY_BIO(diff_N);
    RACEWAY_BIO(diff_D);
    RACEWAY_BIO(diff_O);
    RACEWAY_BIO(death_rate);
    RACEWAY_BIO(respiration_rate);
    RACEWAY_BIO(half_sat_N);
    RACEWAY_BIO(half_sat_P);
    RACEWAY_BIO(stoich_N);
    RACEWAY_BIO(stoich_P);
    RACEWAY_BIO(frac_assim_P);
    RACEWAY_BIO(rate_P2_to_PO4);
    RACEWAY_BIO(sed_rate);
    RACEWAY_BIO(nitrif_rate);
    RACEWAY_BIO(frac_assim_N);
    RACEWAY_BIO(rate_N2_to_NO3);
    RACEWAY_BIO(photo_O2);
    RACEWAY_BIO(degrad_rate_D);
    RACEWAY_BIO(O2_per_nitrif);
    RACEWAY_BIO(O2_saturation);
    RACEWAY_BIO(benthic_demand);
    RACEWAY_BIO(reaeration_rate);
    RACEWAY_BIO(mu_max);
    RACEWAY_BIO(theta_coeff);
    RACEWAY_BIO(theta_ref);
    RACEWAY_BIO(atten_depth);
    RACEWAY_BIO(atten_algae);
#undef RACEWAY_BIO
    t.push_back(boolean("bio.attenuation_from_surface", [](RunConfig& c) -> bool& { return c.scenario.bio.attenuation_from_surface; }));
    t.push_back({"bio.forcing",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "constant") c.scenario.forcings.kind = Forcings::Kind::Constant;
                   else if (v == "diurnal") c.scenario.forcings.kind = Forcings::Kind::Diurnal;
                   else throw std::invalid_argument("expected constant or diurnal");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.scenario.forcings.kind == Forcings::Kind::Constant
                                          ? "constant" : "diurnal");
                 }});
    t.push_back(real("bio.temperature", [](RunConfig& c) -> double& { return c.scenario.forcings.temperature; }));
    t.push_back(real("bio.light", [](RunConfig& c) -> double& { return c.scenario.forcings.light; }));
    t.push_back(real("bio.base_temperature", [](RunConfig& c) -> double& { return c.scenario.forcings.base_temperature; }));
    t.push_back(real("bio.temperature_amplitude", [](RunConfig& c) -> double& { return c.scenario.forcings.temperature_amplitude; }));
    t.push_back(real("bio.period", [](RunConfig& c) -> double& { return c.scenario.forcings.period; }));
    t.push_back(integer("bio.reaction_substeps", [](RunConfig& c) -> int& { return c.scenario.bio_numerics.reaction_substeps; }));
    t.push_back(real("bio.cfl_max", [](RunConfig& c) -> double& { return c.scenario.bio_numerics.cfl_max; }));
    t.push_back(real("bio.clip_tolerance", [](RunConfig& c) -> double& { return c.scenario.bio_numerics.clip_tolerance; }));
    t.push_back(real("bio.ceiling", [](RunConfig& c) -> double& { return c.scenario.bio_numerics.ceiling; }));
    // initial
    const char* init_keys[kNumSpecies] = {"A0", "P1_0", "P2_0", "N1_0", "N2_0", "N3_0", "D0", "O0"};
    for (int s = 0; s < kNumSpecies; ++s) {
      t.push_back(real(std::string("initial.") + init_keys[s],
                       [s](RunConfig& c) -> double& { return c.scenario.initial[s]; }));
    }
    t.push_back(real("initial.H", [](RunConfig& c) -> double& { return c.initial_height; }));
    // objective
    t.push_back(real("objective.T", [](RunConfig& c) -> double& { return c.scenario.objective.horizon; }));
    t.push_back(real("objective.C1", [](RunConfig& c) -> double& { return c.scenario.objective.c1; }));
    t.push_back(real("objective.C2", [](RunConfig& c) -> double& { return c.scenario.objective.c2; }));
    t.push_back(real("objective.M1", [](RunConfig& c) -> double& { return c.scenario.objective.m1; }));
    t.push_back(real("objective.M2", [](RunConfig& c) -> double& { return c.scenario.objective.m2; }));
    t.push_back({"objective.cost",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "final") c.scenario.objective.use_time_integrated_cost = false;
                   else if (v == "time_integrated") c.scenario.objective.use_time_integrated_cost = true;
                   else throw std::invalid_argument("expected final or time_integrated");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.scenario.objective.use_time_integrated_cost
                                          ? "time_integrated" : "final");
                 }});
    // optimizer
    t.push_back(real("optimizer.h_min", [](RunConfig& c) -> double& { return c.optimizer.bounds.h_min; }));
    t.push_back(real("optimizer.h_max", [](RunConfig& c) -> double& { return c.optimizer.bounds.h_max; }));
    t.push_back(real("optimizer.w_min", [](RunConfig& c) -> double& { return c.optimizer.bounds.w_min; }));
    t.push_back(real("optimizer.w_max", [](RunConfig& c) -> double& { return c.optimizer.bounds.w_max; }));
    t.push_back(real("optimizer.H_start", [](RunConfig& c) -> double& { return c.optimizer.start.height; }));
    t.push_back(real("optimizer.omega_start", [](RunConfig& c) -> double& { return c.optimizer.start.omega; }));
    t.push_back(real("optimizer.reflection", [](RunConfig& c) -> double& { return c.optimizer.nelder_mead.reflection; }));
    t.push_back(real("optimizer.expansion", [](RunConfig& c) -> double& { return c.optimizer.nelder_mead.expansion; }));
    t.push_back(real("optimizer.contraction", [](RunConfig& c) -> double& { return c.optimizer.nelder_mead.contraction; }));
    t.push_back(real("optimizer.shrink", [](RunConfig& c) -> double& { return c.optimizer.nelder_mead.shrink; }));
    t.push_back(real("optimizer.x_tol", [](RunConfig& c) -> double& { return c.optimizer.nelder_mead.x_tol; }));
    t.push_back(real("optimizer.f_tol", [](RunConfig& c) -> double& { return c.optimizer.nelder_mead.f_tol; }));
    t.push_back(integer("optimizer.max_iters", [](RunConfig& c) -> int& { return c.optimizer.nelder_mead.max_iters; }));
    t.push_back(integer("optimizer.max_evals", [](RunConfig& c) -> int& { return c.optimizer.nelder_mead.max_evals; }));
    t.push_back(real("optimizer.bound_weight", [](RunConfig& c) -> double& { return c.optimizer.bound_weight; }));
    // reactor
    t.push_back(real("reactor.dt", [](RunConfig& c) -> double& { return c.reactor.dt; }));
    t.push_back(integer("reactor.steps", [](RunConfig& c) -> Index& { return c.reactor.steps; }));
    t.push_back(real("reactor.depth", [](RunConfig& c) -> double& { return c.reactor.depth; }));
    // output
    t.push_back({"output.directory",
                 [](RunConfig& c, const std::string& v) { c.output.directory = v; },
                 [](const RunConfig& c) { return c.output.directory; }});
    t.push_back(integer("output.snapshot_stride", [](RunConfig& c) -> Index& { return c.output.snapshot_stride; }));
    return t;
  }();
  return table;
}

}  // namespace

void validate(const RunConfig& cfg) {
  validate(cfg.geometry);
  validate(cfg.scenario);
  validate(Controls{cfg.initial_height, cfg.omega});
  validate(cfg.optimizer.bounds);
  validate(cfg.optimizer.start);
  validate(cfg.optimizer.nelder_mead);
  if (cfg.mesh.n_streamwise < 4 || cfg.mesh.n_streamwise % 2 != 0) {
    throw ConfigError("mesh.n_streamwise must be even and >= 4");
  }
  if (cfg.mesh.n_transverse < 2 || cfg.mesh.n_sigma < 2) {
    throw ConfigError("mesh.n_transverse and mesh.n_sigma must be >= 2");
  }
  if (!(cfg.reactor.dt > 0.0)) throw ConfigError("reactor.dt must be positive");
  if (cfg.reactor.steps < 1) throw ConfigError("reactor.steps must be >= 1");
  if (!(cfg.reactor.depth >= 0.0)) throw ConfigError("reactor.depth must be nonnegative");
  if (cfg.output.snapshot_stride < 0) throw ConfigError("output.snapshot_stride must be >= 0");
  if (cfg.scenario.bio_numerics.reaction_substeps < 1) {
    throw ConfigError("bio.reaction_substeps must be >= 1");
  }
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, lineno));
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field& f) { return f.key == key; });
    if (it == table.end()) {
      throw ConfigError(fmt::format("{}:{}: unknown key '{}'", source, lineno, key));
    }
    if (!seen.insert(key).second) {
      throw ConfigError(fmt::format("{}:{}: repeated key '{}'", source, lineno, key));
    }
    if (value.empty()) {
      throw ConfigError(fmt::format("{}:{}: missing value for '{}'", source, lineno, key));
    }
    try {
      it->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(
          fmt::format("{}:{}: bad value '{}' for '{}': {}", source, lineno, value, key, e.what()));
    }
  }
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string format_config(const RunConfig& cfg) {
  std::string out;
  std::string block;
  for (const Field& f : fields()) {
    const std::string b = f.key.substr(0, f.key.find('.'));
    if (b != block) {
      if (!block.empty()) out += '\n';
      block = b;
    }
    out += fmt::format("{} = {}\n", f.key, f.get(cfg));
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.push_back(f.key);
  return keys;
}

Mesh build_mesh(const RunConfig& cfg) {
  return Mesh(cfg.geometry, cfg.mesh.n_streamwise, cfg.mesh.n_transverse, cfg.mesh.n_sigma);
}

}  // namespace raceway
