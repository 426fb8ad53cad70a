#include "raceway/io.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace raceway {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error(fmt::format("cannot open '{}' for writing: {}", path,
                                         std::strerror(errno)));
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

std::string timeseries_csv(const std::vector<StepDiagnostics>& series) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf),
                 "step,t,total_A,total_O,kinetic_energy,volume,vel_integral_cum\n");
  for (const StepDiagnostics& d : series) {
    fmt::format_to(std::back_inserter(buf), "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                   d.step, d.time, d.total_A, d.total_O, d.kinetic_energy, d.volume,
                   d.vel_integral_cum);
  }
  return fmt::to_string(buf);
}

std::string report_csv(const std::vector<ObjectiveReport>& reports) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf),
                 "H,omega,j_raw,vel_integral,oxy_min_integral,penalty_vel,penalty_oxy,j_tilde\n");
  for (const ObjectiveReport& r : reports) {
    fmt::format_to(std::back_inserter(buf),
                   "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                   r.controls.height, r.controls.omega, r.j_raw, r.velocity_integral,
                   r.oxygen_min_integral, r.penalty_velocity, r.penalty_oxygen, r.j_tilde);
  }
  return fmt::to_string(buf);
}

std::vector<TraceRow> trace_rows(const RacewayOptimum& opt, const ControlBounds& bounds) {
  std::vector<TraceRow> rows;
  for (const TraceRecord<2>& rec : opt.search.trace) {
    TraceRow row;
    row.iteration = rec.iteration;
    row.move = move_name(rec.move);
    row.height = rec.best[0];
    row.omega = rec.best[1];
    row.j_tilde_best = rec.best_value;
    const Vector2 c = clamp_to_box(rec.best, bounds);
    const double bp = bound_penalty(rec.best, bounds, opt.bound_weight);
    for (const RacewayEvaluation& ev : opt.evaluations) {
      if (ev.controls.height == c[0] && ev.controls.omega == c[1]) {
        row.j_raw = ev.report.j_raw;
        row.penalty_total = ev.report.penalty_velocity + ev.report.penalty_oxygen + bp;
        break;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "iter,move,H,omega,j_raw,penalty_total,j_tilde_best\n");
  for (const TraceRow& r : rows) {
    fmt::format_to(std::back_inserter(buf), "{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                   r.iteration, r.move, r.height, r.omega, r.j_raw, r.penalty_total,
                   r.j_tilde_best);
  }
  return fmt::to_string(buf);
}

std::string reactor_csv(const std::vector<ReactorState>& trajectory) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "t,A,P1,P2,N1,N2,N3,D,O\n");
  for (const ReactorState& s : trajectory) {
    fmt::format_to(std::back_inserter(buf), "{:.17g}", s.time);
    for (int i = 0; i < kNumSpecies; ++i) fmt::format_to(std::back_inserter(buf), ",{:.17g}", s.values[i]);
    buf.push_back('\n');
  }
  return fmt::to_string(buf);
}

std::string snapshot_text(const Mesh& mesh, const FlowState& flow, const SpeciesState& species,
                          Index step) {
  if (flow.velocity.cols() != mesh.n_cells() || species.fields.cols() != mesh.n_cells()) {
    throw std::invalid_argument("snapshot: field sizes do not match the mesh");
  }
  const Matrix3X x = cell_centers(mesh, flow.surface_height);
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "# raceway snapshot\n");
  fmt::format_to(out, "# n_streamwise {} n_transverse {} n_sigma {}\n", mesh.n_streamwise(),
                 mesh.n_transverse(), mesh.n_sigma());
  fmt::format_to(out, "# step {} time {:.17g}\n", step, flow.time);
  fmt::format_to(out, "# {}\n", kSnapshotColumns);
  for (Index i = 0; i < mesh.n_streamwise(); ++i) {
    for (Index j = 0; j < mesh.n_transverse(); ++j) {
      for (Index k = 0; k < mesh.n_sigma(); ++k) {
        const Index c = mesh.cell(i, j, k);
        fmt::format_to(out, "{} {} {}", i, j, k);
        for (int d = 0; d < 3; ++d) fmt::format_to(out, " {:.9g}", x(d, c));
        for (int d = 0; d < 3; ++d) fmt::format_to(out, " {:.9g}", flow.velocity(d, c));
        fmt::format_to(out, " {:.9g}", flow.pressure[c]);
        for (int s = 0; s < kNumSpecies; ++s) fmt::format_to(out, " {:.9g}", species.fields(s, c));
        buf.push_back('\n');
      }
    }
  }
  return fmt::to_string(buf);
}

void write_snapshot(const std::string& path, const Mesh& mesh, const FlowState& flow,
                    const SpeciesState& species, Index step) {
  write_text(path, snapshot_text(mesh, flow, species, step));
}

namespace {

double to_double(const std::string& tok, const std::string& path) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw std::runtime_error(fmt::format("{}: malformed number '{}'", path, tok));
  }
  return v;
}

}  // namespace

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open snapshot '{}'", path));
  Snapshot snap;
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    if (line[0] == '#') {
      ls >> tok;
      std::string name;
      while (ls >> name) {
        if (name == "n_streamwise") ls >> snap.n_streamwise;
        else if (name == "n_transverse") ls >> snap.n_transverse;
        else if (name == "n_sigma") ls >> snap.n_sigma;
        else if (name == "step") ls >> snap.step;
        else if (name == "time") {
          ls >> tok;
          snap.time = to_double(tok, path);
        }
      }
      continue;
    }
    std::vector<double> row;
    while (ls >> tok) row.push_back(to_double(tok, path));
    if (row.size() != 18) {
      throw std::runtime_error(fmt::format("{}: record with {} columns, expected 18", path, row.size()));
    }
    rows.push_back(std::move(row));
  }
  snap.records.resize(static_cast<Index>(rows.size()), 18);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Index c = 0; c < 18; ++c) snap.records(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  }
  return snap;
}

}  // namespace raceway
