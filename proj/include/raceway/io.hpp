#pragma once

#include "raceway/bio.hpp"
#include "raceway/hydro.hpp"
#include "raceway/objective.hpp"
#include "raceway/optimizer.hpp"
#include "raceway/reactor.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace raceway {

/// Writes `content` to `path`, replacing the file; throws std::runtime_error naming the path.
void write_text(const std::string& path, const std::string& content);

std::string timeseries_csv(const std::vector<StepDiagnostics>& series);

/// One row per report with the report columns; used for report.csv and sweep.csv.
std::string report_csv(const std::vector<ObjectiveReport>& reports);

struct TraceRow {
  int iteration = 0;
  std::string move;
  double height = 0.0;  // best vertex
  double omega = 0.0;
  double j_raw = 0.0;
  double penalty_total = 0.0;  // constraint penalties plus the bound penalty
  double j_tilde_best = 0.0;
};

std::vector<TraceRow> trace_rows(const RacewayOptimum& opt, const ControlBounds& bounds);
std::string trace_csv(const std::vector<TraceRow>& rows);

std::string reactor_csv(const std::vector<ReactorState>& trajectory);

/// Field snapshot: a '#' header with counts, step and time, then one record per cell
/// (s, n, sigma, x1, x2, x3, v1, v2, v3, p, A, P1, P2, N1, N2, N3, D, O) in cell order.
std::string snapshot_text(const Mesh& mesh, const FlowState& flow, const SpeciesState& species,
                          Index step);

void write_snapshot(const std::string& path, const Mesh& mesh, const FlowState& flow,
                    const SpeciesState& species, Index step);

struct Snapshot {
  Index n_streamwise = 0;
  Index n_transverse = 0;
  Index n_sigma = 0;
  Index step = 0;
  double time = 0.0;
  Eigen::MatrixXd records;  // one row per cell, 18 columns
};

Snapshot read_snapshot(const std::string& path);

inline constexpr const char* kSnapshotColumns =
    "s n sigma x1 x2 x3 v1 v2 v3 p A P1 P2 N1 N2 N3 D O";

}  // namespace raceway
