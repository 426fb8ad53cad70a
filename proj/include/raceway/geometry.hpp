#pragma once

#include "raceway/types.hpp"

#include <string>
#include <vector>

namespace raceway {

/// Plan view of the pond: two straight channels joined by two half-annuli.
///
/// Placement: the first straight occupies x1 in [0, L], x2 in [r, R]; the second
/// straight mirrors it at x2 in [-R, -r]. The bends are centered at (0, 0) and (L, 0).
struct RacewayGeometry {
  double straight_length = 20.0;  // L
  double channel_width = 2.0;     // W
  double inner_radius = 0.2;      // r
  double outer_radius = 2.2;      // R

  double centerline_radius() const { return inner_radius + 0.5 * channel_width; }
};

/// Throws ConfigError if a field is non-positive or R != r + W.
void validate(const RacewayGeometry& geom);

/// True iff (x1, x2) lies in the closed oval annulus.
bool contains_plan(const RacewayGeometry& geom, double x1, double x2);

/// 2 L W + pi (R^2 - r^2).
double plan_area(const RacewayGeometry& geom);

/// 2 L + 2 pi (r + W/2).
double centerline_length(const RacewayGeometry& geom);

/// Interior face between two plan cells.
///
/// `normal` is the unit normal pointing from `owner` to `neighbour`, `length` the
/// magnitude of the integrated normal (exact for a constant vector field crossing a
/// curved face) and `distance` the center-to-center distance projected on `normal`.
struct PlanFace {
  Index owner = 0;
  Index neighbour = 0;
  Vector2 normal = Vector2::Zero();
  double length = 0.0;
  double distance = 0.0;
  bool streamwise = true;
};

/// Loop-following structured grid with uniform sigma layers.
///
/// Plan cells are indexed column = i * n_transverse + j (i streamwise, j transverse).
/// Cells are indexed cell = column * n_sigma + k with k counted from the bottom.
class Mesh {
 public:
  Mesh(const RacewayGeometry& geom, Index n_streamwise, Index n_transverse, Index n_sigma);

  Index n_streamwise() const { return n_streamwise_; }
  Index n_transverse() const { return n_transverse_; }
  Index n_sigma() const { return n_sigma_; }
  Index n_columns() const { return n_streamwise_ * n_transverse_; }
  Index n_cells() const { return n_columns() * n_sigma_; }

  Index n_straight_cells() const { return n_straight_; }
  Index n_bend_cells() const { return n_bend_; }

  Index column(Index i, Index j) const { return i * n_transverse_ + j; }
  Index cell(Index column, Index k) const { return column * n_sigma_ + k; }
  Index cell(Index i, Index j, Index k) const { return cell(column(i, j), k); }

  const RacewayGeometry& geometry() const { return geom_; }

  /// Plan cell centers, one column per plan cell.
  const Eigen::Matrix2Xd& cell_centers_plan() const { return centers_; }
  const VectorX& plan_cell_areas() const { return areas_; }
  const std::vector<PlanFace>& faces() const { return faces_; }

  /// Interior faces touching a plan cell, as indices into faces().
  const std::vector<Index>& column_faces(Index column) const { return column_faces_[column]; }

  /// Streamwise neighbours of streamwise index i (periodic).
  Index next_streamwise(Index i) const { return (i + 1) % n_streamwise_; }
  Index prev_streamwise(Index i) const { return (i + n_streamwise_ - 1) % n_streamwise_; }

  /// Physical height of the center of layer k in a column of depth eta.
  double layer_center_z(Index k, double eta) const {
    return (static_cast<double>(k) + 0.5) * eta / static_cast<double>(n_sigma_);
  }

  /// Point at streamwise station u in [0, n_streamwise) and transverse radius rho in [r, R].
  Vector2 station_point(double u, double rho) const;

  /// Length of streamwise cell i measured at transverse radius rho.
  double streamwise_length(Index i, double rho) const;

  /// Area element d(area) / (du d rho) inside streamwise cell i at radius rho.
  double area_jacobian(Index i, double rho) const;

  /// Summed streamwise cell lengths at the centerline radius.
  double centerline_length() const;

  std::string summary() const;

 private:
  RacewayGeometry geom_;
  Index n_streamwise_;
  Index n_transverse_;
  Index n_sigma_;
  Index n_straight_ = 0;
  Index n_bend_ = 0;
  double straight_step_ = 0.0;  // ds
  double bend_step_ = 0.0;      // d theta

  Eigen::Matrix2Xd centers_;
  VectorX areas_;
  std::vector<PlanFace> faces_;
  std::vector<std::vector<Index>> column_faces_;

  struct Station {
    int segment;   // 0 top straight, 1 right bend, 2 bottom straight, 3 left bend
    double local;  // distance along a straight, or swept angle within a bend
  };
  Station locate(double u) const;
};

Mesh build_mesh(const RacewayGeometry& geom, Index n_streamwise, Index n_transverse,
                Index n_sigma);

}  // namespace raceway
