#pragma once

#include "raceway/geometry.hpp"
#include "raceway/transport.hpp"
#include "raceway/types.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <vector>

namespace raceway {

/// Rotating paddlewheel modelled as a body force on a horizontal cylinder.
struct PaddlewheelSpec {
  double force_magnitude = 10.0;          // F
  double paddle_length = 0.4;             // rho
  Vector3 axis = Vector3(5.0, 1.2, 0.5);  // (x1, x2, x3) of the rotation axis
};

void validate(const PaddlewheelSpec& paddle);

struct HydroConfig {
  double viscosity = 1e-3;  // effective kinematic viscosity, m^2/s
  double dt = 0.5;
  double div_tol = 1e-8;  // max |net cell outflow| * dt / cell volume
  double pressure_solver_tol = 1e-10;  // relative residual of the pressure system
  int pressure_max_iters = 20;         // refinement sweeps after a fresh factorization
  double gravity = 9.81;  // 0 reproduces the stress-free surface without hydrostatics
  double cfl_max = 1.0;   // bound on the explicit horizontal transport number
  int force_quadrature = 4;  // sub-samples per cell direction for the paddle force
};

void validate(const HydroConfig& cfg);

/// Flow on the sigma mesh.
///
/// Cell fields use the mesh cell ordering; face fields describe the last completed step
/// and are what the species transport consumes.
struct FlowState {
  Matrix3X velocity;       // [cell], m/s
  VectorX pressure;        // [cell], density-normalized, hydrostatic + dynamic
  VectorX surface_height;  // [column], eta
  VectorX surface_w;       // [column], vertical velocity at the free surface
  double time = 0.0;

  VectorX previous_surface_height;  // [column], eta at the start of the last step
  VectorX lateral_flux;             // [face * n_sigma + k], m^3/s
  VectorX interface_velocity;       // [column * n_sigma + k], w at top of layer k
  VectorX dynamic_pressure;         // [cell], non-hydrostatic correction
  double max_divergence = 0.0;
  Index pressure_iterations = 0;
};

/// Water at rest with a flat surface at `height` and hydrostatic pressure.
FlowState rest_state(const Mesh& mesh, double height, double gravity = 0.0);

/// Point membership in the paddle cylinder intersected with the water column.
bool in_paddle_region(const PaddlewheelSpec& paddle, const RacewayGeometry& geom,
                      const Vector3& x, double surface_height);

/// Cells whose centers lie in the paddle region.
std::vector<Index> paddle_region(const PaddlewheelSpec& paddle, const RacewayGeometry& geom,
                                 const Mesh& mesh, const VectorX& surface_height);

/// Paddle body force at a point; zero outside the region.
Vector3 paddle_force(const PaddlewheelSpec& paddle, double omega, const Vector3& x, double t,
                     bool in_region);

/// Centers of all cells for a given surface.
Matrix3X cell_centers(const Mesh& mesh, const VectorX& surface_height);
VectorX cell_volumes(const Mesh& mesh, const VectorX& surface_height);

/// Horizontal gradient of a column field (Gauss, zero wall contribution).
Eigen::Matrix2Xd column_gradient(const Mesh& mesh, const VectorX& column_field);

/// Kinematic free-surface update; throws StepFailure if any column runs dry.
VectorX update_surface(const Mesh& mesh, const VectorX& eta, const FlowState& flow,
                       double dt);

/// Fluxes of the last completed step in transport form.
TransportStep last_step_transport(const Mesh& mesh, const FlowState& flow, double dt);

/// Largest |net outflow| * dt / volume over cells for the last completed step.
double max_divergence(const Mesh& mesh, const FlowState& flow, double dt);

double kinetic_energy(const Mesh& mesh, const FlowState& flow);
double water_volume(const Mesh& mesh, const VectorX& surface_height);

/// Time integrator for the free-surface flow.
///
/// Explicit horizontal advection/diffusion with implicit vertical terms, the paddle
/// force, then one pressure projection whose surface condition carries the implicit
/// free-surface displacement. The mesh and configuration are held by reference.
class FlowSolver {
 public:
  FlowSolver(const Mesh& mesh, const HydroConfig& cfg, const PaddlewheelSpec& paddle);

  void step(FlowState& state, double omega);

  /// Cell-averaged paddle force at time t.
  Matrix3X averaged_force(const VectorX& surface_height, double omega, double t) const;

  const Mesh& mesh() const { return mesh_; }
  const HydroConfig& config() const { return cfg_; }

 private:
  struct SamplePoint {
    Index column;
    double x1;
    double x2;
    double weight;
  };

  const Mesh& mesh_;
  HydroConfig cfg_;
  PaddlewheelSpec paddle_;
  std::vector<SamplePoint> samples_;
  std::vector<Index> forced_columns_;
  std::vector<double> column_weight_;

  using SpMat = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> triplets_;
  Eigen::SimplicialLDLT<SpMat> pressure_factor_;
  bool pattern_ready_ = false;
};

FlowState step_flow(const Mesh& mesh, const FlowState& state, const HydroConfig& cfg,
                    const PaddlewheelSpec& paddle, double omega);

}  // namespace raceway
