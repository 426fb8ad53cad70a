#pragma once

#include "raceway/geometry.hpp"
#include "raceway/types.hpp"

namespace raceway {

/// Fluxes and volumes of one step on the sigma mesh, shared by the momentum predictor
/// and the species update.
///
/// Horizontal terms are explicit (first-order upwind, two-point diffusion); vertical
/// terms are implicit in each column. Vertical fluxes are relative to the moving sigma
/// interfaces so a uniform field stays uniform while layers stretch.
struct TransportStep {
  double dt = 0.0;
  VectorX lateral_flux;    // [face * n_sigma + k], m^3/s, owner -> neighbour
  VectorX vertical_flux;   // [column * (n_sigma - 1) + k], m^3/s, upward across k + 1/2
  VectorX volume_old;      // [cell]
  VectorX lateral_coeff;   // [face * n_sigma + k], face area / center distance
  VectorX vertical_coeff;  // [column], plan area / layer thickness
};

/// Zero-flux step on a flat surface of height eta.
TransportStep make_transport_step(const Mesh& mesh, const VectorX& eta, double dt);

/// Step from absolute fluxes. `interface_velocity` holds the absolute vertical velocity
/// at the upper interface of each layer ([column * n_sigma + k], last entry the free
/// surface); the sigma motion is inferred from eta_old -> eta_new.
TransportStep make_transport_step(const Mesh& mesh, const VectorX& eta_old,
                                  const VectorX& eta_new, const VectorX& lateral_flux,
                                  const VectorX& interface_velocity, double dt);

/// Advances `field` by one step of upwind advection plus diffusion with zero-flux
/// boundaries. Conservative: sum(volume_new * field) is preserved.
void transport_scalar(const Mesh& mesh, const TransportStep& step, double diffusivity,
                      Eigen::Ref<VectorX> field);

/// Largest explicit stability number dt * (outflow + diffusion) / volume over all cells.
/// Upwind transport is positivity preserving when this is <= 1.
double explicit_transport_number(const Mesh& mesh, const TransportStep& step,
                                 double diffusivity);

/// Cell volumes after the step, from the discrete geometric conservation law.
VectorX gcl_volumes(const Mesh& mesh, const TransportStep& step);

}  // namespace raceway
