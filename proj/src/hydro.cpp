#include "raceway/hydro.hpp"

#include <fmt/format.h>

#include <cmath>
#include <tuple>

namespace raceway {

void validate(const PaddlewheelSpec& paddle) {
  if (!(paddle.paddle_length > 0.0)) {
    throw ConfigError("paddle: paddle length rho must be positive");
  }
  if (!(paddle.force_magnitude >= 0.0)) {
    throw ConfigError("paddle: force magnitude F must be nonnegative");
  }
  if (!(paddle.axis.z() >= paddle.paddle_length)) {
    throw ConfigError("paddle: axis height x3_0 must be >= paddle length rho");
  }
}

void validate(const HydroConfig& cfg) {
  if (!(cfg.viscosity >= 0.0)) throw ConfigError("hydro: viscosity must be nonnegative");
  if (!(cfg.dt > 0.0)) throw ConfigError("hydro: dt must be positive");
  if (!(cfg.div_tol > 0.0)) throw ConfigError("hydro: div_tol must be positive");
  if (!(cfg.pressure_solver_tol > 0.0)) {
    throw ConfigError("hydro: pressure solver tolerance must be positive");
  }
  if (cfg.pressure_max_iters < 1) throw ConfigError("hydro: pressure_max_iters must be >= 1");
  if (!(cfg.gravity >= 0.0)) throw ConfigError("hydro: gravity must be nonnegative");
  if (!(cfg.cfl_max > 0.0)) throw ConfigError("hydro: cfl_max must be positive");
  if (cfg.force_quadrature < 1) throw ConfigError("hydro: force_quadrature must be >= 1");
}

FlowState rest_state(const Mesh& mesh, double height, double gravity) {
  if (!(height > 0.0)) throw ConfigError("initial water height H must be positive");
  const Index nc = mesh.n_cells();
  const Index ncol = mesh.n_columns();
  FlowState s;
  s.velocity = Matrix3X::Zero(3, nc);
  s.surface_height = VectorX::Constant(ncol, height);
  s.previous_surface_height = s.surface_height;
  s.surface_w = VectorX::Zero(ncol);
  s.lateral_flux = VectorX::Zero(static_cast<Index>(mesh.faces().size()) * mesh.n_sigma());
  s.interface_velocity = VectorX::Zero(nc);
  s.dynamic_pressure = VectorX::Zero(nc);
  s.pressure.resize(nc);
  for (Index c = 0; c < ncol; ++c) {
    for (Index k = 0; k < mesh.n_sigma(); ++k) {
      s.pressure[mesh.cell(c, k)] = gravity * (height - mesh.layer_center_z(k, height));
    }
  }
  return s;
}

bool in_paddle_region(const PaddlewheelSpec& paddle, const RacewayGeometry& geom,
                      const Vector3& x, double surface_height) {
  if (x.y() < geom.inner_radius || x.y() > geom.outer_radius) return false;
  if (x.z() >= surface_height) return false;
  const double d1 = x.x() - paddle.axis.x();
  const double d3 = x.z() - paddle.axis.z();
  return d1 * d1 + d3 * d3 <= paddle.paddle_length * paddle.paddle_length;
}

Matrix3X cell_centers(const Mesh& mesh, const VectorX& surface_height) {
  Matrix3X out(3, mesh.n_cells());
  for (Index c = 0; c < mesh.n_columns(); ++c) {
    for (Index k = 0; k < mesh.n_sigma(); ++k) {
      out.col(mesh.cell(c, k)) << mesh.cell_centers_plan().col(c),
          mesh.layer_center_z(k, surface_height[c]);
    }
  }
  return out;
}

VectorX cell_volumes(const Mesh& mesh, const VectorX& surface_height) {
  VectorX vol(mesh.n_cells());
  const auto ns = static_cast<double>(mesh.n_sigma());
  for (Index c = 0; c < mesh.n_columns(); ++c) {
    vol.segment(c * mesh.n_sigma(), mesh.n_sigma())
        .setConstant(mesh.plan_cell_areas()[c] * surface_height[c] / ns);
  }
  return vol;
}

std::vector<Index> paddle_region(const PaddlewheelSpec& paddle, const RacewayGeometry& geom,
                                 const Mesh& mesh, const VectorX& surface_height) {
  std::vector<Index> cells;
  const Matrix3X centers = cell_centers(mesh, surface_height);
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const Index col = c / mesh.n_sigma();
    if (in_paddle_region(paddle, geom, centers.col(c), surface_height[col])) cells.push_back(c);
  }
  return cells;
}

Vector3 paddle_force(const PaddlewheelSpec& paddle, double omega, const Vector3& x, double t,
                     bool in_region) {
  if (!in_region) return Vector3::Zero();
  const double d1 = x.x() - paddle.axis.x();
  const double d3 = x.z() - paddle.axis.z();
  const double scale = paddle.force_magnitude * omega * omega * (d1 * d1 + d3 * d3);
  return {scale * std::cos(omega * t), 0.0, scale * std::sin(omega * t)};
}

Eigen::Matrix2Xd column_gradient(const Mesh& mesh, const VectorX& column_field) {
  Eigen::Matrix2Xd grad = Eigen::Matrix2Xd::Zero(2, mesh.n_columns());
  for (const PlanFace& f : mesh.faces()) {
    const double half_jump = 0.5 * (column_field[f.neighbour] - column_field[f.owner]);
    const Vector2 s = f.normal * f.length;
    grad.col(f.owner) += half_jump * s;
    grad.col(f.neighbour) += half_jump * s;
  }
  for (Index c = 0; c < mesh.n_columns(); ++c) grad.col(c) /= mesh.plan_cell_areas()[c];
  return grad;
}

VectorX update_surface(const Mesh& mesh, const VectorX& eta, const FlowState& flow,
                       double dt) {
  const Eigen::Matrix2Xd grad = column_gradient(mesh, eta);
  VectorX out(eta.size());
  const Index top = mesh.n_sigma() - 1;
  for (Index c = 0; c < mesh.n_columns(); ++c) {
    const auto v = flow.velocity.col(mesh.cell(c, top));
    out[c] = eta[c] + dt * (flow.surface_w[c] - v.x() * grad(0, c) - v.y() * grad(1, c));
    if (!(out[c] > 0.0)) {
      const Index i = c / mesh.n_transverse();
      const Index j = c % mesh.n_transverse();
      const auto x = mesh.cell_centers_plan().col(c);
      throw StepFailure(fmt::format(
          "dry cell: surface height {} at column (s={}, n={}) x=({:.4f}, {:.4f})", out[c], i, j,
          x.x(), x.y()));
    }
  }
  return out;
}

TransportStep last_step_transport(const Mesh& mesh, const FlowState& flow, double dt) {
  return make_transport_step(mesh, flow.previous_surface_height, flow.surface_height,
                             flow.lateral_flux, flow.interface_velocity, dt);
}

double max_divergence(const Mesh& mesh, const FlowState& flow, double dt) {
  const Index ns = mesh.n_sigma();
  VectorX net = VectorX::Zero(mesh.n_cells());
  const auto& faces = mesh.faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (Index k = 0; k < ns; ++k) {
      const double flux = flow.lateral_flux[static_cast<Index>(f) * ns + k];
      net[mesh.cell(faces[f].owner, k)] += flux;
      net[mesh.cell(faces[f].neighbour, k)] -= flux;
    }
  }
  const VectorX& area = mesh.plan_cell_areas();
  for (Index c = 0; c < mesh.n_columns(); ++c) {
    for (Index k = 0; k < ns; ++k) {
      const double w_top = flow.interface_velocity[c * ns + k];
      const double w_bot = k > 0 ? flow.interface_velocity[c * ns + k - 1] : 0.0;
      net[mesh.cell(c, k)] += area[c] * (w_top - w_bot);
    }
  }
  const VectorX vol = cell_volumes(mesh, flow.previous_surface_height);
  return dt * net.cwiseAbs().cwiseQuotient(vol).maxCoeff();
}

double kinetic_energy(const Mesh& mesh, const FlowState& flow) {
  const VectorX vol = cell_volumes(mesh, flow.surface_height);
  return 0.5 * flow.velocity.colwise().squaredNorm().transpose().dot(vol);
}

double water_volume(const Mesh& mesh, const VectorX& surface_height) {
  return mesh.plan_cell_areas().dot(surface_height);
}

FlowSolver::FlowSolver(const Mesh& mesh, const HydroConfig& cfg, const PaddlewheelSpec& paddle)
    : mesh_(mesh), cfg_(cfg), paddle_(paddle) {
  validate(cfg_);
  validate(paddle_);
  const RacewayGeometry& geom = mesh.geometry();
  const int nq = cfg_.force_quadrature;
  const double dn = geom.channel_width / static_cast<double>(mesh.n_transverse());
  column_weight_.assign(static_cast<std::size_t>(mesh.n_columns()), 0.0);

  for (Index i = 0; i < mesh.n_streamwise(); ++i) {
    for (Index j = 0; j < mesh.n_transverse(); ++j) {
      const Index col = mesh.column(i, j);
      std::vector<SamplePoint> local;
      double total = 0.0;
      bool touches = false;
      for (int a = 0; a < nq; ++a) {
        const double u = static_cast<double>(i) + (a + 0.5) / nq;
        for (int b = 0; b < nq; ++b) {
          const double rho = geom.inner_radius + (static_cast<double>(j) + (b + 0.5) / nq) * dn;
          const Vector2 x = mesh.station_point(u, rho);
          const double w = mesh.area_jacobian(i, rho);
          total += w;
          local.push_back({col, x.x(), x.y(), w});
          if (x.y() >= geom.inner_radius && x.y() <= geom.outer_radius &&
              std::abs(x.x() - paddle_.axis.x()) <= paddle_.paddle_length) {
            touches = true;
          }
        }
      }
      column_weight_[static_cast<std::size_t>(col)] = total;
      if (touches) {
        forced_columns_.push_back(col);
        samples_.insert(samples_.end(), local.begin(), local.end());
      }
    }
  }
}

Matrix3X FlowSolver::averaged_force(const VectorX& surface_height, double omega,
                                    double t) const {
  Matrix3X force = Matrix3X::Zero(3, mesh_.n_cells());
  if (paddle_.force_magnitude == 0.0) return force;
  const int nq = cfg_.force_quadrature;
  const Index ns = mesh_.n_sigma();
  const RacewayGeometry& geom = mesh_.geometry();
  for (const SamplePoint& sp : samples_) {
    const double eta = surface_height[sp.column];
    const double norm = column_weight_[static_cast<std::size_t>(sp.column)] * nq;
    for (Index k = 0; k < ns; ++k) {
      Vector3 acc = Vector3::Zero();
      for (int m = 0; m < nq; ++m) {
        const double z = (static_cast<double>(k) + (m + 0.5) / nq) * eta / static_cast<double>(ns);
        const Vector3 x(sp.x1, sp.x2, z);
        acc += paddle_force(paddle_, omega, x, t, in_paddle_region(paddle_, geom, x, eta));
      }
      force.col(mesh_.cell(sp.column, k)) += acc * (sp.weight / norm);
    }
  }
  return force;
}

void FlowSolver::step(FlowState& state, double omega) {
  const Mesh& mesh = mesh_;
  const Index ns = mesh.n_sigma();
  const auto nsd = static_cast<double>(ns);
  const Index nc = mesh.n_cells();
  const Index ncol = mesh.n_columns();
  const auto& faces = mesh.faces();
  const auto nf = static_cast<Index>(faces.size());
  const VectorX& area = mesh.plan_cell_areas();
  const double dt = cfg_.dt;
  const double g = cfg_.gravity;
  const VectorX eta = state.surface_height;

  // Momentum transport with the fluxes of the previous step.
  const TransportStep previous = last_step_transport(mesh, state, dt);
  const double cfl = explicit_transport_number(mesh, previous, cfg_.viscosity);
  if (cfl > cfg_.cfl_max) {
    throw StepFailure(fmt::format(
        "CFL violation at t={}: transport number {:.4g} > {:.4g}; suggested dt <= {:.4g}",
        state.time, cfl, cfg_.cfl_max, 0.9 * dt * cfg_.cfl_max / cfl));
  }
  TransportStep momentum = make_transport_step(mesh, eta, dt);
  momentum.lateral_flux = previous.lateral_flux;
  momentum.vertical_flux = previous.vertical_flux;

  Matrix3X advected = state.velocity;
  for (int d = 0; d < 3; ++d) {
    VectorX comp = advected.row(d).transpose();
    transport_scalar(mesh, momentum, cfg_.viscosity, comp);
    advected.row(d) = comp.transpose();
  }
  // Velocity after every explicit term except the surface slope.
  const Matrix3X provisional = advected + dt * averaged_force(eta, omega, state.time);

  const Eigen::Matrix2Xd eta_grad = column_gradient(mesh, eta);
  Matrix3X predicted = provisional;
  for (Index c = 0; c < ncol; ++c) {
    for (Index k = 0; k < ns; ++k) {
      predicted.block<2, 1>(0, mesh.cell(c, k)) -= dt * g * eta_grad.col(c);
    }
  }

  // Face predictor: interpolated cell velocities plus a compact surface-slope term.
  VectorX h(ncol);
  for (Index c = 0; c < ncol; ++c) h[c] = eta[c] / nsd;
  VectorX lateral_u(nf * ns);
  VectorX lateral_area(nf * ns);
  for (Index f = 0; f < nf; ++f) {
    const PlanFace& face = faces[static_cast<std::size_t>(f)];
    const double slope = (eta[face.neighbour] - eta[face.owner]) / face.distance;
    const double face_area = face.length * 0.5 * (h[face.owner] + h[face.neighbour]);
    for (Index k = 0; k < ns; ++k) {
      const Vector3 avg = 0.5 * (provisional.col(mesh.cell(face.owner, k)) +
                                 provisional.col(mesh.cell(face.neighbour, k)));
      lateral_u[f * ns + k] = avg.head<2>().dot(face.normal) - dt * g * slope;
      lateral_area[f * ns + k] = face_area;
    }
  }
  VectorX vertical_w(nc);  // w at the top interface of each layer
  for (Index c = 0; c < ncol; ++c) {
    for (Index k = 0; k + 1 < ns; ++k) {
      vertical_w[c * ns + k] =
          0.5 * (provisional(2, mesh.cell(c, k)) + provisional(2, mesh.cell(c, k + 1)));
    }
    vertical_w[c * ns + ns - 1] = provisional(2, mesh.cell(c, ns - 1));
  }

  // Projection. The top face couples to the surface through
  // phi_surface = g * dt * w_top, which makes the surface gravity term implicit.
  VectorX beta(ncol);
  for (Index c = 0; c < ncol; ++c) beta[c] = 1.0 / (1.0 + 2.0 * g * dt * dt / h[c]);

  VectorX rhs = VectorX::Zero(nc);
  triplets_.clear();
  triplets_.reserve(static_cast<std::size_t>(nc * 7));
  VectorX diag = VectorX::Zero(nc);
  for (Index f = 0; f < nf; ++f) {
    const PlanFace& face = faces[static_cast<std::size_t>(f)];
    for (Index k = 0; k < ns; ++k) {
      const Index idx = f * ns + k;
      const Index p = mesh.cell(face.owner, k);
      const Index n = mesh.cell(face.neighbour, k);
      const double flux = lateral_area[idx] * lateral_u[idx];
      rhs[p] -= flux;
      rhs[n] += flux;
      const double a = lateral_area[idx] / face.distance;
      diag[p] += a;
      diag[n] += a;
      triplets_.emplace_back(p, n, -a);
      triplets_.emplace_back(n, p, -a);
    }
  }
  for (Index c = 0; c < ncol; ++c) {
    const double av = area[c] / h[c];
    for (Index k = 0; k < ns; ++k) {
      const Index p = mesh.cell(c, k);
      if (k + 1 < ns) {
        const double flux = area[c] * vertical_w[c * ns + k];
        rhs[p] -= flux;
        rhs[p + 1] += flux;
        diag[p] += av;
        diag[p + 1] += av;
        triplets_.emplace_back(p, p + 1, -av);
        triplets_.emplace_back(p + 1, p, -av);
      } else {
        rhs[p] -= beta[c] * area[c] * vertical_w[c * ns + k];
        diag[p] += beta[c] * 2.0 * av;
      }
    }
  }
  for (Index p = 0; p < nc; ++p) triplets_.emplace_back(p, p, diag[p]);
  rhs /= dt;

  SpMat matrix(nc, nc);
  matrix.setFromTriplets(triplets_.begin(), triplets_.end());

  VectorX phi;
  if (rhs.squaredNorm() == 0.0) {
    phi = VectorX::Zero(nc);
    state.pressure_iterations = 0;
  } else {
    // Refinement against the current matrix with a factor that is only refreshed when
    // convergence slows down; the matrix drifts slowly with the surface.
    const double rhs_norm = rhs.norm();
    auto refine = [&](VectorX& x, Index max_sweeps) {
      Index sweeps = 0;
      double residual = 0.0;
      x = pressure_factor_.solve(rhs);
      while (true) {
        ++sweeps;
        const VectorX r = rhs - matrix * x;
        residual = r.norm() / rhs_norm;
        if (residual <= cfg_.pressure_solver_tol || sweeps >= max_sweeps) break;
        x += pressure_factor_.solve(r);
      }
      return std::make_pair(sweeps, residual);
    };
    auto refactor = [&] {
      if (!pattern_ready_) {
        pressure_factor_.analyzePattern(matrix);
        pattern_ready_ = true;
      }
      pressure_factor_.factorize(matrix);
      if (pressure_factor_.info() != Eigen::Success) {
        throw StepFailure(fmt::format("pressure factorization failed at t={}", state.time));
      }
    };
    const Index stale_limit = 6;
    if (!pattern_ready_) refactor();
    auto [sweeps, residual] = refine(phi, stale_limit);
    if (!(residual <= cfg_.pressure_solver_tol)) {
      refactor();
      std::tie(sweeps, residual) = refine(phi, cfg_.pressure_max_iters);
    }
    state.pressure_iterations = sweeps;
    if (!(residual <= cfg_.pressure_solver_tol)) {
      throw StepFailure(fmt::format(
          "pressure solve did not converge at t={}: relative residual {:.3e} after {} sweeps",
          state.time, residual, sweeps));
    }
  }

  // Corrected face velocities.
  for (Index f = 0; f < nf; ++f) {
    const PlanFace& face = faces[static_cast<std::size_t>(f)];
    for (Index k = 0; k < ns; ++k) {
      const Index idx = f * ns + k;
      lateral_u[idx] -=
          dt * (phi[mesh.cell(face.neighbour, k)] - phi[mesh.cell(face.owner, k)]) / face.distance;
    }
  }
  VectorX surface_phi(ncol);
  for (Index c = 0; c < ncol; ++c) {
    for (Index k = 0; k + 1 < ns; ++k) {
      vertical_w[c * ns + k] -= dt * (phi[mesh.cell(c, k + 1)] - phi[mesh.cell(c, k)]) / h[c];
    }
    const Index top = c * ns + ns - 1;
    vertical_w[top] = beta[c] * (vertical_w[top] + dt * phi[mesh.cell(c, ns - 1)] * 2.0 / h[c]);
    surface_phi[c] = g * dt * vertical_w[top];
  }

  // Cell velocities: predictor minus the Gauss gradient of phi.
  Matrix3X grad_phi = Matrix3X::Zero(3, nc);
  for (Index f = 0; f < nf; ++f) {
    const PlanFace& face = faces[static_cast<std::size_t>(f)];
    for (Index k = 0; k < ns; ++k) {
      const Index p = mesh.cell(face.owner, k);
      const Index n = mesh.cell(face.neighbour, k);
      const double half_jump = 0.5 * (phi[n] - phi[p]) * lateral_area[f * ns + k];
      grad_phi.block<2, 1>(0, p) += half_jump * face.normal;
      grad_phi.block<2, 1>(0, n) += half_jump * face.normal;
    }
  }
  for (Index c = 0; c < ncol; ++c) {
    for (Index k = 0; k < ns; ++k) {
      const Index p = mesh.cell(c, k);
      double gz = 0.0;
      if (k + 1 < ns) gz += 0.5 * (phi[p + 1] - phi[p]);
      else gz += surface_phi[c] - phi[p];
      if (k > 0) gz += 0.5 * (phi[p] - phi[p - 1]);
      grad_phi(2, p) += gz * area[c];
      grad_phi.col(p) /= area[c] * h[c];
    }
  }
  state.velocity = predicted - dt * grad_phi;

  state.lateral_flux = lateral_area.cwiseProduct(lateral_u);
  state.interface_velocity = vertical_w;
  state.dynamic_pressure = phi;
  state.previous_surface_height = eta;
  for (Index c = 0; c < ncol; ++c) {
    for (Index k = 0; k < ns; ++k) {
      const Index p = mesh.cell(c, k);
      state.pressure[p] = g * (eta[c] - mesh.layer_center_z(k, eta[c])) + phi[p];
    }
  }

  // Kinematic surface update with the surface vertical velocity diagnosed from continuity.
  state.surface_w.resize(ncol);
  for (Index c = 0; c < ncol; ++c) {
    const auto v = state.velocity.col(mesh.cell(c, ns - 1));
    state.surface_w[c] =
        vertical_w[c * ns + ns - 1] + v.x() * eta_grad(0, c) + v.y() * eta_grad(1, c);
  }
  state.surface_height = update_surface(mesh, eta, state, dt);

  state.max_divergence = max_divergence(mesh, state, dt);
  if (!(state.max_divergence <= cfg_.div_tol)) {
    throw StepFailure(fmt::format("divergence {:.3e} exceeds div_tol {:.3e} at t={}",
                                  state.max_divergence, cfg_.div_tol, state.time));
  }
  if (!state.velocity.allFinite()) {
    throw StepFailure(fmt::format("non-finite velocity at t={}", state.time));
  }
  state.time += dt;
}

FlowState step_flow(const Mesh& mesh, const FlowState& state, const HydroConfig& cfg,
                    const PaddlewheelSpec& paddle, double omega) {
  FlowSolver solver(mesh, cfg, paddle);
  FlowState next = state;
  solver.step(next, omega);
  return next;
}

}  // namespace raceway
