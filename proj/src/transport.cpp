#include "raceway/transport.hpp"

#include <algorithm>
#include <vector>

namespace raceway {

namespace {

void fill_geometry(const Mesh& mesh, const VectorX& eta, TransportStep& step) {
  const Index ns = mesh.n_sigma();
  const VectorX& area = mesh.plan_cell_areas();
  const auto& faces = mesh.faces();
  const auto nsd = static_cast<double>(ns);

  step.volume_old.resize(mesh.n_cells());
  step.vertical_coeff.resize(mesh.n_columns());
  for (Index c = 0; c < mesh.n_columns(); ++c) {
    const double h = eta[c] / nsd;
    step.volume_old.segment(c * ns, ns).setConstant(area[c] * h);
    step.vertical_coeff[c] = area[c] / h;
  }
  step.lateral_coeff.resize(static_cast<Index>(faces.size()) * ns);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const PlanFace& face = faces[f];
    const double h = 0.5 * (eta[face.owner] + eta[face.neighbour]) / nsd;
    step.lateral_coeff.segment(static_cast<Index>(f) * ns, ns)
        .setConstant(face.length * h / face.distance);
  }
}

}  // namespace

TransportStep make_transport_step(const Mesh& mesh, const VectorX& eta, double dt) {
  TransportStep step;
  step.dt = dt;
  fill_geometry(mesh, eta, step);
  step.lateral_flux = VectorX::Zero(static_cast<Index>(mesh.faces().size()) * mesh.n_sigma());
  step.vertical_flux = VectorX::Zero(mesh.n_columns() * (mesh.n_sigma() - 1));
  return step;
}

TransportStep make_transport_step(const Mesh& mesh, const VectorX& eta_old,
                                  const VectorX& eta_new, const VectorX& lateral_flux,
                                  const VectorX& interface_velocity, double dt) {
  TransportStep step;
  step.dt = dt;
  fill_geometry(mesh, eta_old, step);
  step.lateral_flux = lateral_flux;

  const Index ns = mesh.n_sigma();
  const auto nsd = static_cast<double>(ns);
  const VectorX& area = mesh.plan_cell_areas();
  step.vertical_flux.resize(mesh.n_columns() * (ns - 1));
  for (Index c = 0; c < mesh.n_columns(); ++c) {
    const double surface_rate = (eta_new[c] - eta_old[c]) / dt;
    for (Index k = 0; k + 1 < ns; ++k) {
      const double mesh_w = static_cast<double>(k + 1) / nsd * surface_rate;
      step.vertical_flux[c * (ns - 1) + k] =
          area[c] * (interface_velocity[c * ns + k] - mesh_w);
    }
  }
  return step;
}

VectorX gcl_volumes(const Mesh& mesh, const TransportStep& step) {
  const Index ns = mesh.n_sigma();
  VectorX vol = step.volume_old;
  const auto& faces = mesh.faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (Index k = 0; k < ns; ++k) {
      const double flux = step.lateral_flux[static_cast<Index>(f) * ns + k];
      vol[mesh.cell(faces[f].owner, k)] -= step.dt * flux;
      vol[mesh.cell(faces[f].neighbour, k)] += step.dt * flux;
    }
  }
  for (Index c = 0; c < mesh.n_columns(); ++c) {
    for (Index k = 0; k + 1 < ns; ++k) {
      const double flux = step.vertical_flux[c * (ns - 1) + k];
      vol[mesh.cell(c, k)] -= step.dt * flux;
      vol[mesh.cell(c, k + 1)] += step.dt * flux;
    }
  }
  return vol;
}

void transport_scalar(const Mesh& mesh, const TransportStep& step, double diffusivity,
                      Eigen::Ref<VectorX> field) {
  const Index ns = mesh.n_sigma();
  const double dt = step.dt;
  const auto& faces = mesh.faces();

  VectorX rhs = step.volume_old.cwiseProduct(field);
  VectorX net_out = VectorX::Zero(mesh.n_cells());

  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (Index k = 0; k < ns; ++k) {
      const Index idx = static_cast<Index>(f) * ns + k;
      const Index p = mesh.cell(faces[f].owner, k);
      const Index n = mesh.cell(faces[f].neighbour, k);
      const double flux = step.lateral_flux[idx];
      const double upwind = flux > 0.0 ? field[p] : field[n];
      const double diff = dt * diffusivity * step.lateral_coeff[idx] * (field[n] - field[p]);
      rhs[p] += -dt * flux * upwind + diff;
      rhs[n] += dt * flux * upwind - diff;
      net_out[p] += flux;
      net_out[n] -= flux;
    }
  }

  std::vector<double> lower(static_cast<std::size_t>(ns));
  std::vector<double> diag(static_cast<std::size_t>(ns));
  std::vector<double> upper(static_cast<std::size_t>(ns));
  std::vector<double> b(static_cast<std::size_t>(ns));

  for (Index c = 0; c < mesh.n_columns(); ++c) {
    const double dv = dt * diffusivity * step.vertical_coeff[c];
    for (Index k = 0; k < ns; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const Index cell = mesh.cell(c, k);
      const double below = k > 0 ? step.vertical_flux[c * (ns - 1) + k - 1] : 0.0;
      const double above = k + 1 < ns ? step.vertical_flux[c * (ns - 1) + k] : 0.0;
      const double vol_new = step.volume_old[cell] - dt * (net_out[cell] + above - below);

      double d = vol_new;
      double lo = 0.0;
      double up = 0.0;
      if (above > 0.0) d += dt * above;
      else up -= dt * (-above);
      if (below < 0.0) d += dt * (-below);
      else lo -= dt * below;
      if (k > 0) {
        d += dv;
        lo -= dv;
      }
      if (k + 1 < ns) {
        d += dv;
        up -= dv;
      }
      lower[ku] = lo;
      diag[ku] = d;
      upper[ku] = up;
      b[ku] = rhs[cell];
    }
    // Thomas algorithm.
    for (std::size_t k = 1; k < static_cast<std::size_t>(ns); ++k) {
      const double m = lower[k] / diag[k - 1];
      diag[k] -= m * upper[k - 1];
      b[k] -= m * b[k - 1];
    }
    const auto last = static_cast<std::size_t>(ns - 1);
    field[mesh.cell(c, ns - 1)] = b[last] / diag[last];
    for (std::size_t k = last; k-- > 0;) {
      const Index cell = mesh.cell(c, static_cast<Index>(k));
      field[cell] = (b[k] - upper[k] * field[cell + 1]) / diag[k];
    }
  }
}

double explicit_transport_number(const Mesh& mesh, const TransportStep& step,
                                 double diffusivity) {
  const Index ns = mesh.n_sigma();
  const auto& faces = mesh.faces();
  VectorX load = VectorX::Zero(mesh.n_cells());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (Index k = 0; k < ns; ++k) {
      const Index idx = static_cast<Index>(f) * ns + k;
      const double flux = step.lateral_flux[idx];
      const double diff = diffusivity * step.lateral_coeff[idx];
      load[mesh.cell(faces[f].owner, k)] += std::max(flux, 0.0) + diff;
      load[mesh.cell(faces[f].neighbour, k)] += std::max(-flux, 0.0) + diff;
    }
  }
  return step.dt * load.cwiseQuotient(step.volume_old).maxCoeff();
}

}  // namespace raceway
