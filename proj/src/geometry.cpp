#include "raceway/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace raceway {

namespace {
constexpr double kPi = std::numbers::pi;
}

void validate(const RacewayGeometry& geom) {
  if (!(geom.straight_length > 0.0) || !(geom.channel_width > 0.0) ||
      !(geom.inner_radius > 0.0) || !(geom.outer_radius > 0.0)) {
    throw ConfigError("geometry: L, W, r and R must all be strictly positive");
  }
  const double expected = geom.inner_radius + geom.channel_width;
  if (std::abs(geom.outer_radius - expected) > 1e-12 * expected) {
    throw ConfigError(fmt::format(
        "geometry: outer radius must satisfy R = r + W (got R = {}, r + W = {})",
        geom.outer_radius, expected));
  }
}

bool contains_plan(const RacewayGeometry& geom, double x1, double x2) {
  const double r = geom.inner_radius;
  const double R = geom.outer_radius;
  if (x1 >= 0.0 && x1 <= geom.straight_length) {
    const double a = std::abs(x2);
    return a >= r && a <= R;
  }
  const double dx = x1 < 0.0 ? x1 : x1 - geom.straight_length;
  const double d = std::hypot(dx, x2);
  return d >= r && d <= R;
}

double plan_area(const RacewayGeometry& geom) {
  const double r = geom.inner_radius;
  const double R = geom.outer_radius;
  return 2.0 * geom.straight_length * geom.channel_width + kPi * (R * R - r * r);
}

double centerline_length(const RacewayGeometry& geom) {
  return 2.0 * geom.straight_length + 2.0 * kPi * geom.centerline_radius();
}

Mesh::Mesh(const RacewayGeometry& geom, Index n_streamwise, Index n_transverse, Index n_sigma)
    : geom_(geom), n_streamwise_(n_streamwise), n_transverse_(n_transverse), n_sigma_(n_sigma) {
  if (n_streamwise < 2 || n_transverse < 2 || n_sigma < 2) {
    throw ConfigError(fmt::format(
        "mesh: all cell counts must be >= 2 (got {} x {} x {})", n_streamwise, n_transverse,
        n_sigma));
  }
  if (n_streamwise % 2 != 0 || n_streamwise < 4) {
    throw ConfigError(fmt::format(
        "mesh: n_streamwise must be even and >= 4 so each straight and bend gets a cell "
        "(got {})",
        n_streamwise));
  }
  validate(geom);

  // Each half loop (one straight plus one bend) gets n_streamwise / 2 cells, split in
  // proportion to centerline length.
  const Index half = n_streamwise / 2;
  const double rc = geom.centerline_radius();
  const double bend_len = kPi * rc;
  n_bend_ = static_cast<Index>(
      std::lround(static_cast<double>(half) * bend_len / (geom.straight_length + bend_len)));
  n_bend_ = std::clamp<Index>(n_bend_, 1, half - 1);
  n_straight_ = half - n_bend_;
  straight_step_ = geom.straight_length / static_cast<double>(n_straight_);
  bend_step_ = kPi / static_cast<double>(n_bend_);

  const double r = geom.inner_radius;
  const double dn = geom.channel_width / static_cast<double>(n_transverse_);

  centers_.resize(2, n_columns());
  areas_.resize(n_columns());
  column_faces_.assign(static_cast<std::size_t>(n_columns()), {});

  for (Index i = 0; i < n_streamwise_; ++i) {
    const bool straight = locate(static_cast<double>(i) + 0.5).segment % 2 == 0;
    for (Index j = 0; j < n_transverse_; ++j) {
      const double rho0 = r + static_cast<double>(j) * dn;
      const double rho1 = rho0 + dn;
      const Index c = column(i, j);
      centers_.col(c) = station_point(static_cast<double>(i) + 0.5, 0.5 * (rho0 + rho1));
      areas_[c] = straight ? straight_step_ * dn
                           : 0.5 * bend_step_ * (rho1 * rho1 - rho0 * rho0);
    }
  }

  auto tangent_at = [this](double u) -> Vector2 {
    const Station st = locate(u);
    switch (st.segment) {
      case 0: return {1.0, 0.0};
      case 2: return {-1.0, 0.0};
      default: {
        const double theta = st.segment == 1 ? 0.5 * kPi - st.local : -0.5 * kPi - st.local;
        return {std::sin(theta), -std::cos(theta)};
      }
    }
  };
  auto radial_at = [this](double u) -> Vector2 {
    const Station st = locate(u);
    switch (st.segment) {
      case 0: return {0.0, 1.0};
      case 2: return {0.0, -1.0};
      default: {
        const double theta = st.segment == 1 ? 0.5 * kPi - st.local : -0.5 * kPi - st.local;
        return {std::cos(theta), std::sin(theta)};
      }
    }
  };

  auto add_face = [this](PlanFace f) {
    const Vector2 d = centers_.col(f.neighbour) - centers_.col(f.owner);
    f.distance = d.dot(f.normal);
    const auto id = static_cast<Index>(faces_.size());
    column_faces_[f.owner].push_back(id);
    column_faces_[f.neighbour].push_back(id);
    faces_.push_back(f);
  };

  for (Index i = 0; i < n_streamwise_; ++i) {
    const Index ip = next_streamwise(i);
    const Vector2 t = tangent_at(static_cast<double>(i + 1 == n_streamwise_ ? 0 : i + 1));
    for (Index j = 0; j < n_transverse_; ++j) {
      add_face({column(i, j), column(ip, j), t, dn, 0.0, true});
    }
  }
  for (Index i = 0; i < n_streamwise_; ++i) {
    const double mid = static_cast<double>(i) + 0.5;
    const bool straight = locate(mid).segment % 2 == 0;
    const Vector2 radial = radial_at(mid);
    for (Index j = 0; j + 1 < n_transverse_; ++j) {
      const double rho = r + static_cast<double>(j + 1) * dn;
      const double len = straight ? straight_step_ : 2.0 * rho * std::sin(0.5 * bend_step_);
      add_face({column(i, j), column(i, j + 1), radial, len, 0.0, false});
    }
  }
}

Mesh::Station Mesh::locate(double u) const {
  const auto ns = static_cast<double>(n_streamwise_);
  u = std::fmod(u, ns);
  if (u < 0.0) u += ns;
  const auto nst = static_cast<double>(n_straight_);
  const auto nb = static_cast<double>(n_bend_);
  const double half = nst + nb;
  const int base = u >= half ? 2 : 0;
  const double v = u >= half ? u - half : u;
  if (v < nst) return {base, v * straight_step_};
  return {base + 1, (v - nst) * bend_step_};
}

Vector2 Mesh::station_point(double u, double rho) const {
  const Station st = locate(u);
  const double L = geom_.straight_length;
  switch (st.segment) {
    case 0: return {st.local, rho};
    case 2: return {L - st.local, -rho};
    case 1: {
      const double theta = 0.5 * kPi - st.local;
      return {L + rho * std::cos(theta), rho * std::sin(theta)};
    }
    default: {
      const double theta = -0.5 * kPi - st.local;
      return {rho * std::cos(theta), rho * std::sin(theta)};
    }
  }
}

double Mesh::streamwise_length(Index i, double rho) const {
  const bool straight = locate(static_cast<double>(i) + 0.5).segment % 2 == 0;
  return straight ? straight_step_ : rho * bend_step_;
}

double Mesh::area_jacobian(Index i, double rho) const { return streamwise_length(i, rho); }

double Mesh::centerline_length() const {
  double total = 0.0;
  for (Index i = 0; i < n_streamwise_; ++i) total += streamwise_length(i, geom_.centerline_radius());
  return total;
}

std::string Mesh::summary() const {
  std::string out;
  out += fmt::format("geometry L={} W={} r={} R={}\n", geom_.straight_length,
                     geom_.channel_width, geom_.inner_radius, geom_.outer_radius);
  out += fmt::format("cells {} x {} x {} (plan cells {}, total {})\n", n_streamwise_,
                     n_transverse_, n_sigma_, n_columns(), n_cells());
  out += fmt::format("streamwise split: {} straight + {} bend cells per half loop\n",
                     n_straight_, n_bend_);
  out += fmt::format("plan area (mesh) {:.9g}\n", areas_.sum());
  out += fmt::format("plan area (exact) {:.9g}\n", plan_area(geom_));
  out += fmt::format("centerline length {:.9g}\n", centerline_length());
  return out;
}

Mesh build_mesh(const RacewayGeometry& geom, Index n_streamwise, Index n_transverse,
                Index n_sigma) {
  return Mesh(geom, n_streamwise, n_transverse, n_sigma);
}

}  // namespace raceway
