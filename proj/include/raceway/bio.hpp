#pragma once

#include "raceway/geometry.hpp"
#include "raceway/hydro.hpp"
#include "raceway/types.hpp"

#include <cmath>
#include <numbers>

namespace raceway {

/// Kinetic and transport coefficients of the eight-species algae model.
///
/// Rates are per second. The default values are placeholders in plausible ranges for a
/// green microalga; nothing in the test suite relies on them.
struct BioParams {
  double diff_A = 1e-3;
  double diff_P = 1e-3;
  double diff_N = 1e-3;
  double diff_D = 1e-3;
  double diff_O = 1e-3;

  double death_rate = 5.8e-7;        // gamma
  double respiration_rate = 1.16e-6;  // beta
  double half_sat_N = 0.1;           // K_N
  double half_sat_P = 0.02;          // K_P
  double stoich_N = 0.063;           // C_N
  double stoich_P = 0.009;           // C_P
  double frac_assim_P = 0.5;         // delta_1
  double rate_P2_to_PO4 = 1.16e-6;   // kappa_1
  double sed_rate = 1.0e-7;          // first-order settling loss of P2, N2, D
  double nitrif_rate = 1.16e-6;      // kappa_2
  double frac_assim_N = 0.5;         // delta_2
  double rate_N2_to_NO3 = 5.8e-7;    // kappa_3
  double photo_O2 = 1.3;             // phi
  double degrad_rate_D = 2.3e-6;     // kappa_4
  double O2_per_nitrif = 4.57;       // nu
  double O2_saturation = 9.1;        // C_s
  double benthic_demand = 0.0;       // B
  double reaeration_rate = 1.16e-5;  // coefficient of (C_s - O)
  double mu_max = 1.74e-5;
  double theta_coeff = 1.047;        // Theta
  double theta_ref = 20.0;           // reference temperature, deg C
  double atten_depth = 0.5;          // Phi_1, 1/m
  double atten_algae = 0.01;         // Phi_2

  /// Measure the light attenuation coordinate downward from the free surface (true) or
  /// upward from the bottom, as x3 (false).
  bool attenuation_from_surface = true;

  double diffusivity(int species) const {
    switch (species) {
      case kA: return diff_A;
      case kP1:
      case kP2: return diff_P;
      case kN1:
      case kN2:
      case kN3: return diff_N;
      case kD: return diff_D;
      default: return diff_O;
    }
  }
};

void validate(const BioParams& p);

/// Temperature and incident light as functions of time.
struct Forcings {
  enum class Kind { Constant, Diurnal };
  Kind kind = Kind::Constant;
  double temperature = 20.0;       // constant preset, deg C
  double light = 1.0;              // constant preset
  double base_temperature = 20.0;  // diurnal: base + amplitude * sin(2 pi t / period)
  double temperature_amplitude = 2.0;
  double period = 86400.0;

  double temperature_at(double t) const {
    if (kind == Kind::Constant) return temperature;
    return base_temperature +
           temperature_amplitude * std::sin(2.0 * std::numbers::pi * t / period);
  }
  double light_at(double t) const {
    if (kind == Kind::Constant) return light;
    return std::max(0.0, std::sin(2.0 * std::numbers::pi * t / period));
  }
};

void validate(const Forcings& f);

struct SpeciesState {
  SpeciesMatrix fields;  // species x cells
  double time = 0.0;
};

SpeciesState uniform_species(const Mesh& mesh, const SpeciesVector<double>& values);

template <typename Scalar>
Scalar temperature_factor(const BioParams& p, const Forcings& f, double t) {
  using std::pow;
  return pow(Scalar(p.theta_coeff), Scalar(f.temperature_at(t) - p.theta_ref));
}

/// Light-limited growth rate L (1/s) at a given attenuation depth.
template <typename Scalar>
Scalar light_factor(const BioParams& p, const Forcings& f, Scalar algae, Scalar depth,
                    double t) {
  using std::exp;
  return Scalar(p.mu_max) * temperature_factor<Scalar>(p, f, t) * Scalar(f.light_at(t)) *
         exp(-(Scalar(p.atten_depth) + Scalar(p.atten_algae) * algae) * depth);
}

namespace detail {
template <typename Scalar>
Scalar saturation(Scalar c, Scalar k) {
  const Scalar den = k + c;
  return den > Scalar(0) ? c / den : Scalar(0);
}
}  // namespace detail

/// L * P1/(K_P + P1) * (N1 + N3)/(K_N + N1 + N3).
template <typename Scalar>
Scalar monod_growth(const BioParams& p, Scalar light, Scalar P1, Scalar N1, Scalar N3) {
  return light * detail::saturation(P1, Scalar(p.half_sat_P)) *
         detail::saturation(N1 + N3, Scalar(p.half_sat_N));
}

/// Reaction terms of the eight-species system at one point.
template <typename Scalar>
SpeciesVector<Scalar> reaction_rhs(const BioParams& p, const Forcings& f,
                                   const SpeciesVector<Scalar>& s, Scalar depth, double t) {
  const Scalar A = s[kA], P1 = s[kP1], P2 = s[kP2], N1 = s[kN1], N2 = s[kN2], N3 = s[kN3],
               D = s[kD], O = s[kO];
  const Scalar theta = temperature_factor<Scalar>(p, f, t);
  const Scalar light = light_factor<Scalar>(p, f, A, depth, t);
  const Scalar p_lim = detail::saturation(P1, Scalar(p.half_sat_P));
  const Scalar n_den = Scalar(p.half_sat_N) + N1 + N3;
  const Scalar n1_share = n_den > Scalar(0) ? N1 / n_den : Scalar(0);
  const Scalar n3_share = n_den > Scalar(0) ? N3 / n_den : Scalar(0);
  const Scalar growth = light * p_lim * (n1_share + n3_share);
  const Scalar loss = Scalar(p.death_rate + p.respiration_rate);

  const Scalar CP(p.stoich_P), CN(p.stoich_N), d1(p.frac_assim_P), d2(p.frac_assim_N);
  const Scalar k1(p.rate_P2_to_PO4), k2(p.nitrif_rate), k3(p.rate_N2_to_NO3),
      k4(p.degrad_rate_D), W(p.sed_rate);

  SpeciesVector<Scalar> r;
  r[kA] = (growth - loss) * A;
  r[kP1] = CP * (d1 * loss - growth) * A + k1 * P2;
  r[kP2] = CP * (Scalar(1) - d1) * loss * A - k1 * P2 - W * P2;
  r[kN1] = -CN * light * p_lim * n1_share * A + k2 * N3;
  r[kN2] = CN * (Scalar(1) - d2) * loss * A - k3 * N2 - W * N2;
  r[kN3] = CN * (d2 * loss - light * p_lim * n3_share) * A + k3 * N2 - k2 * N3;
  r[kD] = Scalar(p.photo_O2 * p.death_rate) * A - k4 * theta * D - W * D;
  r[kO] = Scalar(p.photo_O2) * (growth - Scalar(p.respiration_rate)) * A -
          Scalar(p.O2_per_nitrif) * k2 * N3 - k4 * theta * D +
          Scalar(p.reaeration_rate) * theta * (Scalar(p.O2_saturation) - O) -
          Scalar(p.benthic_demand);
  return r;
}

struct BioNumerics {
  int reaction_substeps = 1;
  double cfl_max = 1.0;
  double clip_tolerance = 1e-8;  // clipped mass / total mass per step
  double ceiling = 1e12;         // any concentration above this is a failure
};

struct SpeciesStepInfo {
  double clipped_mass = 0.0;
  double total_mass = 0.0;
  double transport_number = 0.0;
  bool clipping_defect = false;  // clipped_mass > clip_tolerance * total_mass
};

/// Advances all species one step: transport by the last flow step, then reactions.
SpeciesStepInfo step_species(const Mesh& mesh, SpeciesState& state, const FlowState& flow,
                             const BioParams& p, const Forcings& f, double dt,
                             const BioNumerics& numerics = {});

/// Pool totals: integral of P1 + P2 + C_P A and of N1 + N2 + N3 + C_N A.
Vector2 nutrient_pools(const Mesh& mesh, const SpeciesState& s, const VectorX& surface_height,
                       const BioParams& p);

}  // namespace raceway
