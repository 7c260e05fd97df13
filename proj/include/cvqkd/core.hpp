#pragma once

#include <cmath>
#include <stdexcept>

namespace cvqkd {

/// All variances in this library are expressed in shot-noise units: the vacuum
/// quadrature variance N0 is the unit. Internally N0 = 1; estimator entry
/// points still take N0 explicitly so calibration-error studies stay possible.
struct ShotNoiseConvention {
  double n0 = 1.0;

  void validate() const {
    if (!(n0 > 0.0)) throw std::invalid_argument("shot-noise variance N0 must be > 0");
  }
};

/// A point in phase space, components in sqrt(N0) units.
struct QuadraturePair {
  double x = 0.0;
  double p = 0.0;
};

/// Homodyne detector: efficiency eta and electronic noise nu_el (SNU).
struct DetectorModel {
  double eta = 1.0;
  double nu_el = 0.0;

  void validate() const {
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("detector eta must be in (0,1]");
    if (!(nu_el >= 0.0)) throw std::invalid_argument("detector nu_el must be >= 0");
  }
};

/// Ground-truth parameters of one Gaussian linear channel:
/// out = sqrt(T)*in + z with Var z = T*eps*N0 + N0 per quadrature.
struct ChannelTruth {
  double t = 1.0;
  double eps = 0.0;

  void validate() const {
    if (!(t > 0.0) || t > 1.0) throw std::invalid_argument("channel transmittance must be in (0,1]");
    if (!(eps >= 0.0)) throw std::invalid_argument("channel excess noise must be >= 0");
  }

  /// Total additive noise variance seen at the channel output, in N0 units.
  double noise_variance(double n0 = 1.0) const { return t * eps * n0 + n0; }
};

struct OneWayParams {
  double v_a0 = 4.0;            // modulation variance (SNU)
  double l_km = 0.0;            // fiber length
  double loss_db_per_km = 0.2;  // fiber attenuation
  double eps = 0.01;            // channel excess noise (SNU)
  DetectorModel det{0.5, 0.01};
  double beta = 0.95;           // reverse-reconciliation efficiency

  void validate() const {
    if (!(v_a0 > 0.0)) throw std::invalid_argument("V_A0 must be > 0");
    if (!(l_km >= 0.0)) throw std::invalid_argument("distance must be >= 0");
    if (!(loss_db_per_km >= 0.0)) throw std::invalid_argument("loss must be >= 0");
    if (!(eps >= 0.0)) throw std::invalid_argument("excess noise must be >= 0");
    if (!(beta > 0.0) || beta > 1.0) throw std::invalid_argument("beta must be in (0,1]");
    det.validate();
  }
};

struct MdiParams {
  double v_a = 40.0;            // Alice modulation variance (SNU)
  double v_b = 40.0;            // Bob modulation variance (SNU)
  double l_ac_km = 0.0;
  double l_bc_km = 0.0;
  double loss_db_per_km = 0.2;
  double eps_ac = 0.01;         // per-link excess noise (SNU)
  double eps_bc = 0.01;
  DetectorModel charlie_det{0.6, 0.01};
  double beta = 0.95;

  void validate() const {
    if (!(v_a > 0.0) || !(v_b > 0.0)) throw std::invalid_argument("V_A, V_B must be > 0");
    if (!(l_ac_km >= 0.0) || !(l_bc_km >= 0.0)) throw std::invalid_argument("link lengths must be >= 0");
    if (!(loss_db_per_km >= 0.0)) throw std::invalid_argument("loss must be >= 0");
    if (!(eps_ac >= 0.0) || !(eps_bc >= 0.0)) throw std::invalid_argument("excess noise must be >= 0");
    if (!(beta > 0.0) || beta > 1.0) throw std::invalid_argument("beta must be in (0,1]");
    charlie_det.validate();
  }

  bool symmetric() const { return l_ac_km == l_bc_km; }
  bool extreme_asymmetric() const { return l_bc_km == 0.0; }
};

/// Source-side attack settings. Seeding multiplies pulse intensity by g, so
/// quadratures scale by sqrt(g). The intercept-resend fraction u applies to
/// the A-C link. Key-rate analysis assumes g_alice == g_bob.
struct AttackConfig {
  double g_alice = 1.0;
  double g_bob = 1.0;
  double u = 0.0;

  void validate() const {
    if (!(g_alice >= 1.0) || !(g_bob >= 1.0))
      throw std::invalid_argument("seeding gain must be >= 1");
    if (!(u >= 0.0) || u > 1.0) throw std::invalid_argument("intercept fraction u must be in [0,1]");
  }
};

inline constexpr double kDefaultLossDbPerKm = 0.2;

/// Standard fiber model T = 10^(-loss*L/10).
inline double transmittance_from_distance(double l_km, double loss_db_per_km = kDefaultLossDbPerKm) {
  if (!(l_km >= 0.0)) throw std::invalid_argument("distance must be >= 0");
  if (!(loss_db_per_km >= 0.0)) throw std::invalid_argument("loss must be >= 0");
  return std::pow(10.0, -loss_db_per_km * l_km / 10.0);
}

/// Mean quadratures of a coherent state given amplitude and phase.
inline QuadraturePair coherent_from_polar(double amplitude, double theta) {
  if (!(amplitude >= 0.0)) throw std::invalid_argument("amplitude must be >= 0");
  return {amplitude * std::cos(theta), amplitude * std::sin(theta)};
}

}  // namespace cvqkd
