#pragma once

#include <array>
#include <vector>

#include "cvqkd/core.hpp"
#include "cvqkd/estimation.hpp"

namespace cvqkd {

/// Bosonic entropy G(x) = (x+1)log2(x+1) - x log2 x, G(0) = 0. Rounding
/// residue down to -1e-9 is snapped to zero; anything lower throws.
double g_entropy(double x);

/// Real part of the analytic continuation of G to (-1, 0):
/// (x+1)log2(x+1) - x log2|x|. Attack-biased estimates can describe channels
/// no quantum state realizes (believed excess noise below zero, believed
/// transmittance above one); their entropy terms then involve symplectic
/// values below 1. This is the number an evaluation of the formula without a
/// physicality gate produces, and it is what the believed key rate of the
/// deceived parties is built from. Throws for x <= -1.
double g_entropy_continued(double x);

/// The MDI link pair reduced to one equivalent one-way channel. k is the
/// displacement gain that minimizes the equivalent excess noise; with that
/// choice T_m = (T_AC/2) k^2 = T_AC V_B / (T_BC (V_B + 2)).
struct EffectiveOneWayParams {
  double t_m = 1.0;
  double eps_m = 0.0;
  double k = 1.0;
};

EffectiveOneWayParams mdi_effective_params(double t_ac, double t_bc, double eps_ac,
                                           double eps_bc, double v_b);

/// Two-mode covariance matrix [[a I, c sigma_z], [c sigma_z, b I]].
struct CovarianceMatrixAB {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;

  static CovarianceMatrixAB from_effective(double v_a, const EffectiveOneWayParams& eff);

  bool physical(double tol = 1e-9) const {
    return a >= 1.0 - tol && b >= 1.0 - tol && a * b - c * c >= 1.0 - tol;
  }

  /// Row-major 4x4 in (x_A, p_A, x_B, p_B) ordering; handy for generic
  /// symplectic-eigenvalue cross-checks.
  std::array<double, 16> matrix4() const {
    return {a, 0, c,  0,
            0, a, 0,  -c,
            c, 0, b,  0,
            0, -c, 0, b};
  }
};

/// chi_BE = G((l1-1)/2) + G((l2-1)/2) - G((l3-1)/2) from the closed-form
/// symplectic eigenvalues. physical=false marks parameter sets whose
/// covariance matrix is not a quantum state (estimated branches under a
/// strong enough attack). The value is then still computed, through the
/// continued G, because that is what the deceived parties' software reports;
/// the eigenvalues are never clamped to 1, which would overstate the leak
/// and invert the estimated-vs-practical ordering. chi is NaN only when the
/// eigenvalues themselves stop being real.
struct HolevoTerms {
  double chi_be = 0.0;
  std::array<double, 3> lambdas{1.0, 1.0, 1.0};
  bool physical = true;
};

double mdi_mutual_information(double v_a, const EffectiveOneWayParams& eff);
HolevoTerms mdi_holevo(double v_a, const EffectiveOneWayParams& eff);

/// physical=false flags a branch whose covariance matrix fails the quantum
/// physicality check; the rate is still reported via the continued entropy
/// (see HolevoTerms) so the deceived parties' believed curve stays plottable.
struct KeyRateReport {
  double i_ab = 0.0;
  double chi_be = 0.0;
  double k = 0.0;
  std::vector<double> lambdas;
  bool feasible = false;  // k > 0
  bool physical = true;
};

KeyRateReport mdi_keyrate_from_effective(double v_a, double t_m, double eps_m, double beta);
KeyRateReport mdi_keyrate(const MdiParams& params);

/// Believed modulation variances and effective channel under seeding gain g
/// applied to both sources.
struct MdiAttackedParams {
  double v_a = 0.0;
  double v_b = 0.0;
  double t_m = 0.0;
  double eps_m = 0.0;
};

MdiAttackedParams mdi_attacked_params(double t_ac, double t_bc, double eps_ac, double eps_bc,
                                      double v_a, double v_b, double g);

struct KeyRatePair {
  KeyRateReport estimated;
  KeyRateReport practical;
};

/// estimated: true (V, T_m) with the attack-biased eps'_m, what Alice and Bob
/// compute. practical: attacked (V', T'_m) with the true eps_m, what the
/// devices actually deliver. Their gap is Eve's margin.
KeyRatePair mdi_keyrate_pair(const MdiParams& params, double g);

/// One-way GMCS key rate, homodyne reverse reconciliation, trusted detector.
KeyRateReport oneway_keyrate_from_t(double v_a0, double t, double eps,
                                    const DetectorModel& det, double beta);
KeyRateReport oneway_keyrate(const OneWayParams& params);

/// estimated: (V_A0, g*T, eps/g); practical: (g*V_A0, T, eps).
KeyRatePair oneway_keyrate_pair_from_t(double v_a0, double t, double eps,
                                       const DetectorModel& det, double beta, double g);
KeyRatePair oneway_keyrate_pair(const OneWayParams& params, double g);

}  // namespace cvqkd
