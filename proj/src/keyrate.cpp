#include "cvqkd/keyrate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cvqkd {
namespace {

constexpr double kTol = 1e-9;
const double kNan = std::numeric_limits<double>::quiet_NaN();

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

double g_entropy(double x) {
  if (!(x >= -kTol)) throw std::domain_error("g_entropy: negative argument");
  if (x <= 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

double g_entropy_continued(double x) {
  if (!(x > -1.0)) throw std::domain_error("g_entropy_continued: argument must be > -1");
  if (x == 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(std::abs(x));
}

EffectiveOneWayParams mdi_effective_params(double t_ac, double t_bc, double eps_ac,
                                           double eps_bc, double v_b) {
  if (!(t_ac > 0.0) || !(t_bc > 0.0))
    throw std::invalid_argument("mdi_effective_params: transmittance must be > 0");
  if (!(v_b > 0.0)) throw std::invalid_argument("mdi_effective_params: V_B must be > 0");
  require_finite(eps_ac, "eps_AC");
  require_finite(eps_bc, "eps_BC");
  EffectiveOneWayParams eff;
  eff.k = std::sqrt(2.0 * v_b / (t_bc * (v_b + 2.0)));
  eff.t_m = t_ac * v_b / (t_bc * (v_b + 2.0));
  eff.eps_m = (t_bc / t_ac) * (eps_bc - 2.0) + eps_ac + 2.0 / t_ac;
  return eff;
}

CovarianceMatrixAB CovarianceMatrixAB::from_effective(double v_a,
                                                      const EffectiveOneWayParams& eff) {
  CovarianceMatrixAB cm;
  cm.a = v_a + 1.0;
  cm.b = eff.t_m * (v_a + eff.eps_m) + 1.0;
  cm.c = std::sqrt(eff.t_m * v_a * (v_a + 2.0));
  return cm;
}

double mdi_mutual_information(double v_a, const EffectiveOneWayParams& eff) {
  if (!(v_a > 0.0)) throw std::invalid_argument("V_A must be > 0");
  if (!(eff.t_m > 0.0)) throw std::invalid_argument("T_m must be > 0");
  const double chi_line = 1.0 / eff.t_m - 1.0 + eff.eps_m;
  const double denom = 1.0 + chi_line;
  if (!(denom > 0.0)) throw std::domain_error("mdi_mutual_information: 1 + chi_line <= 0");
  return std::log2((v_a + 1.0 + chi_line) / denom);
}

HolevoTerms mdi_holevo(double v_a, const EffectiveOneWayParams& eff) {
  if (!(v_a > 0.0)) throw std::invalid_argument("V_A must be > 0");
  if (!(eff.t_m > 0.0)) throw std::invalid_argument("T_m must be > 0");
  const CovarianceMatrixAB cm = CovarianceMatrixAB::from_effective(v_a, eff);
  const double c2 = cm.c * cm.c;
  const double a_m = cm.a * cm.a + cm.b * cm.b - 2.0 * c2;
  const double b_m = (cm.a * cm.b - c2) * (cm.a * cm.b - c2);
  const double disc = a_m * a_m - 4.0 * b_m;
  const double disc_floor = -kTol * std::max(1.0, a_m * a_m);

  HolevoTerms out;
  if (disc < disc_floor) {
    out.physical = false;
    out.lambdas = {kNan, kNan, kNan};
    out.chi_be = kNan;
    return out;
  }
  const double root = std::sqrt(std::max(disc, 0.0));
  const double l1 = std::sqrt(0.5 * (a_m + root));
  const double l2 = std::sqrt(std::max(0.0, 0.5 * (a_m - root)));
  const double l3 = ((eff.t_m * eff.eps_m + 2.0) * (v_a + 1.0) - eff.t_m * v_a) /
                    (eff.t_m * (eff.eps_m + v_a) + 2.0);
  out.lambdas = {l1, l2, l3};
  out.physical =
      cm.physical(kTol) && l1 >= 1.0 - kTol && l2 >= 1.0 - kTol && l3 >= 1.0 - kTol;
  const double x1 = 0.5 * (l1 - 1.0);
  const double x2 = 0.5 * (l2 - 1.0);
  const double x3 = 0.5 * (l3 - 1.0);
  if (out.physical) {
    out.chi_be = g_entropy(x1) + g_entropy(x2) - g_entropy(x3);
  } else if (x1 > -1.0 && x2 > -1.0 && x3 > -1.0) {
    // Not a quantum state, but the believed rate the deceived parties compute
    // is this value of the formula; see g_entropy_continued.
    out.chi_be = g_entropy_continued(x1) + g_entropy_continued(x2) - g_entropy_continued(x3);
  } else {
    out.chi_be = kNan;
  }
  return out;
}

KeyRateReport mdi_keyrate_from_effective(double v_a, double t_m, double eps_m, double beta) {
  if (!(v_a > 0.0)) throw std::invalid_argument("V_A must be > 0");
  if (!(t_m > 0.0)) throw std::invalid_argument("T_m must be > 0");
  if (!(beta >= 0.0) || beta > 1.0) throw std::invalid_argument("beta must be in [0,1]");
  require_finite(eps_m, "eps_m");

  const EffectiveOneWayParams eff{t_m, eps_m, 1.0};
  KeyRateReport report;
  const double chi_line = 1.0 / t_m - 1.0 + eps_m;
  if (!(1.0 + chi_line > 0.0)) {
    report.i_ab = kNan;
    report.chi_be = kNan;
    report.k = kNan;
    report.lambdas = {kNan, kNan, kNan};
    report.physical = false;
    return report;
  }
  report.i_ab = mdi_mutual_information(v_a, eff);
  const HolevoTerms holevo = mdi_holevo(v_a, eff);
  report.chi_be = holevo.chi_be;
  report.lambdas.assign(holevo.lambdas.begin(), holevo.lambdas.end());
  report.physical = holevo.physical;
  report.k = beta * report.i_ab - report.chi_be;  // NaN chi propagates
  report.feasible = report.k > 0.0;
  return report;
}

KeyRateReport mdi_keyrate(const MdiParams& params) {
  params.validate();
  const double t_ac = transmittance_from_distance(params.l_ac_km, params.loss_db_per_km);
  const double t_bc = transmittance_from_distance(params.l_bc_km, params.loss_db_per_km);
  const EffectiveOneWayParams eff =
      mdi_effective_params(t_ac, t_bc, params.eps_ac, params.eps_bc, params.v_b);
  return mdi_keyrate_from_effective(params.v_a, eff.t_m, eff.eps_m, params.beta);
}

MdiAttackedParams mdi_attacked_params(double t_ac, double t_bc, double eps_ac, double eps_bc,
                                      double v_a, double v_b, double g) {
  if (!(t_ac > 0.0) || !(t_bc > 0.0))
    throw std::invalid_argument("mdi_attacked_params: transmittance must be > 0");
  if (!(v_a > 0.0) || !(v_b > 0.0))
    throw std::invalid_argument("mdi_attacked_params: modulation variance must be > 0");
  if (!(g >= 1.0)) throw std::invalid_argument("seeding gain must be >= 1");
  MdiAttackedParams out;
  out.v_a = g * v_a;
  out.v_b = g * v_b;
  out.t_m = g * t_ac * v_b / (t_bc * (g * v_b + 2.0));
  out.eps_m = (t_bc / t_ac) * (eps_bc / g - 2.0) + eps_ac / g + 2.0 / (g * t_ac);
  return out;
}

KeyRatePair mdi_keyrate_pair(const MdiParams& params, double g) {
  params.validate();
  if (!(g >= 1.0)) throw std::invalid_argument("seeding gain must be >= 1");
  const double t_ac = transmittance_from_distance(params.l_ac_km, params.loss_db_per_km);
  const double t_bc = transmittance_from_distance(params.l_bc_km, params.loss_db_per_km);
  const EffectiveOneWayParams eff =
      mdi_effective_params(t_ac, t_bc, params.eps_ac, params.eps_bc, params.v_b);
  const MdiAttackedParams att =
      mdi_attacked_params(t_ac, t_bc, params.eps_ac, params.eps_bc, params.v_a, params.v_b, g);
  KeyRatePair pair;
  pair.estimated = mdi_keyrate_from_effective(params.v_a, eff.t_m, att.eps_m, params.beta);
  pair.practical = mdi_keyrate_from_effective(att.v_a, att.t_m, eff.eps_m, params.beta);
  return pair;
}

KeyRateReport oneway_keyrate_from_t(double v_a0, double t, double eps,
                                    const DetectorModel& det, double beta) {
  if (!(v_a0 > 0.0)) throw std::invalid_argument("V_A0 must be > 0");
  // t > 1 is deliberately allowed: believed transmittances under a seeding
  // attack exceed 1 near the sender and the report flags the consequences.
  if (!(t > 0.0)) throw std::invalid_argument("transmittance must be > 0");
  if (!(beta >= 0.0) || beta > 1.0) throw std::invalid_argument("beta must be in [0,1]");
  require_finite(eps, "eps");
  det.validate();

  const double v = v_a0 + 1.0;
  const double chi_line = 1.0 / t - 1.0 + eps;
  const double chi_hom = ((1.0 - det.eta) + det.nu_el) / det.eta;
  const double chi_tot = chi_line + chi_hom / t;

  KeyRateReport report;
  report.lambdas = {kNan, kNan, kNan, kNan};
  if (!(1.0 + chi_tot > 0.0) || !(v + chi_tot > 0.0)) {
    report.i_ab = kNan;
    report.chi_be = kNan;
    report.k = kNan;
    report.physical = false;
    return report;
  }
  report.i_ab = 0.5 * std::log2((v + chi_tot) / (1.0 + chi_tot));

  const double a_term = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line) * (v + chi_line);
  const double b_term = t * t * (v * chi_line + 1.0) * (v * chi_line + 1.0);
  const double disc1 = a_term * a_term - 4.0 * b_term;
  bool lambdas_real = disc1 >= -kTol * std::max(1.0, a_term * a_term);
  double l1 = kNan, l2 = kNan, l3 = kNan, l4 = kNan;
  if (lambdas_real) {
    const double root1 = std::sqrt(std::max(disc1, 0.0));
    l1 = std::sqrt(std::max(0.0, 0.5 * (a_term + root1)));
    l2 = std::sqrt(std::max(0.0, 0.5 * (a_term - root1)));

    const double sqrt_b = std::sqrt(b_term);
    const double denom = t * (v + chi_tot);
    const double c_term = (a_term * chi_hom + v * sqrt_b + t * (v + chi_line)) / denom;
    const double d_term = sqrt_b * (v + sqrt_b * chi_hom) / denom;
    const double disc2 = c_term * c_term - 4.0 * d_term;
    if (disc2 < -kTol * std::max(1.0, c_term * c_term)) {
      lambdas_real = false;
    } else {
      const double root2 = std::sqrt(std::max(disc2, 0.0));
      l3 = std::sqrt(std::max(0.0, 0.5 * (c_term + root2)));
      l4 = std::sqrt(std::max(0.0, 0.5 * (c_term - root2)));
    }
  }
  report.lambdas = {l1, l2, l3, l4};
  const bool physical = lambdas_real && l1 >= 1.0 - kTol && l2 >= 1.0 - kTol &&
                        l3 >= 1.0 - kTol && l4 >= 1.0 - kTol;
  report.physical = physical;
  if (!lambdas_real) {
    report.chi_be = kNan;
    report.k = kNan;
    report.feasible = false;
    return report;
  }
  if (physical) {
    report.chi_be = g_entropy((l1 - 1.0) / 2.0) + g_entropy((l2 - 1.0) / 2.0) -
                    g_entropy((l3 - 1.0) / 2.0) - g_entropy((l4 - 1.0) / 2.0);
  } else {
    // Believed branch with g*T above 1: no quantum state has these
    // parameters, but the parties' evaluation of the formula still yields a
    // number; see g_entropy_continued. All lambdas are >= 0 here, so the
    // continued arguments stay above -1.
    report.chi_be =
        g_entropy_continued((l1 - 1.0) / 2.0) + g_entropy_continued((l2 - 1.0) / 2.0) -
        g_entropy_continued((l3 - 1.0) / 2.0) - g_entropy_continued((l4 - 1.0) / 2.0);
  }
  report.k = beta * report.i_ab - report.chi_be;
  report.feasible = report.k > 0.0;
  return report;
}

KeyRateReport oneway_keyrate(const OneWayParams& params) {
  params.validate();
  const double t = transmittance_from_distance(params.l_km, params.loss_db_per_km);
  return oneway_keyrate_from_t(params.v_a0, t, params.eps, params.det, params.beta);
}

KeyRatePair oneway_keyrate_pair_from_t(double v_a0, double t, double eps,
                                       const DetectorModel& det, double beta, double g) {
  if (!(g >= 1.0)) throw std::invalid_argument("seeding gain must be >= 1");
  KeyRatePair pair;
  pair.estimated = oneway_keyrate_from_t(v_a0, g * t, eps / g, det, beta);
  pair.practical = oneway_keyrate_from_t(g * v_a0, t, eps, det, beta);
  return pair;
}

KeyRatePair oneway_keyrate_pair(const OneWayParams& params, double g) {
  params.validate();
  const double t = transmittance_from_distance(params.l_km, params.loss_db_per_km);
  return oneway_keyrate_pair_from_t(params.v_a0, t, params.eps, params.det, params.beta, g);
}

}  // namespace cvqkd
