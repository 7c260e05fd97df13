#pragma once

#include <cstddef>

#include "cvqkd/channel.hpp"
#include "cvqkd/core.hpp"

namespace cvqkd {

/// The eight second moments the relay-based estimators consume, in N0 units.
/// n > 0 marks an empirical set; analytic constructions leave n = 0.
struct MomentSet {
  double m_xA0_sq = 0.0;
  double m_pB0_sq = 0.0;
  double m_xC_sq = 0.0;
  double m_pD_sq = 0.0;
  double m_xA0_xC = 0.0;
  double m_pB0_pD = 0.0;
  double m_xC_xD = 0.0;
  double m_pC_pD = 0.0;
  std::size_t n = 0;
};

/// What Alice, Bob and Charlie believe about the links. Under a seeding
/// attack with gain g the believed values are biased: T_hat = g*T,
/// eps_hat = eps/g. A negative eps_hat can arise from sampling noise and is
/// flagged, never clamped, because that bias is the phenomenon under study.
struct ChannelEstimate {
  double t_ac_hat = 0.0;
  double t_bc_hat = 0.0;
  double eps_ac_hat = 0.0;
  double eps_bc_hat = 0.0;
  bool eps_ac_negative = false;
  bool eps_bc_negative = false;
};

struct EstimateStdErrors {
  double t_ac = 0.0;
  double t_bc = 0.0;
  double eps_ac = 0.0;
  double eps_bc = 0.0;
};

/// Standard errors of the eight sample moments plus the two aggregate
/// combinations <x_C^2>+<x_C x_D> and <p_D^2>-<p_C p_D>.
struct MomentStdErrors {
  double xa0_sq = 0.0;
  double pb0_sq = 0.0;
  double xc_sq = 0.0;
  double pd_sq = 0.0;
  double xa0_xc = 0.0;
  double pb0_pd = 0.0;
  double xc_xd = 0.0;
  double pc_pd = 0.0;
  double agg_a = 0.0;
  double agg_b = 0.0;
};

MomentSet compute_moments(const SampleBatch& batch);

/// Closed-form moments of the detected relay outputs for ground truth
/// (T, eps) per link, modulation variances, detector model, seeding gains and
/// intercept-resend fraction u on the A-C link. Sender moments are the
/// un-seeded values the parties record.
MomentSet expected_moments(double t_ac, double t_bc, double eps_ac, double eps_bc,
                           double v_a, double v_b, const DetectorModel& det, double g_alice,
                           double g_bob, double u, double n0 = 1.0);
MomentSet expected_moments(const MdiParams& params, const AttackConfig& attack,
                           double n0 = 1.0);

/// The four relay-moment estimators:
///   T_AC = 2<x_A0 x_C>^2 / (eta <x_A0^2>^2)
///   eps_AC = [<x_C^2>+<x_C x_D> - N0 - nu_el*N0] / [2 (<x_A0 x_C>/<x_A0^2>)^2 N0]
///            - <x_A0^2>/N0
/// and the B-side analogues built from <p_B0 p_D>, <p_D^2> - <p_C p_D>.
ChannelEstimate estimate_channel(const MomentSet& m, const DetectorModel& det, double n0);

/// The bias law in closed form: (g*T_AC, g*T_BC, eps_AC/g, eps_BC/g).
ChannelEstimate attacked_estimates_analytic(const ChannelTruth& ac, const ChannelTruth& bc,
                                            double g);

/// Estimated excess noise when intercept-resend of fraction u hides behind a
/// seeding gain g: (eps_t + 2u)/g.
double pir_excess_noise(double eps_t, double u, double g);

/// Smallest gain that pushes the estimated noise down to eps_target:
/// g_min = (eps_t + 2u)/eps_target.
double concealment_gain(double eps_t, double u, double eps_target);

/// Delta-method standard errors of the four channel estimators, computed
/// from the empirical covariance of the per-sample moment products.
EstimateStdErrors estimate_standard_errors(const SampleBatch& batch, const DetectorModel& det,
                                           double n0);

MomentStdErrors moment_standard_errors(const SampleBatch& batch);

}  // namespace cvqkd
