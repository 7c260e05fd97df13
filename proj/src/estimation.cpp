#include "cvqkd/estimation.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cvqkd/kernels.hpp"

namespace cvqkd {
namespace {

double mean_of_products(const std::vector<double>& x, const std::vector<double>& y) {
  const auto& k = kernels::active_kernels();
  return k.dot(x.data(), y.data(), x.size()) / static_cast<double>(x.size());
}

// Covariance matrix of the four sample means of per-sample products
// prods[0..3], scaled to the means (i.e. divided by n). Used by the
// delta-method error propagation.
struct MeanStats {
  std::array<double, 4> mean;
  std::array<std::array<double, 4>, 4> cov;
};

MeanStats mean_statistics(const std::array<const std::vector<double>*, 4>& prods) {
  const auto& k = kernels::active_kernels();
  const std::size_t n = prods[0]->size();
  const double dn = static_cast<double>(n);
  MeanStats st{};
  for (int i = 0; i < 4; ++i) st.mean[i] = k.sum(prods[i]->data(), n) / dn;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      const double second = k.dot(prods[i]->data(), prods[j]->data(), n) / dn;
      const double c = (second - st.mean[i] * st.mean[j]) / dn;
      st.cov[i][j] = c;
      st.cov[j][i] = c;
    }
  }
  return st;
}

double quadratic_form(const std::array<double, 4>& grad,
                      const std::array<std::array<double, 4>, 4>& cov) {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) acc += grad[i] * cov[i][j] * grad[j];
  return acc;
}

// One side of the relay estimator: sender variance S, cross moment M,
// receiver variance Q, relay correlation R (signed, already oriented so the
// estimator numerator is Q + R).
struct SideErrors {
  double se_t = 0.0;
  double se_eps = 0.0;
};

SideErrors side_standard_errors(const std::vector<double>& sender,
                                const std::vector<double>& receiver,
                                const std::vector<double>& partner, double partner_sign,
                                const DetectorModel& det, double n0) {
  const auto& k = kernels::active_kernels();
  const std::size_t n = sender.size();
  std::vector<double> p_s(n), p_m(n), p_q(n), p_r(n);
  k.mul(sender.data(), sender.data(), p_s.data(), n);
  k.mul(sender.data(), receiver.data(), p_m.data(), n);
  k.mul(receiver.data(), receiver.data(), p_q.data(), n);
  k.mul(receiver.data(), partner.data(), p_r.data(), n);
  if (partner_sign < 0.0) k.scale(p_r.data(), -1.0, p_r.data(), n);

  const MeanStats st = mean_statistics({&p_s, &p_m, &p_q, &p_r});
  const double s = st.mean[0];
  const double m = st.mean[1];
  const double q = st.mean[2];
  const double r = st.mean[3];
  const double eta = det.eta;
  const double w = q + r - n0 * (1.0 + det.nu_el);

  // T = 2 M^2 / (eta S^2)
  const std::array<double, 4> grad_t{-4.0 * m * m / (eta * s * s * s),
                                     4.0 * m / (eta * s * s), 0.0, 0.0};
  // eps = w S^2 / (2 M^2 N0) - S / N0
  const std::array<double, 4> grad_eps{w * s / (m * m * n0) - 1.0 / n0,
                                       -w * s * s / (m * m * m * n0),
                                       s * s / (2.0 * m * m * n0),
                                       s * s / (2.0 * m * m * n0)};
  SideErrors out;
  out.se_t = std::sqrt(std::max(0.0, quadratic_form(grad_t, st.cov)));
  out.se_eps = std::sqrt(std::max(0.0, quadratic_form(grad_eps, st.cov)));
  return out;
}

}  // namespace

MomentSet compute_moments(const SampleBatch& batch) {
  if (batch.size() < 2) throw std::invalid_argument("compute_moments needs n >= 2");
  MomentSet m;
  m.n = batch.size();
  m.m_xA0_sq = mean_of_products(batch.x_a0, batch.x_a0);
  m.m_pB0_sq = mean_of_products(batch.p_b0, batch.p_b0);
  m.m_xC_sq = mean_of_products(batch.x_c, batch.x_c);
  m.m_pD_sq = mean_of_products(batch.p_d, batch.p_d);
  m.m_xA0_xC = mean_of_products(batch.x_a0, batch.x_c);
  m.m_pB0_pD = mean_of_products(batch.p_b0, batch.p_d);
  m.m_xC_xD = mean_of_products(batch.x_c, batch.x_d);
  m.m_pC_pD = mean_of_products(batch.p_c, batch.p_d);
  return m;
}

MomentSet expected_moments(double t_ac, double t_bc, double eps_ac, double eps_bc,
                           double v_a, double v_b, const DetectorModel& det, double g_alice,
                           double g_bob, double u, double n0) {
  det.validate();
  const double eta = det.eta;
  // Channel-input noise on the A-C link includes the intercept-resend 2u.
  const double noise_ac = t_ac * (eps_ac + 2.0 * u);
  const double noise_bc = t_bc * eps_bc;
  const double signal_sum = t_ac * g_alice * v_a + t_bc * g_bob * v_b;
  const double signal_diff = t_ac * g_alice * v_a - t_bc * g_bob * v_b;

  MomentSet m;
  m.n = 0;
  m.m_xA0_sq = v_a * n0;
  m.m_pB0_sq = v_b * n0;
  m.m_xA0_xC = std::sqrt(eta * t_ac / 2.0) * std::sqrt(g_alice) * v_a * n0;
  m.m_pB0_pD = std::sqrt(eta * t_bc / 2.0) * std::sqrt(g_bob) * v_b * n0;
  m.m_xC_sq = 0.5 * eta * (signal_sum + noise_ac + noise_bc) * n0 + n0 + det.nu_el * n0;
  m.m_pD_sq = m.m_xC_sq;
  m.m_xC_xD = 0.5 * eta * (signal_diff + noise_ac - noise_bc) * n0;
  m.m_pC_pD = m.m_xC_xD;
  return m;
}

MomentSet expected_moments(const MdiParams& params, const AttackConfig& attack, double n0) {
  params.validate();
  attack.validate();
  return expected_moments(transmittance_from_distance(params.l_ac_km, params.loss_db_per_km),
                          transmittance_from_distance(params.l_bc_km, params.loss_db_per_km),
                          params.eps_ac, params.eps_bc, params.v_a, params.v_b,
                          params.charlie_det, attack.g_alice, attack.g_bob, attack.u, n0);
}

ChannelEstimate estimate_channel(const MomentSet& m, const DetectorModel& det, double n0) {
  det.validate();
  if (!(n0 > 0.0)) throw std::invalid_argument("N0 must be > 0");
  if (!(m.m_xA0_sq > 0.0) || !(m.m_pB0_sq > 0.0))
    throw std::domain_error("estimate_channel: degenerate sender variance");
  if (m.m_xA0_xC == 0.0 || m.m_pB0_pD == 0.0)
    throw std::domain_error("estimate_channel: zero cross moment");

  const double eta = det.eta;
  ChannelEstimate est;

  const double slope_a = m.m_xA0_xC / m.m_xA0_sq;
  est.t_ac_hat = 2.0 * m.m_xA0_xC * m.m_xA0_xC / (eta * m.m_xA0_sq * m.m_xA0_sq);
  est.eps_ac_hat = (m.m_xC_sq + m.m_xC_xD - n0 - det.nu_el * n0) /
                       (2.0 * slope_a * slope_a * n0) -
                   m.m_xA0_sq / n0;

  const double slope_b = m.m_pB0_pD / m.m_pB0_sq;
  est.t_bc_hat = 2.0 * m.m_pB0_pD * m.m_pB0_pD / (eta * m.m_pB0_sq * m.m_pB0_sq);
  est.eps_bc_hat = (m.m_pD_sq - m.m_pC_pD - n0 - det.nu_el * n0) /
                       (2.0 * slope_b * slope_b * n0) -
                   m.m_pB0_sq / n0;

  est.eps_ac_negative = est.eps_ac_hat < 0.0;
  est.eps_bc_negative = est.eps_bc_hat < 0.0;
  return est;
}

ChannelEstimate attacked_estimates_analytic(const ChannelTruth& ac, const ChannelTruth& bc,
                                            double g) {
  ac.validate();
  bc.validate();
  if (!(g >= 1.0)) throw std::invalid_argument("seeding gain must be >= 1");
  ChannelEstimate est;
  est.t_ac_hat = g * ac.t;
  est.t_bc_hat = g * bc.t;
  est.eps_ac_hat = ac.eps / g;
  est.eps_bc_hat = bc.eps / g;
  return est;
}

double pir_excess_noise(double eps_t, double u, double g) {
  if (!(eps_t >= 0.0)) throw std::invalid_argument("eps_t must be >= 0");
  if (!(u >= 0.0) || u > 1.0) throw std::invalid_argument("u must be in [0,1]");
  if (!(g >= 1.0)) throw std::invalid_argument("g must be >= 1");
  return (eps_t + 2.0 * u) / g;
}

double concealment_gain(double eps_t, double u, double eps_target) {
  if (!(eps_t >= 0.0)) throw std::invalid_argument("eps_t must be >= 0");
  if (!(u >= 0.0) || u > 1.0) throw std::invalid_argument("u must be in [0,1]");
  if (!(eps_target > 0.0)) throw std::invalid_argument("eps_target must be > 0");
  return (eps_t + 2.0 * u) / eps_target;
}

EstimateStdErrors estimate_standard_errors(const SampleBatch& batch, const DetectorModel& det,
                                           double n0) {
  if (batch.size() < 2) throw std::invalid_argument("standard errors need n >= 2");
  det.validate();
  const SideErrors a = side_standard_errors(batch.x_a0, batch.x_c, batch.x_d, +1.0, det, n0);
  const SideErrors b = side_standard_errors(batch.p_b0, batch.p_d, batch.p_c, -1.0, det, n0);
  return {a.se_t, b.se_t, a.se_eps, b.se_eps};
}

MomentStdErrors moment_standard_errors(const SampleBatch& batch) {
  if (batch.size() < 2) throw std::invalid_argument("standard errors need n >= 2");
  const auto& k = kernels::active_kernels();
  const std::size_t n = batch.size();
  const double dn = static_cast<double>(n);

  std::vector<double> prod(n), prod2(n);
  const auto se_of_product = [&](const std::vector<double>& x, const std::vector<double>& y) {
    k.mul(x.data(), y.data(), prod.data(), n);
    const double mean = k.sum(prod.data(), n) / dn;
    const double second = k.dot(prod.data(), prod.data(), n) / dn;
    return std::sqrt(std::max(0.0, second - mean * mean) / dn);
  };

  MomentStdErrors se;
  se.xa0_sq = se_of_product(batch.x_a0, batch.x_a0);
  se.pb0_sq = se_of_product(batch.p_b0, batch.p_b0);
  se.xc_sq = se_of_product(batch.x_c, batch.x_c);
  se.pd_sq = se_of_product(batch.p_d, batch.p_d);
  se.xa0_xc = se_of_product(batch.x_a0, batch.x_c);
  se.pb0_pd = se_of_product(batch.p_b0, batch.p_d);
  se.xc_xd = se_of_product(batch.x_c, batch.x_d);
  se.pc_pd = se_of_product(batch.p_c, batch.p_d);

  const auto se_of_combination = [&](const std::vector<double>& x1, const std::vector<double>& y1,
                                     double sign, const std::vector<double>& x2,
                                     const std::vector<double>& y2) {
    k.mul(x1.data(), y1.data(), prod.data(), n);
    k.mul(x2.data(), y2.data(), prod2.data(), n);
    k.lin2(prod.data(), prod2.data(), 1.0, sign, prod.data(), n);
    const double mean = k.sum(prod.data(), n) / dn;
    const double second = k.dot(prod.data(), prod.data(), n) / dn;
    return std::sqrt(std::max(0.0, second - mean * mean) / dn);
  };
  se.agg_a = se_of_combination(batch.x_c, batch.x_c, +1.0, batch.x_c, batch.x_d);
  se.agg_b = se_of_combination(batch.p_d, batch.p_d, -1.0, batch.p_c, batch.p_d);
  return se;
}

}  // namespace cvqkd
