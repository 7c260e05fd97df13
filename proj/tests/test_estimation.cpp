#include <cmath>
#include <stdexcept>
#include <vector>

#include "cvqkd/channel.hpp"
#include "cvqkd/estimation.hpp"
#include "doctest.h"

using namespace cvqkd;

TEST_CASE("estimators invert the honest channel exactly on analytic moments") {
  const DetectorModel det{0.6, 0.01};
  for (double t_ac : {1.0, 0.7, 0.25}) {
    for (double t_bc : {1.0, 0.9, 0.4}) {
      for (double eps : {0.0, 0.01, 0.2}) {
        const MomentSet m = expected_moments(t_ac, t_bc, eps, 2.0 * eps, 40.0, 30.0, det,
                                             1.0, 1.0, 0.0);
        const ChannelEstimate est = estimate_channel(m, det, 1.0);
        CHECK(est.t_ac_hat == doctest::Approx(t_ac).epsilon(1e-10));
        CHECK(est.t_bc_hat == doctest::Approx(t_bc).epsilon(1e-10));
        CHECK(est.eps_ac_hat == doctest::Approx(eps).scale(1.0).epsilon(1e-10));
        CHECK(est.eps_bc_hat == doctest::Approx(2.0 * eps).scale(1.0).epsilon(1e-10));
        // At eps = 0 the exact value is zero and rounding residue may land a
        // hair below it, correctly raising the flag; only eps > 0 pins it.
        if (eps > 0.0) CHECK_FALSE(est.eps_ac_negative);
      }
    }
  }
}

TEST_CASE("seeding biases the estimates to (g*T, eps/g)") {
  const DetectorModel det{0.6, 0.01};
  const double t_ac = 0.5, t_bc = 0.8, eps_ac = 0.04, eps_bc = 0.02;
  for (double g : {1.0, 1.02, 1.5, 2.0, 3.0}) {
    const MomentSet m =
        expected_moments(t_ac, t_bc, eps_ac, eps_bc, 40.0, 40.0, det, g, g, 0.0);
    const ChannelEstimate est = estimate_channel(m, det, 1.0);
    CHECK(est.t_ac_hat == doctest::Approx(g * t_ac).epsilon(1e-10));
    CHECK(est.t_bc_hat == doctest::Approx(g * t_bc).epsilon(1e-10));
    CHECK(est.eps_ac_hat == doctest::Approx(eps_ac / g).scale(1.0).epsilon(1e-10));
    CHECK(est.eps_bc_hat == doctest::Approx(eps_bc / g).scale(1.0).epsilon(1e-10));

    const ChannelEstimate law =
        attacked_estimates_analytic({t_ac, eps_ac}, {t_bc, eps_bc}, g);
    CHECK(est.t_ac_hat == doctest::Approx(law.t_ac_hat).epsilon(1e-12));
    CHECK(est.eps_bc_hat == doctest::Approx(law.eps_bc_hat).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("intercept-resend shows up as 2u extra noise, shrunk by the gain") {
  const DetectorModel det{0.6, 0.01};
  const double t_ac = 0.6, t_bc = 0.6, eps = 0.1;
  for (double u : {0.1, 0.5, 1.0}) {
    for (double g : {1.0, 3.0, 21.0}) {
      const MomentSet m = expected_moments(t_ac, t_bc, eps, eps, 40.0, 40.0, det, g, g, u);
      const ChannelEstimate est = estimate_channel(m, det, 1.0);
      CHECK(est.eps_ac_hat ==
            doctest::Approx((eps + 2.0 * u) / g).scale(1.0).epsilon(1e-10));
      // Only the A-C link carries the intercept attack.
      CHECK(est.eps_bc_hat == doctest::Approx(eps / g).scale(1.0).epsilon(1e-10));
      CHECK(est.eps_ac_hat == doctest::Approx(pir_excess_noise(eps, u, g)).epsilon(1e-10));
    }
  }
}

TEST_CASE("concealment thresholds") {
  CHECK(pir_excess_noise(0.1, 1.0, 1.0) == doctest::Approx(2.1).epsilon(1e-15));
  CHECK(concealment_gain(0.1, 0.1, 0.1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(concealment_gain(0.1, 1.0, 0.1) == doctest::Approx(21.0).epsilon(1e-12));
  CHECK(concealment_gain(0.1, 0.0, 0.1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(concealment_gain(0.1, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(concealment_gain(-0.1, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("negative estimated noise is reported, not clamped") {
  const DetectorModel det{0.6, 0.0};
  MomentSet m = expected_moments(0.5, 0.5, 0.001, 0.001, 40.0, 40.0, det, 1.0, 1.0, 0.0);
  // Pull the detected variance just below what vacuum plus electronics
  // explains; sampling fluctuations do this routinely at small eps.
  m.m_xC_sq -= 0.01;
  const ChannelEstimate est = estimate_channel(m, det, 1.0);
  CHECK(est.eps_ac_negative);
  CHECK(est.eps_ac_hat < 0.0);
  CHECK_FALSE(est.eps_bc_negative);
}

TEST_CASE("degenerate moments throw domain errors") {
  const DetectorModel det{0.6, 0.01};
  MomentSet m = expected_moments(0.5, 0.5, 0.01, 0.01, 40.0, 40.0, det, 1.0, 1.0, 0.0);
  MomentSet zero_sender = m;
  zero_sender.m_xA0_sq = 0.0;
  CHECK_THROWS_AS(estimate_channel(zero_sender, det, 1.0), std::domain_error);
  MomentSet zero_cross = m;
  zero_cross.m_xA0_xC = 0.0;
  CHECK_THROWS_AS(estimate_channel(zero_cross, det, 1.0), std::domain_error);
}

TEST_CASE("Monte Carlo estimates land on the bias law within standard errors") {
  MdiParams params;
  params.l_ac_km = 2.0;
  params.l_bc_km = 2.0;
  const double t = transmittance_from_distance(2.0);
  for (double g : {1.0, 2.0}) {
    const SampleBatch batch = simulate_mdi_session(params, {g, g, 0.0}, 100000, 314, 0);
    const ChannelEstimate est = estimate_channel(compute_moments(batch), params.charlie_det, 1.0);
    const EstimateStdErrors se = estimate_standard_errors(batch, params.charlie_det, 1.0);
    REQUIRE(se.t_ac > 0.0);
    REQUIRE(se.eps_ac > 0.0);
    CHECK(std::abs(est.t_ac_hat - g * t) < 5.0 * se.t_ac);
    CHECK(std::abs(est.t_bc_hat - g * t) < 5.0 * se.t_bc);
    CHECK(std::abs(est.eps_ac_hat - params.eps_ac / g) < 5.0 * se.eps_ac);
    CHECK(std::abs(est.eps_bc_hat - params.eps_bc / g) < 5.0 * se.eps_bc);
  }
}

TEST_CASE("standard errors shrink like 1/sqrt(n)") {
  MdiParams params;
  params.l_ac_km = 2.0;
  params.l_bc_km = 2.0;
  const AttackConfig attack{1.0, 1.0, 0.0};
  const EstimateStdErrors se_small =
      estimate_standard_errors(simulate_mdi_session(params, attack, 10000, 5, 0),
                               params.charlie_det, 1.0);
  const EstimateStdErrors se_big =
      estimate_standard_errors(simulate_mdi_session(params, attack, 100000, 5, 0),
                               params.charlie_det, 1.0);
  const double expected_ratio = std::sqrt(10.0);
  CHECK(se_small.t_ac / se_big.t_ac == doctest::Approx(expected_ratio).epsilon(0.25));
  CHECK(se_small.eps_ac / se_big.eps_ac == doctest::Approx(expected_ratio).epsilon(0.25));
  CHECK(se_small.eps_bc / se_big.eps_bc == doctest::Approx(expected_ratio).epsilon(0.25));
}

TEST_CASE("reported standard errors calibrate against independent replicas") {
  MdiParams params;
  params.l_ac_km = 2.0;
  params.l_bc_km = 2.0;
  const AttackConfig attack{1.0, 1.0, 0.0};
  const std::size_t n = 20000;
  const int replicas = 30;

  std::vector<double> t_hats, eps_hats;
  double mean_se_t = 0.0, mean_se_eps = 0.0;
  for (int r = 0; r < replicas; ++r) {
    const SampleBatch batch = simulate_mdi_session(params, attack, n, 1000 + r, 0);
    const ChannelEstimate est = estimate_channel(compute_moments(batch), params.charlie_det, 1.0);
    const EstimateStdErrors se = estimate_standard_errors(batch, params.charlie_det, 1.0);
    t_hats.push_back(est.t_ac_hat);
    eps_hats.push_back(est.eps_ac_hat);
    mean_se_t += se.t_ac / replicas;
    mean_se_eps += se.eps_ac / replicas;
  }
  auto scatter = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
  };
  // With 30 replicas the sample standard deviation itself carries ~13%
  // relative noise, so a 35% agreement window is a real constraint without
  // being flaky.
  CHECK(scatter(t_hats) == doctest::Approx(mean_se_t).epsilon(0.35));
  CHECK(scatter(eps_hats) == doctest::Approx(mean_se_eps).epsilon(0.35));
}
