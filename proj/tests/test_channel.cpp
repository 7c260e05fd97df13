#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cvqkd/channel.hpp"
#include "cvqkd/estimation.hpp"
#include "cvqkd/rng.hpp"
#include "doctest.h"

using namespace cvqkd;

namespace {

bool same_batch(const SampleBatch& a, const SampleBatch& b) {
  auto eq = [](const std::vector<double>& u, const std::vector<double>& v) {
    return u.size() == v.size() &&
           (u.empty() || std::memcmp(u.data(), v.data(), u.size() * sizeof(double)) == 0);
  };
  return eq(a.x_a0, b.x_a0) && eq(a.p_b0, b.p_b0) && eq(a.x_c, b.x_c) && eq(a.p_c, b.p_c) &&
         eq(a.x_d, b.x_d) && eq(a.p_d, b.p_d);
}

double variance(const std::vector<double>& v) {
  double s = 0.0, s2 = 0.0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(v.size());
  return s2 / n - (s / n) * (s / n);
}

}  // namespace

TEST_CASE("deterministic propagation applies sqrt(T) then adds the noise term") {
  const ChannelTruth ch{0.25, 0.0};
  const QuadraturePair out = propagate_deterministic({2.0, -2.0}, ch, {0.0, 0.0});
  CHECK(out.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out.p == doctest::Approx(-1.0).epsilon(1e-15));
  const QuadraturePair shifted = propagate_deterministic({2.0, -2.0}, ch, {0.5, 1.0});
  CHECK(shifted.x == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(shifted.p == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("sampled channel reproduces the noise variance T*eps + 1") {
  const ChannelTruth ch{0.5, 0.4};
  PhiloxRng rng(11, 0);
  const std::size_t n = 100000;
  std::vector<double> xs;
  xs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) xs.push_back(sample_linear_channel({0.0, 0.0}, ch, rng).x);
  CHECK(variance(xs) == doctest::Approx(ch.noise_variance()).epsilon(0.03));
}

TEST_CASE("intercept-resend leaves states alone at u=0 and adds 2 SNU at u=1") {
  PhiloxRng rng(5, 1);
  const QuadraturePair q{1.25, -0.5};
  const QuadraturePair same = apply_intercept_resend(q, 0.0, rng);
  CHECK(same.x == q.x);
  CHECK(same.p == q.p);

  const std::size_t n = 100000;
  std::vector<double> xs;
  xs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) xs.push_back(apply_intercept_resend(q, 1.0, rng).x);
  CHECK(variance(xs) == doctest::Approx(2.0).epsilon(0.03));

  CHECK_THROWS_AS(apply_intercept_resend(q, 1.5, rng), std::invalid_argument);
}

TEST_CASE("session batches are bit-reproducible across thread counts") {
  MdiParams params;
  params.l_ac_km = 2.0;
  params.l_bc_km = 2.0;
  const AttackConfig attack{1.5, 1.5, 0.2};
  const std::size_t n = 50000;  // forces a partial trailing chunk

  const SampleBatch one = simulate_mdi_session(params, attack, n, 99, 1);
  const SampleBatch three = simulate_mdi_session(params, attack, n, 99, 3);
  const SampleBatch four = simulate_mdi_session(params, attack, n, 99, 4);
  const SampleBatch autod = simulate_mdi_session(params, attack, n, 99, 0);
  CHECK(one.size() == n);
  CHECK(same_batch(one, three));
  CHECK(same_batch(one, four));
  CHECK(same_batch(one, autod));

  const SampleBatch other = simulate_mdi_session(params, attack, n, 100, 1);
  CHECK_FALSE(same_batch(one, other));
}

TEST_CASE("electronic-noise draws come from their own streams") {
  MdiParams quiet;
  quiet.l_ac_km = 1.0;
  quiet.l_bc_km = 1.0;
  quiet.charlie_det.nu_el = 0.0;
  MdiParams noisy = quiet;
  noisy.charlie_det.nu_el = 0.04;

  const AttackConfig attack{1.0, 1.0, 0.0};
  const std::size_t n = 60000;
  const SampleBatch a = simulate_mdi_session(quiet, attack, n, 7, 2);
  const SampleBatch b = simulate_mdi_session(noisy, attack, n, 7, 2);

  // Turning nu_el on must not shift any other stream: the sender records and
  // the signal/vacuum parts are identical, the difference is the e-term alone.
  CHECK(std::memcmp(a.x_a0.data(), b.x_a0.data(), n * sizeof(double)) == 0);
  CHECK(std::memcmp(a.p_b0.data(), b.p_b0.data(), n * sizeof(double)) == 0);
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = b.x_c[i] - a.x_c[i];
  CHECK(variance(diff) == doctest::Approx(0.04).epsilon(0.05));
}

TEST_CASE("detected moments match their closed forms") {
  MdiParams params;
  params.l_ac_km = 3.0;
  params.l_bc_km = 1.5;
  params.eps_ac = 0.05;
  params.eps_bc = 0.02;
  const AttackConfig attack{1.8, 1.8, 0.25};
  const std::size_t n = 200000;

  const SampleBatch batch = simulate_mdi_session(params, attack, n, 2468, 0);
  const MomentSet emp = compute_moments(batch);
  const MomentSet expd = expected_moments(params, attack);
  const MomentStdErrors se = moment_standard_errors(batch);

  CHECK(std::abs(emp.m_xA0_sq - expd.m_xA0_sq) < 5.0 * se.xa0_sq);
  CHECK(std::abs(emp.m_pB0_sq - expd.m_pB0_sq) < 5.0 * se.pb0_sq);
  CHECK(std::abs(emp.m_xC_sq - expd.m_xC_sq) < 5.0 * se.xc_sq);
  CHECK(std::abs(emp.m_pD_sq - expd.m_pD_sq) < 5.0 * se.pd_sq);
  CHECK(std::abs(emp.m_xA0_xC - expd.m_xA0_xC) < 5.0 * se.xa0_xc);
  CHECK(std::abs(emp.m_pB0_pD - expd.m_pB0_pD) < 5.0 * se.pb0_pd);
  CHECK(std::abs(emp.m_xC_xD - expd.m_xC_xD) < 5.0 * se.xc_xd);
  CHECK(std::abs(emp.m_pC_pD - expd.m_pC_pD) < 5.0 * se.pc_pd);

  // The senders record un-seeded draws: variance V_A, not g*V_A.
  CHECK(emp.m_xA0_sq == doctest::Approx(params.v_a).epsilon(0.02));
  CHECK(emp.m_pB0_sq == doctest::Approx(params.v_b).epsilon(0.02));
}

TEST_CASE("batch CSV round-trips exactly") {
  MdiParams params;
  params.l_ac_km = 1.0;
  params.l_bc_km = 1.0;
  const SampleBatch batch = simulate_mdi_session(params, {1.2, 1.2, 0.0}, 16, 31, 1);

  std::ostringstream out;
  write_batch_csv(out, batch);
  std::istringstream in(out.str());
  const SampleBatch back = read_batch_csv(in);
  CHECK(same_batch(batch, back));

  std::istringstream bad_header("idx,x_A0,p_B0,x_C,p_C,x_D,nope\n0,1,2,3,4,5,6\n");
  CHECK_THROWS_AS(read_batch_csv(bad_header), std::invalid_argument);

  std::istringstream bad_idx(
      "idx,x_A0,p_B0,x_C,p_C,x_D,p_D\n0,1,2,3,4,5,6\n2,1,2,3,4,5,6\n");
  CHECK_THROWS_AS(read_batch_csv(bad_idx), std::invalid_argument);
}
