#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cvqkd/core.hpp"
#include "cvqkd/rng.hpp"

namespace cvqkd {

/// Quadrature records of one Monte Carlo session. x_a0 and p_b0 are the
/// values the senders keep; when they are unaware of the attack these are the
/// UN-seeded draws, which is what biases the downstream estimators. The four
/// relay arrays are Charlie's detected outputs.
struct SampleBatch {
  std::uint64_t rng_seed = 0;
  std::vector<double> x_a0;
  std::vector<double> p_b0;
  std::vector<double> x_c;
  std::vector<double> p_c;
  std::vector<double> x_d;
  std::vector<double> p_d;

  std::size_t size() const { return x_a0.size(); }
};

/// Deterministic core of the linear channel: out = sqrt(T)*in + z.
/// Pass z = (0,0) to probe the attenuation alone.
QuadraturePair propagate_deterministic(const QuadraturePair& in, const ChannelTruth& ch,
                                       const QuadraturePair& z);

/// out = sqrt(T)*in + z with z drawn i.i.d. N(0, T*eps*N0 + N0) per quadrature.
QuadraturePair sample_linear_channel(const QuadraturePair& in, const ChannelTruth& ch,
                                     PhiloxRng& rng);

/// With probability u the state is measured and re-prepared, which adds
/// i.i.d. Gaussian noise of variance 2*N0 per quadrature; otherwise it passes
/// untouched. Ensemble excess-noise contribution: 2u*N0.
QuadraturePair apply_intercept_resend(const QuadraturePair& q, double u, PhiloxRng& rng);

/// Full session: modulation, seeding, optional intercept-resend on the A-C
/// link, both links, relay beam splitter C=(A'-B')/sqrt(2), D=(A'+B')/sqrt(2),
/// detection x_meas = sqrt(eta)*x + sqrt(1-eta)*v + e.
///
/// Reproducible bit-for-bit for a given (params, attack, n, seed) no matter
/// how many threads generate it (threads = 0 picks the hardware count).
SampleBatch simulate_mdi_session(const MdiParams& params, const AttackConfig& attack,
                                 std::size_t n, std::uint64_t seed, unsigned threads = 0);

/// Columns: idx, x_A0, p_B0, x_C, p_C, x_D, p_D. Values are written with
/// shortest round-trip precision, so import returns identical doubles.
void write_batch_csv(std::ostream& out, const SampleBatch& batch);
SampleBatch read_batch_csv(std::istream& in);

}  // namespace cvqkd
