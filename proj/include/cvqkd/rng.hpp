#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "cvqkd/philox.hpp"

namespace cvqkd {

/// Counter-based generator for the one-sample-at-a-time operations. The bulk
/// Monte Carlo path uses the kernel fills directly; this class exists so the
/// scalar channel primitives are reproducible and cheap to seed per call.
///
/// Blocks are consumed in order. uniform() takes the block's two 64-bit words
/// one at a time; gaussian() always starts a fresh block (its Box-Muller mate
/// is cached), so interleaving the two draw kinds stays well defined.
class PhiloxRng {
 public:
  PhiloxRng(std::uint64_t seed, std::uint32_t stream = 0)
      : seed_(seed), stream_(stream) {}

  double uniform() { return kernels::u64_to_unit_halfopen(next_u64()); }

  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    pending_valid_ = false;  // discard a half-used block; see class comment
    const kernels::PhiloxBlock b = kernels::philox_block(seed_, stream_, counter_++);
    const double u1 = kernels::u64_to_unit_open(kernels::philox_word_a(b));
    const double u2 = kernels::u64_to_unit_halfopen(kernels::philox_word_b(b));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(angle);
    have_cached_ = true;
    return r * std::cos(angle);
  }

  std::uint64_t next_u64() {
    if (pending_valid_) {
      pending_valid_ = false;
      return pending_;
    }
    const kernels::PhiloxBlock b = kernels::philox_block(seed_, stream_, counter_++);
    pending_ = kernels::philox_word_b(b);
    pending_valid_ = true;
    return kernels::philox_word_a(b);
  }

 private:
  std::uint64_t seed_;
  std::uint32_t stream_;
  std::uint64_t counter_ = 0;
  std::uint64_t pending_ = 0;
  bool pending_valid_ = false;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace cvqkd
