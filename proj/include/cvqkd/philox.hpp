#pragma once

#include <array>
#include <cstdint>

namespace cvqkd::kernels {

// Philox4x32-10 counter-based generator. A block is addressed by a 128-bit
// counter and a 64-bit key; we lay the counter out as
//   (c0, c1) = low/high word of the 64-bit block index,
//   c2       = stream id,
//   c3       = 0,
// so independent streams of one seed never collide and any block can be
// generated out of order. Parallel chunks of one array are therefore
// bit-identical regardless of thread count or chunk boundaries.

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

using PhiloxBlock = std::array<std::uint32_t, 4>;

inline PhiloxBlock philox4x32(PhiloxBlock ctr, std::uint32_t k0, std::uint32_t k1) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
           static_cast<std::uint32_t>(p0)};
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return ctr;
}

inline PhiloxBlock philox_block(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) {
  const PhiloxBlock ctr{static_cast<std::uint32_t>(index),
                        static_cast<std::uint32_t>(index >> 32), stream, 0u};
  return philox4x32(ctr, static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32));
}

// One block yields two 64-bit words: (v0,v1) and (v2,v3), low word first.
inline std::uint64_t philox_word_a(const PhiloxBlock& b) {
  return static_cast<std::uint64_t>(b[0]) | (static_cast<std::uint64_t>(b[1]) << 32);
}
inline std::uint64_t philox_word_b(const PhiloxBlock& b) {
  return static_cast<std::uint64_t>(b[2]) | (static_cast<std::uint64_t>(b[3]) << 32);
}

// (0,1]: never zero, safe under log(). (x>>11)+1 <= 2^53 is exactly
// representable, and the scale is a power of two, so both conversions are
// exact and any correct implementation produces identical bits.
inline double u64_to_unit_open(std::uint64_t x) {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

// [0,1).
inline double u64_to_unit_halfopen(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace cvqkd::kernels
