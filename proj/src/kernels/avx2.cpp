// AVX2 kernel variants. This translation unit is compiled with -mavx2 on
// x86-64 targets only; everywhere else it provides the null accessor.
// Equivalence with the scalar reference is bitwise, see kernels.hpp.

#include "variants.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <numbers>

#include "cvqkd/philox.hpp"

namespace cvqkd::kernels {
namespace {

inline __m256i mullo32(__m256i a, __m256i b) { return _mm256_mullo_epi32(a, b); }

inline __m256i mulhi32(__m256i a, __m256i b) {
  const __m256i prod_even = _mm256_mul_epu32(a, b);
  const __m256i prod_odd =
      _mm256_mul_epu32(_mm256_srli_epi64(a, 32), _mm256_srli_epi64(b, 32));
  // Even source lanes: their high words end up in even 32-bit positions after
  // the shift. Odd source lanes: already sitting in odd positions of prod_odd.
  return _mm256_blend_epi32(_mm256_srli_epi64(prod_even, 32), prod_odd, 0xAA);
}

struct BlockGroup {
  alignas(32) std::uint32_t v0[8];
  alignas(32) std::uint32_t v1[8];
  alignas(32) std::uint32_t v2[8];
  alignas(32) std::uint32_t v3[8];
};

// Runs Philox4x32-10 on eight consecutive block indices j..j+7.
void philox8(std::uint64_t seed, std::uint32_t stream, std::uint64_t j, BlockGroup& out) {
  alignas(32) std::uint32_t lo[8];
  alignas(32) std::uint32_t hi[8];
  for (int l = 0; l < 8; ++l) {
    const std::uint64_t idx = j + static_cast<std::uint64_t>(l);
    lo[l] = static_cast<std::uint32_t>(idx);
    hi[l] = static_cast<std::uint32_t>(idx >> 32);
  }
  __m256i c0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo));
  __m256i c1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi));
  __m256i c2 = _mm256_set1_epi32(static_cast<int>(stream));
  __m256i c3 = _mm256_setzero_si256();
  __m256i k0 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(seed)));
  __m256i k1 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(seed >> 32)));
  const __m256i m0 = _mm256_set1_epi32(static_cast<int>(kPhiloxM0));
  const __m256i m1 = _mm256_set1_epi32(static_cast<int>(kPhiloxM1));
  const __m256i w0 = _mm256_set1_epi32(static_cast<int>(kPhiloxW0));
  const __m256i w1 = _mm256_set1_epi32(static_cast<int>(kPhiloxW1));

  for (int round = 0; round < 10; ++round) {
    const __m256i p0_hi = mulhi32(c0, m0);
    const __m256i p0_lo = mullo32(c0, m0);
    const __m256i p1_hi = mulhi32(c2, m1);
    const __m256i p1_lo = mullo32(c2, m1);
    c0 = _mm256_xor_si256(_mm256_xor_si256(p1_hi, c1), k0);
    c1 = p1_lo;
    c2 = _mm256_xor_si256(_mm256_xor_si256(p0_hi, c3), k1);
    c3 = p0_lo;
    k0 = _mm256_add_epi32(k0, w0);
    k1 = _mm256_add_epi32(k1, w1);
  }

  _mm256_store_si256(reinterpret_cast<__m256i*>(out.v0), c0);
  _mm256_store_si256(reinterpret_cast<__m256i*>(out.v1), c1);
  _mm256_store_si256(reinterpret_cast<__m256i*>(out.v2), c2);
  _mm256_store_si256(reinterpret_cast<__m256i*>(out.v3), c3);
}

inline std::uint64_t join64(std::uint32_t lo, std::uint32_t hi) {
  return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

// Scalar fallback for blocks whose pair is only partially inside the window.
void gaussian_block_scalar(std::uint64_t seed, std::uint32_t stream, std::uint64_t j,
                           std::uint64_t first, std::uint64_t last, double* out) {
  const PhiloxBlock b = philox_block(seed, stream, j);
  const double u1 = u64_to_unit_open(philox_word_a(b));
  const double u2 = u64_to_unit_halfopen(philox_word_b(b));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  const std::uint64_t i0 = 2 * j;
  if (i0 >= first && i0 <= last) out[i0 - first] = r * std::cos(angle);
  if (i0 + 1 >= first && i0 + 1 <= last) out[i0 + 1 - first] = r * std::sin(angle);
}

void gaussian_fill_avx2(std::uint64_t seed, std::uint32_t stream, std::uint64_t first,
                        std::size_t n, double* out) {
  if (n == 0) return;
  const std::uint64_t last = first + n - 1;
  std::uint64_t j = first / 2;
  const std::uint64_t jlast = last / 2;
  // Leading block with a partial pair.
  if (2 * j < first) {
    gaussian_block_scalar(seed, stream, j, first, last, out);
    ++j;
  }
  BlockGroup grp;
  while (j + 7 <= jlast && 2 * (j + 7) + 1 <= last) {
    philox8(seed, stream, j, grp);
    double* o = out + (2 * j - first);
    for (int l = 0; l < 8; ++l) {
      const double u1 = u64_to_unit_open(join64(grp.v0[l], grp.v1[l]));
      const double u2 = u64_to_unit_halfopen(join64(grp.v2[l], grp.v3[l]));
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      o[2 * l] = r * std::cos(angle);
      o[2 * l + 1] = r * std::sin(angle);
    }
    j += 8;
  }
  for (; j <= jlast; ++j) gaussian_block_scalar(seed, stream, j, first, last, out);
}

void uniform_block_scalar(std::uint64_t seed, std::uint32_t stream, std::uint64_t j,
                          std::uint64_t first, std::uint64_t last, double* out) {
  const PhiloxBlock b = philox_block(seed, stream, j);
  const std::uint64_t i0 = 2 * j;
  if (i0 >= first && i0 <= last) out[i0 - first] = u64_to_unit_halfopen(philox_word_a(b));
  if (i0 + 1 >= first && i0 + 1 <= last)
    out[i0 + 1 - first] = u64_to_unit_halfopen(philox_word_b(b));
}

void uniform_fill_avx2(std::uint64_t seed, std::uint32_t stream, std::uint64_t first,
                       std::size_t n, double* out) {
  if (n == 0) return;
  const std::uint64_t last = first + n - 1;
  std::uint64_t j = first / 2;
  const std::uint64_t jlast = last / 2;
  if (2 * j < first) {
    uniform_block_scalar(seed, stream, j, first, last, out);
    ++j;
  }
  BlockGroup grp;
  while (j + 7 <= jlast && 2 * (j + 7) + 1 <= last) {
    philox8(seed, stream, j, grp);
    double* o = out + (2 * j - first);
    for (int l = 0; l < 8; ++l) {
      o[2 * l] = u64_to_unit_halfopen(join64(grp.v0[l], grp.v1[l]));
      o[2 * l + 1] = u64_to_unit_halfopen(join64(grp.v2[l], grp.v3[l]));
    }
    j += 8;
  }
  for (; j <= jlast; ++j) uniform_block_scalar(seed, stream, j, first, last, out);
}

void scale_avx2(const double* x, double a, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = a * x[i];
}

void mul_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void lin2_avx2(const double* x, const double* y, double a, double b, double* out,
               std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                                    _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(out + i, t);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void lin3_avx2(const double* x, const double* y, const double* z, double a, double b,
               double c, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                                                  _mm256_mul_pd(vb, _mm256_loadu_pd(y + i))),
                                    _mm256_mul_pd(vc, _mm256_loadu_pd(z + i)));
    _mm256_storeu_pd(out + i, t);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * z[i];
}

void add_if_below_avx2(double* inout, const double* gate, double threshold, double a,
                       const double* y, std::size_t n) {
  const __m256d vthr = _mm256_set1_pd(threshold);
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(gate + i);
    const __m256d cur = _mm256_loadu_pd(inout + i);
    const __m256d bumped = _mm256_add_pd(cur, _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
    const __m256d mask = _mm256_cmp_pd(g, vthr, _CMP_LT_OQ);
    // blend, not masked-add-of-zero: keeps untouched lanes bit-identical.
    _mm256_storeu_pd(inout + i, _mm256_blendv_pd(cur, bumped, mask));
  }
  for (; i < n; ++i) {
    if (gate[i] < threshold) inout[i] += a * y[i];
  }
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    vacc = _mm256_add_pd(vacc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (; i < n; ++i) acc[i & 3] += x[i] * y[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vacc = _mm256_add_pd(vacc, _mm256_loadu_pd(x + i));
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (; i < n; ++i) acc[i & 3] += x[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace

const Kernels* avx2_kernels_or_null() {
  static const Kernels k{
      "avx2",        gaussian_fill_avx2, uniform_fill_avx2, scale_avx2,
      mul_avx2,      lin2_avx2,          lin3_avx2,         add_if_below_avx2,
      dot_avx2,      sum_avx2,
  };
  return &k;
}

}  // namespace cvqkd::kernels

#else  // !defined(__AVX2__)

namespace cvqkd::kernels {

const Kernels* avx2_kernels_or_null() { return nullptr; }

}  // namespace cvqkd::kernels

#endif
