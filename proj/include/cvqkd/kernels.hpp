#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace cvqkd::kernels {

// Data-parallel primitives behind the Monte Carlo generator and the moment
// estimators. Every entry has a scalar reference implementation and, where
// the host supports it, an AVX2 variant selected once at startup.
//
// The two variants are bit-identical by construction, not just close:
//   - random fills share the Philox integer path and call scalar libm for
//     log/sin/cos on identical inputs,
//   - elementwise kernels round each element the same way (mul then add; the
//     build disables fp contraction so no fma sneaks in),
//   - reductions use four interleaved accumulators, acc[i mod 4], combined
//     as (acc0+acc1)+(acc2+acc3) in both paths.
// Tests compare the variants with memcmp.

struct Kernels {
  const char* name;

  // out[first..first+n) of the logical N(0,1) stream (seed, stream).
  // Elements 2j and 2j+1 are the Box-Muller pair of Philox block j.
  void (*gaussian_fill)(std::uint64_t seed, std::uint32_t stream, std::uint64_t first,
                        std::size_t n, double* out);
  // Same addressing for the logical U[0,1) stream; block j covers elements 2j, 2j+1.
  void (*uniform_fill)(std::uint64_t seed, std::uint32_t stream, std::uint64_t first,
                       std::size_t n, double* out);

  void (*scale)(const double* x, double a, double* out, std::size_t n);            // out = a*x
  void (*mul)(const double* x, const double* y, double* out, std::size_t n);       // out = x*y
  void (*lin2)(const double* x, const double* y, double a, double b, double* out,
               std::size_t n);                                                     // out = a*x + b*y
  void (*lin3)(const double* x, const double* y, const double* z, double a, double b,
               double c, double* out, std::size_t n);                              // out = a*x + b*y + c*z
  // inout[i] += a*y[i] wherever gate[i] < threshold.
  void (*add_if_below)(double* inout, const double* gate, double threshold, double a,
                       const double* y, std::size_t n);

  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
};

const Kernels& scalar_kernels();

// Best variant for this host, or the override installed by set_active_kernels.
const Kernels& active_kernels();

// "scalar" or "avx2"; nullptr if the name is unknown or unsupported here.
const Kernels* kernels_by_name(std::string_view name);

// Override the dispatched choice (tests, --kernel flag); nullptr restores auto.
void set_active_kernels(const Kernels* k);

bool avx2_available();

}  // namespace cvqkd::kernels
