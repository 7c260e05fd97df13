#include <cmath>
#include <numbers>

#include "cvqkd/kernels.hpp"
#include "cvqkd/philox.hpp"

namespace cvqkd::kernels {
namespace {

// Writes the Box-Muller pair of block j into the requested window. Splitting
// a fill at any index, even an odd one, reproduces the same bytes because the
// pair is always regenerated from its block.
void gaussian_fill_scalar(std::uint64_t seed, std::uint32_t stream, std::uint64_t first,
                          std::size_t n, double* out) {
  if (n == 0) return;
  const std::uint64_t last = first + n - 1;
  for (std::uint64_t j = first / 2; j <= last / 2; ++j) {
    const PhiloxBlock b = philox_block(seed, stream, j);
    const double u1 = u64_to_unit_open(philox_word_a(b));
    const double u2 = u64_to_unit_halfopen(philox_word_b(b));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    const std::uint64_t i0 = 2 * j;
    if (i0 >= first && i0 <= last) out[i0 - first] = r * std::cos(angle);
    if (i0 + 1 >= first && i0 + 1 <= last) out[i0 + 1 - first] = r * std::sin(angle);
  }
}

void uniform_fill_scalar(std::uint64_t seed, std::uint32_t stream, std::uint64_t first,
                         std::size_t n, double* out) {
  if (n == 0) return;
  const std::uint64_t last = first + n - 1;
  for (std::uint64_t j = first / 2; j <= last / 2; ++j) {
    const PhiloxBlock b = philox_block(seed, stream, j);
    const std::uint64_t i0 = 2 * j;
    if (i0 >= first && i0 <= last) out[i0 - first] = u64_to_unit_halfopen(philox_word_a(b));
    if (i0 + 1 >= first && i0 + 1 <= last)
      out[i0 + 1 - first] = u64_to_unit_halfopen(philox_word_b(b));
  }
}

void scale_scalar(const double* x, double a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void mul_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void lin2_scalar(const double* x, const double* y, double a, double b, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void lin3_scalar(const double* x, const double* y, const double* z, double a, double b,
                 double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * z[i];
}

void add_if_below_scalar(double* inout, const double* gate, double threshold, double a,
                         const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (gate[i] < threshold) inout[i] += a * y[i];
  }
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i & 3] += x[i] * y[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum_scalar(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i & 3] += x[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{
      "scalar",        gaussian_fill_scalar, uniform_fill_scalar, scale_scalar,
      mul_scalar,      lin2_scalar,          lin3_scalar,         add_if_below_scalar,
      dot_scalar,      sum_scalar,
  };
  return k;
}

}  // namespace cvqkd::kernels
