#include <atomic>

#include "cvqkd/kernels.hpp"
#include "variants.hpp"

namespace cvqkd::kernels {
namespace {

std::atomic<const Kernels*> g_override{nullptr};

const Kernels& detect_best() {
  if (avx2_available()) {
    if (const Kernels* k = avx2_kernels_or_null()) return *k;
  }
  return scalar_kernels();
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Kernels& active_kernels() {
  if (const Kernels* k = g_override.load(std::memory_order_acquire)) return *k;
  static const Kernels& best = detect_best();
  return best;
}

const Kernels* kernels_by_name(std::string_view name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2" && avx2_available()) return avx2_kernels_or_null();
  return nullptr;
}

void set_active_kernels(const Kernels* k) {
  g_override.store(k, std::memory_order_release);
}

}  // namespace cvqkd::kernels
