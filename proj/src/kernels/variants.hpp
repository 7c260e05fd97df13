#pragma once

#include "cvqkd/kernels.hpp"

namespace cvqkd::kernels {

// Defined in avx2.cpp; returns nullptr when the build target is not x86-64.
// Callers must still check avx2_available() before using the result.
const Kernels* avx2_kernels_or_null();

}  // namespace cvqkd::kernels
