#pragma once

#include <cstddef>
#include <vector>

namespace tvclt::fft {

// Zero-padded linear convolution of two equal-length real vectors (length a
// power of two). Returns length 2m; slot j holds sum_i a[i] * b[j - i].
// Deterministic for a fixed input regardless of thread count.
std::vector<double> linear_convolution(const std::vector<double>& a,
                                       const std::vector<double>& b);

}  // namespace tvclt::fft
