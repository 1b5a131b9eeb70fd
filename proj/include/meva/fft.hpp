#pragma once

#include <complex>
#include <vector>

#include "meva/common.hpp"

namespace meva {

/// Iterative radix-2 FFT, power-of-two lengths only. Inverse applies the 1/n
/// normalization.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

/// Trigonometric interpolation of a periodic real sample onto a finer grid
/// whose size is a power-of-two multiple of the input size.
std::vector<double> trig_upsample(const std::vector<double>& coarse, int n_fine);

}  // namespace meva
