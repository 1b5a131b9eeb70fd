#include "meva/fft.hpp"

#include <cmath>

namespace meva {

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw InvalidInput("fft: length must be a power of two");
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double pi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

std::vector<double> trig_upsample(const std::vector<double>& coarse, int n_fine) {
  const int n = static_cast<int>(coarse.size());
  if (n_fine % n != 0) throw InvalidInput("trig_upsample: fine size must be a multiple of the coarse size");
  std::vector<std::complex<double>> spec(coarse.begin(), coarse.end());
  fft_inplace(spec, false);
  std::vector<std::complex<double>> fine(static_cast<std::size_t>(n_fine), {0.0, 0.0});
  const int half = n / 2;
  for (int j = 0; j <= half; ++j) fine[j] = spec[j];
  for (int j = 1; j < half; ++j) fine[n_fine - j] = spec[n - j];
  if (n % 2 == 0 && half >= 1) {
    // split the Nyquist mode symmetrically to keep the interpolant real
    fine[half] = 0.5 * spec[half];
    fine[n_fine - half] = 0.5 * spec[half];
  }
  fft_inplace(fine, true);
  std::vector<double> out(static_cast<std::size_t>(n_fine));
  const double scale = static_cast<double>(n_fine) / static_cast<double>(n);
  for (int i = 0; i < n_fine; ++i) out[i] = fine[i].real() * scale;
  return out;
}

}  // namespace meva
