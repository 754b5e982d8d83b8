#pragma once

#include <complex>
#include <vector>

#include "abjad/common.hpp"

namespace abjad {

// Iterative radix-2 Cooley-Tukey with precomputed twiddles and bit-reversal
// table. Sizes are powers of two by construction (WindowSpec enforces it).
class FftPlan {
 public:
  explicit FftPlan(size_t n) : n_(n) {
    require(n >= 2 && (n & (n - 1)) == 0, ErrorCode::BadArgument,
            "fft size must be a power of two >= 2");
    bitrev_.resize(n);
    size_t log2n = 0;
    while ((size_t(1) << log2n) < n) ++log2n;
    for (size_t i = 0; i < n; ++i) {
      size_t r = 0;
      for (size_t b = 0; b < log2n; ++b) r |= ((i >> b) & 1) << (log2n - 1 - b);
      bitrev_[i] = r;
    }
    twiddle_.resize(n / 2);
    const double kPi = 3.14159265358979323846;
    for (size_t k = 0; k < n / 2; ++k) {
      double a = -2.0 * kPi * double(k) / double(n);
      twiddle_[k] = {std::cos(a), std::sin(a)};
    }
  }

  size_t size() const { return n_; }

  void forward(std::vector<std::complex<double>>& x) const { run(x, false); }
  void inverse(std::vector<std::complex<double>>& x) const {
    run(x, true);
    for (auto& v : x) v /= double(n_);
  }

  // Real forward transform: returns bins 0..n/2.
  std::vector<std::complex<double>> rfft(const std::vector<double>& in) const {
    std::vector<std::complex<double>> x(n_);
    size_t m = std::min(in.size(), n_);
    for (size_t i = 0; i < m; ++i) x[i] = {in[i], 0.0};
    forward(x);
    x.resize(n_ / 2 + 1);
    return x;
  }

  // Inverse of rfft: reconstructs the full spectrum by conjugate symmetry and
  // returns the real part.
  std::vector<double> irfft(const std::vector<std::complex<double>>& half) const {
    require(half.size() == n_ / 2 + 1, ErrorCode::DimensionMismatch,
            "irfft: expected n/2+1 bins");
    std::vector<std::complex<double>> x(n_);
    for (size_t k = 0; k <= n_ / 2; ++k) x[k] = half[k];
    for (size_t k = n_ / 2 + 1; k < n_; ++k) x[k] = std::conj(half[n_ - k]);
    inverse(x);
    std::vector<double> out(n_);
    for (size_t i = 0; i < n_; ++i) out[i] = x[i].real();
    return out;
  }

 private:
  void run(std::vector<std::complex<double>>& x, bool inv) const {
    require(x.size() == n_, ErrorCode::DimensionMismatch, "fft: bad length");
    for (size_t i = 0; i < n_; ++i) {
      size_t j = bitrev_[i];
      if (j > i) std::swap(x[i], x[j]);
    }
    for (size_t len = 2; len <= n_; len <<= 1) {
      size_t half = len / 2;
      size_t step = n_ / len;
      for (size_t start = 0; start < n_; start += len) {
        for (size_t k = 0; k < half; ++k) {
          std::complex<double> w = twiddle_[k * step];
          if (inv) w = std::conj(w);
          std::complex<double> a = x[start + k];
          std::complex<double> b = x[start + k + half] * w;
          x[start + k] = a + b;
          x[start + k + half] = a - b;
        }
      }
    }
  }

  size_t n_;
  std::vector<size_t> bitrev_;
  std::vector<std::complex<double>> twiddle_;
};

}  // namespace abjad
