// Independent brute-force reference implementations used only by tests.
// These deliberately avoid the library's computation paths: direct loops,
// O(N^2) DFT summation, explicit mel-weight construction, textbook DCT-II.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

// O(N^2) DFT, bins 0..N/2.
inline std::vector<std::complex<double>> naive_rdft(const std::vector<double>& x) {
  size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t i = 0; i < n; ++i) {
      double a = -2.0 * kPi * double(k) * double(i) / double(n);
      acc += x[i] * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[k] = acc;
  }
  return out;
}

inline std::vector<double> pre_emphasis_loop(const std::vector<double>& x,
                                             double alpha) {
  std::vector<double> y(x.size());
  for (size_t n = 0; n < x.size(); ++n)
    y[n] = n == 0 ? x[0] : x[n] - alpha * x[n - 1];
  return y;
}

inline double zcr_loop(const std::vector<double>& frame) {
  int changes = 0;
  int prev = 0;
  for (double v : frame) {
    int cur = v > 0.0 ? 1 : (v < 0.0 ? -1 : prev);
    if (prev != 0 && cur != 0 && cur != prev) ++changes;
    if (cur != 0) prev = cur;
  }
  return double(changes) / double(frame.size() - 1);
}

inline double ste_loop(const std::vector<double>& frame) {
  double acc = 0.0;
  for (double v : frame) acc += v * v;
  return acc / double(frame.size());
}

inline double mean_loop(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / double(v.size());
}

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) {
  return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
}

// Explicit per-(filter, bin) triangular mel weight; HTK scale, centers equally
// spaced in mel between fmin and fmax.
inline double mel_weight(int filter, size_t bin, int n_mels, double fmin,
                         double fmax, int sample_rate, int fft_size) {
  double mel_lo = hz_to_mel(fmin), mel_hi = hz_to_mel(fmax);
  double step = (mel_hi - mel_lo) / (n_mels + 1);
  double f_left = mel_to_hz(mel_lo + step * filter);
  double f_center = mel_to_hz(mel_lo + step * (filter + 1));
  double f_right = mel_to_hz(mel_lo + step * (filter + 2));
  double f = double(bin) * sample_rate / fft_size;
  if (f < f_left || f > f_right) return 0.0;
  if (f <= f_center)
    return f_center > f_left ? (f - f_left) / (f_center - f_left) : 0.0;
  return f_right > f_center ? (f_right - f) / (f_right - f_center) : 0.0;
}

// Textbook orthonormal DCT-II via explicit double loop.
inline std::vector<double> dct2_ortho_loop(const std::vector<double>& v,
                                           int n_keep) {
  size_t n = v.size();
  std::vector<double> out(size_t(n_keep), 0.0);
  for (int j = 0; j < n_keep; ++j) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i)
      acc += v[i] * std::cos(kPi * j * (2.0 * double(i) + 1.0) / (2.0 * double(n)));
    double scale = j == 0 ? std::sqrt(1.0 / double(n)) : std::sqrt(2.0 / double(n));
    out[size_t(j)] = scale * acc;
  }
  return out;
}

// Full MFCC oracle for one magnitude frame: explicit mel summation over the
// power spectrum, log with floor, DCT-II double loop.
inline std::vector<double> mfcc_frame_oracle(
    const std::vector<double>& magnitudes, int n_mels, int n_mfcc, double fmin,
    double fmax, double log_floor, int sample_rate, int fft_size) {
  std::vector<double> energies(size_t(n_mels), 0.0);
  for (int m = 0; m < n_mels; ++m) {
    double acc = 0.0;
    for (size_t k = 0; k < magnitudes.size(); ++k) {
      double w = mel_weight(m, k, n_mels, fmin, fmax, sample_rate, fft_size);
      acc += w * magnitudes[k] * magnitudes[k];
    }
    energies[size_t(m)] = std::log(std::max(acc, log_floor));
  }
  return dct2_ortho_loop(energies, n_mfcc);
}

struct Stats {
  double mean, stddev, skew, max, min, median;
};

// Direct-loop population statistics; median is the lower-middle element for
// even lengths.
inline Stats stats_loop(std::vector<double> v) {
  Stats s{};
  double n = double(v.size());
  s.mean = mean_loop(v);
  double m2 = 0.0, m3 = 0.0;
  for (double x : v) {
    double d = x - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  s.stddev = std::sqrt(m2);
  s.skew = m2 <= 1e-12 * (1.0 + s.mean * s.mean) ? 0.0 : m3 / std::pow(m2, 1.5);
  s.max = *std::max_element(v.begin(), v.end());
  s.min = *std::min_element(v.begin(), v.end());
  std::sort(v.begin(), v.end());
  s.median = v[(v.size() - 1) / 2];
  return s;
}

}  // namespace oracle
