#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "abjad/audio.hpp"
#include "abjad/common.hpp"
#include "abjad/fft.hpp"

namespace abjad {

constexpr double kPi = 3.14159265358979323846;

// 25 ms frames, 10 ms hop at 16 kHz. The overlap ratio is not a
// constant-overlap-add pair, so istft normalizes by the window envelope.
struct WindowSpec {
  int frame_len = 400;
  int hop = 160;
  int fft_size = 512;

  void validate() const {
    require(hop > 0 && hop <= frame_len && frame_len <= fft_size,
            ErrorCode::BadArgument, "require 0 < hop <= frame_len <= fft_size");
    require(fft_size >= 2 && (fft_size & (fft_size - 1)) == 0,
            ErrorCode::BadArgument, "fft_size must be a power of two");
  }
};

struct Spectrogram {
  // frames x (fft_size/2 + 1), row-major
  std::vector<std::complex<double>> coeffs;
  size_t frames = 0;
  size_t bins = 0;
  std::vector<double> bin_freqs;
  WindowSpec window;
  int sample_rate = 16000;

  std::complex<double>& at(size_t t, size_t k) { return coeffs[t * bins + k]; }
  const std::complex<double>& at(size_t t, size_t k) const {
    return coeffs[t * bins + k];
  }
  double magnitude(size_t t, size_t k) const { return std::abs(at(t, k)); }
};

// threshold_factor 3.0: a 1.5x multiple of the 20th-percentile floor sits
// inside the Rayleigh bulk of white-noise magnitudes and gates almost
// nothing; 3x suppresses the noise floor while staying far below speech-band
// peaks.
struct NoiseGateParams {
  double floor_percentile = 20.0;
  double threshold_factor = 3.0;
  double min_gain = 0.1;
  int smooth_time = 3;
  int smooth_freq = 3;

  void validate() const {
    require(floor_percentile > 0.0 && floor_percentile < 100.0,
            ErrorCode::BadArgument, "floor_percentile must be in (0,100)");
    require(threshold_factor >= 1.0, ErrorCode::BadArgument,
            "threshold_factor must be >= 1");
    require(min_gain >= 0.0 && min_gain <= 1.0, ErrorCode::BadArgument,
            "min_gain must be in [0,1]");
    require(smooth_time >= 1 && smooth_freq >= 1, ErrorCode::BadArgument,
            "smoothing extents must be >= 1");
  }
};

// y[0] = x[0], y[n] = x[n] - alpha*x[n-1].
inline std::vector<double> pre_emphasis(const std::vector<double>& x,
                                        double alpha = 0.97) {
  require(alpha >= 0.0 && alpha < 1.0, ErrorCode::BadArgument,
          "pre-emphasis alpha must be in [0,1)");
  std::vector<double> y(x.size());
  if (x.empty()) return y;
  y[0] = x[0];
  for (size_t n = 1; n < x.size(); ++n) y[n] = x[n] - alpha * x[n - 1];
  return y;
}

namespace detail {

inline double bessel_i0(double x) {
  // Power series; converges quickly for the beta range used here.
  double sum = 1.0, term = 1.0;
  double half_x = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half_x / k) * (half_x / k);
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

inline double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

}  // namespace detail

// Band-limited rational-ratio resampling via windowed-sinc interpolation
// (Kaiser beta = 8.6, 64 zero-crossings half-width). Identity when rates
// match. Kernel weights are renormalized per output sample so DC passes at
// unit gain near the edges as well.
inline AudioClip resample(const AudioClip& clip, int target_rate) {
  require(target_rate > 0, ErrorCode::BadArgument, "target_rate must be > 0");
  require(clip.sample_rate > 0, ErrorCode::BadArgument, "sample_rate must be > 0");
  if (target_rate == clip.sample_rate) return clip;

  const double ratio = double(target_rate) / double(clip.sample_rate);
  const double cutoff = std::min(1.0, ratio);  // relative to input Nyquist
  const double kBeta = 8.6;
  const int kZeroCrossings = 64;
  const double half_width = kZeroCrossings / cutoff;
  const double i0_beta = detail::bessel_i0(kBeta);

  size_t out_len = size_t(std::llround(double(clip.samples.size()) * ratio));
  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len, 0.0);

  const std::vector<double>& x = clip.samples;
  const long n_in = long(x.size());
  for (size_t n = 0; n < out_len; ++n) {
    double t = double(n) / ratio;  // position in input samples
    long k0 = long(std::ceil(t - half_width));
    long k1 = long(std::floor(t + half_width));
    double acc = 0.0, wsum = 0.0;
    for (long k = k0; k <= k1; ++k) {
      double u = double(k) - t;
      double frac = u / half_width;
      double win =
          detail::bessel_i0(kBeta * std::sqrt(std::max(0.0, 1.0 - frac * frac))) /
          i0_beta;
      double h = cutoff * detail::sinc(cutoff * u) * win;
      wsum += h;
      if (k >= 0 && k < n_in) acc += x[k] * h;
    }
    out.samples[n] = wsum != 0.0 ? acc / wsum : 0.0;
  }
  return out;
}

// Periodic Hann.
inline std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    w[size_t(i)] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

// T = 1 + floor((len - frame_len)/hop); frame t starts at t*hop; no padding.
inline std::vector<std::vector<double>> frame_signal(
    const std::vector<double>& samples, const WindowSpec& w) {
  w.validate();
  require(samples.size() >= size_t(w.frame_len), ErrorCode::SignalTooShort,
          "signal shorter than one frame");
  size_t t_count = 1 + (samples.size() - size_t(w.frame_len)) / size_t(w.hop);
  std::vector<std::vector<double>> frames(t_count);
  for (size_t t = 0; t < t_count; ++t) {
    size_t start = t * size_t(w.hop);
    frames[t].assign(samples.begin() + long(start),
                     samples.begin() + long(start + size_t(w.frame_len)));
  }
  return frames;
}

inline Spectrogram stft(const std::vector<double>& samples, const WindowSpec& w,
                        int sample_rate) {
  auto frames = frame_signal(samples, w);
  Spectrogram spec;
  spec.window = w;
  spec.sample_rate = sample_rate;
  spec.frames = frames.size();
  spec.bins = size_t(w.fft_size) / 2 + 1;
  spec.coeffs.resize(spec.frames * spec.bins);
  spec.bin_freqs.resize(spec.bins);
  for (size_t k = 0; k < spec.bins; ++k)
    spec.bin_freqs[k] = double(k) * sample_rate / w.fft_size;

  FftPlan plan(size_t(w.fft_size));
  std::vector<double> window = hann_window(w.frame_len);
  std::vector<double> buf(size_t(w.fft_size));
  for (size_t t = 0; t < spec.frames; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int i = 0; i < w.frame_len; ++i)
      buf[size_t(i)] = frames[t][size_t(i)] * window[size_t(i)];
    auto half = plan.rfft(buf);
    std::copy(half.begin(), half.end(), spec.coeffs.begin() + long(t * spec.bins));
  }
  return spec;
}

// Weighted overlap-add with a Hann synthesis window, normalized by the
// accumulated squared-window envelope. Envelope values below 1e-8 leave
// samples at zero. `out_len` restores the original signal length; samples
// past the last frame's span stay zero.
inline std::vector<double> istft(const Spectrogram& spec, size_t out_len = 0) {
  const WindowSpec& w = spec.window;
  w.validate();
  require(spec.bins == size_t(w.fft_size) / 2 + 1, ErrorCode::DimensionMismatch,
          "istft: bin count does not match fft_size");
  size_t span = spec.frames == 0
                    ? 0
                    : (spec.frames - 1) * size_t(w.hop) + size_t(w.frame_len);
  if (out_len == 0) out_len = span;

  std::vector<double> num(std::max(out_len, span), 0.0);
  std::vector<double> env(std::max(out_len, span), 0.0);
  FftPlan plan(size_t(w.fft_size));
  std::vector<double> window = hann_window(w.frame_len);
  std::vector<std::complex<double>> half(spec.bins);
  for (size_t t = 0; t < spec.frames; ++t) {
    std::copy(spec.coeffs.begin() + long(t * spec.bins),
              spec.coeffs.begin() + long((t + 1) * spec.bins), half.begin());
    auto frame = plan.irfft(half);
    size_t start = t * size_t(w.hop);
    for (int i = 0; i < w.frame_len; ++i) {
      num[start + size_t(i)] += frame[size_t(i)] * window[size_t(i)];
      env[start + size_t(i)] += window[size_t(i)] * window[size_t(i)];
    }
  }
  std::vector<double> out(out_len, 0.0);
  for (size_t i = 0; i < out_len && i < num.size(); ++i)
    out[i] = env[i] < 1e-8 ? 0.0 : num[i] / env[i];
  return out;
}

namespace detail {

inline double percentile(std::vector<double> v, double pct) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double rank = pct / 100.0 * double(v.size() - 1);
  size_t lo = size_t(rank);
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = rank - double(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace detail

// Per-bin gain mask for spectral gating: 1 where magnitude exceeds the
// percentile noise floor times threshold_factor, min_gain elsewhere, then
// box-smoothed over time and frequency. Values stay in [min_gain, 1], so the
// gate never amplifies a bin.
inline std::vector<double> noise_gate_mask(const Spectrogram& spec,
                                           const NoiseGateParams& p) {
  p.validate();
  size_t t_count = spec.frames, bins = spec.bins;
  std::vector<double> raw(t_count * bins);
  std::vector<double> column(t_count);
  for (size_t k = 0; k < bins; ++k) {
    for (size_t t = 0; t < t_count; ++t) column[t] = spec.magnitude(t, k);
    double floor_k = detail::percentile(column, p.floor_percentile);
    double threshold = floor_k * p.threshold_factor;
    for (size_t t = 0; t < t_count; ++t)
      raw[t * bins + k] = spec.magnitude(t, k) > threshold ? 1.0 : p.min_gain;
  }
  // moving average; edges normalize by the cells actually covered
  int ht = p.smooth_time / 2, hf = p.smooth_freq / 2;
  std::vector<double> smooth(t_count * bins);
  for (size_t t = 0; t < t_count; ++t) {
    for (size_t k = 0; k < bins; ++k) {
      double acc = 0.0;
      int cnt = 0;
      for (int dt = -ht; dt <= ht; ++dt) {
        long tt = long(t) + dt;
        if (tt < 0 || tt >= long(t_count)) continue;
        for (int dk = -hf; dk <= hf; ++dk) {
          long kk = long(k) + dk;
          if (kk < 0 || kk >= long(bins)) continue;
          acc += raw[size_t(tt) * bins + size_t(kk)];
          ++cnt;
        }
      }
      smooth[t * bins + k] = acc / cnt;
    }
  }
  return smooth;
}

// Spectral noise gate: mask the STFT, resynthesize, and renormalize to
// [-1, 1] only if the overlap-add output exceeds the range.
inline AudioClip noise_gate(const AudioClip& clip, const NoiseGateParams& p,
                            const WindowSpec& w) {
  Spectrogram spec = stft(clip.samples, w, clip.sample_rate);
  std::vector<double> mask = noise_gate_mask(spec, p);
  for (size_t i = 0; i < spec.coeffs.size(); ++i) spec.coeffs[i] *= mask[i];
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples = istft(spec, clip.samples.size());
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 1.0)
    for (double& v : out.samples) v /= peak;
  return out;
}

}  // namespace abjad
