#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "abjad/audio.hpp"
#include "abjad/common.hpp"
#include "abjad/dsp.hpp"

namespace abjad {

enum class Aggregation { Mean, Stats };

struct FeatureConfig {
  int n_mels = 40;
  int n_mfcc = 13;  // coefficients 0..12, c0 kept
  double mel_fmin = 0.0;
  double mel_fmax = 8000.0;
  double rolloff_pct = 0.85;
  double log_floor = 1e-10;
  Aggregation aggregation = Aggregation::Mean;

  void validate(int sample_rate) const {
    require(n_mfcc >= 1 && n_mfcc <= n_mels, ErrorCode::BadArgument,
            "require 1 <= n_mfcc <= n_mels");
    require(mel_fmin >= 0.0 && mel_fmin < mel_fmax &&
                mel_fmax <= sample_rate / 2.0,
            ErrorCode::BadArgument, "require fmin < fmax <= sample_rate/2");
    require(rolloff_pct > 0.0 && rolloff_pct <= 1.0, ErrorCode::BadArgument,
            "rolloff_pct must be in (0,1]");
  }
};

// One value per frame for each of the six scalar features.
struct FrameFeatures {
  std::vector<double> zcr, ste, centroid, entropy, flux, rolloff;
  size_t frames() const { return zcr.size(); }
};

// T frames x n_mfcc coefficients, row-major.
struct MfccMatrix {
  std::vector<double> values;
  size_t frames = 0;
  size_t coeffs = 0;

  double& at(size_t t, size_t c) { return values[t * coeffs + c]; }
  double at(size_t t, size_t c) const { return values[t * coeffs + c]; }
};

// mean mode: 19 = 6 scalar features + 13 MFCC means.
// stats mode: 114 = 19 base features x (mean, std, skew, max, min, median),
// laid out feature-major.
struct FeatureVector {
  std::vector<double> values;
  Aggregation mode = Aggregation::Mean;
};

inline double zcr(const std::vector<double>& frame) {
  require(frame.size() >= 2, ErrorCode::BadArgument, "zcr needs >= 2 samples");
  int changes = 0;
  int prev = 0;  // zero samples adopt the previous nonzero sign
  for (double v : frame) {
    int cur = v > 0.0 ? 1 : (v < 0.0 ? -1 : prev);
    if (prev != 0 && cur != 0 && cur != prev) ++changes;
    if (cur != 0) prev = cur;
  }
  return double(changes) / double(frame.size() - 1);
}

inline double ste(const std::vector<double>& frame) {
  require(!frame.empty(), ErrorCode::BadArgument, "ste needs >= 1 sample");
  double acc = 0.0;
  for (double v : frame) acc += v * v;
  return acc / double(frame.size());
}

struct SpectralFrame {
  double centroid, entropy, flux, rolloff;
};

// Frame-level spectral features over one magnitude frame. `mag_prev` empty
// means this is the first frame (flux 0). Zero frames: centroid 0, entropy 0,
// flux via the zero vector, rolloff at bin 0.
inline SpectralFrame spectral_features(const std::vector<double>& mag_prev,
                                       const std::vector<double>& mag_cur,
                                       const std::vector<double>& bin_freqs,
                                       const FeatureConfig& cfg) {
  require(mag_cur.size() == bin_freqs.size(), ErrorCode::DimensionMismatch,
          "magnitude/bin_freqs length mismatch");
  for (double m : mag_cur)
    require(m >= 0.0, ErrorCode::BadArgument, "negative magnitude");

  SpectralFrame out{0.0, 0.0, 0.0, 0.0};
  size_t bins = mag_cur.size();

  double sum_m = 0.0, sum_p = 0.0;
  for (double m : mag_cur) {
    sum_m += m;
    sum_p += m * m;
  }

  if (sum_m > 0.0) {
    double acc = 0.0;
    for (size_t k = 0; k < bins; ++k) acc += bin_freqs[k] * mag_cur[k];
    out.centroid = acc / sum_m;
  }

  if (sum_p > 0.0) {
    for (size_t k = 0; k < bins; ++k) {
      double p = mag_cur[k] * mag_cur[k] / sum_p;
      if (p > 0.0) out.entropy -= p * std::log(p);
    }
  }

  if (!mag_prev.empty()) {
    require(mag_prev.size() == bins, ErrorCode::DimensionMismatch,
            "previous frame has different bin count");
    double sum_prev = 0.0;
    for (double m : mag_prev) sum_prev += m;
    double acc = 0.0;
    for (size_t k = 0; k < bins; ++k) {
      double a = sum_m > 0.0 ? mag_cur[k] / sum_m : 0.0;
      double b = sum_prev > 0.0 ? mag_prev[k] / sum_prev : 0.0;
      acc += (a - b) * (a - b);
    }
    out.flux = std::sqrt(acc);
  }

  double target = cfg.rolloff_pct * sum_p;
  double cum = 0.0;
  for (size_t k = 0; k < bins; ++k) {
    cum += mag_cur[k] * mag_cur[k];
    if (cum >= target) {
      out.rolloff = bin_freqs[k];
      break;
    }
  }
  return out;
}

// Triangular mel filterbank, HTK scale, filter centers equally spaced in mel
// between fmin and fmax. Returns n_mels x bins weights, row-major.
inline std::vector<double> mel_filterbank(const FeatureConfig& cfg,
                                          int sample_rate, int fft_size) {
  auto hz_to_mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto mel_to_hz = [](double m) {
    return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
  };
  size_t bins = size_t(fft_size) / 2 + 1;
  std::vector<double> points(size_t(cfg.n_mels) + 2);
  double mel_lo = hz_to_mel(cfg.mel_fmin), mel_hi = hz_to_mel(cfg.mel_fmax);
  for (size_t i = 0; i < points.size(); ++i)
    points[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * double(i) /
                                       double(cfg.n_mels + 1));
  std::vector<double> weights(size_t(cfg.n_mels) * bins, 0.0);
  for (int m = 0; m < cfg.n_mels; ++m) {
    double left = points[size_t(m)], center = points[size_t(m) + 1],
           right = points[size_t(m) + 2];
    for (size_t k = 0; k < bins; ++k) {
      double f = double(k) * sample_rate / fft_size;
      double w = 0.0;
      if (f >= left && f <= center && center > left)
        w = (f - left) / (center - left);
      else if (f > center && f <= right && right > center)
        w = (right - f) / (right - center);
      weights[size_t(m) * bins + k] = w;
    }
  }
  return weights;
}

// Orthonormal DCT-II of `v`, keeping the first n_keep coefficients.
inline std::vector<double> dct2_ortho(const std::vector<double>& v, int n_keep) {
  size_t n = v.size();
  std::vector<double> out(size_t(n_keep), 0.0);
  for (int j = 0; j < n_keep; ++j) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i)
      acc += v[i] * std::cos(kPi * j * (2.0 * double(i) + 1.0) / (2.0 * double(n)));
    out[size_t(j)] =
        (j == 0 ? std::sqrt(1.0 / double(n)) : std::sqrt(2.0 / double(n))) * acc;
  }
  return out;
}

// Power spectrum -> mel filterbank -> ln with floor -> orthonormal DCT-II,
// coefficients 0..n_mfcc-1.
inline MfccMatrix mfcc(const Spectrogram& spec, const FeatureConfig& cfg) {
  cfg.validate(spec.sample_rate);
  size_t bins = spec.bins;
  auto weights = mel_filterbank(cfg, spec.sample_rate, spec.window.fft_size);
  MfccMatrix out;
  out.frames = spec.frames;
  out.coeffs = size_t(cfg.n_mfcc);
  out.values.resize(out.frames * out.coeffs);
  std::vector<double> power(bins), energies(size_t(cfg.n_mels));
  for (size_t t = 0; t < spec.frames; ++t) {
    for (size_t k = 0; k < bins; ++k) power[k] = std::norm(spec.at(t, k));
    for (int m = 0; m < cfg.n_mels; ++m) {
      double acc = 0.0;
      const double* w = &weights[size_t(m) * bins];
      for (size_t k = 0; k < bins; ++k) acc += w[k] * power[k];
      energies[size_t(m)] = std::log(std::max(acc, cfg.log_floor));
    }
    auto coeffs = dct2_ortho(energies, cfg.n_mfcc);
    std::copy(coeffs.begin(), coeffs.end(),
              out.values.begin() + long(t * out.coeffs));
  }
  return out;
}

namespace detail {

inline double column_mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / double(v.size());
}

// mean, population std, sample skewness m3/m2^1.5 (0 when the variance is
// degenerate), max, min, lower-middle median.
inline void append_stats(std::vector<double>& out, std::vector<double> v) {
  double n = double(v.size());
  double mean = column_mean(v);
  double m2 = 0.0, m3 = 0.0;
  for (double x : v) {
    double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  out.push_back(mean);
  out.push_back(std::sqrt(m2));
  out.push_back(m2 <= 1e-12 * (1.0 + mean * mean) ? 0.0 : m3 / std::pow(m2, 1.5));
  out.push_back(*std::max_element(v.begin(), v.end()));
  out.push_back(*std::min_element(v.begin(), v.end()));
  std::sort(v.begin(), v.end());
  out.push_back(v[(v.size() - 1) / 2]);
}

inline std::vector<std::vector<double>> base_feature_columns(
    const FrameFeatures& frames, const MfccMatrix& mfcc_mat) {
  require(frames.frames() >= 1, ErrorCode::BadArgument, "no frames");
  require(frames.frames() == mfcc_mat.frames, ErrorCode::DimensionMismatch,
          "frame feature / MFCC frame count mismatch");
  std::vector<std::vector<double>> cols;
  cols.push_back(frames.zcr);
  cols.push_back(frames.ste);
  cols.push_back(frames.centroid);
  cols.push_back(frames.entropy);
  cols.push_back(frames.flux);
  cols.push_back(frames.rolloff);
  for (size_t c = 0; c < mfcc_mat.coeffs; ++c) {
    std::vector<double> col(mfcc_mat.frames);
    for (size_t t = 0; t < mfcc_mat.frames; ++t) col[t] = mfcc_mat.at(t, c);
    cols.push_back(std::move(col));
  }
  return cols;
}

}  // namespace detail

// [mean zcr, mean ste, mean centroid, mean entropy, mean flux, mean rolloff,
//  mean c0 .. mean c12] -- 19 dims with the default 13 MFCCs.
inline FeatureVector aggregate_mean(const FrameFeatures& frames,
                                    const MfccMatrix& mfcc_mat) {
  FeatureVector out;
  out.mode = Aggregation::Mean;
  for (const auto& col : detail::base_feature_columns(frames, mfcc_mat))
    out.values.push_back(detail::column_mean(col));
  return out;
}

// Six statistics per base feature, feature-major: 19 x 6 = 114 dims.
inline FeatureVector aggregate_stats(const FrameFeatures& frames,
                                     const MfccMatrix& mfcc_mat) {
  FeatureVector out;
  out.mode = Aggregation::Stats;
  for (const auto& col : detail::base_feature_columns(frames, mfcc_mat))
    detail::append_stats(out.values, col);
  return out;
}

struct ExtractResult {
  FeatureVector vector;
  MfccMatrix mfcc;
  FrameFeatures frame_features;
};

// Full feature extraction for one already-preprocessed clip: framing -> STFT
// -> frame features + MFCC -> aggregation. Time-domain features (ZCR, STE)
// are computed on the raw, unwindowed frames.
inline ExtractResult extract(const AudioClip& clip, const WindowSpec& w,
                             const FeatureConfig& cfg) {
  cfg.validate(clip.sample_rate);
  auto time_frames = frame_signal(clip.samples, w);
  Spectrogram spec = stft(clip.samples, w, clip.sample_rate);

  ExtractResult out;
  out.mfcc = mfcc(spec, cfg);

  FrameFeatures& ff = out.frame_features;
  std::vector<double> mag_prev, mag_cur(spec.bins);
  for (size_t t = 0; t < spec.frames; ++t) {
    for (size_t k = 0; k < spec.bins; ++k) mag_cur[k] = spec.magnitude(t, k);
    SpectralFrame sf = spectral_features(mag_prev, mag_cur, spec.bin_freqs, cfg);
    ff.zcr.push_back(zcr(time_frames[t]));
    ff.ste.push_back(ste(time_frames[t]));
    ff.centroid.push_back(sf.centroid);
    ff.entropy.push_back(sf.entropy);
    ff.flux.push_back(sf.flux);
    ff.rolloff.push_back(sf.rolloff);
    mag_prev = mag_cur;
  }

  out.vector = cfg.aggregation == Aggregation::Mean
                   ? aggregate_mean(ff, out.mfcc)
                   : aggregate_stats(ff, out.mfcc);
  return out;
}

}  // namespace abjad
