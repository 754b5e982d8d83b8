#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "abjad/audio.hpp"
#include "abjad/common.hpp"
#include "abjad/dsp.hpp"
#include "abjad/manifest.hpp"
#include "abjad/wav.hpp"

namespace abjad {

// The paper names the three transforms but no magnitudes; these ranges keep
// the keyword intelligible and are fully configurable.
struct AugmentPolicy {
  int copies_per_sample = 3;
  std::vector<double> pitch_semitones = {-2.0, -1.0, 1.0, 2.0};
  double lowpass_min_hz = 2000.0;
  double lowpass_max_hz = 7000.0;
  double lowpass_prob = 0.5;
  double gain_db_min = -6.0;
  double gain_db_max = 6.0;
  uint64_t seed = 0;

  void validate() const {
    require(copies_per_sample >= 0, ErrorCode::BadArgument, "copies must be >= 0");
    require(!pitch_semitones.empty(), ErrorCode::BadArgument,
            "pitch_semitones must be non-empty");
    require(lowpass_min_hz > 0 && lowpass_min_hz <= lowpass_max_hz,
            ErrorCode::BadArgument, "bad low-pass range");
    require(lowpass_prob >= 0.0 && lowpass_prob <= 1.0, ErrorCode::BadArgument,
            "lowpass_prob must be in [0,1]");
    require(gain_db_min <= gain_db_max, ErrorCode::BadArgument, "bad gain range");
  }
};

// samples * 10^(db/20), hard-clipped to [-1, 1].
inline AudioClip gain(const AudioClip& clip, double db) {
  double factor = std::pow(10.0, db / 20.0);
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.resize(clip.samples.size());
  for (size_t i = 0; i < clip.samples.size(); ++i)
    out.samples[i] = std::clamp(clip.samples[i] * factor, -1.0, 1.0);
  return out;
}

// Second-order Butterworth low-pass via the bilinear transform, applied once
// forward (direct form II transposed).
inline AudioClip low_pass(const AudioClip& clip, double cutoff_hz) {
  require(cutoff_hz > 0.0 && cutoff_hz < clip.sample_rate / 2.0,
          ErrorCode::BadArgument, "cutoff must be in (0, sample_rate/2)");
  double k = std::tan(kPi * cutoff_hz / clip.sample_rate);
  double sqrt2 = std::sqrt(2.0);
  double norm = 1.0 / (1.0 + sqrt2 * k + k * k);
  double b0 = k * k * norm;
  double b1 = 2.0 * b0;
  double b2 = b0;
  double a1 = 2.0 * (k * k - 1.0) * norm;
  double a2 = (1.0 - sqrt2 * k + k * k) * norm;

  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.resize(clip.samples.size());
  double z1 = 0.0, z2 = 0.0;
  for (size_t i = 0; i < clip.samples.size(); ++i) {
    double x = clip.samples[i];
    double y = b0 * x + z1;
    z1 = b1 * x + z2 - a1 * y;
    z2 = b2 * x - a2 * y;
    out.samples[i] = y;
  }
  return out;
}

// Resample by 2^(-semitones/12) and reinterpret at the original rate. Raises
// or lowers pitch by the factor and changes tempo with it (accepted
// simplification), then restores the 2 s duration.
inline AudioClip pitch_shift(const AudioClip& clip, double semitones,
                             double target_seconds = 2.0) {
  require(std::abs(semitones) <= 12.0, ErrorCode::BadArgument,
          "|semitones| must be <= 12");
  int shifted_rate =
      int(std::llround(clip.sample_rate * std::pow(2.0, -semitones / 12.0)));
  AudioClip shifted = resample(clip, shifted_rate);
  shifted.sample_rate = clip.sample_rate;
  return normalize_duration(shifted, target_seconds);
}

namespace detail {

struct AugmentParams {
  double semitones;
  bool apply_lowpass;
  double cutoff_hz;
  double gain_db;
};

// One draw per (entry, copy), generated sequentially from the policy seed so
// parallel file processing cannot change outputs.
inline std::vector<AugmentParams> augment_parameter_table(
    const AugmentPolicy& p, size_t n_entries) {
  Rng rng(derive_seed(p.seed, 0xA06));
  std::vector<AugmentParams> table;
  table.reserve(n_entries * size_t(p.copies_per_sample));
  for (size_t i = 0; i < n_entries; ++i) {
    for (int c = 0; c < p.copies_per_sample; ++c) {
      AugmentParams a;
      a.semitones = p.pitch_semitones[rng.uniform_int(p.pitch_semitones.size())];
      a.apply_lowpass = rng.uniform() < p.lowpass_prob;
      a.cutoff_hz = rng.uniform(p.lowpass_min_hz, p.lowpass_max_hz);
      a.gain_db = rng.uniform(p.gain_db_min, p.gain_db_max);
      table.push_back(a);
    }
  }
  return table;
}

inline std::string augmented_path(const std::string& source, int copy) {
  auto dot = source.rfind('.');
  std::string stem = dot == std::string::npos ? source : source.substr(0, dot);
  std::string ext = dot == std::string::npos ? "" : source.substr(dot);
  return stem + "_aug" + std::to_string(copy) + ext;
}

}  // namespace detail

inline AudioClip apply_augmentation(const AudioClip& clip,
                                    const detail::AugmentParams& a) {
  AudioClip out = pitch_shift(clip, a.semitones);
  if (a.apply_lowpass) out = low_pass(out, a.cutoff_hz);
  return gain(out, a.gain_db);
}

// Expands the manifest by copies_per_sample per original entry. Augmented
// clips are written alongside their sources under corpus_root; entries
// inherit label/category/speaker and carry origin = source path so split
// consumers can keep them out of test sets. Already-augmented entries are
// not re-augmented.
inline DatasetManifest augment_dataset(const DatasetManifest& m,
                                       const AugmentPolicy& p,
                                       const std::string& corpus_root) {
  p.validate();
  namespace fs = std::filesystem;
  auto table = detail::augment_parameter_table(p, m.entries.size());

  DatasetManifest out;
  out.entries = m.entries;
  std::vector<std::vector<ManifestEntry>> added(m.entries.size());
  parallel_for(m.entries.size(), [&](size_t i) {
    const ManifestEntry& src = m.entries[i];
    if (src.is_augmented()) return;
    AudioClip clip = read_wav_file((fs::path(corpus_root) / src.path).string());
    for (int c = 0; c < p.copies_per_sample; ++c) {
      const auto& params = table[i * size_t(p.copies_per_sample) + size_t(c)];
      AudioClip aug = apply_augmentation(clip, params);
      ManifestEntry e = src;
      e.path = detail::augmented_path(src.path, c);
      e.origin = src.path;
      write_wav_file((fs::path(corpus_root) / e.path).string(), aug);
      added[i].push_back(std::move(e));
    }
  });
  for (auto& group : added)
    for (auto& e : group) out.entries.push_back(std::move(e));
  out.rebuild_class_index();
  return out;
}

}  // namespace abjad
