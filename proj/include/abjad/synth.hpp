#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "abjad/audio.hpp"
#include "abjad/common.hpp"
#include "abjad/manifest.hpp"
#include "abjad/wav.hpp"

namespace abjad {

// Desk-scale stand-in corpus: every class is a fixed two-tone "formant" pair.
// Classes in the same planted group share f1 and differ in f2, so grouping
// and the two-stage hierarchy are exercised meaningfully.
struct SynthSpec {
  int n_classes = 12;
  int n_groups = 4;
  int speakers = 40;
  int samples_per_class = 50;
  uint64_t seed = 7;
  double noise_level = 0.01;  // RMS amplitude of additive white noise

  void validate() const {
    require(n_groups >= 1 && n_classes >= n_groups, ErrorCode::BadArgument,
            "require n_classes >= n_groups >= 1");
    require(speakers >= 1 && samples_per_class >= 1, ErrorCode::BadArgument,
            "counts must be >= 1");
  }
};

namespace synth_detail {

// f1 carries the group identity with wide spacing in the mel-sensitive low
// band; f2 separates classes within a group with narrower (but >200 Hz)
// spacing, so acoustic family structure dominates the clustering geometry.
constexpr double kF1Base = 400.0;
constexpr double kF1Spacing = 400.0;
constexpr double kF2Base = 3000.0;
constexpr double kF2Spacing = 220.0;

inline int planted_group(const SynthSpec& spec, int class_idx) {
  return class_idx % spec.n_groups;
}

inline std::pair<double, double> class_tones(const SynthSpec& spec,
                                             int class_idx) {
  int group = planted_group(spec, class_idx);
  int within = class_idx / spec.n_groups;
  return {kF1Base + kF1Spacing * group, kF2Base + kF2Spacing * within};
}

inline std::string class_label(int class_idx) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "class_%03d", class_idx);
  return buf;
}

inline std::string speaker_id(int speaker_idx) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "spk_%03d", speaker_idx);
  return buf;
}

}  // namespace synth_detail

// One clip, independent of file layout: deterministic given (spec, class,
// sample index). The word is amplitude-enveloped over the middle of the 2 s
// window, leaving silence-plus-noise tails for the noise gate to estimate
// its floor from.
inline AudioClip synthesize_clip(const SynthSpec& spec, int class_idx,
                                 int sample_idx, double speaker_pitch_factor) {
  const int sr = 16000;
  const size_t n = 32000;
  auto [f1, f2] = synth_detail::class_tones(spec, class_idx);
  require(f2 * 1.1 < sr / 2.0, ErrorCode::BadArgument,
          "synthetic tone table exceeds Nyquist; reduce classes per group");

  Rng rng(derive_seed(spec.seed, 0xC11F, uint64_t(class_idx), uint64_t(sample_idx)));
  double phase1 = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  double phase2 = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  double amp = 0.55 * rng.uniform(0.8, 1.0);
  double onset = rng.uniform(0.25, 0.45);
  double length = 1.2;

  AudioClip clip;
  clip.sample_rate = sr;
  clip.samples.resize(n);
  const double two_pi = 2.0 * 3.14159265358979323846;
  double w1 = two_pi * f1 * speaker_pitch_factor / sr;
  double w2 = two_pi * f2 * speaker_pitch_factor / sr;
  for (size_t i = 0; i < n; ++i) {
    double t = double(i) / sr;
    double env = 0.0;
    if (t >= onset && t < onset + length) {
      double u = (t - onset) / length;
      env = std::sin(3.14159265358979323846 * u);
      env *= env;
    }
    double v = amp * env *
                   (0.65 * std::sin(w1 * double(i) + phase1) +
                    0.35 * std::sin(w2 * double(i) + phase2)) +
               rng.normal(0.0, spec.noise_level);
    clip.samples[i] = std::clamp(v, -1.0, 1.0);
  }
  return clip;
}

// Deterministic per-speaker pitch-offset factors in [0.9, 1.1].
inline std::vector<double> synthetic_speaker_factors(const SynthSpec& spec) {
  Rng rng(derive_seed(spec.seed, 0x5BEA));
  std::vector<double> factors(size_t(spec.speakers));
  for (auto& f : factors) f = 0.9 + 0.2 * rng.uniform();
  return factors;
}

// Ground-truth planted grouping, keyed by label.
inline std::map<std::string, int> synthetic_planted_groups(const SynthSpec& spec) {
  std::map<std::string, int> groups;
  for (int c = 0; c < spec.n_classes; ++c)
    groups[synth_detail::class_label(c)] = synth_detail::planted_group(spec, c);
  return groups;
}

// Writes one WAV per (class, sample) under out_dir/<label>/ and returns the
// manifest with paths relative to out_dir. Byte-deterministic given the spec.
inline DatasetManifest generate_synthetic(const SynthSpec& spec,
                                          const std::string& out_dir) {
  spec.validate();
  namespace fs = std::filesystem;
  auto factors = synthetic_speaker_factors(spec);

  DatasetManifest m;
  for (int c = 0; c < spec.n_classes; ++c) {
    std::string label = synth_detail::class_label(c);
    fs::create_directories(fs::path(out_dir) / label);
    for (int i = 0; i < spec.samples_per_class; ++i) {
      int speaker = (i + c) % spec.speakers;
      AudioClip clip = synthesize_clip(spec, c, i, factors[size_t(speaker)]);
      char name[64];
      std::snprintf(name, sizeof name, "%s_%s_%04d.wav", label.c_str(),
                    synth_detail::speaker_id(speaker).c_str(), i);
      std::string rel = label + "/" + name;
      write_wav_file((fs::path(out_dir) / rel).string(), clip);

      ManifestEntry e;
      e.path = rel;
      e.label = label;
      e.category = Category::Alphabet;
      e.speaker_id = synth_detail::speaker_id(speaker);
      e.age_years = 3 + int(derive_seed(spec.seed, 0xA6E, uint64_t(speaker)) % 10);
      m.entries.push_back(std::move(e));
    }
  }
  m.rebuild_class_index();
  return m;
}

}  // namespace abjad
