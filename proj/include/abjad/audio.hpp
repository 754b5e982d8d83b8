#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "abjad/common.hpp"

namespace abjad {

// Mono sample sequence in [-1, 1]; the unit all DSP operates on.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;

  size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return sample_rate > 0 ? double(samples.size()) / sample_rate : 0.0;
  }
};

// Pads the tail with zeros or trims the tail so the clip holds exactly
// round(target_seconds * sample_rate) samples. Keeping the head of over-long
// clips preserves word onsets.
inline AudioClip normalize_duration(const AudioClip& clip, double target_seconds) {
  require(clip.sample_rate > 0, ErrorCode::BadArgument, "sample_rate must be > 0");
  require(target_seconds > 0, ErrorCode::BadArgument, "target_seconds must be > 0");
  size_t target = size_t(std::llround(target_seconds * clip.sample_rate));
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples = clip.samples;
  out.samples.resize(target, 0.0);
  return out;
}

inline double rms(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / double(x.size()));
}

}  // namespace abjad
