#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "abjad/augment.hpp"
#include "abjad/dsp.hpp"
#include "abjad/feature_cache.hpp"
#include "abjad/features.hpp"
#include "abjad/hierarchy.hpp"
#include "abjad/manifest.hpp"
#include "abjad/presets.hpp"
#include "abjad/wav.hpp"

namespace abjad {

// Fig. 1 order: resample -> (exact 2 s) -> noise gate -> pre-emphasis.
inline AudioClip preprocess_clip(const AudioClip& raw, const RunConfig& cfg) {
  AudioClip clip = resample(raw, cfg.target_rate);
  clip = normalize_duration(clip, cfg.target_seconds);
  clip = noise_gate(clip, cfg.noise_gate, cfg.window);
  clip.samples = pre_emphasis(clip.samples, cfg.pre_emphasis_alpha);
  return clip;
}

namespace detail {

// Content hash + the preprocessing/feature constants that shape the record.
inline std::string cache_key(const std::vector<uint8_t>& file_bytes,
                             const RunConfig& cfg) {
  char blob[512];
  int n = std::snprintf(
      blob, sizeof blob, "r%d t%.6f a%.6f f%d h%d n%d p%.3f x%.3f g%.3f st%d sf%d "
      "m%d c%d lo%.1f hi%.1f ro%.4f fl%.3e agg%d",
      cfg.target_rate, cfg.target_seconds, cfg.pre_emphasis_alpha,
      cfg.window.frame_len, cfg.window.hop, cfg.window.fft_size,
      cfg.noise_gate.floor_percentile, cfg.noise_gate.threshold_factor,
      cfg.noise_gate.min_gain, cfg.noise_gate.smooth_time,
      cfg.noise_gate.smooth_freq, cfg.features.n_mels, cfg.features.n_mfcc,
      cfg.features.mel_fmin, cfg.features.mel_fmax, cfg.features.rolloff_pct,
      cfg.features.log_floor, cfg.features.aggregation == Aggregation::Mean ? 0 : 1);
  uint64_t h = fnv1a(file_bytes.data(), file_bytes.size());
  h = fnv1a(blob, size_t(n), h);
  char name[32];
  std::snprintf(name, sizeof name, "%016llx", (unsigned long long)h);
  return name;
}

}  // namespace detail

struct CacheStats {
  size_t hits = 0;
  size_t misses = 0;
};

// Content-addressed feature extraction: the cache key hashes the clip bytes
// and every preprocessing/feature constant, so a rerun with unchanged inputs
// recomputes nothing.
inline FeatureRecord extract_cached(const std::string& corpus_root,
                                    const std::string& rel_path,
                                    const RunConfig& cfg,
                                    const std::string& cache_dir,
                                    CacheStats* stats = nullptr,
                                    std::mutex* stats_mutex = nullptr) {
  namespace fs = std::filesystem;
  auto bytes = read_file_bytes((fs::path(corpus_root) / rel_path).string());
  std::string key = detail::cache_key(bytes, cfg);
  fs::path cache_file = fs::path(cache_dir) / (key + ".abjf");
  if (fs::exists(cache_file)) {
    auto rec = load_feature_record_file(cache_file.string());
    if (stats) {
      std::lock_guard<std::mutex> lock(*stats_mutex);
      ++stats->hits;
    }
    return rec;
  }
  AudioClip clip = preprocess_clip(read_wav(bytes), cfg);
  auto extracted = extract(clip, cfg.window, cfg.features);
  FeatureRecord rec{rel_path, extracted.vector, extracted.mfcc};
  fs::create_directories(cache_dir);
  save_feature_record_file(cache_file.string(), rec);
  if (stats) {
    std::lock_guard<std::mutex> lock(*stats_mutex);
    ++stats->misses;
  }
  return rec;
}

struct PreparedData {
  DatasetManifest train;
  DatasetManifest test;
  CacheStats cache;
  double seconds = 0.0;
};

// Split first (so augmentation only touches the train side), augment, then
// extract features for every entry across a worker pool.
inline PreparedData prepare(const DatasetManifest& manifest, const RunConfig& cfg,
                            bool verbose = false) {
  namespace fs = std::filesystem;
  auto t0 = std::chrono::steady_clock::now();

  PreparedData out;
  auto split = split_by_speaker(manifest, cfg.test_fraction, cfg.split_seed);
  out.train = cfg.augment.copies_per_sample > 0
                  ? augment_dataset(split.train, cfg.augment, cfg.corpus_root)
                  : split.train;
  out.test = split.test;

  std::string cache_dir = (fs::path(cfg.work_dir) / "cache").string();
  fs::create_directories(cache_dir);
  std::mutex stats_mutex;

  std::vector<const ManifestEntry*> all;
  for (const auto& e : out.train.entries) all.push_back(&e);
  for (const auto& e : out.test.entries) all.push_back(&e);
  parallel_for(all.size(), [&](size_t i) {
    extract_cached(cfg.corpus_root, all[i]->path, cfg, cache_dir, &out.cache,
                   &stats_mutex);
  });

  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
  if (verbose)
    std::fprintf(stderr,
                 "prepare: %zu train (+aug), %zu test, cache %zu hits / %zu "
                 "misses, %.1f s\n",
                 out.train.entries.size(), out.test.entries.size(),
                 out.cache.hits, out.cache.misses, out.seconds);
  return out;
}

// Assembles hierarchy samples (MFCC + label) for a manifest from the cache.
inline std::vector<HierarchySample> load_samples(const DatasetManifest& m,
                                                 const RunConfig& cfg) {
  namespace fs = std::filesystem;
  std::string cache_dir = (fs::path(cfg.work_dir) / "cache").string();
  std::vector<HierarchySample> samples(m.entries.size());
  std::mutex stats_mutex;
  CacheStats stats;
  parallel_for(m.entries.size(), [&](size_t i) {
    auto rec = extract_cached(cfg.corpus_root, m.entries[i].path, cfg, cache_dir,
                              &stats, &stats_mutex);
    samples[i] = {std::move(rec.mfcc), m.entries[i].label};
  });
  return samples;
}

// Per-class aggregated feature vectors (for clustering / the classical
// baseline).
inline std::map<std::string, std::vector<std::vector<double>>>
load_feature_vectors(const DatasetManifest& m, const RunConfig& cfg) {
  namespace fs = std::filesystem;
  std::string cache_dir = (fs::path(cfg.work_dir) / "cache").string();
  std::vector<std::vector<double>> vecs(m.entries.size());
  std::mutex stats_mutex;
  CacheStats stats;
  parallel_for(m.entries.size(), [&](size_t i) {
    vecs[i] = extract_cached(cfg.corpus_root, m.entries[i].path, cfg, cache_dir,
                             &stats, &stats_mutex)
                  .vector.values;
  });
  std::map<std::string, std::vector<std::vector<double>>> by_class;
  for (size_t i = 0; i < m.entries.size(); ++i)
    by_class[m.entries[i].label].push_back(std::move(vecs[i]));
  return by_class;
}

}  // namespace abjad
