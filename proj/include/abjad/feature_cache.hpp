#pragma once

#include <fstream>
#include <string>

#include "abjad/common.hpp"
#include "abjad/features.hpp"
#include "abjad/model_io.hpp"

namespace abjad {

// One per-clip cache record: magic `ABJF`, version byte, source path,
// aggregation mode, feature vector, MFCC dims + values. Little-endian f64
// throughout; one record per file, keyed by content + config hash.
struct FeatureRecord {
  std::string path;
  FeatureVector vector;
  MfccMatrix mfcc;
};

constexpr uint8_t kFeatureCacheVersion = 1;

inline void save_feature_record(std::ostream& out, const FeatureRecord& rec) {
  out.write("ABJF", 4);
  bio::put_u8(out, kFeatureCacheVersion);
  bio::put_str(out, rec.path);
  bio::put_u8(out, rec.vector.mode == Aggregation::Mean ? 0 : 1);
  bio::put_u32(out, uint32_t(rec.vector.values.size()));
  for (double v : rec.vector.values) bio::put_f64(out, v);
  bio::put_u32(out, uint32_t(rec.mfcc.frames));
  bio::put_u32(out, uint32_t(rec.mfcc.coeffs));
  for (double v : rec.mfcc.values) bio::put_f64(out, v);
}

inline FeatureRecord load_feature_record(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, "ABJF", 4) == 0, ErrorCode::IoError,
          "not a feature record (bad magic)");
  require(bio::get_u8(in) == kFeatureCacheVersion, ErrorCode::IoError,
          "unsupported feature record version");
  FeatureRecord rec;
  rec.path = bio::get_str(in);
  rec.vector.mode = bio::get_u8(in) == 0 ? Aggregation::Mean : Aggregation::Stats;
  uint32_t n = bio::get_u32(in);
  rec.vector.values.resize(n);
  for (auto& v : rec.vector.values) v = bio::get_f64(in);
  rec.mfcc.frames = bio::get_u32(in);
  rec.mfcc.coeffs = bio::get_u32(in);
  rec.mfcc.values.resize(rec.mfcc.frames * rec.mfcc.coeffs);
  for (auto& v : rec.mfcc.values) v = bio::get_f64(in);
  return rec;
}

inline void save_feature_record_file(const std::string& path,
                                     const FeatureRecord& rec) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  save_feature_record(out, rec);
}

inline FeatureRecord load_feature_record_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::MissingArtifact, "cannot open " + path);
  return load_feature_record(in);
}

}  // namespace abjad
