#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "abjad/common.hpp"
#include "abjad/model.hpp"

namespace abjad {

namespace bio {

inline void put_u8(std::ostream& out, uint8_t v) { out.put(char(v)); }
inline void put_u32(std::ostream& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(char(v >> (8 * i)));
}
inline void put_u64(std::ostream& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(char(v >> (8 * i)));
}
inline void put_f64(std::ostream& out, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  put_u64(out, u);
}
inline void put_str(std::ostream& out, const std::string& s) {
  put_u32(out, uint32_t(s.size()));
  out.write(s.data(), std::streamsize(s.size()));
}

inline uint8_t get_u8(std::istream& in) {
  int c = in.get();
  require(c != EOF, ErrorCode::IoError, "unexpected end of model bundle");
  return uint8_t(c);
}
inline uint32_t get_u32(std::istream& in) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(get_u8(in)) << (8 * i);
  return v;
}
inline uint64_t get_u64(std::istream& in) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(get_u8(in)) << (8 * i);
  return v;
}
inline double get_f64(std::istream& in) {
  uint64_t u = get_u64(in);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}
inline std::string get_str(std::istream& in) {
  uint32_t n = get_u32(in);
  std::string s(n, '\0');
  in.read(s.data(), std::streamsize(n));
  require(in.good(), ErrorCode::IoError, "unexpected end of model bundle");
  return s;
}

}  // namespace bio

constexpr uint8_t kBundleVersion = 1;
constexpr uint8_t kBundleKindCnnLstm = 0;
constexpr uint8_t kBundleKindLogreg = 1;

// Model bundle: magic `ABJD`, version byte, kind, serialized ModelConfig,
// input shape, standardization vectors, class-label table (output order),
// then each weight tensor as (name, element count, f64 little-endian values).
template <typename S>
inline void save_model(std::ostream& out, CnnLstmModel<S>& model,
                       const std::vector<std::string>& class_labels) {
  require(class_labels.size() == model.config().n_classes,
          ErrorCode::DimensionMismatch, "label table size != n_classes");
  out.write("ABJD", 4);
  bio::put_u8(out, kBundleVersion);
  bio::put_u8(out, kBundleKindCnnLstm);

  const ModelConfig& cfg = model.config();
  bio::put_u32(out, uint32_t(cfg.conv_channels.size()));
  for (size_t c : cfg.conv_channels) bio::put_u32(out, uint32_t(c));
  bio::put_u32(out, uint32_t(cfg.lstm_units.size()));
  for (size_t u : cfg.lstm_units) bio::put_u32(out, uint32_t(u));
  bio::put_u32(out, uint32_t(cfg.dense_units.size()));
  for (size_t u : cfg.dense_units) bio::put_u32(out, uint32_t(u));
  bio::put_f64(out, cfg.dropout);
  bio::put_u32(out, uint32_t(cfg.n_classes));

  bio::put_u32(out, uint32_t(model.input_frames()));
  bio::put_u32(out, uint32_t(model.input_coeffs()));

  bio::put_u8(out, model.std_mean().empty() ? 0 : 1);
  if (!model.std_mean().empty()) {
    for (S v : model.std_mean()) bio::put_f64(out, double(v));
    for (S v : model.std_stddev()) bio::put_f64(out, double(v));
  }

  bio::put_u32(out, uint32_t(class_labels.size()));
  for (const auto& l : class_labels) bio::put_str(out, l);

  auto blocks = model.params();
  bio::put_u32(out, uint32_t(blocks.size()));
  for (const auto& b : blocks) {
    bio::put_str(out, b.name);
    bio::put_u64(out, b.w->size());
    for (S v : *b.w) bio::put_f64(out, double(v));
  }
}

template <typename S>
struct LoadedModel {
  CnnLstmModel<S> model;
  std::vector<std::string> class_labels;
};

template <typename S>
inline LoadedModel<S> load_model(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, "ABJD", 4) == 0, ErrorCode::IoError,
          "not a model bundle (bad magic)");
  uint8_t version = bio::get_u8(in);
  require(version == kBundleVersion, ErrorCode::IoError,
          "unsupported bundle version");
  uint8_t kind = bio::get_u8(in);
  require(kind == kBundleKindCnnLstm, ErrorCode::IoError,
          "bundle does not hold a CNN-LSTM model");

  ModelConfig cfg;
  uint32_t n = bio::get_u32(in);
  for (uint32_t i = 0; i < n; ++i) cfg.conv_channels.push_back(bio::get_u32(in));
  n = bio::get_u32(in);
  for (uint32_t i = 0; i < n; ++i) cfg.lstm_units.push_back(bio::get_u32(in));
  n = bio::get_u32(in);
  for (uint32_t i = 0; i < n; ++i) cfg.dense_units.push_back(bio::get_u32(in));
  cfg.dropout = bio::get_f64(in);
  cfg.n_classes = bio::get_u32(in);

  uint32_t frames = bio::get_u32(in);
  uint32_t coeffs = bio::get_u32(in);

  LoadedModel<S> loaded{CnnLstmModel<S>(cfg, frames, coeffs, 0), {}};

  if (bio::get_u8(in)) {
    std::vector<S> mean(coeffs), stddev(coeffs);
    for (auto& v : mean) v = S(bio::get_f64(in));
    for (auto& v : stddev) v = S(bio::get_f64(in));
    loaded.model.set_standardization(std::move(mean), std::move(stddev));
  }

  uint32_t n_labels = bio::get_u32(in);
  for (uint32_t i = 0; i < n_labels; ++i)
    loaded.class_labels.push_back(bio::get_str(in));

  auto blocks = loaded.model.params();
  uint32_t n_blocks = bio::get_u32(in);
  require(n_blocks == blocks.size(), ErrorCode::IoError,
          "bundle parameter count does not match the config");
  for (uint32_t bi = 0; bi < n_blocks; ++bi) {
    std::string name = bio::get_str(in);
    uint64_t count = bio::get_u64(in);
    require(name == blocks[bi].name && count == blocks[bi].w->size(),
            ErrorCode::IoError, "bundle parameter mismatch at " + name);
    for (auto& v : *blocks[bi].w) v = S(bio::get_f64(in));
  }
  return loaded;
}

template <typename S>
inline void save_model_file(const std::string& path, CnnLstmModel<S>& model,
                            const std::vector<std::string>& class_labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  save_model(out, model, class_labels);
}

template <typename S>
inline LoadedModel<S> load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::MissingArtifact, "cannot open model bundle " + path);
  return load_model<S>(in);
}

}  // namespace abjad
