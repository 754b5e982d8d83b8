#pragma once

#include <map>
#include <string>
#include <vector>

#include "abjad/augment.hpp"
#include "abjad/common.hpp"
#include "abjad/dsp.hpp"
#include "abjad/features.hpp"
#include "abjad/model.hpp"
#include "abjad/train.hpp"

namespace abjad {

// Published architecture rows shipped as named data so each one is
// reproducible with a single flag. `n_classes` stays 0 here; training fills
// it from the label space.
inline const std::map<std::string, ModelConfig>& model_presets() {
  static const std::map<std::string, ModelConfig> presets = [] {
    std::map<std::string, ModelConfig> p;
    auto add = [&](const std::string& name, std::vector<size_t> conv,
                   std::vector<size_t> dense, double dropout,
                   std::vector<size_t> lstm) {
      ModelConfig cfg;
      cfg.conv_channels = std::move(conv);
      cfg.dense_units = std::move(dense);
      cfg.dropout = dropout;
      cfg.lstm_units = std::move(lstm);
      p[name] = cfg;
    };
    // grouping-stage rows
    add("dynamic-group", {128, 64, 32}, {256, 32, 16}, 0.3, {64, 32});
    add("static-a", {64, 64, 32}, {128}, 0.25, {64, 32});
    add("static-best", {64, 64, 32}, {256}, 0.3, {128, 64});
    // per-group rows
    add("aqsa-lessan-best", {128, 64, 32}, {256, 32}, 0.15, {128, 32});
    add("aqsa-lessan-b", {64, 64, 32}, {256, 32}, 0.25, {128, 32});
    add("aqsa-lessan-c", {128, 64, 32}, {256, 16}, 0.4, {64, 32});
    add("halq-a", {128, 64, 32}, {512, 256, 32}, 0.25, {128, 128});
    add("halq-b", {128, 64, 32}, {256, 64, 32}, 0.3, {64, 32});
    add("halq-best", {128, 64, 32}, {512, 64}, 0.1, {});
    add("jouf-a", {128, 64}, {128}, 0.5, {64, 32});
    add("jouf-b", {128, 64, 32}, {256, 32}, 0.25, {64, 32});
    add("jouf-best", {128, 64, 32}, {128}, 0.5, {64, 32});
    add("shafatan-a", {128, 64, 32}, {256, 32}, 0.2, {});
    add("shafatan-best", {128, 64, 32}, {256, 32}, 0.3, {128, 32});
    add("thanaya1-best", {128, 64, 32}, {256, 32}, 0.15, {128, 32});
    add("thanaya1-b", {128, 64, 32}, {256, 32}, 0.25, {128, 32});
    add("thanaya2-best", {128, 64, 32}, {256, 32}, 0.15, {128, 32});
    add("thanaya2-b", {128, 64, 32}, {128, 32}, 0.25, {128, 32});
    // colors / numbers rows
    add("colors-best", {128, 64}, {512, 256, 32}, 0.3, {128, 128});
    add("colors-b", {128, 64}, {256, 64, 16}, 0.3, {128, 64});
    add("colors-c", {128, 64, 16}, {128}, 0.5, {64, 32});
    add("numbers-a", {128, 64, 32}, {512, 256, 32}, 0.3, {128, 128});
    add("numbers-best", {128, 64, 32}, {256, 128, 16}, 0.3, {128, 64});
    // stand-in for the externally published CNN baseline, user-editable
    add("baseline", {64, 32}, {128}, 0.25, {});
    // desk-scale presets for synthetic-corpus runs
    add("synth-small", {8, 8}, {32}, 0.1, {16});
    add("synth-dense", {}, {64, 32}, 0.1, {});
    return p;
  }();
  return presets;
}

inline ModelConfig preset(const std::string& name) {
  auto it = model_presets().find(name);
  require(it != model_presets().end(), ErrorCode::BadArgument,
          "unknown preset: " + name);
  return it->second;
}

// Everything a batch run needs; the CLI loads/overrides this from JSON.
struct RunConfig {
  std::string corpus_root;
  std::string manifest_path;
  std::string work_dir = "work";
  std::string group_table_path;  // empty = built-in default table

  int target_rate = 16000;
  double target_seconds = 2.0;
  double pre_emphasis_alpha = 0.97;

  WindowSpec window;
  NoiseGateParams noise_gate;
  FeatureConfig features;
  AugmentPolicy augment;
  TrainConfig train;

  double test_fraction = 0.2;
  uint64_t split_seed = 1;
  uint64_t group_seed = 1;

  std::string stage1_preset = "static-best";
  std::map<std::string, std::string> stage2_presets;  // group name -> preset
  std::string flat_preset = "static-best";
};

}  // namespace abjad
