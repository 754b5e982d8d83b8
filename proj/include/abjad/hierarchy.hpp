#pragma once

#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "abjad/common.hpp"
#include "abjad/grouping.hpp"
#include "abjad/model.hpp"
#include "abjad/train.hpp"

namespace abjad {

// One labeled clip for hierarchy training/evaluation: MFCC matrix + class
// label (group labels derive from the GroupMap).
struct HierarchySample {
  MfccMatrix mfcc;
  std::string label;
};

// Stage 1 predicts the group; stage 2 holds one model per multi-class group
// over that group's classes. Single-class groups bypass stage 2.
template <typename S>
struct HierarchyModel {
  GroupMap group_map;
  std::unique_ptr<CnnLstmModel<S>> stage1;
  std::vector<std::string> group_names;  // stage-1 output order
  // group index -> model + its class labels (output order); null for bypassed
  std::vector<std::unique_ptr<CnnLstmModel<S>>> stage2;
  std::vector<std::vector<std::string>> stage2_labels;
};

struct TwoStagePrediction {
  std::string label;
  int group = 0;
  std::vector<double> stage1_probs;
  std::vector<double> stage2_probs;  // over the routed group's classes
};

struct EvalReport {
  double end_to_end_accuracy = 0.0;
  size_t sample_count = 0;
  // hierarchical-only fields
  bool hierarchical = false;
  double stage1_accuracy = 0.0;
  double oracle_routed_accuracy = 0.0;
  std::vector<double> per_group_accuracy;  // conditioned on the true group
  std::vector<size_t> per_group_count;
  std::vector<std::string> group_names;
  // confusion[true][predicted]
  std::vector<std::vector<size_t>> group_confusion;
  std::vector<std::vector<size_t>> class_confusion;
  std::vector<std::string> class_labels;
};

// Relabels every sample with its class's group index for stage-1 training.
inline std::vector<size_t> derive_group_labels(
    const std::vector<HierarchySample>& samples, const GroupMap& gm) {
  std::vector<size_t> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(size_t(gm.group_of(s.label)));
  return out;
}

namespace detail {

inline std::vector<std::string> sorted_labels(
    const std::vector<HierarchySample>& samples) {
  std::set<std::string> set;
  for (const auto& s : samples) set.insert(s.label);
  return {set.begin(), set.end()};
}

}  // namespace detail

// Trains stage 1 on group labels over all samples and one stage-2 model per
// multi-class group on that group's samples only (true group membership, not
// stage-1 routing, so the stages stay independently improvable). Stage-2
// label spaces partition the class set per the group map.
template <typename S>
inline HierarchyModel<S> train_hierarchy(
    const std::vector<HierarchySample>& train_set,
    const std::vector<HierarchySample>& val_set, const GroupMap& gm,
    const ModelConfig& stage1_cfg,
    const std::map<int, ModelConfig>& stage2_cfgs, const TrainConfig& tc,
    TrainHistory* stage1_history = nullptr,
    std::map<int, TrainHistory>* stage2_histories = nullptr) {
  require(!train_set.empty(), ErrorCode::EmptyDataset, "empty training set");
  size_t frames = train_set[0].mfcc.frames, coeffs = train_set[0].mfcc.coeffs;
  int n_groups = gm.n_groups();

  HierarchyModel<S> h;
  h.group_map = gm;
  h.group_names = gm.group_names;

  // stage 1: group labels
  std::vector<LabeledMfcc> s1_train, s1_val;
  for (const auto& s : train_set)
    s1_train.push_back({s.mfcc, size_t(gm.group_of(s.label))});
  for (const auto& s : val_set)
    s1_val.push_back({s.mfcc, size_t(gm.group_of(s.label))});
  ModelConfig cfg1 = stage1_cfg;
  cfg1.n_classes = size_t(n_groups);
  h.stage1 = std::make_unique<CnnLstmModel<S>>(cfg1, frames, coeffs,
                                               derive_seed(tc.seed, 0x51));
  TrainConfig tc1 = tc;
  auto hist1 = train(*h.stage1, s1_train, s1_val.empty() ? s1_train : s1_val, tc1);
  if (stage1_history) *stage1_history = hist1;

  // stage 2: one model per group with >= 2 classes
  auto classes_per_group = gm.classes_per_group();
  h.stage2.resize(size_t(n_groups));
  h.stage2_labels.resize(size_t(n_groups));
  for (int g = 0; g < n_groups; ++g) {
    auto& classes = classes_per_group[size_t(g)];
    std::sort(classes.begin(), classes.end());
    h.stage2_labels[size_t(g)] = classes;
    if (classes.size() < 2) continue;  // bypass: the sole class is returned directly

    std::map<std::string, size_t> label_index;
    for (size_t i = 0; i < classes.size(); ++i) label_index[classes[i]] = i;

    std::vector<LabeledMfcc> g_train, g_val;
    for (const auto& s : train_set)
      if (gm.group_of(s.label) == g)
        g_train.push_back({s.mfcc, label_index.at(s.label)});
    for (const auto& s : val_set)
      if (gm.group_of(s.label) == g)
        g_val.push_back({s.mfcc, label_index.at(s.label)});

    std::map<size_t, size_t> per_class;
    for (const auto& s : g_train) ++per_class[s.label];
    for (const auto& [label, idx] : label_index)
      require(per_class.count(idx) && per_class[idx] >= 2, ErrorCode::EmptyClass,
              "group " + gm.group_names[size_t(g)] + " class " + label +
                  " has fewer than 2 training samples");

    ModelConfig cfg2 =
        stage2_cfgs.count(g) ? stage2_cfgs.at(g) : stage1_cfg;
    cfg2.n_classes = classes.size();
    h.stage2[size_t(g)] = std::make_unique<CnnLstmModel<S>>(
        cfg2, frames, coeffs, derive_seed(tc.seed, 0x52, uint64_t(g)));
    TrainConfig tc2 = tc;
    tc2.seed = derive_seed(tc.seed, 0x7C2, uint64_t(g));
    auto hist2 = train(*h.stage2[size_t(g)], g_train,
                       g_val.empty() ? g_train : g_val, tc2);
    if (stage2_histories) (*stage2_histories)[g] = hist2;
  }
  return h;
}

// g* = argmax stage1 (ties -> lowest index); the class is the argmax of
// stage2[g*] restricted to g*'s classes, or the sole class when bypassed.
template <typename S>
inline TwoStagePrediction predict_two_stage(HierarchyModel<S>& h,
                                            const MfccMatrix& mfcc) {
  TwoStagePrediction out;
  auto p1 = predict_proba(*h.stage1, mfcc);
  out.stage1_probs.assign(p1.begin(), p1.end());
  out.group = int(argmax(p1));
  const auto& labels = h.stage2_labels[size_t(out.group)];
  if (h.stage2[size_t(out.group)]) {
    auto p2 = predict_proba(*h.stage2[size_t(out.group)], mfcc);
    out.stage2_probs.assign(p2.begin(), p2.end());
    out.label = labels[argmax(p2)];
  } else {
    out.stage2_probs = {1.0};
    out.label = labels.at(0);
  }
  return out;
}

// End-to-end counts a sample correct iff the routed class equals the true
// class. Per-group accuracies condition on the true group (oracle routing);
// oracle_routed_accuracy is their sample-weighted total.
template <typename S>
inline EvalReport evaluate_hierarchy(HierarchyModel<S>& h,
                                     const std::vector<HierarchySample>& test) {
  require(!test.empty(), ErrorCode::EmptyDataset, "empty test set");
  const GroupMap& gm = h.group_map;
  int n_groups = gm.n_groups();

  EvalReport r;
  r.hierarchical = true;
  r.sample_count = test.size();
  r.group_names = gm.group_names;
  r.per_group_accuracy.assign(size_t(n_groups), 0.0);
  r.per_group_count.assign(size_t(n_groups), 0);
  r.group_confusion.assign(size_t(n_groups),
                           std::vector<size_t>(size_t(n_groups), 0));

  std::set<std::string> label_set;
  for (const auto& [label, g] : gm.assignment) label_set.insert(label);
  r.class_labels.assign(label_set.begin(), label_set.end());
  std::map<std::string, size_t> class_idx;
  for (size_t i = 0; i < r.class_labels.size(); ++i)
    class_idx[r.class_labels[i]] = i;
  r.class_confusion.assign(r.class_labels.size(),
                           std::vector<size_t>(r.class_labels.size(), 0));

  size_t correct = 0, stage1_correct = 0, oracle_correct = 0;
  std::vector<size_t> group_correct(size_t(n_groups), 0);
  for (const auto& s : test) {
    int true_group = gm.group_of(s.label);
    auto pred = predict_two_stage(h, s.mfcc);
    ++r.group_confusion[size_t(true_group)][size_t(pred.group)];
    ++r.class_confusion[class_idx.at(s.label)][class_idx.at(pred.label)];
    if (pred.group == true_group) ++stage1_correct;
    if (pred.label == s.label) ++correct;

    // oracle routing: force the true group's stage-2 model
    ++r.per_group_count[size_t(true_group)];
    const auto& labels = h.stage2_labels[size_t(true_group)];
    std::string oracle_label;
    if (h.stage2[size_t(true_group)]) {
      auto p2 = predict_proba(*h.stage2[size_t(true_group)], s.mfcc);
      oracle_label = labels[argmax(p2)];
    } else {
      oracle_label = labels.at(0);
    }
    if (oracle_label == s.label) {
      ++oracle_correct;
      ++group_correct[size_t(true_group)];
    }
  }

  r.end_to_end_accuracy = double(correct) / double(test.size());
  r.stage1_accuracy = double(stage1_correct) / double(test.size());
  r.oracle_routed_accuracy = double(oracle_correct) / double(test.size());
  for (int g = 0; g < n_groups; ++g)
    r.per_group_accuracy[size_t(g)] =
        r.per_group_count[size_t(g)] == 0
            ? 0.0
            : double(group_correct[size_t(g)]) / double(r.per_group_count[size_t(g)]);
  return r;
}

// Flat single-model baseline over all classes, evaluated on the identical
// split for comparability.
template <typename S>
struct FlatModel {
  std::unique_ptr<CnnLstmModel<S>> model;
  std::vector<std::string> class_labels;
};

template <typename S>
inline FlatModel<S> train_flat(const std::vector<HierarchySample>& train_set,
                               const std::vector<HierarchySample>& val_set,
                               const ModelConfig& cfg, const TrainConfig& tc,
                               TrainHistory* history = nullptr) {
  require(!train_set.empty(), ErrorCode::EmptyDataset, "empty training set");
  FlatModel<S> flat;
  flat.class_labels = detail::sorted_labels(train_set);
  std::map<std::string, size_t> idx;
  for (size_t i = 0; i < flat.class_labels.size(); ++i)
    idx[flat.class_labels[i]] = i;

  std::vector<LabeledMfcc> t, v;
  for (const auto& s : train_set) t.push_back({s.mfcc, idx.at(s.label)});
  for (const auto& s : val_set) v.push_back({s.mfcc, idx.at(s.label)});

  ModelConfig c = cfg;
  c.n_classes = flat.class_labels.size();
  flat.model = std::make_unique<CnnLstmModel<S>>(
      c, train_set[0].mfcc.frames, train_set[0].mfcc.coeffs,
      derive_seed(tc.seed, 0xF1A7));
  auto hist = train(*flat.model, t, v.empty() ? t : v, tc);
  if (history) *history = hist;
  return flat;
}

template <typename S>
inline EvalReport evaluate_flat(FlatModel<S>& flat,
                                const std::vector<HierarchySample>& test) {
  require(!test.empty(), ErrorCode::EmptyDataset, "empty test set");
  EvalReport r;
  r.hierarchical = false;
  r.sample_count = test.size();
  r.class_labels = flat.class_labels;
  std::map<std::string, size_t> idx;
  for (size_t i = 0; i < flat.class_labels.size(); ++i)
    idx[flat.class_labels[i]] = i;
  r.class_confusion.assign(flat.class_labels.size(),
                           std::vector<size_t>(flat.class_labels.size(), 0));
  size_t correct = 0;
  for (const auto& s : test) {
    auto p = predict_proba(*flat.model, s.mfcc);
    size_t pred = argmax(p);
    ++r.class_confusion[idx.at(s.label)][pred];
    if (flat.class_labels[pred] == s.label) ++correct;
  }
  r.end_to_end_accuracy = double(correct) / double(test.size());
  return r;
}

// Structured text with stable key names plus a markdown table; all floats at
// fixed precision so identical evaluations serialize byte-identically.
inline std::string serialize_report(const EvalReport& r) {
  std::ostringstream out;
  char buf[256];
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s: %.6f\n", key, v);
    out << buf;
  };
  out << "samples: " << r.sample_count << "\n";
  line("end_to_end_accuracy", r.end_to_end_accuracy);
  if (r.hierarchical) {
    line("stage1_accuracy", r.stage1_accuracy);
    line("oracle_routed_accuracy", r.oracle_routed_accuracy);
    out << "\n| Group | Samples | Stage-2 accuracy (oracle routing) |\n";
    out << "|---|---|---|\n";
    for (size_t g = 0; g < r.group_names.size(); ++g) {
      std::snprintf(buf, sizeof buf, "| %s | %zu | %.6f |\n",
                    r.group_names[g].c_str(), r.per_group_count[g],
                    r.per_group_accuracy[g]);
      out << buf;
    }
    out << "\ngroup_confusion (rows = true, cols = predicted):\n";
    for (const auto& row : r.group_confusion) {
      for (size_t j = 0; j < row.size(); ++j)
        out << row[j] << (j + 1 < row.size() ? ' ' : '\n');
    }
  }
  out << "\nclass_confusion (rows = true, cols = predicted):\n";
  for (const auto& row : r.class_confusion) {
    for (size_t j = 0; j < row.size(); ++j)
      out << row[j] << (j + 1 < row.size() ? ' ' : '\n');
  }
  return out.str();
}

}  // namespace abjad
