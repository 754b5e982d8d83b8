#include "abjad/hierarchy.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace abjad;
using Catch::Approx;

namespace {

// Tiny synthetic MFCC problem with planted group/class structure: even
// coefficients carry the group shift, odd coefficients the within-group class
// shift, so every standardized dimension stays informative.
struct ToyWorld {
  GroupMap gm;
  std::vector<HierarchySample> train, test;

  explicit ToyWorld(int n_groups = 3, int classes_per_group = 2,
                    int train_per_class = 10, int test_per_class = 4,
                    uint64_t seed = 9) {
    Rng rng(seed);
    for (int g = 0; g < n_groups; ++g)
      gm.group_names.push_back("g" + std::to_string(g));
    for (int g = 0; g < n_groups; ++g) {
      for (int j = 0; j < classes_per_group; ++j) {
        std::string label = "c" + std::to_string(g) + "_" + std::to_string(j);
        gm.assignment[label] = g;
        for (int i = 0; i < train_per_class + test_per_class; ++i) {
          MfccMatrix m;
          m.frames = 12;
          m.coeffs = 13;
          m.values.resize(12 * 13);
          for (auto& v : m.values) v = rng.normal(0.0, 0.3);
          for (size_t t = 0; t < m.frames; ++t)
            for (size_t c = 0; c < m.coeffs; ++c)
              m.at(t, c) += (c % 2 == 0) ? 0.8 * g : 0.8 * j;
          HierarchySample s{std::move(m), label};
          if (i < train_per_class)
            train.push_back(std::move(s));
          else
            test.push_back(std::move(s));
        }
      }
    }
  }
};

ModelConfig tiny_cfg() {
  ModelConfig cfg;
  cfg.dense_units = {16};
  cfg.dropout = 0.0;
  return cfg;
}

TrainConfig fast_tc(uint64_t seed = 1) {
  TrainConfig tc;
  tc.epochs = 25;
  tc.batch_size = 8;
  tc.seed = seed;
  return tc;
}

}  // namespace

TEST_CASE("derive_group_labels composes class and group lookups",
          "[hierarchy]") {
  ToyWorld w;
  auto labels = derive_group_labels(w.train, w.gm);
  REQUIRE(labels.size() == w.train.size());
  for (size_t i = 0; i < labels.size(); ++i)
    REQUIRE(labels[i] == size_t(w.gm.group_of(w.train[i].label)));
  std::map<size_t, size_t> dist;
  for (auto g : labels) ++dist[g];
  REQUIRE(dist.size() == 3);
  for (auto& [g, n] : dist) REQUIRE(n == 20);  // 2 classes x 10 samples
}

TEST_CASE("train_hierarchy builds one stage-2 model per multi-class group",
          "[hierarchy][train]") {
  ToyWorld w;
  auto h = train_hierarchy<double>(w.train, w.test, w.gm, tiny_cfg(), {},
                                   fast_tc());
  REQUIRE(h.stage1 != nullptr);
  REQUIRE(h.stage2.size() == 3);
  for (int g = 0; g < 3; ++g) {
    REQUIRE(h.stage2[size_t(g)] != nullptr);
    REQUIRE(h.stage2_labels[size_t(g)].size() == 2);
  }
}

TEST_CASE("single-class groups bypass stage 2", "[hierarchy][train]") {
  ToyWorld w(2, 1, 8, 2);  // every group holds exactly one class
  auto h = train_hierarchy<double>(w.train, w.test, w.gm, tiny_cfg(), {},
                                   fast_tc());
  for (size_t g = 0; g < h.stage2.size(); ++g) {
    REQUIRE(h.stage2[g] == nullptr);
    REQUIRE(h.stage2_labels[g].size() == 1);
  }
  // routed predictions still return the sole class of the routed group
  auto pred = predict_two_stage(h, w.test[0].mfcc);
  REQUIRE(pred.stage2_probs == std::vector<double>{1.0});
  REQUIRE(w.gm.group_of(pred.label) == pred.group);
}

TEST_CASE("predicted class always belongs to the predicted group",
          "[hierarchy][invariant]") {
  ToyWorld w;
  auto h = train_hierarchy<double>(w.train, w.test, w.gm, tiny_cfg(), {},
                                   fast_tc());
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    MfccMatrix m;
    m.frames = 12;
    m.coeffs = 13;
    m.values.resize(12 * 13);
    for (auto& v : m.values) v = rng.uniform(-3.0, 3.0);
    auto pred = predict_two_stage(h, m);
    REQUIRE(pred.stage1_probs.size() == 3);
    REQUIRE(w.gm.group_of(pred.label) == pred.group);
  }
}

TEST_CASE("evaluation satisfies the structural inequalities exactly",
          "[hierarchy][invariant]") {
  ToyWorld w;
  auto h = train_hierarchy<double>(w.train, w.test, w.gm, tiny_cfg(), {},
                                   fast_tc());
  auto r = evaluate_hierarchy(h, w.test);
  REQUIRE(r.hierarchical);
  REQUIRE(r.end_to_end_accuracy <= r.stage1_accuracy);
  REQUIRE(r.end_to_end_accuracy <= r.oracle_routed_accuracy);
  REQUIRE(r.sample_count == w.test.size());

  // confusion rows sum to per-class/per-group test counts
  std::map<std::string, size_t> per_class;
  for (const auto& s : w.test) ++per_class[s.label];
  for (size_t i = 0; i < r.class_labels.size(); ++i) {
    size_t row_sum = 0;
    for (size_t j = 0; j < r.class_labels.size(); ++j)
      row_sum += r.class_confusion[i][j];
    REQUIRE(row_sum == per_class[r.class_labels[i]]);
  }
  size_t total = 0;
  for (const auto& row : r.group_confusion)
    for (size_t v : row) total += v;
  REQUIRE(total == w.test.size());
}

TEST_CASE("a well-structured toy problem trains to high accuracy",
          "[hierarchy][train]") {
  ToyWorld w;
  auto h = train_hierarchy<double>(w.train, w.test, w.gm, tiny_cfg(), {},
                                   fast_tc());
  auto r = evaluate_hierarchy(h, w.test);
  REQUIRE(r.stage1_accuracy >= 0.95);
  REQUIRE(r.end_to_end_accuracy >= 0.9);
}

TEST_CASE("evaluation is pure: evaluating twice matches byte for byte",
          "[hierarchy][invariant]") {
  ToyWorld w;
  auto h = train_hierarchy<double>(w.train, w.test, w.gm, tiny_cfg(), {},
                                   fast_tc());
  auto a = serialize_report(evaluate_hierarchy(h, w.test));
  auto b = serialize_report(evaluate_hierarchy(h, w.test));
  REQUIRE(a == b);
}

TEST_CASE("perfect stages yield end-to-end accuracy 1", "[hierarchy]") {
  // trivially separable single-feature world trained long enough to be exact
  ToyWorld w(2, 2, 12, 3, 4);
  auto tc = fast_tc(2);
  tc.epochs = 60;
  auto h = train_hierarchy<double>(w.train, w.test, w.gm, tiny_cfg(), {}, tc);
  auto r = evaluate_hierarchy(h, w.test);
  if (r.stage1_accuracy == 1.0 && r.oracle_routed_accuracy == 1.0)
    REQUIRE(r.end_to_end_accuracy == 1.0);
}

TEST_CASE("flat baseline trains and reports on the same split",
          "[hierarchy][flat]") {
  ToyWorld w;
  auto flat = train_flat<double>(w.train, w.test, tiny_cfg(), fast_tc());
  REQUIRE(flat.class_labels.size() == 6);
  auto r = evaluate_flat(flat, w.test);
  REQUIRE_FALSE(r.hierarchical);
  REQUIRE(r.sample_count == w.test.size());
  REQUIRE(r.end_to_end_accuracy >= 0.8);
  auto probs = predict_proba(*flat.model, w.test[0].mfcc);
  REQUIRE(probs.size() == 6);
}

TEST_CASE("hierarchy training is deterministic for fixed seeds",
          "[hierarchy][train]") {
  ToyWorld w;
  auto h1 = train_hierarchy<double>(w.train, w.test, w.gm, tiny_cfg(), {},
                                    fast_tc(3));
  auto h2 = train_hierarchy<double>(w.train, w.test, w.gm, tiny_cfg(), {},
                                    fast_tc(3));
  auto r1 = serialize_report(evaluate_hierarchy(h1, w.test));
  auto r2 = serialize_report(evaluate_hierarchy(h2, w.test));
  REQUIRE(r1 == r2);
}

TEST_CASE("missing training coverage raises a named error",
          "[hierarchy][train]") {
  ToyWorld w;
  // delete every training sample of one class
  std::vector<HierarchySample> pruned;
  for (const auto& s : w.train)
    if (s.label != "c0_1") pruned.push_back(s);
  try {
    train_hierarchy<double>(pruned, w.test, w.gm, tiny_cfg(), {}, fast_tc());
    FAIL("expected an error for the missing class");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::EmptyClass);
  }
}
