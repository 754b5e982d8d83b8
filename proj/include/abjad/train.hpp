#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "abjad/common.hpp"
#include "abjad/model.hpp"
#include "abjad/optimizer.hpp"

namespace abjad {

struct TrainConfig {
  double learning_rate = 1e-3;
  size_t batch_size = 32;
  size_t epochs = 20;
  uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    require(learning_rate > 0.0, ErrorCode::BadArgument, "learning_rate must be > 0");
    require(batch_size >= 1, ErrorCode::BadArgument, "batch_size must be >= 1");
  }
};

// One labeled training example: a standardizable MFCC matrix + class id.
struct LabeledMfcc {
  MfccMatrix mfcc;
  size_t label = 0;
};

struct EpochStats {
  double train_loss = 0.0, train_accuracy = 0.0;
  double val_loss = 0.0, val_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
};

// Per-coefficient mean/std over every frame of the training set.
template <typename S>
inline std::pair<std::vector<S>, std::vector<S>> mfcc_standardization(
    const std::vector<LabeledMfcc>& set) {
  require(!set.empty(), ErrorCode::EmptyDataset, "empty training set");
  size_t coeffs = set[0].mfcc.coeffs;
  std::vector<double> mean(coeffs, 0.0), var(coeffs, 0.0);
  size_t total_frames = 0;
  for (const auto& s : set) {
    for (size_t t = 0; t < s.mfcc.frames; ++t)
      for (size_t c = 0; c < coeffs; ++c) mean[c] += s.mfcc.at(t, c);
    total_frames += s.mfcc.frames;
  }
  for (auto& m : mean) m /= double(total_frames);
  for (const auto& s : set)
    for (size_t t = 0; t < s.mfcc.frames; ++t)
      for (size_t c = 0; c < coeffs; ++c) {
        double d = s.mfcc.at(t, c) - mean[c];
        var[c] += d * d;
      }
  std::vector<S> m_out(coeffs), s_out(coeffs);
  for (size_t c = 0; c < coeffs; ++c) {
    m_out[c] = S(mean[c]);
    double sd = std::sqrt(var[c] / double(total_frames));
    s_out[c] = S(sd > 1e-8 ? sd : 1.0);
  }
  return {m_out, s_out};
}

template <typename S>
inline std::pair<double, double> evaluate_model(CnnLstmModel<S>& model,
                                                const std::vector<LabeledMfcc>& set) {
  double loss = 0.0;
  size_t correct = 0;
  for (const auto& s : set) {
    auto probs = model.forward(model.standardize(s.mfcc), false, nullptr);
    loss += double(xent_loss(probs, s.label));
    if (argmax(probs) == s.label) ++correct;
  }
  return {loss / double(set.size()), double(correct) / double(set.size())};
}

// Seeded shuffling per epoch, mini-batches with the last partial batch kept,
// one Adam step per batch. Deterministic for a fixed seed: the single RNG
// stream drives shuffling and dropout masks in a fixed order. History records
// inference-mode train/val loss and accuracy per epoch.
template <typename S>
inline TrainHistory train(CnnLstmModel<S>& model,
                          const std::vector<LabeledMfcc>& train_set,
                          const std::vector<LabeledMfcc>& val_set,
                          const TrainConfig& tc) {
  tc.validate();
  require(!train_set.empty(), ErrorCode::EmptyDataset, "empty training set");
  require(!val_set.empty(), ErrorCode::EmptyDataset, "empty validation set");

  if (model.std_mean().empty()) {
    auto [mean, stddev] = mfcc_standardization<S>(train_set);
    model.set_standardization(mean, stddev);
  }

  Adam<S> adam(model.params(),
               {tc.learning_rate, tc.beta1, tc.beta2, tc.epsilon});
  Rng rng(derive_seed(tc.seed, 0x7EA1A));

  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  TrainHistory history;
  for (size_t epoch = 0; epoch < tc.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += tc.batch_size) {
      size_t end = std::min(start + tc.batch_size, order.size());
      size_t batch = end - start;
      model.zero_grads();
      double batch_loss = 0.0;
      for (size_t bi = start; bi < end; ++bi) {
        const auto& sample = train_set[order[bi]];
        auto probs = model.forward(model.standardize(sample.mfcc), true, &rng);
        batch_loss += double(xent_loss(probs, sample.label));
        model.backward(xent_grad(probs, sample.label, batch));
      }
      if (!std::isfinite(batch_loss))
        throw Error(ErrorCode::TrainingDiverged, "training loss is not finite");
      adam.step(model.params());
    }

    EpochStats stats;
    auto [tl, ta] = evaluate_model(model, train_set);
    auto [vl, va] = evaluate_model(model, val_set);
    stats.train_loss = tl;
    stats.train_accuracy = ta;
    stats.val_loss = vl;
    stats.val_accuracy = va;
    if (!std::isfinite(tl) || !std::isfinite(vl))
      throw Error(ErrorCode::TrainingDiverged, "evaluation loss is not finite");
    history.epochs.push_back(stats);
  }
  return history;
}

template <typename S>
inline std::vector<S> predict_proba(CnnLstmModel<S>& model, const MfccMatrix& m) {
  return model.forward(model.standardize(m), false, nullptr);
}

}  // namespace abjad
