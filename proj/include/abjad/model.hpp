#pragma once

#include <memory>
#include <string>
#include <vector>

#include "abjad/common.hpp"
#include "abjad/features.hpp"
#include "abjad/layers.hpp"

namespace abjad {

// Declarative conv/LSTM/dense stack description. Kernel is fixed at 3x3 with
// same padding; every conv is followed by ReLU and a 2x2 max pool.
struct ModelConfig {
  std::vector<size_t> conv_channels;  // e.g. {128, 64, 32}
  std::vector<size_t> lstm_units;     // empty = flatten conv output into dense
  std::vector<size_t> dense_units;    // e.g. {256, 32}
  double dropout = 0.0;
  size_t n_classes = 0;

  void validate() const {
    require(dropout >= 0.0 && dropout < 1.0, ErrorCode::BadArgument,
            "dropout must be in [0,1)");
    require(!conv_channels.empty() || !dense_units.empty(),
            ErrorCode::BadArgument, "need at least one conv or dense layer");
    require(n_classes >= 2, ErrorCode::BadArgument, "need >= 2 classes");
    for (size_t c : conv_channels)
      require(c >= 1, ErrorCode::BadArgument, "conv channels must be >= 1");
    for (size_t u : lstm_units)
      require(u >= 1, ErrorCode::BadArgument, "lstm units must be >= 1");
    for (size_t u : dense_units)
      require(u >= 1, ErrorCode::BadArgument, "dense units must be >= 1");
  }
};

// CNN-LSTM pipeline over the (time, coefficient) MFCC plane:
//   [per conv: conv2d 3x3 same -> ReLU -> maxpool 2x2]
//   -> sequence reshape (time steps, channels x coeffs)
//   -> LSTM stack, last hidden state of the final layer
//   -> [per dense: affine -> ReLU -> dropout]
//   -> affine to n_classes -> softmax.
// When lstm_units is empty the conv output flattens straight into the dense
// stack; when conv_channels is empty the raw MFCC matrix feeds the LSTMs (or
// flattens into the dense stack).
template <typename S>
class CnnLstmModel {
 public:
  CnnLstmModel(const ModelConfig& cfg, size_t input_frames, size_t input_coeffs,
               uint64_t seed)
      : cfg_(cfg), in_h_(input_frames), in_w_(input_coeffs) {
    cfg_.validate();
    Rng rng(derive_seed(seed, 0x90DE1));

    size_t c = 1, h = in_h_, w = in_w_;
    for (size_t ch : cfg_.conv_channels) {
      require(h / 2 >= 1 && w / 2 >= 1, ErrorCode::ShapeUnderflow,
              "pooled dimension would hit zero");
      convs_.emplace_back(c, ch, h, w);
      convs_.back().init(rng);
      conv_relus_.emplace_back();
      pools_.emplace_back(ch, h, w);
      c = ch;
      h /= 2;
      w /= 2;
    }
    conv_out_c_ = c;
    conv_out_h_ = h;
    conv_out_w_ = w;

    size_t dense_in = 0;
    if (!cfg_.lstm_units.empty()) {
      reshape_ = std::make_unique<SeqReshape<S>>(cfg_.conv_channels.empty() ? 1 : c,
                                                 h, cfg_.conv_channels.empty() ? in_w_ : w);
      size_t features = reshape_->features();
      for (size_t u : cfg_.lstm_units) {
        lstms_.emplace_back(features, u);
        lstms_.back().init(rng);
        features = u;
      }
      dense_in = features;
    } else {
      dense_in = c * h * w;
    }

    for (size_t u : cfg_.dense_units) {
      denses_.emplace_back(dense_in, u);
      denses_.back().init(rng);
      dense_relus_.emplace_back();
      dropouts_.emplace_back(cfg_.dropout);
      dense_in = u;
    }
    out_ = std::make_unique<AffineLayer<S>>(dense_in, cfg_.n_classes);
    out_->init(rng);
  }

  const ModelConfig& config() const { return cfg_; }
  size_t input_frames() const { return in_h_; }
  size_t input_coeffs() const { return in_w_; }

  // Standardization is part of the model: per-coefficient mean/std computed
  // from the training set, applied to every input.
  void set_standardization(std::vector<S> mean, std::vector<S> stddev) {
    require(mean.size() == in_w_ && stddev.size() == in_w_,
            ErrorCode::DimensionMismatch, "standardization dims mismatch");
    std_mean_ = std::move(mean);
    std_std_ = std::move(stddev);
  }
  const std::vector<S>& std_mean() const { return std_mean_; }
  const std::vector<S>& std_stddev() const { return std_std_; }

  std::vector<S> standardize(const MfccMatrix& m) const {
    require(m.frames == in_h_ && m.coeffs == in_w_, ErrorCode::DimensionMismatch,
            "MFCC input shape does not match the model");
    std::vector<S> x(m.values.size());
    for (size_t t = 0; t < m.frames; ++t)
      for (size_t c = 0; c < m.coeffs; ++c) {
        S v = S(m.at(t, c));
        if (!std_mean_.empty()) v = (v - std_mean_[c]) / std_std_[c];
        x[t * m.coeffs + c] = v;
      }
    return x;
  }

  // `x` is the standardized [T x coeffs] input. Training mode consumes
  // dropout masks from `rng`.
  std::vector<S> forward(const std::vector<S>& x, bool training = false,
                         Rng* rng = nullptr) {
    require(x.size() == in_h_ * in_w_, ErrorCode::DimensionMismatch,
            "input size mismatch");
    std::vector<S> cur = x;  // [1, H, W]
    for (size_t i = 0; i < convs_.size(); ++i) {
      cur = convs_[i].forward(cur);
      cur = conv_relus_[i].forward(cur);
      cur = pools_[i].forward(cur);
    }
    if (!lstms_.empty()) {
      cur = reshape_->forward(cur);
      for (auto& lstm : lstms_) cur = lstm.forward(cur);
      // keep only the final hidden state
      size_t u = lstms_.back().units();
      last_seq_len_ = cur.size() / u;
      cur = std::vector<S>(cur.end() - long(u), cur.end());
    }
    for (size_t i = 0; i < denses_.size(); ++i) {
      cur = denses_[i].forward(cur);
      cur = dense_relus_[i].forward(cur);
      cur = dropouts_[i].forward(cur, training, rng);
    }
    logits_ = out_->forward(cur);
    return softmax(logits_);
  }

  const std::vector<S>& logits() const { return logits_; }

  // `dlogits` is the gradient at the logits (softmax-xent: (p - y)/B).
  void backward(const std::vector<S>& dlogits) {
    std::vector<S> cur = out_->backward(dlogits);
    for (size_t i = denses_.size(); i-- > 0;) {
      cur = dropouts_[i].backward(cur);
      cur = dense_relus_[i].backward(cur);
      cur = denses_[i].backward(cur);
    }
    if (!lstms_.empty()) {
      size_t u = lstms_.back().units();
      std::vector<S> dseq(last_seq_len_ * u, S(0));
      std::copy(cur.begin(), cur.end(), dseq.end() - long(u));
      cur = std::move(dseq);
      for (size_t i = lstms_.size(); i-- > 0;) cur = lstms_[i].backward(cur);
      cur = reshape_->backward(cur);
    }
    for (size_t i = convs_.size(); i-- > 0;) {
      cur = pools_[i].backward(cur);
      cur = conv_relus_[i].backward(cur);
      cur = convs_[i].backward(cur);
    }
  }

  std::vector<ParamBlock<S>> params() {
    std::vector<ParamBlock<S>> out;
    for (size_t i = 0; i < convs_.size(); ++i)
      convs_[i].collect(out, "conv" + std::to_string(i));
    for (size_t i = 0; i < lstms_.size(); ++i)
      lstms_[i].collect(out, "lstm" + std::to_string(i));
    for (size_t i = 0; i < denses_.size(); ++i)
      denses_[i].collect(out, "dense" + std::to_string(i));
    out_->collect(out, "out");
    return out;
  }

  void zero_grads() {
    for (auto& block : params())
      std::fill(block.g->begin(), block.g->end(), S(0));
  }

 private:
  ModelConfig cfg_;
  size_t in_h_, in_w_;
  size_t conv_out_c_ = 1, conv_out_h_ = 0, conv_out_w_ = 0;
  size_t last_seq_len_ = 0;
  std::vector<S> std_mean_, std_std_;

  std::vector<ConvLayer<S>> convs_;
  std::vector<ReluLayer<S>> conv_relus_;
  std::vector<MaxPoolLayer<S>> pools_;
  std::unique_ptr<SeqReshape<S>> reshape_;
  std::vector<LstmLayer<S>> lstms_;
  std::vector<AffineLayer<S>> denses_;
  std::vector<ReluLayer<S>> dense_relus_;
  std::vector<DropoutLayer<S>> dropouts_;
  std::unique_ptr<AffineLayer<S>> out_;
  std::vector<S> logits_;
};

// loss = -(1/B) sum ln p[target]; dlogits = (p - y)/B.
template <typename S>
inline S xent_loss(const std::vector<S>& probs, size_t target) {
  return S(-std::log(std::max(double(probs[target]), 1e-300)));
}

template <typename S>
inline std::vector<S> xent_grad(const std::vector<S>& probs, size_t target,
                                size_t batch) {
  std::vector<S> d(probs);
  d[target] -= S(1);
  for (auto& v : d) v /= S(batch);
  return d;
}

}  // namespace abjad
