#pragma once

#include <cmath>
#include <vector>

#include "abjad/common.hpp"
#include "abjad/layers.hpp"

namespace abjad {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over a set of parameter blocks. Moment slots mirror the
// block layout; `t` counts applied steps.
template <typename S>
class Adam {
 public:
  Adam(const std::vector<ParamBlock<S>>& blocks, AdamConfig cfg = {})
      : cfg_(cfg) {
    for (const auto& b : blocks) {
      m_.emplace_back(b.w->size(), S(0));
      v_.emplace_back(b.w->size(), S(0));
    }
  }

  void step(const std::vector<ParamBlock<S>>& blocks) {
    ++t_;
    double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_));
    double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_));
    for (size_t bi = 0; bi < blocks.size(); ++bi) {
      auto& w = *blocks[bi].w;
      auto& g = *blocks[bi].g;
      auto& m = m_[bi];
      auto& v = v_[bi];
      for (size_t i = 0; i < w.size(); ++i) {
        m[i] = S(cfg_.beta1) * m[i] + S(1.0 - cfg_.beta1) * g[i];
        v[i] = S(cfg_.beta2) * v[i] + S(1.0 - cfg_.beta2) * g[i] * g[i];
        double mhat = double(m[i]) / bc1;
        double vhat = double(v[i]) / bc2;
        w[i] -= S(cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon));
      }
    }
  }

  uint64_t steps() const { return t_; }
  const std::vector<std::vector<S>>& first_moments() const { return m_; }
  const std::vector<std::vector<S>>& second_moments() const { return v_; }

 private:
  AdamConfig cfg_;
  uint64_t t_ = 0;
  std::vector<std::vector<S>> m_, v_;
};

// Single-tensor convenience used by tests and the logistic-regression
// baseline: one bias-corrected update, t >= 1.
template <typename S>
inline void adam_step(std::vector<S>& w, const std::vector<S>& g,
                      std::vector<S>& m, std::vector<S>& v, uint64_t t,
                      const AdamConfig& cfg) {
  require(t >= 1, ErrorCode::BadArgument, "adam step index starts at 1");
  require(w.size() == g.size() && w.size() == m.size() && w.size() == v.size(),
          ErrorCode::DimensionMismatch, "adam: size mismatch");
  double bc1 = 1.0 - std::pow(cfg.beta1, double(t));
  double bc2 = 1.0 - std::pow(cfg.beta2, double(t));
  for (size_t i = 0; i < w.size(); ++i) {
    m[i] = S(cfg.beta1) * m[i] + S(1.0 - cfg.beta1) * g[i];
    v[i] = S(cfg.beta2) * v[i] + S(1.0 - cfg.beta2) * g[i] * g[i];
    double mhat = double(m[i]) / bc1;
    double vhat = double(v[i]) / bc2;
    w[i] -= S(cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon));
  }
}

}  // namespace abjad
