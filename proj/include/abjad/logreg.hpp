#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "abjad/common.hpp"
#include "abjad/layers.hpp"
#include "abjad/model_io.hpp"
#include "abjad/optimizer.hpp"

namespace abjad {

// Multinomial logistic regression over aggregated feature vectors; the
// classical baseline standing in for the paper's traditional-classifier
// comparison.
struct LogregModel {
  size_t n_classes = 0;
  size_t dim = 0;
  std::vector<double> weights;  // [n_classes x dim]
  std::vector<double> bias;     // [n_classes]
  std::vector<double> mean, stddev;
  double chosen_l2 = 0.0;

  std::vector<double> standardize(const std::vector<double>& x) const {
    std::vector<double> z(x.size());
    for (size_t d = 0; d < x.size(); ++d) z[d] = (x[d] - mean[d]) / stddev[d];
    return z;
  }

  std::vector<double> predict_proba(const std::vector<double>& x) const {
    require(x.size() == dim, ErrorCode::DimensionMismatch, "feature dim mismatch");
    auto z = standardize(x);
    std::vector<double> logits(n_classes);
    for (size_t c = 0; c < n_classes; ++c) {
      double acc = bias[c];
      const double* w = &weights[c * dim];
      for (size_t d = 0; d < dim; ++d) acc += w[d] * z[d];
      logits[c] = acc;
    }
    return softmax(logits);
  }
};

namespace detail {

// mean cross-entropy + (l2/2)*||W||^2; gradients exact.
inline double logreg_loss_and_grads(const LogregModel& m,
                                    const std::vector<std::vector<double>>& z,
                                    const std::vector<size_t>& y, double l2,
                                    std::vector<double>& gw,
                                    std::vector<double>& gb) {
  size_t n = z.size();
  std::fill(gw.begin(), gw.end(), 0.0);
  std::fill(gb.begin(), gb.end(), 0.0);
  double loss = 0.0;
  std::vector<double> logits(m.n_classes);
  for (size_t i = 0; i < n; ++i) {
    for (size_t c = 0; c < m.n_classes; ++c) {
      double acc = m.bias[c];
      const double* w = &m.weights[c * m.dim];
      for (size_t d = 0; d < m.dim; ++d) acc += w[d] * z[i][d];
      logits[c] = acc;
    }
    auto p = softmax(logits);
    loss -= std::log(std::max(p[y[i]], 1e-300));
    for (size_t c = 0; c < m.n_classes; ++c) {
      double d = (p[c] - (c == y[i] ? 1.0 : 0.0)) / double(n);
      gb[c] += d;
      double* gwr = &gw[c * m.dim];
      for (size_t dd = 0; dd < m.dim; ++dd) gwr[dd] += d * z[i][dd];
    }
  }
  loss /= double(n);
  double reg = 0.0;
  for (size_t i = 0; i < m.weights.size(); ++i) {
    reg += m.weights[i] * m.weights[i];
    gw[i] += l2 * m.weights[i];
  }
  return loss + 0.5 * l2 * reg;
}

inline LogregModel fit_logreg(const std::vector<std::vector<double>>& z,
                              const std::vector<size_t>& y, size_t n_classes,
                              size_t dim, double l2, int iters, double lr) {
  LogregModel m;
  m.n_classes = n_classes;
  m.dim = dim;
  m.weights.assign(n_classes * dim, 0.0);
  m.bias.assign(n_classes, 0.0);
  m.mean.assign(dim, 0.0);
  m.stddev.assign(dim, 1.0);  // caller standardizes
  std::vector<double> gw(m.weights.size()), gb(m.bias.size());
  std::vector<double> mw(m.weights.size(), 0.0), vw(m.weights.size(), 0.0);
  std::vector<double> mb(m.bias.size(), 0.0), vb(m.bias.size(), 0.0);
  AdamConfig cfg;
  cfg.learning_rate = lr;
  for (int t = 1; t <= iters; ++t) {
    logreg_loss_and_grads(m, z, y, l2, gw, gb);
    adam_step(m.weights, gw, mw, vw, uint64_t(t), cfg);
    adam_step(m.bias, gb, mb, vb, uint64_t(t), cfg);
  }
  return m;
}

inline double logreg_accuracy(const LogregModel& m,
                              const std::vector<std::vector<double>>& z,
                              const std::vector<size_t>& y) {
  size_t correct = 0;
  std::vector<double> logits(m.n_classes);
  for (size_t i = 0; i < z.size(); ++i) {
    for (size_t c = 0; c < m.n_classes; ++c) {
      double acc = m.bias[c];
      const double* w = &m.weights[c * m.dim];
      for (size_t d = 0; d < m.dim; ++d) acc += w[d] * z[i][d];
      logits[c] = acc;
    }
    if (argmax(logits) == y[i]) ++correct;
  }
  return double(correct) / double(z.size());
}

}  // namespace detail

// Full-batch Adam, 500 iterations; the l2 strength is chosen by held-out
// accuracy on a seeded 80/20 speaker-disjoint sub-split of the training set,
// then the winner is refit on everything.
inline LogregModel train_logreg(const std::vector<std::vector<double>>& features,
                                const std::vector<size_t>& labels,
                                const std::vector<std::string>& speakers,
                                size_t n_classes,
                                std::vector<double> l2_grid = {0.01, 0.1, 1.0},
                                uint64_t seed = 0, int iters = 500,
                                double lr = 0.05) {
  require(!features.empty() && features.size() == labels.size() &&
              features.size() == speakers.size(),
          ErrorCode::BadArgument, "features/labels/speakers size mismatch");
  require(n_classes >= 2, ErrorCode::BadArgument,
          "logistic regression needs >= 2 classes");
  size_t dim = features[0].size();

  // pooled standardization, stored in the model
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (const auto& f : features)
    for (size_t d = 0; d < dim; ++d) mean[d] += f[d];
  for (auto& v : mean) v /= double(features.size());
  for (const auto& f : features)
    for (size_t d = 0; d < dim; ++d) {
      double diff = f[d] - mean[d];
      var[d] += diff * diff;
    }
  std::vector<double> stddev(dim);
  for (size_t d = 0; d < dim; ++d) {
    double s = std::sqrt(var[d] / double(features.size()));
    stddev[d] = s > 1e-12 ? s : 1.0;
  }
  std::vector<std::vector<double>> z(features.size());
  for (size_t i = 0; i < features.size(); ++i) {
    z[i].resize(dim);
    for (size_t d = 0; d < dim; ++d) z[i][d] = (features[i][d] - mean[d]) / stddev[d];
  }

  // speaker-disjoint 80/20 sub-split for the grid
  std::set<std::string> speaker_set(speakers.begin(), speakers.end());
  std::vector<std::string> speaker_list(speaker_set.begin(), speaker_set.end());
  double best_acc = -1.0;
  double best_l2 = l2_grid.front();
  if (speaker_list.size() >= 2 && l2_grid.size() > 1) {
    Rng rng(derive_seed(seed, 0x106e6));
    rng.shuffle(speaker_list);
    size_t held = std::max<size_t>(1, speaker_list.size() / 5);
    std::set<std::string> held_speakers(speaker_list.begin(),
                                        speaker_list.begin() + long(held));
    std::vector<std::vector<double>> z_fit, z_val;
    std::vector<size_t> y_fit, y_val;
    for (size_t i = 0; i < z.size(); ++i) {
      if (held_speakers.count(speakers[i])) {
        z_val.push_back(z[i]);
        y_val.push_back(labels[i]);
      } else {
        z_fit.push_back(z[i]);
        y_fit.push_back(labels[i]);
      }
    }
    if (!z_fit.empty() && !z_val.empty()) {
      for (double l2 : l2_grid) {
        auto m = detail::fit_logreg(z_fit, y_fit, n_classes, dim, l2, iters, lr);
        double acc = detail::logreg_accuracy(m, z_val, y_val);
        if (acc > best_acc) {
          best_acc = acc;
          best_l2 = l2;
        }
      }
    }
  }

  LogregModel m = detail::fit_logreg(z, labels, n_classes, dim, best_l2, iters, lr);
  m.mean = mean;
  m.stddev = stddev;
  m.chosen_l2 = best_l2;
  return m;
}

inline void save_logreg(std::ostream& out, const LogregModel& m,
                        const std::vector<std::string>& class_labels) {
  out.write("ABJD", 4);
  bio::put_u8(out, kBundleVersion);
  bio::put_u8(out, kBundleKindLogreg);
  bio::put_u32(out, uint32_t(m.n_classes));
  bio::put_u32(out, uint32_t(m.dim));
  bio::put_f64(out, m.chosen_l2);
  for (double v : m.weights) bio::put_f64(out, v);
  for (double v : m.bias) bio::put_f64(out, v);
  for (double v : m.mean) bio::put_f64(out, v);
  for (double v : m.stddev) bio::put_f64(out, v);
  bio::put_u32(out, uint32_t(class_labels.size()));
  for (const auto& l : class_labels) bio::put_str(out, l);
}

struct LoadedLogreg {
  LogregModel model;
  std::vector<std::string> class_labels;
};

inline LoadedLogreg load_logreg(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, "ABJD", 4) == 0, ErrorCode::IoError,
          "not a model bundle (bad magic)");
  require(bio::get_u8(in) == kBundleVersion, ErrorCode::IoError,
          "unsupported bundle version");
  require(bio::get_u8(in) == kBundleKindLogreg, ErrorCode::IoError,
          "bundle does not hold a logistic-regression model");
  LoadedLogreg out;
  out.model.n_classes = bio::get_u32(in);
  out.model.dim = bio::get_u32(in);
  out.model.chosen_l2 = bio::get_f64(in);
  out.model.weights.resize(out.model.n_classes * out.model.dim);
  out.model.bias.resize(out.model.n_classes);
  out.model.mean.resize(out.model.dim);
  out.model.stddev.resize(out.model.dim);
  for (auto& v : out.model.weights) v = bio::get_f64(in);
  for (auto& v : out.model.bias) v = bio::get_f64(in);
  for (auto& v : out.model.mean) v = bio::get_f64(in);
  for (auto& v : out.model.stddev) v = bio::get_f64(in);
  uint32_t n = bio::get_u32(in);
  for (uint32_t i = 0; i < n; ++i) out.class_labels.push_back(bio::get_str(in));
  return out;
}

}  // namespace abjad
