#pragma once

#include <cmath>
#include <cstring>
#include <vector>

#include "abjad/common.hpp"
#include "abjad/tensor.hpp"

namespace abjad {

// C[M x N] += A[M x K] * B[K x N], row-major. k-inner ordering so the N loop
// vectorizes.
template <typename S>
inline void gemm_acc(const S* a, const S* b, S* c, size_t m, size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    for (size_t p = 0; p < k; ++p) {
      S aik = a[i * k + p];
      if (aik == S(0)) continue;
      const S* brow = b + p * n;
      S* crow = c + i * n;
      for (size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

// C[M x N] += A^T (A is [K x M]) * B[K x N].
template <typename S>
inline void gemm_at_acc(const S* a, const S* b, S* c, size_t m, size_t k, size_t n) {
  for (size_t p = 0; p < k; ++p) {
    const S* arow = a + p * m;
    const S* brow = b + p * n;
    for (size_t i = 0; i < m; ++i) {
      S aik = arow[i];
      if (aik == S(0)) continue;
      S* crow = c + i * n;
      for (size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

// C[M x N] += A[M x K] * B^T (B is [N x K]).
template <typename S>
inline void gemm_bt_acc(const S* a, const S* b, S* c, size_t m, size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) {
      const S* arow = a + i * k;
      const S* brow = b + j * k;
      S acc = 0;
      for (size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c[i * n + j] += acc;
    }
  }
}

template <typename S>
struct ParamBlock {
  std::vector<S>* w;
  std::vector<S>* g;
  std::string name;
};

// 3x3 convolution, stride 1, same padding, over a [C, H, W] input.
template <typename S>
class ConvLayer {
 public:
  ConvLayer(size_t c_in, size_t c_out, size_t h, size_t w)
      : c_in_(c_in), c_out_(c_out), h_(h), w_(w) {
    weights_.assign(c_out_ * c_in_ * 9, S(0));
    bias_.assign(c_out_, S(0));
    grad_w_.assign(weights_.size(), S(0));
    grad_b_.assign(bias_.size(), S(0));
  }

  void init(Rng& rng) {
    double limit = std::sqrt(6.0 / double(c_in_ * 9 + c_out_ * 9));
    for (auto& v : weights_) v = S(rng.uniform(-limit, limit));
  }

  std::vector<S> forward(const std::vector<S>& x) {
    size_t hw = h_ * w_, k = c_in_ * 9;
    cols_.assign(k * hw, S(0));
    // im2col with pad 1
    for (size_t c = 0; c < c_in_; ++c) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          size_t row = c * 9 + size_t(dy + 1) * 3 + size_t(dx + 1);
          for (size_t y = 0; y < h_; ++y) {
            long sy = long(y) + dy;
            if (sy < 0 || sy >= long(h_)) continue;
            for (size_t xw = 0; xw < w_; ++xw) {
              long sx = long(xw) + dx;
              if (sx < 0 || sx >= long(w_)) continue;
              cols_[row * hw + y * w_ + xw] =
                  x[c * hw + size_t(sy) * w_ + size_t(sx)];
            }
          }
        }
      }
    }
    std::vector<S> y(c_out_ * hw);
    for (size_t c = 0; c < c_out_; ++c)
      std::fill(y.begin() + long(c * hw), y.begin() + long((c + 1) * hw), bias_[c]);
    gemm_acc(weights_.data(), cols_.data(), y.data(), c_out_, k, hw);
    return y;
  }

  std::vector<S> backward(const std::vector<S>& dy) {
    size_t hw = h_ * w_, k = c_in_ * 9;
    for (size_t c = 0; c < c_out_; ++c)
      for (size_t p = 0; p < hw; ++p) grad_b_[c] += dy[c * hw + p];
    gemm_bt_acc(dy.data(), cols_.data(), grad_w_.data(), c_out_, hw, k);
    std::vector<S> dcols(k * hw, S(0));
    gemm_at_acc(weights_.data(), dy.data(), dcols.data(), k, c_out_, hw);
    // col2im
    std::vector<S> dx(c_in_ * hw, S(0));
    for (size_t c = 0; c < c_in_; ++c) {
      for (int dyo = -1; dyo <= 1; ++dyo) {
        for (int dxo = -1; dxo <= 1; ++dxo) {
          size_t row = c * 9 + size_t(dyo + 1) * 3 + size_t(dxo + 1);
          for (size_t y = 0; y < h_; ++y) {
            long sy = long(y) + dyo;
            if (sy < 0 || sy >= long(h_)) continue;
            for (size_t xw = 0; xw < w_; ++xw) {
              long sx = long(xw) + dxo;
              if (sx < 0 || sx >= long(w_)) continue;
              dx[c * hw + size_t(sy) * w_ + size_t(sx)] += dcols[row * hw + y * w_ + xw];
            }
          }
        }
      }
    }
    return dx;
  }

  void collect(std::vector<ParamBlock<S>>& out, const std::string& prefix) {
    out.push_back({&weights_, &grad_w_, prefix + ".w"});
    out.push_back({&bias_, &grad_b_, prefix + ".b"});
  }

  size_t c_in() const { return c_in_; }
  size_t c_out() const { return c_out_; }

 private:
  size_t c_in_, c_out_, h_, w_;
  std::vector<S> weights_, bias_, grad_w_, grad_b_;
  std::vector<S> cols_;
};

template <typename S>
class ReluLayer {
 public:
  std::vector<S> forward(const std::vector<S>& x) {
    mask_.assign(x.size(), false);
    std::vector<S> y(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
      mask_[i] = x[i] > S(0);
      y[i] = mask_[i] ? x[i] : S(0);
    }
    return y;
  }
  std::vector<S> backward(const std::vector<S>& dy) {
    std::vector<S> dx(dy.size());
    for (size_t i = 0; i < dy.size(); ++i) dx[i] = mask_[i] ? dy[i] : S(0);
    return dx;
  }

 private:
  std::vector<bool> mask_;
};

// 2x2 max pooling, stride 2, floor output dims; gradient routes to the argmax
// position with first-occurrence tie-break.
template <typename S>
class MaxPoolLayer {
 public:
  MaxPoolLayer(size_t c, size_t h, size_t w)
      : c_(c), h_(h), w_(w), ho_(h / 2), wo_(w / 2) {}

  size_t out_h() const { return ho_; }
  size_t out_w() const { return wo_; }

  std::vector<S> forward(const std::vector<S>& x) {
    argmax_.assign(c_ * ho_ * wo_, 0);
    std::vector<S> y(c_ * ho_ * wo_);
    for (size_t c = 0; c < c_; ++c) {
      for (size_t oy = 0; oy < ho_; ++oy) {
        for (size_t ox = 0; ox < wo_; ++ox) {
          size_t best_idx = 0;
          S best = S(0);
          bool first = true;
          for (size_t dy = 0; dy < 2; ++dy) {
            for (size_t dx = 0; dx < 2; ++dx) {
              size_t idx = c * h_ * w_ + (2 * oy + dy) * w_ + (2 * ox + dx);
              if (first || x[idx] > best) {
                best = x[idx];
                best_idx = idx;
                first = false;
              }
            }
          }
          size_t o = c * ho_ * wo_ + oy * wo_ + ox;
          y[o] = best;
          argmax_[o] = best_idx;
        }
      }
    }
    return y;
  }

  std::vector<S> backward(const std::vector<S>& dy) {
    std::vector<S> dx(c_ * h_ * w_, S(0));
    for (size_t o = 0; o < dy.size(); ++o) dx[argmax_[o]] += dy[o];
    return dx;
  }

 private:
  size_t c_, h_, w_, ho_, wo_;
  std::vector<size_t> argmax_;
};

// [C, H, W] -> sequence of H timesteps with C*W features per step: the
// frequency axis folds into the feature vector, time stays the sequence axis.
template <typename S>
class SeqReshape {
 public:
  SeqReshape(size_t c, size_t h, size_t w) : c_(c), h_(h), w_(w) {}

  size_t steps() const { return h_; }
  size_t features() const { return c_ * w_; }

  std::vector<S> forward(const std::vector<S>& x) const {
    std::vector<S> y(h_ * c_ * w_);
    for (size_t c = 0; c < c_; ++c)
      for (size_t t = 0; t < h_; ++t)
        for (size_t w = 0; w < w_; ++w)
          y[t * (c_ * w_) + c * w_ + w] = x[c * h_ * w_ + t * w_ + w];
    return y;
  }

  std::vector<S> backward(const std::vector<S>& dy) const {
    std::vector<S> dx(c_ * h_ * w_);
    for (size_t c = 0; c < c_; ++c)
      for (size_t t = 0; t < h_; ++t)
        for (size_t w = 0; w < w_; ++w)
          dx[c * h_ * w_ + t * w_ + w] = dy[t * (c_ * w_) + c * w_ + w];
    return dx;
  }

 private:
  size_t c_, h_, w_;
};

// Standard LSTM with gate order (input, forget, cell, output) and full
// backpropagation through time. Forward consumes a [T x F] sequence and
// yields the [T x U] hidden sequence; h_0 = c_0 = 0.
template <typename S>
class LstmLayer {
 public:
  LstmLayer(size_t features, size_t units) : f_(features), u_(units) {
    wx_.assign(4 * u_ * f_, S(0));
    wh_.assign(4 * u_ * u_, S(0));
    b_.assign(4 * u_, S(0));
    grad_wx_.assign(wx_.size(), S(0));
    grad_wh_.assign(wh_.size(), S(0));
    grad_b_.assign(b_.size(), S(0));
  }

  void init(Rng& rng) {
    double lx = std::sqrt(6.0 / double(f_ + 4 * u_));
    double lh = std::sqrt(6.0 / double(u_ + 4 * u_));
    for (auto& v : wx_) v = S(rng.uniform(-lx, lx));
    for (auto& v : wh_) v = S(rng.uniform(-lh, lh));
    // forget-gate bias starts at 1 so gradients flow early in training
    for (size_t j = 0; j < u_; ++j) b_[u_ + j] = S(1);
  }

  size_t units() const { return u_; }
  size_t features() const { return f_; }

  std::vector<S> forward(const std::vector<S>& x) {
    t_steps_ = x.size() / f_;
    x_ = x;
    gates_.assign(t_steps_ * 4 * u_, S(0));
    c_.assign(t_steps_ * u_, S(0));
    tanh_c_.assign(t_steps_ * u_, S(0));
    h_.assign(t_steps_ * u_, S(0));

    std::vector<S> a(4 * u_);
    for (size_t t = 0; t < t_steps_; ++t) {
      std::fill(a.begin(), a.end(), S(0));
      const S* xt = &x_[t * f_];
      for (size_t r = 0; r < 4 * u_; ++r) {
        const S* wrow = &wx_[r * f_];
        S acc = b_[r];
        for (size_t j = 0; j < f_; ++j) acc += wrow[j] * xt[j];
        a[r] = acc;
      }
      if (t > 0) {
        const S* hp = &h_[(t - 1) * u_];
        for (size_t r = 0; r < 4 * u_; ++r) {
          const S* wrow = &wh_[r * u_];
          S acc = 0;
          for (size_t j = 0; j < u_; ++j) acc += wrow[j] * hp[j];
          a[r] += acc;
        }
      }
      S* gate = &gates_[t * 4 * u_];
      for (size_t j = 0; j < u_; ++j) {
        S i = sigmoid(a[j]);
        S f = sigmoid(a[u_ + j]);
        S g = S(std::tanh(double(a[2 * u_ + j])));
        S o = sigmoid(a[3 * u_ + j]);
        gate[j] = i;
        gate[u_ + j] = f;
        gate[2 * u_ + j] = g;
        gate[3 * u_ + j] = o;
        S c_prev = t > 0 ? c_[(t - 1) * u_ + j] : S(0);
        S c = f * c_prev + i * g;
        c_[t * u_ + j] = c;
        S tc = S(std::tanh(double(c)));
        tanh_c_[t * u_ + j] = tc;
        h_[t * u_ + j] = o * tc;
      }
    }
    return h_;
  }

  std::vector<S> backward(const std::vector<S>& dh_seq) {
    std::vector<S> dx(t_steps_ * f_, S(0));
    std::vector<S> dh_next(u_, S(0)), dc_next(u_, S(0)), da(4 * u_);
    for (size_t t = t_steps_; t-- > 0;) {
      const S* gate = &gates_[t * 4 * u_];
      for (size_t j = 0; j < u_; ++j) {
        S dh = dh_seq[t * u_ + j] + dh_next[j];
        S i = gate[j], f = gate[u_ + j], g = gate[2 * u_ + j], o = gate[3 * u_ + j];
        S tc = tanh_c_[t * u_ + j];
        S do_ = dh * tc;
        S dc = dh * o * (S(1) - tc * tc) + dc_next[j];
        S c_prev = t > 0 ? c_[(t - 1) * u_ + j] : S(0);
        S di = dc * g;
        S df = dc * c_prev;
        S dg = dc * i;
        dc_next[j] = dc * f;
        da[j] = di * i * (S(1) - i);
        da[u_ + j] = df * f * (S(1) - f);
        da[2 * u_ + j] = dg * (S(1) - g * g);
        da[3 * u_ + j] = do_ * o * (S(1) - o);
      }
      const S* xt = &x_[t * f_];
      for (size_t r = 0; r < 4 * u_; ++r) {
        S d = da[r];
        grad_b_[r] += d;
        S* gwrow = &grad_wx_[r * f_];
        for (size_t j = 0; j < f_; ++j) gwrow[j] += d * xt[j];
      }
      if (t > 0) {
        const S* hp = &h_[(t - 1) * u_];
        for (size_t r = 0; r < 4 * u_; ++r) {
          S d = da[r];
          S* gwrow = &grad_wh_[r * u_];
          for (size_t j = 0; j < u_; ++j) gwrow[j] += d * hp[j];
        }
      }
      S* dxt = &dx[t * f_];
      for (size_t r = 0; r < 4 * u_; ++r) {
        S d = da[r];
        const S* wrow = &wx_[r * f_];
        for (size_t j = 0; j < f_; ++j) dxt[j] += d * wrow[j];
      }
      std::fill(dh_next.begin(), dh_next.end(), S(0));
      for (size_t r = 0; r < 4 * u_; ++r) {
        S d = da[r];
        const S* wrow = &wh_[r * u_];
        for (size_t j = 0; j < u_; ++j) dh_next[j] += d * wrow[j];
      }
    }
    return dx;
  }

  void collect(std::vector<ParamBlock<S>>& out, const std::string& prefix) {
    out.push_back({&wx_, &grad_wx_, prefix + ".wx"});
    out.push_back({&wh_, &grad_wh_, prefix + ".wh"});
    out.push_back({&b_, &grad_b_, prefix + ".b"});
  }

 private:
  static S sigmoid(S x) { return S(1) / (S(1) + S(std::exp(-double(x)))); }

  size_t f_, u_;
  size_t t_steps_ = 0;
  std::vector<S> wx_, wh_, b_, grad_wx_, grad_wh_, grad_b_;
  std::vector<S> x_, gates_, c_, tanh_c_, h_;
};

template <typename S>
class AffineLayer {
 public:
  AffineLayer(size_t in, size_t out) : in_(in), out_(out) {
    w_.assign(out_ * in_, S(0));
    b_.assign(out_, S(0));
    grad_w_.assign(w_.size(), S(0));
    grad_b_.assign(b_.size(), S(0));
  }

  void init(Rng& rng) {
    double limit = std::sqrt(6.0 / double(in_ + out_));
    for (auto& v : w_) v = S(rng.uniform(-limit, limit));
  }

  size_t out_dim() const { return out_; }
  size_t in_dim() const { return in_; }

  std::vector<S> forward(const std::vector<S>& x) {
    x_ = x;
    std::vector<S> y(out_);
    for (size_t o = 0; o < out_; ++o) {
      const S* wrow = &w_[o * in_];
      S acc = b_[o];
      for (size_t j = 0; j < in_; ++j) acc += wrow[j] * x[j];
      y[o] = acc;
    }
    return y;
  }

  std::vector<S> backward(const std::vector<S>& dy) {
    std::vector<S> dx(in_, S(0));
    for (size_t o = 0; o < out_; ++o) {
      S d = dy[o];
      grad_b_[o] += d;
      S* gw = &grad_w_[o * in_];
      const S* wrow = &w_[o * in_];
      for (size_t j = 0; j < in_; ++j) {
        gw[j] += d * x_[j];
        dx[j] += d * wrow[j];
      }
    }
    return dx;
  }

  void collect(std::vector<ParamBlock<S>>& out, const std::string& prefix) {
    out.push_back({&w_, &grad_w_, prefix + ".w"});
    out.push_back({&b_, &grad_b_, prefix + ".b"});
  }

 private:
  size_t in_, out_;
  std::vector<S> w_, b_, grad_w_, grad_b_, x_;
};

// Inverted dropout: surviving activations scale by 1/(1-p) in training so the
// expected activation is preserved; inference is the identity.
template <typename S>
class DropoutLayer {
 public:
  explicit DropoutLayer(double p) : p_(p) {}

  std::vector<S> forward(const std::vector<S>& x, bool training, Rng* rng) {
    if (!training || p_ <= 0.0) {
      mask_.assign(x.size(), S(1));
      return x;
    }
    mask_.resize(x.size());
    S scale = S(1.0 / (1.0 - p_));
    std::vector<S> y(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
      bool keep = rng->uniform() >= p_;
      mask_[i] = keep ? scale : S(0);
      y[i] = x[i] * mask_[i];
    }
    return y;
  }

  std::vector<S> backward(const std::vector<S>& dy) {
    std::vector<S> dx(dy.size());
    for (size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * mask_[i];
    return dx;
  }

 private:
  double p_;
  std::vector<S> mask_;
};

template <typename S>
inline std::vector<S> softmax(const std::vector<S>& logits) {
  S mx = logits[0];
  for (S v : logits) mx = std::max(mx, v);
  std::vector<S> p(logits.size());
  S sum = 0;
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = S(std::exp(double(logits[i] - mx)));
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

// argmax with ties resolved to the lowest index
template <typename S>
inline size_t argmax(const std::vector<S>& v) {
  size_t best = 0;
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace abjad
