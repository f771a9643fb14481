#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "ganaudit/rng.hpp"
#include "ganaudit/tensor.hpp"

namespace ganaudit {

template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using RowMajorMap =
    Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename T>
using ConstRowMajorMap = Eigen::Map<
    const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Named view of one parameter (or persistent state) array of a layer.
// `grad` is null for non-trainable state such as batch-norm running stats.
template <typename T>
struct ParamRef {
  std::string name;
  std::vector<T>* value = nullptr;
  std::vector<T>* grad = nullptr;
  bool trainable() const { return grad != nullptr; }
};

// ---------------------------------------------------------------------------
// im2col / col2im
//
// Columns enumerate (sample, grid_y, grid_x) positions in that order; rows
// enumerate (channel, ky, kx). The same pair of routines serves the strided
// convolution (grid = conv output) and the transposed convolution
// (grid = its input), which keeps the four conv forward/backward paths on
// two kernels.
// ---------------------------------------------------------------------------

template <typename T>
MatX<T> im2col(const TensorT<T>& x, int k, int stride, int pad, int gh, int gw) {
  MatX<T> col = MatX<T>::Zero(static_cast<Eigen::Index>(x.c) * k * k,
                              static_cast<Eigen::Index>(x.n) * gh * gw);
  for (int in = 0; in < x.n; ++in) {
    for (int gy = 0; gy < gh; ++gy) {
      for (int gx = 0; gx < gw; ++gx) {
        Eigen::Index j = (static_cast<Eigen::Index>(in) * gh + gy) * gw + gx;
        for (int ic = 0; ic < x.c; ++ic) {
          const T* plane = x.ptr(in, ic);
          for (int ky = 0; ky < k; ++ky) {
            int y = gy * stride - pad + ky;
            if (y < 0 || y >= x.h) continue;
            for (int kx = 0; kx < k; ++kx) {
              int xx = gx * stride - pad + kx;
              if (xx < 0 || xx >= x.w) continue;
              col((static_cast<Eigen::Index>(ic) * k + ky) * k + kx, j) =
                  plane[static_cast<size_t>(y) * x.w + xx];
            }
          }
        }
      }
    }
  }
  return col;
}

template <typename T>
TensorT<T> col2im(const MatX<T>& col, int n, int c, int h, int w, int k,
                  int stride, int pad, int gh, int gw) {
  TensorT<T> out(n, c, h, w);
  for (int in = 0; in < n; ++in) {
    for (int gy = 0; gy < gh; ++gy) {
      for (int gx = 0; gx < gw; ++gx) {
        Eigen::Index j = (static_cast<Eigen::Index>(in) * gh + gy) * gw + gx;
        for (int ic = 0; ic < c; ++ic) {
          T* plane = out.ptr(in, ic);
          for (int ky = 0; ky < k; ++ky) {
            int y = gy * stride - pad + ky;
            if (y < 0 || y >= h) continue;
            for (int kx = 0; kx < k; ++kx) {
              int xx = gx * stride - pad + kx;
              if (xx < 0 || xx >= w) continue;
              plane[static_cast<size_t>(y) * w + xx] +=
                  col((static_cast<Eigen::Index>(ic) * k + ky) * k + kx, j);
            }
          }
        }
      }
    }
  }
  return out;
}

// Gather a tensor into a channels x (n*h*w) matrix, columns in (n, y, x) order.
template <typename T>
MatX<T> to_channel_matrix(const TensorT<T>& x) {
  MatX<T> m(x.c, static_cast<Eigen::Index>(x.n) * x.h * x.w);
  for (int in = 0; in < x.n; ++in)
    for (int ic = 0; ic < x.c; ++ic) {
      const T* plane = x.ptr(in, ic);
      for (int p = 0; p < x.h * x.w; ++p)
        m(ic, static_cast<Eigen::Index>(in) * x.h * x.w + p) = plane[p];
    }
  return m;
}

template <typename T>
TensorT<T> from_channel_matrix(const MatX<T>& m, int n, int c, int h, int w) {
  TensorT<T> x(n, c, h, w);
  for (int in = 0; in < n; ++in)
    for (int ic = 0; ic < c; ++ic) {
      T* plane = x.ptr(in, ic);
      for (int p = 0; p < h * w; ++p)
        plane[p] = m(ic, static_cast<Eigen::Index>(in) * h * w + p);
    }
  return x;
}

// ---------------------------------------------------------------------------
// Layers
//
// forward(x, train=false) touches no member state, so a frozen net can be
// shared across threads for inference. Only train-mode forwards stash the
// activations backward() needs; training itself is single-writer.
// ---------------------------------------------------------------------------

template <typename T>
class LayerT {
 public:
  virtual ~LayerT() = default;
  virtual TensorT<T> forward(const TensorT<T>& x, bool train) = 0;
  virtual TensorT<T> backward(const TensorT<T>& gy) = 0;
  virtual void collect_params(const std::string& prefix,
                              std::vector<ParamRef<T>>& out) {}
  virtual void init(Rng& rng) {}
};

template <typename T>
class Conv2dT : public LayerT<T> {
 public:
  Conv2dT(int in_ch, int out_ch, int k, int stride, int pad)
      : in_ch_(in_ch), out_ch_(out_ch), k_(k), stride_(stride), pad_(pad),
        weight_(static_cast<size_t>(out_ch) * in_ch * k * k, T(0)),
        bias_(out_ch, T(0)), wgrad_(weight_.size(), T(0)),
        bgrad_(out_ch, T(0)) {}

  void init(Rng& rng) override {
    for (auto& v : weight_) v = static_cast<T>(rng.normal() * 0.02);
    std::fill(bias_.begin(), bias_.end(), T(0));
  }

  TensorT<T> forward(const TensorT<T>& x, bool train) override {
    const int oh = (x.h + 2 * pad_ - k_) / stride_ + 1;
    const int ow = (x.w + 2 * pad_ - k_) / stride_ + 1;
    MatX<T> col = im2col(x, k_, stride_, pad_, oh, ow);
    ConstRowMajorMap<T> wm(weight_.data(), out_ch_, in_ch_ * k_ * k_);
    MatX<T> y = wm * col;  // out_ch x (n*oh*ow)
    TensorT<T> out = from_channel_matrix(y, x.n, out_ch_, oh, ow);
    for (int in = 0; in < out.n; ++in)
      for (int oc = 0; oc < out_ch_; ++oc) {
        T* plane = out.ptr(in, oc);
        for (int p = 0; p < oh * ow; ++p) plane[p] += bias_[oc];
      }
    if (train) {
      in_shape_ = {x.n, x.c, x.h, x.w};
      oh_ = oh;
      ow_ = ow;
      col_ = std::move(col);
    }
    return out;
  }

  TensorT<T> backward(const TensorT<T>& gy) override {
    MatX<T> gym = to_channel_matrix(gy);  // out_ch x (n*oh*ow)
    RowMajorMap<T> wg(wgrad_.data(), out_ch_, in_ch_ * k_ * k_);
    wg += gym * col_.transpose();
    for (int oc = 0; oc < out_ch_; ++oc) bgrad_[oc] += gym.row(oc).sum();
    ConstRowMajorMap<T> wm(weight_.data(), out_ch_, in_ch_ * k_ * k_);
    MatX<T> dcol = wm.transpose() * gym;
    return col2im(dcol, in_shape_[0], in_shape_[1], in_shape_[2], in_shape_[3],
                  k_, stride_, pad_, oh_, ow_);
  }

  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<T>>& out) override {
    out.push_back({prefix + ".weight", &weight_, &wgrad_});
    out.push_back({prefix + ".bias", &bias_, &bgrad_});
  }

  int out_channels() const { return out_ch_; }
  size_t param_count() const { return weight_.size() + bias_.size(); }

 private:
  int in_ch_, out_ch_, k_, stride_, pad_;
  int oh_ = 0, ow_ = 0;
  std::array<int, 4> in_shape_{};
  std::vector<T> weight_, bias_, wgrad_, bgrad_;
  MatX<T> col_;
};

template <typename T>
class ConvTranspose2dT : public LayerT<T> {
 public:
  // Weight layout [in_ch][out_ch][ky][kx].
  ConvTranspose2dT(int in_ch, int out_ch, int k, int stride, int pad)
      : in_ch_(in_ch), out_ch_(out_ch), k_(k), stride_(stride), pad_(pad),
        weight_(static_cast<size_t>(in_ch) * out_ch * k * k, T(0)),
        bias_(out_ch, T(0)), wgrad_(weight_.size(), T(0)),
        bgrad_(out_ch, T(0)) {}

  void init(Rng& rng) override {
    for (auto& v : weight_) v = static_cast<T>(rng.normal() * 0.02);
    std::fill(bias_.begin(), bias_.end(), T(0));
  }

  TensorT<T> forward(const TensorT<T>& x, bool train) override {
    const int oh = (x.h - 1) * stride_ - 2 * pad_ + k_;
    const int ow = (x.w - 1) * stride_ - 2 * pad_ + k_;
    MatX<T> x_mat = to_channel_matrix(x);  // in_ch x (n*h*w)
    ConstRowMajorMap<T> wm(weight_.data(), in_ch_, out_ch_ * k_ * k_);
    MatX<T> col = wm.transpose() * x_mat;  // (out_ch*k*k) x (n*h*w)
    TensorT<T> out =
        col2im(col, x.n, out_ch_, oh, ow, k_, stride_, pad_, x.h, x.w);
    for (int in = 0; in < out.n; ++in)
      for (int oc = 0; oc < out_ch_; ++oc) {
        T* plane = out.ptr(in, oc);
        for (int p = 0; p < oh * ow; ++p) plane[p] += bias_[oc];
      }
    if (train) {
      in_shape_ = {x.n, x.c, x.h, x.w};
      x_mat_ = std::move(x_mat);
    }
    return out;
  }

  TensorT<T> backward(const TensorT<T>& gy) override {
    // im2col over the *input* grid recovers, for each input position, the
    // output gradients its kernel touched.
    MatX<T> colg = im2col(gy, k_, stride_, pad_, in_shape_[2], in_shape_[3]);
    RowMajorMap<T> wg(wgrad_.data(), in_ch_, out_ch_ * k_ * k_);
    wg += x_mat_ * colg.transpose();
    for (int oc = 0; oc < out_ch_; ++oc) {
      T s = T(0);
      for (int in = 0; in < gy.n; ++in) {
        const T* plane = gy.ptr(in, oc);
        for (int p = 0; p < gy.h * gy.w; ++p) s += plane[p];
      }
      bgrad_[oc] += s;
    }
    ConstRowMajorMap<T> wm(weight_.data(), in_ch_, out_ch_ * k_ * k_);
    MatX<T> dx_mat = wm * colg;  // in_ch x (n*h*w)
    return from_channel_matrix(dx_mat, in_shape_[0], in_shape_[1], in_shape_[2],
                               in_shape_[3]);
  }

  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<T>>& out) override {
    out.push_back({prefix + ".weight", &weight_, &wgrad_});
    out.push_back({prefix + ".bias", &bias_, &bgrad_});
  }

  int out_channels() const { return out_ch_; }

 private:
  int in_ch_, out_ch_, k_, stride_, pad_;
  std::array<int, 4> in_shape_{};
  std::vector<T> weight_, bias_, wgrad_, bgrad_;
  MatX<T> x_mat_;
};

template <typename T>
class BatchNorm2dT : public LayerT<T> {
 public:
  explicit BatchNorm2dT(int ch, double momentum = 0.1, double eps = 1e-5)
      : ch_(ch), momentum_(momentum), eps_(eps), gamma_(ch, T(1)),
        beta_(ch, T(0)), ggrad_(ch, T(0)), bgrad_(ch, T(0)),
        running_mean_(ch, T(0)), running_var_(ch, T(1)) {}

  void init(Rng& rng) override {
    for (auto& g : gamma_) g = static_cast<T>(1.0 + rng.normal() * 0.02);
    std::fill(beta_.begin(), beta_.end(), T(0));
    std::fill(running_mean_.begin(), running_mean_.end(), T(0));
    std::fill(running_var_.begin(), running_var_.end(), T(1));
  }

  TensorT<T> forward(const TensorT<T>& x, bool train) override {
    TensorT<T> out(x.n, x.c, x.h, x.w);
    const size_t plane = static_cast<size_t>(x.h) * x.w;
    const double m = static_cast<double>(x.n) * plane;
    if (train) {
      xhat_ = TensorT<T>(x.n, x.c, x.h, x.w);
      inv_std_.assign(ch_, 0.0);
      for (int ic = 0; ic < ch_; ++ic) {
        double sum = 0.0, sq = 0.0;
        for (int in = 0; in < x.n; ++in) {
          const T* p = x.ptr(in, ic);
          for (size_t i = 0; i < plane; ++i) {
            sum += p[i];
            sq += static_cast<double>(p[i]) * p[i];
          }
        }
        double mean = sum / m;
        double var = std::max(0.0, sq / m - mean * mean);
        double istd = 1.0 / std::sqrt(var + eps_);
        inv_std_[ic] = istd;
        running_mean_[ic] = static_cast<T>(
            (1.0 - momentum_) * running_mean_[ic] + momentum_ * mean);
        double unbiased = m > 1 ? var * m / (m - 1) : var;
        running_var_[ic] = static_cast<T>(
            (1.0 - momentum_) * running_var_[ic] + momentum_ * unbiased);
        for (int in = 0; in < x.n; ++in) {
          const T* p = x.ptr(in, ic);
          T* xh = xhat_.ptr(in, ic);
          T* o = out.ptr(in, ic);
          for (size_t i = 0; i < plane; ++i) {
            xh[i] = static_cast<T>((p[i] - mean) * istd);
            o[i] = static_cast<T>(gamma_[ic] * xh[i] + beta_[ic]);
          }
        }
      }
    } else {
      for (int ic = 0; ic < ch_; ++ic) {
        double istd =
            1.0 / std::sqrt(static_cast<double>(running_var_[ic]) + eps_);
        double mean = running_mean_[ic];
        for (int in = 0; in < x.n; ++in) {
          const T* p = x.ptr(in, ic);
          T* o = out.ptr(in, ic);
          for (size_t i = 0; i < plane; ++i)
            o[i] = static_cast<T>(gamma_[ic] * (p[i] - mean) * istd + beta_[ic]);
        }
      }
    }
    return out;
  }

  TensorT<T> backward(const TensorT<T>& gy) override {
    TensorT<T> dx(gy.n, gy.c, gy.h, gy.w);
    const size_t plane = static_cast<size_t>(gy.h) * gy.w;
    const double m = static_cast<double>(gy.n) * plane;
    for (int ic = 0; ic < ch_; ++ic) {
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (int in = 0; in < gy.n; ++in) {
        const T* g = gy.ptr(in, ic);
        const T* xh = xhat_.ptr(in, ic);
        for (size_t i = 0; i < plane; ++i) {
          sum_dy += g[i];
          sum_dy_xhat += static_cast<double>(g[i]) * xh[i];
        }
      }
      ggrad_[ic] += static_cast<T>(sum_dy_xhat);
      bgrad_[ic] += static_cast<T>(sum_dy);
      double scale = gamma_[ic] * inv_std_[ic] / m;
      for (int in = 0; in < gy.n; ++in) {
        const T* g = gy.ptr(in, ic);
        const T* xh = xhat_.ptr(in, ic);
        T* d = dx.ptr(in, ic);
        for (size_t i = 0; i < plane; ++i)
          d[i] = static_cast<T>(scale *
                                (m * g[i] - sum_dy - xh[i] * sum_dy_xhat));
      }
    }
    return dx;
  }

  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<T>>& out) override {
    out.push_back({prefix + ".gamma", &gamma_, &ggrad_});
    out.push_back({prefix + ".beta", &beta_, &bgrad_});
    out.push_back({prefix + ".running_mean", &running_mean_, nullptr});
    out.push_back({prefix + ".running_var", &running_var_, nullptr});
  }

 private:
  int ch_;
  double momentum_, eps_;
  std::vector<T> gamma_, beta_, ggrad_, bgrad_, running_mean_, running_var_;
  TensorT<T> xhat_;
  std::vector<double> inv_std_;
};

template <typename T>
class LeakyReLUT : public LayerT<T> {
 public:
  explicit LeakyReLUT(double slope) : slope_(static_cast<T>(slope)) {}

  TensorT<T> forward(const TensorT<T>& x, bool train) override {
    TensorT<T> out = x;
    for (auto& v : out.data)
      if (v <= T(0)) v *= slope_;
    if (train) {
      mask_.assign(x.size(), 0);
      for (size_t i = 0; i < x.size(); ++i) mask_[i] = x.data[i] > T(0);
    }
    return out;
  }

  TensorT<T> backward(const TensorT<T>& gy) override {
    TensorT<T> dx = gy;
    for (size_t i = 0; i < gy.size(); ++i)
      if (!mask_[i]) dx.data[i] *= slope_;
    return dx;
  }

 private:
  T slope_;
  std::vector<uint8_t> mask_;
};

template <typename T>
class TanhT : public LayerT<T> {
 public:
  TensorT<T> forward(const TensorT<T>& x, bool train) override {
    TensorT<T> out = x;
    for (auto& v : out.data) v = std::tanh(v);
    if (train) y_ = out;
    return out;
  }

  TensorT<T> backward(const TensorT<T>& gy) override {
    TensorT<T> dx = gy;
    for (size_t i = 0; i < gy.size(); ++i)
      dx.data[i] *= (T(1) - y_.data[i] * y_.data[i]);
    return dx;
  }

 private:
  TensorT<T> y_;
};

// Flattens (n, c, h, w) into (n, in_dim) and applies x W^T + b.
template <typename T>
class DenseT : public LayerT<T> {
 public:
  DenseT(int in_dim, int out_dim)
      : in_dim_(in_dim), out_dim_(out_dim),
        weight_(static_cast<size_t>(out_dim) * in_dim, T(0)),
        bias_(out_dim, T(0)), wgrad_(weight_.size(), T(0)),
        bgrad_(out_dim, T(0)) {}

  void init(Rng& rng) override {
    for (auto& v : weight_) v = static_cast<T>(rng.normal() * 0.02);
    std::fill(bias_.begin(), bias_.end(), T(0));
  }

  TensorT<T> forward(const TensorT<T>& x, bool train) override {
    ConstRowMajorMap<T> xm(x.data.data(), x.n, in_dim_);
    ConstRowMajorMap<T> wm(weight_.data(), out_dim_, in_dim_);
    TensorT<T> out(x.n, out_dim_, 1, 1);
    RowMajorMap<T> om(out.data.data(), x.n, out_dim_);
    om = xm * wm.transpose();
    for (int i = 0; i < x.n; ++i)
      for (int j = 0; j < out_dim_; ++j) om(i, j) += bias_[j];
    if (train) {
      in_shape_ = {x.n, x.c, x.h, x.w};
      x_ = x;
    }
    return out;
  }

  TensorT<T> backward(const TensorT<T>& gy) override {
    ConstRowMajorMap<T> gm(gy.data.data(), gy.n, out_dim_);
    ConstRowMajorMap<T> xm(x_.data.data(), x_.n, in_dim_);
    RowMajorMap<T> wg(wgrad_.data(), out_dim_, in_dim_);
    wg += gm.transpose() * xm;
    for (int j = 0; j < out_dim_; ++j) bgrad_[j] += gm.col(j).sum();
    ConstRowMajorMap<T> wm(weight_.data(), out_dim_, in_dim_);
    TensorT<T> dx(in_shape_[0], in_shape_[1], in_shape_[2], in_shape_[3]);
    RowMajorMap<T> dm(dx.data.data(), dx.n, in_dim_);
    dm = gm * wm;
    return dx;
  }

  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<T>>& out) override {
    out.push_back({prefix + ".weight", &weight_, &wgrad_});
    out.push_back({prefix + ".bias", &bias_, &bgrad_});
  }

 private:
  int in_dim_, out_dim_;
  std::array<int, 4> in_shape_{};
  std::vector<T> weight_, bias_, wgrad_, bgrad_;
  TensorT<T> x_;
};

// ---------------------------------------------------------------------------
// Sequential net
// ---------------------------------------------------------------------------

template <typename T>
struct NetT {
  std::vector<std::unique_ptr<LayerT<T>>> layers;
  std::vector<std::string> layer_names;

  void add(std::string name, std::unique_ptr<LayerT<T>> layer) {
    layer_names.push_back(std::move(name));
    layers.push_back(std::move(layer));
  }

  void init(uint64_t seed) {
    Rng rng(seed);
    for (auto& l : layers) l->init(rng);
  }

  TensorT<T> forward(TensorT<T> x, bool train) {
    for (auto& l : layers) x = l->forward(x, train);
    return x;
  }

  TensorT<T> backward(TensorT<T> g) {
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
      g = (*it)->backward(g);
    return g;
  }

  std::vector<ParamRef<T>> params(const std::string& prefix) {
    std::vector<ParamRef<T>> out;
    for (size_t i = 0; i < layers.size(); ++i)
      layers[i]->collect_params(prefix + "." + layer_names[i], out);
    return out;
  }

  void zero_grads() {
    for (auto& p : params("net"))
      if (p.grad) std::fill(p.grad->begin(), p.grad->end(), T(0));
  }

  size_t param_count() {
    size_t c = 0;
    for (auto& p : params("net"))
      if (p.trainable()) c += p.value->size();
    return c;
  }
};

using Net = NetT<float>;

// ---------------------------------------------------------------------------
// Optimizer and losses
// ---------------------------------------------------------------------------

template <typename T>
class AdamT {
 public:
  AdamT(std::vector<ParamRef<T>> params, double beta1, double beta2 = 0.999,
        double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (auto& p : params)
      if (p.trainable()) {
        params_.push_back(p);
        m_.emplace_back(p.value->size(), 0.0);
        v_.emplace_back(p.value->size(), 0.0);
      }
  }

  void step(double lr) {
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, t_);
    double bc2 = 1.0 - std::pow(beta2_, t_);
    for (size_t pi = 0; pi < params_.size(); ++pi) {
      auto& val = *params_[pi].value;
      auto& grad = *params_[pi].grad;
      auto& m = m_[pi];
      auto& v = v_[pi];
      for (size_t i = 0; i < val.size(); ++i) {
        double g = grad[i];
        m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
        v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
        val[i] -=
            static_cast<T>(lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps_));
      }
    }
  }

 private:
  std::vector<ParamRef<T>> params_;
  std::vector<std::vector<double>> m_, v_;
  double beta1_, beta2_, eps_;
  long t_ = 0;
};

using Adam = AdamT<float>;

template <typename T>
double sigmoid(T z) {
  double zd = z;
  return zd >= 0 ? 1.0 / (1.0 + std::exp(-zd))
                 : std::exp(zd) / (1.0 + std::exp(zd));
}

// Mean binary cross-entropy against a single smoothed target, evaluated on
// logits for stability. Returns the loss and writes dL/dlogit into `grad`
// (both scaled by `scale`). Logit tensors are (n, 1, 1, 1).
template <typename T>
double bce_with_logits(const TensorT<T>& logits, double target, double scale,
                       TensorT<T>& grad) {
  grad = TensorT<T>(logits.n, logits.c, logits.h, logits.w);
  double loss = 0.0;
  const double n = static_cast<double>(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    double z = logits.data[i];
    loss += std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z)));
    grad.data[i] = static_cast<T>(scale * (sigmoid(z) - target) / n);
  }
  return scale * loss / n;
}

// Softmax cross-entropy over (n, k, 1, 1) logits with integer labels.
template <typename T>
double softmax_cross_entropy(const TensorT<T>& logits,
                             const std::vector<int>& labels,
                             TensorT<T>& grad) {
  const int n = logits.n, k = logits.c;
  grad = TensorT<T>(n, k, 1, 1);
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const T* row = logits.data.data() + static_cast<size_t>(i) * k;
    double mx = row[0];
    for (int j = 1; j < k; ++j) mx = std::max<double>(mx, row[j]);
    double denom = 0.0;
    for (int j = 0; j < k; ++j) denom += std::exp(row[j] - mx);
    loss -= row[labels[i]] - mx - std::log(denom);
    for (int j = 0; j < k; ++j) {
      double p = std::exp(row[j] - mx) / denom;
      grad.data[static_cast<size_t>(i) * k + j] =
          static_cast<T>((p - (j == labels[i] ? 1.0 : 0.0)) / n);
    }
  }
  return loss / n;
}

}  // namespace ganaudit
