#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ganaudit {

// Dense NCHW tensor. Kept deliberately minimal: the layers do their heavy
// lifting through Eigen maps over the flat buffer.
template <typename T>
struct TensorT {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> data;

  TensorT() = default;
  TensorT(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_),
        data(static_cast<size_t>(n_) * c_ * h_ * w_, T(0)) {}

  size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  size_t per_sample() const { return static_cast<size_t>(c) * h * w; }

  T* ptr(int in, int ic) {
    return data.data() + (static_cast<size_t>(in) * c + ic) * h * w;
  }
  const T* ptr(int in, int ic) const {
    return data.data() + (static_cast<size_t>(in) * c + ic) * h * w;
  }

  T& at(int in, int ic, int iy, int ix) {
    return data[((static_cast<size_t>(in) * c + ic) * h + iy) * w + ix];
  }
  T at(int in, int ic, int iy, int ix) const {
    return data[((static_cast<size_t>(in) * c + ic) * h + iy) * w + ix];
  }

  bool same_shape(const TensorT& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }

  // Copy of sample `i` as a 1-sample tensor.
  TensorT slice(int i) const {
    TensorT out(1, c, h, w);
    const T* src = data.data() + static_cast<size_t>(i) * per_sample();
    std::copy(src, src + per_sample(), out.data.begin());
    return out;
  }

  static TensorT stack(const std::vector<TensorT>& parts) {
    if (parts.empty()) return TensorT();
    int total = 0;
    for (const auto& p : parts) total += p.n;
    TensorT out(total, parts[0].c, parts[0].h, parts[0].w);
    size_t off = 0;
    for (const auto& p : parts) {
      if (p.c != out.c || p.h != out.h || p.w != out.w)
        throw std::invalid_argument("stack: mismatched tensor shapes");
      std::copy(p.data.begin(), p.data.end(), out.data.begin() + off);
      off += p.size();
    }
    return out;
  }
};

using Tensor = TensorT<float>;

}  // namespace ganaudit
