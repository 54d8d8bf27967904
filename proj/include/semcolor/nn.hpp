// Copyright 2026 The semcolor Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Minimal CHW tensors and the layer kernels the toy network is made of:
// 2-D convolution, transposed convolution and ReLU, each with its exact
// reverse-mode counterpart. Single sample, double precision.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "semcolor/error.hpp"

namespace semcolor::nn {

struct Tensor {
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int channels, int height, int width, double fill = 0.0)
      : c(channels), h(height), w(width), data(static_cast<std::size_t>(channels) * height * width, fill) {}

  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  double* channel(int k) { return data.data() + k * plane(); }
  const double* channel(int k) const { return data.data() + k * plane(); }
  double& at(int k, int y, int x) { return data[k * plane() + static_cast<std::size_t>(y) * w + x]; }
  double at(int k, int y, int x) const { return data[k * plane() + static_cast<std::size_t>(y) * w + x]; }
  bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }
};

// Geometry of a convolution or transposed convolution layer.
struct ConvShape {
  int in = 1;
  int out = 1;
  int kernel = 3;
  int stride = 1;
  int pad = 1;

  std::size_t weight_count() const { return static_cast<std::size_t>(in) * out * kernel * kernel; }
  int conv_out(int n) const { return (n + 2 * pad - kernel) / stride + 1; }
  int deconv_out(int n) const { return (n - 1) * stride - 2 * pad + kernel; }
};

namespace detail {

// Output indices o with 0 <= o*stride - pad + k < n_in.
inline void valid_range(int n_in, int n_out, int stride, int pad, int k, int& lo, int& hi) {
  const int off = pad - k;  // need o*stride >= off and o*stride <= n_in - 1 + off
  lo = off <= 0 ? 0 : (off + stride - 1) / stride;
  const int top = n_in - 1 + off;
  hi = top < 0 ? -1 : std::min(n_out - 1, top / stride);
}

}  // namespace detail

// weights laid out [out][in][ky][kx]
inline Tensor conv2d(const Tensor& x, const ConvShape& s, const double* weight, const double* bias) {
  require(x.c == s.in, "conv2d: input channel mismatch");
  const int oh = s.conv_out(x.h), ow = s.conv_out(x.w);
  require(oh >= 1 && ow >= 1, "conv2d: output would be empty");
  Tensor y(s.out, oh, ow);
  for (int co = 0; co < s.out; ++co) {
    double* yo = y.channel(co);
    std::fill(yo, yo + y.plane(), bias ? bias[co] : 0.0);
    for (int ci = 0; ci < s.in; ++ci) {
      const double* xi = x.channel(ci);
      for (int ky = 0; ky < s.kernel; ++ky) {
        int y_lo, y_hi;
        detail::valid_range(x.h, oh, s.stride, s.pad, ky, y_lo, y_hi);
        for (int kx = 0; kx < s.kernel; ++kx) {
          int x_lo, x_hi;
          detail::valid_range(x.w, ow, s.stride, s.pad, kx, x_lo, x_hi);
          const double wv = weight[((static_cast<std::size_t>(co) * s.in + ci) * s.kernel + ky) * s.kernel + kx];
          for (int oy = y_lo; oy <= y_hi; ++oy) {
            const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(oy * s.stride - s.pad + ky) * x.w - s.pad + kx;
            double* out = yo + static_cast<std::size_t>(oy) * ow;
            if (s.stride == 1) {
              for (int ox = x_lo; ox <= x_hi; ++ox) out[ox] += wv * xi[base + ox];
            } else {
              for (int ox = x_lo; ox <= x_hi; ++ox) out[ox] += wv * xi[base + ox * s.stride];
            }
          }
        }
      }
    }
  }
  return y;
}

// Accumulates weight/bias gradients; returns the gradient wrt x.
inline Tensor conv2d_backward(const Tensor& x, const ConvShape& s, const double* weight, const Tensor& gy,
                              double* gweight, double* gbias) {
  const int oh = gy.h, ow = gy.w;
  Tensor gx(x.c, x.h, x.w);
  for (int co = 0; co < s.out; ++co) {
    const double* go = gy.channel(co);
    if (gbias) {
      double acc = 0.0;
      for (std::size_t i = 0; i < gy.plane(); ++i) acc += go[i];
      gbias[co] += acc;
    }
    for (int ci = 0; ci < s.in; ++ci) {
      const double* xi = x.channel(ci);
      double* gi = gx.channel(ci);
      for (int ky = 0; ky < s.kernel; ++ky) {
        int y_lo, y_hi;
        detail::valid_range(x.h, oh, s.stride, s.pad, ky, y_lo, y_hi);
        for (int kx = 0; kx < s.kernel; ++kx) {
          int x_lo, x_hi;
          detail::valid_range(x.w, ow, s.stride, s.pad, kx, x_lo, x_hi);
          const std::size_t widx = ((static_cast<std::size_t>(co) * s.in + ci) * s.kernel + ky) * s.kernel + kx;
          const double wv = weight[widx];
          double gw = 0.0;
          for (int oy = y_lo; oy <= y_hi; ++oy) {
            const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(oy * s.stride - s.pad + ky) * x.w - s.pad + kx;
            const double* g = go + static_cast<std::size_t>(oy) * ow;
            for (int ox = x_lo; ox <= x_hi; ++ox) {
              const std::ptrdiff_t i = base + static_cast<std::ptrdiff_t>(ox) * s.stride;
              gw += g[ox] * xi[i];
              gi[i] += wv * g[ox];
            }
          }
          gweight[widx] += gw;
        }
      }
    }
  }
  return gx;
}

// Transposed convolution; weights laid out [in][out][ky][kx].
inline Tensor deconv2d(const Tensor& x, const ConvShape& s, const double* weight, const double* bias) {
  require(x.c == s.in, "deconv2d: input channel mismatch");
  const int oh = s.deconv_out(x.h), ow = s.deconv_out(x.w);
  require(oh >= 1 && ow >= 1, "deconv2d: output would be empty");
  Tensor y(s.out, oh, ow);
  for (int co = 0; co < s.out; ++co) std::fill(y.channel(co), y.channel(co) + y.plane(), bias ? bias[co] : 0.0);
  for (int ci = 0; ci < s.in; ++ci) {
    const double* xi = x.channel(ci);
    for (int co = 0; co < s.out; ++co) {
      double* yo = y.channel(co);
      const double* wk = weight + (static_cast<std::size_t>(ci) * s.out + co) * s.kernel * s.kernel;
      for (int iy = 0; iy < x.h; ++iy)
        for (int ix = 0; ix < x.w; ++ix) {
          const double v = xi[static_cast<std::size_t>(iy) * x.w + ix];
          for (int ky = 0; ky < s.kernel; ++ky) {
            const int oy = iy * s.stride - s.pad + ky;
            if (oy < 0 || oy >= oh) continue;
            double* out = yo + static_cast<std::size_t>(oy) * ow;
            const double* wr = wk + ky * s.kernel;
            for (int kx = 0; kx < s.kernel; ++kx) {
              const int ox = ix * s.stride - s.pad + kx;
              if (ox < 0 || ox >= ow) continue;
              out[ox] += v * wr[kx];
            }
          }
        }
    }
  }
  return y;
}

inline Tensor deconv2d_backward(const Tensor& x, const ConvShape& s, const double* weight, const Tensor& gy,
                                double* gweight, double* gbias) {
  const int oh = gy.h, ow = gy.w;
  Tensor gx(x.c, x.h, x.w);
  if (gbias) {
    for (int co = 0; co < s.out; ++co) {
      double acc = 0.0;
      const double* go = gy.channel(co);
      for (std::size_t i = 0; i < gy.plane(); ++i) acc += go[i];
      gbias[co] += acc;
    }
  }
  for (int ci = 0; ci < s.in; ++ci) {
    const double* xi = x.channel(ci);
    double* gi = gx.channel(ci);
    for (int co = 0; co < s.out; ++co) {
      const double* go = gy.channel(co);
      const std::size_t wbase = (static_cast<std::size_t>(ci) * s.out + co) * s.kernel * s.kernel;
      for (int iy = 0; iy < x.h; ++iy)
        for (int ix = 0; ix < x.w; ++ix) {
          const double v = xi[static_cast<std::size_t>(iy) * x.w + ix];
          double acc = 0.0;
          for (int ky = 0; ky < s.kernel; ++ky) {
            const int oy = iy * s.stride - s.pad + ky;
            if (oy < 0 || oy >= oh) continue;
            const double* g = go + static_cast<std::size_t>(oy) * ow;
            for (int kx = 0; kx < s.kernel; ++kx) {
              const int ox = ix * s.stride - s.pad + kx;
              if (ox < 0 || ox >= ow) continue;
              const std::size_t widx = wbase + ky * s.kernel + kx;
              acc += weight[widx] * g[ox];
              gweight[widx] += v * g[ox];
            }
          }
          gi[static_cast<std::size_t>(iy) * x.w + ix] += acc;
        }
    }
  }
  return gx;
}

inline void relu_inplace(Tensor& t) {
  for (auto& v : t.data) v = v > 0.0 ? v : 0.0;
}

// Masks gy by the activation pattern of the (post-ReLU) output y.
inline void relu_backward_inplace(const Tensor& y, Tensor& gy) {
  for (std::size_t i = 0; i < y.data.size(); ++i)
    if (!(y.data[i] > 0.0)) gy.data[i] = 0.0;
}

inline Tensor concat_channels(const std::vector<const Tensor*>& parts) {
  require(!parts.empty(), "concat_channels: nothing to concatenate");
  int c = 0;
  for (const auto* p : parts) {
    require(p->h == parts[0]->h && p->w == parts[0]->w, "concat_channels: spatial sizes differ");
    c += p->c;
  }
  Tensor out(c, parts[0]->h, parts[0]->w);
  auto it = out.data.begin();
  for (const auto* p : parts) it = std::copy(p->data.begin(), p->data.end(), it);
  return out;
}

}  // namespace semcolor::nn
