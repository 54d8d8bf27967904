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

// Plain (non-guided) resampling of planes: area averaging for downsizing,
// bilinear and bicubic interpolation with pixel-center alignment.

#include <algorithm>
#include <cmath>
#include <vector>

#include "semcolor/color_space.hpp"
#include "semcolor/error.hpp"

namespace semcolor {

namespace detail {

// Coverage weights of source cells [0, n_in) for output cell i when n_in
// units are spread over n_out cells.
inline void area_weights(int n_in, int n_out, int i, int& first, std::vector<double>& w) {
  const double scale = static_cast<double>(n_in) / n_out;
  const double lo = i * scale;
  const double hi = (i + 1) * scale;
  first = static_cast<int>(std::floor(lo));
  const int last = std::min(n_in - 1, static_cast<int>(std::ceil(hi)) - 1);
  w.clear();
  for (int s = first; s <= last; ++s) {
    const double cover = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
    w.push_back(cover / scale);
  }
}

inline double cubic_kernel(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
  return 0.0;
}

}  // namespace detail

inline Plane resize_area(const Plane& src, int out_w, int out_h) {
  require(out_w >= 1 && out_h >= 1, "resize_area: empty target");
  Plane tmp(out_w, src.height);
  std::vector<double> w;
  int first = 0;
  for (int x = 0; x < out_w; ++x) {
    detail::area_weights(src.width, out_w, x, first, w);
    for (int y = 0; y < src.height; ++y) {
      double acc = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * src.at(first + static_cast<int>(k), y);
      tmp.at(x, y) = acc;
    }
  }
  Plane out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    detail::area_weights(src.height, out_h, y, first, w);
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * tmp.at(x, first + static_cast<int>(k));
      out.at(x, y) = acc;
    }
  }
  return out;
}

// Source coordinate of output pixel i under pixel-center alignment.
inline double source_coordinate(int i, int n_in, int n_out) {
  return (i + 0.5) * static_cast<double>(n_in) / n_out - 0.5;
}

inline Plane resize_bilinear(const Plane& src, int out_w, int out_h) {
  require(src.width >= 1 && src.height >= 1 && out_w >= 1 && out_h >= 1, "resize_bilinear: empty image");
  Plane out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    const double sy = std::clamp(source_coordinate(y, src.height, out_h), 0.0, src.height - 1.0);
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double sx = std::clamp(source_coordinate(x, src.width, out_w), 0.0, src.width - 1.0);
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double fx = sx - x0;
      const double top = (1.0 - fx) * src.at(x0, y0) + fx * src.at(x1, y0);
      const double bot = (1.0 - fx) * src.at(x0, y1) + fx * src.at(x1, y1);
      out.at(x, y) = (1.0 - fy) * top + fy * bot;
    }
  }
  return out;
}

// Keys cubic convolution (a = -0.5), edge samples replicated.
inline Plane resize_bicubic(const Plane& src, int out_w, int out_h) {
  require(src.width >= 1 && src.height >= 1 && out_w >= 1 && out_h >= 1, "resize_bicubic: empty image");
  Plane out(out_w, out_h);
  auto sample = [&](int x, int y) { return src.at(std::clamp(x, 0, src.width - 1), std::clamp(y, 0, src.height - 1)); };
  for (int y = 0; y < out_h; ++y) {
    const double sy = source_coordinate(y, src.height, out_h);
    const int iy = static_cast<int>(std::floor(sy));
    for (int x = 0; x < out_w; ++x) {
      const double sx = source_coordinate(x, src.width, out_w);
      const int ix = static_cast<int>(std::floor(sx));
      double acc = 0.0;
      for (int j = -1; j <= 2; ++j) {
        const double wy = detail::cubic_kernel(sy - (iy + j));
        for (int i = -1; i <= 2; ++i) acc += wy * detail::cubic_kernel(sx - (ix + i)) * sample(ix + i, iy + j);
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

inline ChromaPlanes resize_bilinear(const ChromaPlanes& src, int out_w, int out_h) {
  ChromaPlanes out;
  out.a = resize_bilinear(src.a, out_w, out_h);
  out.b = resize_bilinear(src.b, out_w, out_h);
  return out;
}

}  // namespace semcolor
