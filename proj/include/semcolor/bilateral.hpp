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

// Joint bilateral filtering and joint bilateral upsampling of chroma planes
// guided by a full-resolution lightness image.
//
// For an output pixel p with (possibly fractional) low-resolution coordinate
// p_lo, the result on each chroma channel is the normalized sum over integer
// low-resolution positions q_lo in the window of radius `radius` around p_lo:
//
//   S(p) = 1/k_p * sum S_lo(q_lo) * f(|p_lo - q_lo|) * g(|I(p) - I(q)|)
//
// with Gaussian f (width sigma_s, low-resolution pixels) and g (width sigma_r,
// 8-bit intensity units). I(q) is the guide read at the high-resolution pixel
// nearest to q_lo. At equal resolutions this is the joint bilateral filter.

#include <algorithm>
#include <cmath>
#include <vector>

#include "semcolor/color_space.hpp"
#include "semcolor/error.hpp"

namespace semcolor {

struct BilateralParams {
  double sigma_s = 3.0;
  double sigma_r = 15.0;
  int radius = 0;  // 0 selects ceil(3 * sigma_s)

  int effective_radius() const { return radius > 0 ? radius : static_cast<int>(std::ceil(3.0 * sigma_s)); }

  void validate() const {
    require(sigma_s > 0.0, "bilateral: sigma_s must be positive");
    require(sigma_r > 0.0, "bilateral: sigma_r must be positive");
    require(radius >= 0, "bilateral: radius must be >= 1 (or 0 for the default)");
  }
};

// Lightness guide in [0,100]; kernels see it rescaled to [0,255].
struct GuideImage {
  Plane lightness;

  int width() const { return lightness.width; }
  int height() const { return lightness.height; }
  double intensity(int x, int y) const { return lightness.at(x, y) * (255.0 / 100.0); }
};

namespace detail {

struct AxisWindow {
  int first = 0;
  std::vector<double> weights;  // spatial weights for first, first+1, ...
};

inline std::vector<AxisWindow> axis_windows(int n_lo, int n_hi, int radius, double sigma_s) {
  const double scale = static_cast<double>(n_hi) / n_lo;
  const double inv = 1.0 / (2.0 * sigma_s * sigma_s);
  std::vector<AxisWindow> out(static_cast<std::size_t>(n_hi));
  for (int p = 0; p < n_hi; ++p) {
    const double c = (p + 0.5) / scale - 0.5;
    const int lo = std::max(0, static_cast<int>(std::ceil(c - radius)));
    const int hi = std::min(n_lo - 1, static_cast<int>(std::floor(c + radius)));
    auto& w = out[p];
    w.first = lo;
    for (int q = lo; q <= hi; ++q) w.weights.push_back(std::exp(-(c - q) * (c - q) * inv));
  }
  return out;
}

// High-resolution pixel nearest to low-resolution position q: round((q+0.5)*s - 0.5).
inline int guide_index(int q, int n_lo, int n_hi) {
  const double s = static_cast<double>(n_hi) / n_lo;
  return std::clamp(static_cast<int>(std::floor((q + 0.5) * s)), 0, n_hi - 1);
}

inline ChromaPlanes bilateral_core(const ChromaPlanes& low, const GuideImage& guide, const BilateralParams& params) {
  params.validate();
  const int wl = low.width(), hl = low.height();
  const int wh = guide.width(), hh = guide.height();
  const int radius = params.effective_radius();
  const auto xs = axis_windows(wl, wh, radius, params.sigma_s);
  const auto ys = axis_windows(hl, hh, radius, params.sigma_s);

  // Guide intensity at each low-resolution sample position.
  std::vector<int> gx(static_cast<std::size_t>(wl)), gy(static_cast<std::size_t>(hl));
  for (int q = 0; q < wl; ++q) gx[q] = guide_index(q, wl, wh);
  for (int q = 0; q < hl; ++q) gy[q] = guide_index(q, hl, hh);
  Plane guide_lo(wl, hl);
  for (int y = 0; y < hl; ++y)
    for (int x = 0; x < wl; ++x) guide_lo.at(x, y) = guide.intensity(gx[x], gy[y]);

  const double inv_r = 1.0 / (2.0 * params.sigma_r * params.sigma_r);
  ChromaPlanes out(wh, hh);
  for (int py = 0; py < hh; ++py) {
    const auto& wy = ys[py];
    for (int px = 0; px < wh; ++px) {
      const auto& wx = xs[px];
      const double ip = guide.intensity(px, py);
      // Averaging offsets from one window sample keeps constant inputs exact.
      const double ra = low.a.at(wx.first, wy.first), rb = low.b.at(wx.first, wy.first);
      double sa = 0.0, sb = 0.0, k = 0.0;
      for (std::size_t j = 0; j < wy.weights.size(); ++j) {
        const int qy = wy.first + static_cast<int>(j);
        for (std::size_t i = 0; i < wx.weights.size(); ++i) {
          const int qx = wx.first + static_cast<int>(i);
          const double d = ip - guide_lo.at(qx, qy);
          const double w = wy.weights[j] * wx.weights[i] * std::exp(-d * d * inv_r);
          sa += w * (low.a.at(qx, qy) - ra);
          sb += w * (low.b.at(qx, qy) - rb);
          k += w;
        }
      }
      out.a.at(px, py) = ra + sa / k;
      out.b.at(px, py) = rb + sb / k;
    }
  }
  return out;
}

}  // namespace detail

inline ChromaPlanes joint_bilateral_filter(const ChromaPlanes& chroma, const GuideImage& guide,
                                           const BilateralParams& params = {}) {
  require(chroma.width() == guide.width() && chroma.height() == guide.height(),
          "joint_bilateral_filter: chroma and guide resolutions differ");
  require(chroma.width() >= 1 && chroma.height() >= 1, "joint_bilateral_filter: empty image");
  return detail::bilateral_core(chroma, guide, params);
}

inline ChromaPlanes joint_bilateral_upsample(const ChromaPlanes& low_chroma, const GuideImage& guide,
                                             const BilateralParams& params = {}) {
  require(low_chroma.width() >= 1 && low_chroma.height() >= 1, "joint_bilateral_upsample: empty chroma");
  require(guide.width() >= low_chroma.width() && guide.height() >= low_chroma.height(),
          "joint_bilateral_upsample: guide is smaller than the low-resolution chroma");
  return detail::bilateral_core(low_chroma, guide, params);
}

// Number of samples in `row` strictly between 10% and 90% of the step from
// `from` to `to`.
inline int transition_width(const Plane& plane, int row, double from, double to) {
  const double lo = std::min(from, to) + 0.1 * std::abs(to - from);
  const double hi = std::min(from, to) + 0.9 * std::abs(to - from);
  int n = 0;
  for (int x = 0; x < plane.width; ++x) {
    const double v = plane.at(x, row);
    if (v > lo && v < hi) ++n;
  }
  return n;
}

// Widest transition over all rows.
inline int max_transition_width(const Plane& plane, double from, double to) {
  int n = 0;
  for (int y = 0; y < plane.height; ++y) n = std::max(n, transition_width(plane, y, from, to));
  return n;
}

}  // namespace semcolor
