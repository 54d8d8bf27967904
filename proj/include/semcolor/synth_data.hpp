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

// Synthetic shapes corpus: chroma is a function of the object class while,
// with lightness_overlap set, lightness carries no class information.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "semcolor/color_space.hpp"
#include "semcolor/error.hpp"
#include "semcolor/loss.hpp"

namespace semcolor {

enum class ShapeKind { kCircle = 1, kSquare = 2, kTriangle = 3 };

struct SynthSpec {
  int n_images = 100;
  int size = 32;
  int n_classes = 4;  // background + shape classes
  std::vector<std::array<double, 2>> class_chroma = {{0.0, 0.0}, {40.0, 20.0}, {-35.0, 30.0}, {10.0, -45.0}};
  bool lightness_overlap = true;
  std::uint64_t seed = 1;

  void validate() const {
    require(n_images >= 0, "synth: n_images must be non-negative");
    require(size >= 8, "synth: size must be at least 8");
    require(n_classes >= 2 && n_classes <= 4, "synth: n_classes must lie in [2,4]");
    require(static_cast<int>(class_chroma.size()) == n_classes, "synth: class_chroma length != n_classes");
  }
};

struct SynthSample {
  LabImage lab;
  SegLabelMap labels;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform reals from the raw engine output so results do not depend on the
// standard library's distribution implementations.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : eng_(seed) {}
  double next() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * next(); }
  int below(int n) { return std::min(n - 1, static_cast<int>(next() * n)); }

 private:
  std::mt19937_64 eng_;
};

struct ShapeGeom {
  ShapeKind kind;
  double cx, cy, r;
};

// All shapes have area pi r^2.
inline bool shape_contains(const ShapeGeom& s, double x, double y) {
  const double dx = x - s.cx, dy = y - s.cy;
  switch (s.kind) {
    case ShapeKind::kCircle:
      return dx * dx + dy * dy <= s.r * s.r;
    case ShapeKind::kSquare: {
      const double h = 0.5 * std::sqrt(std::numbers::pi) * s.r;
      return std::abs(dx) <= h && std::abs(dy) <= h;
    }
    case ShapeKind::kTriangle: {
      const double top = -1.1 * s.r, height = 2.0 * s.r;
      const double half_base = 0.5 * std::numbers::pi * s.r;
      if (dy < top || dy > top + height) return false;
      return std::abs(dx) <= half_base * (dy - top) / height;
    }
  }
  return false;
}

inline double shape_extent(const ShapeGeom& s) {
  return s.kind == ShapeKind::kTriangle ? 0.5 * std::numbers::pi * s.r : 1.1 * s.r;
}

}  // namespace detail

inline SynthSample generate_one(const SynthSpec& spec, int index) {
  detail::Uniform rng(detail::splitmix64(spec.seed ^ detail::splitmix64(static_cast<std::uint64_t>(index))));
  const int n = spec.size;
  SynthSample s{LabImage(n, n), SegLabelMap(n, n, 0)};

  // With overlap, lightness is a linear ramp across the image that advances
  // one full period of a length-40 circle, folded by reflection into
  // [40,60]. Each region adds its own offset on that circle; shapes sit 10..30
  // away from the background. Every pixel of every class is then uniform on
  // [40,60] while shape boundaries keep their contrast.
  const double bg = spec.lightness_overlap ? rng.range(0.0, 40.0) : rng.range(15.0, 25.0);
  const double theta = spec.lightness_overlap ? rng.range(0.0, 2.0 * std::numbers::pi) : 0.0;
  auto draw_lightness = [&](int cls) {
    if (!spec.lightness_overlap) return rng.range(15.0 + 20.0 * cls, 25.0 + 20.0 * cls);
    return bg + rng.range(10.0, 30.0);
  };
  std::vector<double> offset(static_cast<std::size_t>(n) * n, bg);
  std::fill(s.lab.a.begin(), s.lab.a.end(), spec.class_chroma[0][0]);
  std::fill(s.lab.b.begin(), s.lab.b.end(), spec.class_chroma[0][1]);

  // Occupancy with a one pixel margin keeps shapes from touching.
  std::vector<char> occupied(static_cast<std::size_t>(n) * n, 0);
  const int count = 1 + rng.below(3);
  constexpr int kRetries = 32;
  for (int k = 0; k < count; ++k) {
    const int cls = 1 + rng.below(spec.n_classes - 1);
    const double r = rng.range(0.15, 0.25) * n;
    const double lightness = draw_lightness(cls);
    for (int attempt = 0; attempt < kRetries; ++attempt) {
      detail::ShapeGeom g{static_cast<ShapeKind>(cls), 0.0, 0.0, r};
      const double ext = detail::shape_extent(g);
      g.cx = rng.range(ext, n - ext);
      g.cy = rng.range(ext, n - ext);
      std::vector<int> pixels;
      bool clash = false;
      for (int y = 0; y < n && !clash; ++y)
        for (int x = 0; x < n; ++x) {
          if (!detail::shape_contains(g, x + 0.5, y + 0.5)) continue;
          for (int oy = -1; oy <= 1 && !clash; ++oy)
            for (int ox = -1; ox <= 1; ++ox) {
              const int xx = x + ox, yy = y + oy;
              if (xx >= 0 && yy >= 0 && xx < n && yy < n && occupied[static_cast<std::size_t>(yy) * n + xx]) {
                clash = true;
                break;
              }
            }
          if (clash) break;
          pixels.push_back(y * n + x);
        }
      if (clash || pixels.empty()) continue;
      for (int p : pixels) {
        occupied[p] = 1;
        s.labels.labels[p] = cls;
        offset[p] = lightness;
        s.lab.a[p] = spec.class_chroma[cls][0];
        s.lab.b[p] = spec.class_chroma[cls][1];
      }
      break;
    }
  }
  const double slope = 40.0 / n;
  const double cx = std::cos(theta), cy = std::sin(theta);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * n + x;
      if (!spec.lightness_overlap) {
        s.lab.l[p] = offset[p];
        continue;
      }
      const double ramp = slope * ((x + 0.5 - 0.5 * n) * cx + (y + 0.5 - 0.5 * n) * cy);
      double t = std::fmod(offset[p] + ramp, 40.0);
      if (t < 0.0) t += 40.0;
      s.lab.l[p] = 40.0 + (t < 20.0 ? t : 40.0 - t);
    }
  return s;
}

inline std::vector<SynthSample> generate(const SynthSpec& spec) {
  spec.validate();
  std::vector<SynthSample> out;
  out.reserve(static_cast<std::size_t>(spec.n_images));
  for (int i = 0; i < spec.n_images; ++i) out.push_back(generate_one(spec, i));
  return out;
}

// Per-pixel check that chroma equals the class color of the label (within tol).
inline bool chroma_matches_labels(const LabImage& lab, const SegLabelMap& labels,
                                  const std::vector<std::array<double, 2>>& class_chroma, double tol) {
  if (lab.pixel_count() != labels.pixel_count()) return false;
  for (std::size_t i = 0; i < lab.pixel_count(); ++i) {
    const int c = labels.labels[i];
    if (c < 0 || c >= static_cast<int>(class_chroma.size())) return false;
    if (std::abs(lab.a[i] - class_chroma[c][0]) > tol || std::abs(lab.b[i] - class_chroma[c][1]) > tol) return false;
  }
  return true;
}

// Vertical step edge at column edge_x: lightness and chroma change together.
inline SynthSample step_edge_scene(int width, int height, int edge_x, double l_left, double l_right,
                                   std::array<double, 2> ab_left, std::array<double, 2> ab_right) {
  require(edge_x > 0 && edge_x < width, "step_edge_scene: edge outside the image");
  SynthSample s{LabImage(width, height), SegLabelMap(width, height, 0)};
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const bool right = x >= edge_x;
      s.lab.l[i] = right ? l_right : l_left;
      s.lab.a[i] = right ? ab_right[0] : ab_left[0];
      s.lab.b[i] = right ? ab_right[1] : ab_left[1];
      s.labels.labels[i] = right ? 1 : 0;
    }
  return s;
}

}  // namespace semcolor
