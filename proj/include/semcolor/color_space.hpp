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

// sRGB (8-bit) <-> CIE Lab (D65, 2 degree observer) conversion and the
// lightness / chroma plane split used as network input and target.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "semcolor/error.hpp"

namespace semcolor {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major, interleaved r,g,b

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  std::uint8_t& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  bool operator==(const RgbImage&) const = default;
};

// A single real-valued plane, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0) : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t size() const { return values.size(); }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const Plane&) const = default;
};

// The a and b planes of a Lab image.
struct ChromaPlanes {
  Plane a;
  Plane b;

  ChromaPlanes() = default;
  ChromaPlanes(int w, int h) : a(w, h), b(w, h) {}
  int width() const { return a.width; }
  int height() const { return a.height; }
  bool operator==(const ChromaPlanes&) const = default;
};

struct LabImage {
  int width = 0;
  int height = 0;
  std::vector<double> l;  // [0, 100]
  std::vector<double> a;  // [-128, 128]
  std::vector<double> b;  // [-128, 128]

  LabImage() = default;
  LabImage(int w, int h)
      : width(w),
        height(h),
        l(static_cast<std::size_t>(w) * h, 0.0),
        a(static_cast<std::size_t>(w) * h, 0.0),
        b(static_cast<std::size_t>(w) * h, 0.0) {}

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool operator==(const LabImage&) const = default;

  bool is_valid() const {
    const std::size_t n = pixel_count();
    if (l.size() != n || a.size() != n || b.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(l[i] >= 0.0 && l[i] <= 100.0)) return false;
      if (!(a[i] >= -128.0 && a[i] <= 128.0)) return false;
      if (!(b[i] >= -128.0 && b[i] <= 128.0)) return false;
    }
    return true;
  }
};

struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};

namespace detail {

// IEC 61966-2-1 linear sRGB -> XYZ.
inline constexpr std::array<std::array<double, 3>, 3> kRgbToXyz = {{
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
}};

// Reference white taken as the image of linear (1,1,1), so sRGB white lands on
// the achromatic axis exactly.
inline constexpr std::array<double, 3> kWhite = {
    kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2],
    kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2],
    kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2],
};

inline const std::array<std::array<double, 3>, 3>& xyz_to_rgb_matrix() {
  static const auto inv = [] {
    const auto& m = kRgbToXyz;
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    std::array<std::array<double, 3>, 3> r{};
    r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return r;
  }();
  return inv;
}

inline constexpr double kDelta = 6.0 / 29.0;

inline double lab_f(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

inline double lab_f_inv(double f) {
  return f > kDelta ? f * f * f : 3.0 * kDelta * kDelta * (f - 4.0 / 29.0);
}

}  // namespace detail

inline double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double c) {
  return c <= 0.0031308 ? c * 12.92 : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

inline Lab rgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const std::array<double, 3> lin = {srgb_to_linear(r8 / 255.0), srgb_to_linear(g8 / 255.0),
                                     srgb_to_linear(b8 / 255.0)};
  std::array<double, 3> f{};
  for (int i = 0; i < 3; ++i) {
    const auto& row = detail::kRgbToXyz[i];
    const double xyz = row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2];
    f[i] = detail::lab_f(xyz / detail::kWhite[i]);
  }
  return {116.0 * f[1] - 16.0, 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])};
}

// Out-of-gamut colors are clamped in linear RGB before encoding.
inline std::array<std::uint8_t, 3> lab_to_rgb(const Lab& lab) {
  const double fy = (lab.l + 16.0) / 116.0;
  const std::array<double, 3> f = {fy + lab.a / 500.0, fy, fy - lab.b / 200.0};
  std::array<double, 3> xyz{};
  for (int i = 0; i < 3; ++i) xyz[i] = detail::lab_f_inv(f[i]) * detail::kWhite[i];
  const auto& m = detail::xyz_to_rgb_matrix();
  std::array<std::uint8_t, 3> out{};
  for (int i = 0; i < 3; ++i) {
    double lin = m[i][0] * xyz[0] + m[i][1] * xyz[1] + m[i][2] * xyz[2];
    if (!(lin >= 0.0)) lin = 0.0;  // also maps NaN to 0
    lin = std::min(lin, 1.0);
    const double enc = std::clamp(linear_to_srgb(lin), 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::lround(enc * 255.0));
  }
  return out;
}

// True when linear RGB of the Lab color lies inside [0,1]^3 (within tol).
inline bool lab_in_gamut(const Lab& lab, double tol = 0.0) {
  const double fy = (lab.l + 16.0) / 116.0;
  const std::array<double, 3> f = {fy + lab.a / 500.0, fy, fy - lab.b / 200.0};
  std::array<double, 3> xyz{};
  for (int i = 0; i < 3; ++i) xyz[i] = detail::lab_f_inv(f[i]) * detail::kWhite[i];
  const auto& m = detail::xyz_to_rgb_matrix();
  for (int i = 0; i < 3; ++i) {
    const double lin = m[i][0] * xyz[0] + m[i][1] * xyz[1] + m[i][2] * xyz[2];
    if (lin < -tol || lin > 1.0 + tol) return false;
  }
  return true;
}

inline LabImage rgb_to_lab(const RgbImage& img) {
  require(img.data.size() == img.pixel_count() * 3, "rgb_to_lab: data length does not match dimensions");
  LabImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const Lab v = rgb_to_lab(img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]);
    out.l[i] = v.l;
    out.a[i] = v.a;
    out.b[i] = v.b;
  }
  return out;
}

inline RgbImage lab_to_rgb(const LabImage& img) {
  const std::size_t n = img.pixel_count();
  require(img.l.size() == n && img.a.size() == n && img.b.size() == n,
          "lab_to_rgb: plane length does not match dimensions");
  RgbImage out(img.width, img.height);
  for (std::size_t i = 0; i < n; ++i) {
    const auto px = lab_to_rgb(Lab{img.l[i], img.a[i], img.b[i]});
    out.data[3 * i] = px[0];
    out.data[3 * i + 1] = px[1];
    out.data[3 * i + 2] = px[2];
  }
  return out;
}

inline std::pair<Plane, ChromaPlanes> split_channels(const LabImage& img) {
  Plane l(img.width, img.height);
  ChromaPlanes ab(img.width, img.height);
  l.values = img.l;
  ab.a.values = img.a;
  ab.b.values = img.b;
  return {std::move(l), std::move(ab)};
}

inline LabImage merge_channels(const Plane& lightness, const ChromaPlanes& chroma) {
  require(lightness.width == chroma.a.width && lightness.height == chroma.a.height &&
              chroma.a.width == chroma.b.width && chroma.a.height == chroma.b.height,
          "merge_channels: lightness and chroma planes differ in size");
  LabImage out;
  out.width = lightness.width;
  out.height = lightness.height;
  out.l = lightness.values;
  out.a = chroma.a.values;
  out.b = chroma.b.values;
  return out;
}

// Lightness plane of an RGB image; for color input this is the luminance-based L.
inline Plane lightness_of(const RgbImage& img) { return split_channels(rgb_to_lab(img)).first; }

inline bool is_gray(const RgbImage& img) {
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (img.data[3 * i] != img.data[3 * i + 1] || img.data[3 * i] != img.data[3 * i + 2]) return false;
  }
  return true;
}

}  // namespace semcolor
