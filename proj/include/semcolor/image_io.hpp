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

// 8-bit PNG read/write (RGB and grayscale) on top of libpng's simplified API.

#include <png.h>

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "semcolor/color_space.hpp"
#include "semcolor/error.hpp"

namespace semcolor {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}
  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const GrayImage&) const = default;
};

namespace detail {

struct PngImage {
  png_image img;
  PngImage() {
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&img); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

inline std::vector<std::uint8_t> read_png_as(const std::string& path, png_uint_32 format, int& w, int& h,
                                             bool* was_color) {
  PngImage p;
  if (!png_image_begin_read_from_file(&p.img, path.c_str())) {
    throw Error("cannot read PNG '" + path + "': " + p.img.message);
  }
  if (was_color) *was_color = (p.img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  p.img.format = format;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(p.img));
  if (!png_image_finish_read(&p.img, nullptr, buf.data(), 0, nullptr)) {
    throw Error("cannot decode PNG '" + path + "': " + p.img.message);
  }
  w = static_cast<int>(p.img.width);
  h = static_cast<int>(p.img.height);
  return buf;
}

inline void write_png_as(const std::string& path, png_uint_32 format, int w, int h, const std::uint8_t* data) {
  PngImage p;
  p.img.width = static_cast<png_uint_32>(w);
  p.img.height = static_cast<png_uint_32>(h);
  p.img.format = format;
  if (!png_image_write_to_file(&p.img, path.c_str(), 0, data, 0, nullptr)) {
    throw Error("cannot write PNG '" + path + "': " + p.img.message);
  }
}

}  // namespace detail

// Reads any PNG as 8-bit RGB. `was_color` reports whether the file stored color.
inline RgbImage read_png_rgb(const std::string& path, bool* was_color = nullptr) {
  RgbImage img;
  img.data = detail::read_png_as(path, PNG_FORMAT_RGB, img.width, img.height, was_color);
  return img;
}

inline GrayImage read_png_gray(const std::string& path, bool* was_color = nullptr) {
  GrayImage img;
  img.data = detail::read_png_as(path, PNG_FORMAT_GRAY, img.width, img.height, was_color);
  return img;
}

inline void write_png(const std::string& path, const RgbImage& img) {
  require(img.data.size() == img.pixel_count() * 3, "write_png: bad RGB buffer");
  detail::write_png_as(path, PNG_FORMAT_RGB, img.width, img.height, img.data.data());
}

inline void write_png(const std::string& path, const GrayImage& img) {
  require(img.data.size() == static_cast<std::size_t>(img.width) * img.height, "write_png: bad gray buffer");
  detail::write_png_as(path, PNG_FORMAT_GRAY, img.width, img.height, img.data.data());
}

inline RgbImage gray_to_rgb(const GrayImage& g) {
  RgbImage out(g.width, g.height);
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = g.data[i];
  }
  return out;
}

}  // namespace semcolor
