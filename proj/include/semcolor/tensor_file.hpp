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

// CFT1 tensor container:
//   "CFT1" | n_dims:u32le | dims[n_dims]:u32le | payload: product(dims) x f32le
// Row-major, at most 4 dimensions, no trailing bytes.

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "semcolor/chroma_quantizer.hpp"
#include "semcolor/color_space.hpp"
#include "semcolor/error.hpp"

namespace semcolor {

struct TensorFile {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
  bool operator==(const TensorFile&) const = default;
};

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  require(pos + 4 <= in.size(), "CFT1: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_tensor(const TensorFile& t) {
  require(!t.dims.empty() && t.dims.size() <= 4, "CFT1: rank must lie in [1,4]");
  require(t.values.size() == t.element_count(), "CFT1: payload length != product(dims)");
  std::vector<std::uint8_t> out = {'C', 'F', 'T', '1'};
  detail::put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) detail::put_u32(out, d);
  out.reserve(out.size() + 4 * t.values.size());
  for (float v : t.values) detail::put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

inline TensorFile decode_tensor(const std::vector<std::uint8_t>& bytes) {
  require(bytes.size() >= 8 && bytes[0] == 'C' && bytes[1] == 'F' && bytes[2] == 'T' && bytes[3] == '1',
          "CFT1: bad magic");
  std::size_t pos = 4;
  const std::uint32_t rank = detail::get_u32(bytes, pos);
  require(rank >= 1 && rank <= 4, "CFT1: rank must lie in [1,4]");
  TensorFile t;
  for (std::uint32_t i = 0; i < rank; ++i) t.dims.push_back(detail::get_u32(bytes, pos));
  const std::size_t n = t.element_count();
  require(bytes.size() - pos == 4 * n, "CFT1: payload length != product(dims)");
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.values[i] = std::bit_cast<float>(detail::get_u32(bytes, pos));
  return t;
}

inline void write_tensor(const std::string& path, const TensorFile& t) {
  const auto bytes = encode_tensor(t);
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), "cannot open '" + path + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(os), "write to '" + path + "' failed");
}

inline TensorFile read_tensor(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), "cannot open tensor file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

// Chroma planes <-> tensor of shape (2, H, W).
inline TensorFile chroma_to_tensor(const ChromaPlanes& c) {
  TensorFile t;
  t.dims = {2, static_cast<std::uint32_t>(c.height()), static_cast<std::uint32_t>(c.width())};
  t.values.reserve(2 * c.a.size());
  for (double v : c.a.values) t.values.push_back(static_cast<float>(v));
  for (double v : c.b.values) t.values.push_back(static_cast<float>(v));
  return t;
}

inline ChromaPlanes tensor_to_chroma(const TensorFile& t) {
  require(t.dims.size() == 3 && t.dims[0] == 2, "expected a chroma tensor of shape (2, H, W)");
  const int h = static_cast<int>(t.dims[1]), w = static_cast<int>(t.dims[2]);
  ChromaPlanes c(w, h);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  for (std::size_t i = 0; i < n; ++i) {
    c.a.values[i] = t.values[i];
    c.b.values[i] = t.values[n + i];
  }
  return c;
}

// Distribution map <-> tensor of shape (H, W, Q).
inline TensorFile distribution_to_tensor(const ChromaDistributionMap& d) {
  TensorFile t;
  t.dims = {static_cast<std::uint32_t>(d.height), static_cast<std::uint32_t>(d.width), static_cast<std::uint32_t>(d.q)};
  t.values.assign(d.probs.begin(), d.probs.end());
  return t;
}

inline ChromaDistributionMap tensor_to_distribution(const TensorFile& t) {
  require(t.dims.size() == 3, "expected a distribution tensor of shape (H, W, Q)");
  ChromaDistributionMap d(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[0]), static_cast<int>(t.dims[2]));
  d.probs.assign(t.values.begin(), t.values.end());
  return d;
}

}  // namespace semcolor
