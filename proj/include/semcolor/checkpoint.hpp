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

// Model checkpoint directory:
//   config.txt          network configuration, `key = value`
//   grid.txt            the chroma grid the color head was trained against
//   <param name>.cft    one CFT1 tensor per named parameter

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "semcolor/chroma_quantizer.hpp"
#include "semcolor/error.hpp"
#include "semcolor/run_config.hpp"
#include "semcolor/tensor_file.hpp"
#include "semcolor/toynet.hpp"

namespace semcolor {

struct Checkpoint {
  ToyNet net;
  ChromaGrid grid;
};

namespace detail {

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw Error("checkpoint config: bad integer list '" + s + "'");
    }
  }
  return out;
}

}  // namespace detail

inline std::string format_net_config(const ToyNetConfig& c) {
  std::ostringstream os;
  os << "input_size = " << c.input_size << "\n"
     << "trunk_channels = " << detail::join_ints(c.trunk_channels) << "\n"
     << "head_channels = " << detail::join_ints(c.head_channels) << "\n"
     << "seg_deconv_channels = " << c.seg_deconv_channels << "\n"
     << "color_deconv_channels = " << c.color_deconv_channels << "\n"
     << "n_classes = " << c.n_classes << "\n"
     << "q = " << c.q << "\n"
     << "seed = " << c.seed << "\n"
     << "color_head_stride = " << c.color_head_stride << "\n"
     << "overlapping_deconv = " << (c.overlapping_deconv ? 1 : 0) << "\n";
  return os.str();
}

inline ToyNetConfig parse_net_config(std::istream& is) {
  ToyNetConfig c;
  parse_key_values(is, [&](const std::string& k, const std::string& v) {
    auto as_int = [&] {
      try {
        return std::stoll(v);
      } catch (const std::exception&) {
        throw Error("checkpoint config: '" + k + "' expects an integer");
      }
    };
    if (k == "input_size") c.input_size = static_cast<int>(as_int());
    else if (k == "trunk_channels") c.trunk_channels = detail::split_ints(v);
    else if (k == "head_channels") c.head_channels = detail::split_ints(v);
    else if (k == "seg_deconv_channels") c.seg_deconv_channels = static_cast<int>(as_int());
    else if (k == "color_deconv_channels") c.color_deconv_channels = static_cast<int>(as_int());
    else if (k == "n_classes") c.n_classes = static_cast<int>(as_int());
    else if (k == "q") c.q = static_cast<int>(as_int());
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(as_int());
    else if (k == "color_head_stride") c.color_head_stride = static_cast<int>(as_int());
    else if (k == "overlapping_deconv") c.overlapping_deconv = as_int() != 0;
    else throw Error("checkpoint config: unknown key '" + k + "'");
  });
  c.validate();
  return c;
}

inline void save_checkpoint(const std::string& dir, const ToyNet& net, const ChromaGrid& grid) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, "cannot create checkpoint directory '" + dir + "'");
  {
    std::ofstream os(fs::path(dir) / "config.txt", std::ios::binary);
    require(static_cast<bool>(os), "cannot write checkpoint config in '" + dir + "'");
    os << format_net_config(net.config());
  }
  save_grid((fs::path(dir) / "grid.txt").string(), grid);
  for (const auto& p : net.params()) {
    TensorFile t;
    for (int d : p.shape) t.dims.push_back(static_cast<std::uint32_t>(d));
    t.values.assign(p.values.begin(), p.values.end());
    write_tensor((fs::path(dir) / (p.name + ".cft")).string(), t);
  }
}

inline Checkpoint load_checkpoint(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream is(fs::path(dir) / "config.txt");
  require(static_cast<bool>(is), "cannot open checkpoint config in '" + dir + "'");
  Checkpoint ck{ToyNet::build(parse_net_config(is)), load_grid((fs::path(dir) / "grid.txt").string())};
  require(ck.grid.q() == ck.net.config().q, "checkpoint: grid size does not match the network");
  for (auto& p : ck.net.params()) {
    const TensorFile t = read_tensor((fs::path(dir) / (p.name + ".cft")).string());
    require(t.values.size() == p.values.size(), "checkpoint: parameter '" + p.name + "' has the wrong size");
    p.values.assign(t.values.begin(), t.values.end());
  }
  return ck;
}

}  // namespace semcolor
