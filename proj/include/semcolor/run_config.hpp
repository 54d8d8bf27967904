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

// Line-oriented `key = value` run configuration. '#' starts a comment;
// unknown keys are rejected.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "semcolor/chroma_quantizer.hpp"
#include "semcolor/error.hpp"

namespace semcolor {

struct RunConfig {
  std::uint64_t seed = 1;
  int input_size = 32;
  int epochs = 30;
  double lr = 1e-3;
  double lambda_c = 1.0;
  double lambda_s = 100.0;
  double sigma_s = 3.0;
  double sigma_r = 15.0;
  DecodeMode decode_mode = DecodeMode::kAnnealed;
  double temperature = 0.38;
  int k_neighbors = 5;
  double encode_sigma = 5.0;
  double mix_lambda = 0.5;

  // Applies one key/value pair; throws on unknown keys or bad values.
  void set(const std::string& key, const std::string& value) {
    auto as_double = [&] {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(used == value.size() && !value.empty(), "config: '" + key + "' expects a number, got '" + value + "'");
      return v;
    };
    auto as_int = [&] {
      const double v = as_double();
      require(v == static_cast<double>(static_cast<long long>(v)), "config: '" + key + "' expects an integer");
      return static_cast<long long>(v);
    };
    if (key == "seed") {
      const long long v = as_int();
      require(v >= 0, "config: seed must be non-negative");
      seed = static_cast<std::uint64_t>(v);
    } else if (key == "input_size") {
      input_size = static_cast<int>(as_int());
    } else if (key == "epochs") {
      epochs = static_cast<int>(as_int());
    } else if (key == "lr") {
      lr = as_double();
    } else if (key == "lambda_c") {
      lambda_c = as_double();
    } else if (key == "lambda_s") {
      lambda_s = as_double();
    } else if (key == "sigma_s") {
      sigma_s = as_double();
    } else if (key == "sigma_r") {
      sigma_r = as_double();
    } else if (key == "decode_mode") {
      decode_mode = parse_decode_mode(value);
    } else if (key == "temperature") {
      temperature = as_double();
    } else if (key == "k_neighbors") {
      k_neighbors = static_cast<int>(as_int());
    } else if (key == "encode_sigma") {
      encode_sigma = as_double();
    } else if (key == "mix_lambda") {
      mix_lambda = as_double();
    } else {
      throw Error("config: unknown key '" + key + "'");
    }
  }

  void validate() const {
    require(input_size >= 8 && input_size % 8 == 0, "config: input_size must be a positive multiple of 8");
    require(epochs >= 0, "config: epochs must be >= 0");
    require(lr >= 0.0, "config: lr must be >= 0");
    require(lambda_c >= 0.0 && lambda_s >= 0.0 && (lambda_c > 0.0 || lambda_s > 0.0),
            "config: lambda_c and lambda_s must be >= 0 and not both zero");
    require(sigma_s > 0.0 && sigma_r > 0.0, "config: sigma_s and sigma_r must be positive");
    require(temperature > 0.0, "config: temperature must be positive");
    require(k_neighbors >= 1, "config: k_neighbors must be >= 1");
    require(encode_sigma > 0.0, "config: encode_sigma must be positive");
    require(mix_lambda >= 0.0 && mix_lambda <= 1.0, "config: mix_lambda must lie in [0,1]");
  }

  std::string to_string() const {
    std::ostringstream os;
    auto num = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return std::string(buf);
    };
    os << "seed = " << seed << "\n"
       << "input_size = " << input_size << "\n"
       << "epochs = " << epochs << "\n"
       << "lr = " << num(lr) << "\n"
       << "lambda_c = " << num(lambda_c) << "\n"
       << "lambda_s = " << num(lambda_s) << "\n"
       << "sigma_s = " << num(sigma_s) << "\n"
       << "sigma_r = " << num(sigma_r) << "\n"
       << "decode_mode = " << semcolor::to_string(decode_mode) << "\n"
       << "temperature = " << num(temperature) << "\n"
       << "k_neighbors = " << k_neighbors << "\n"
       << "encode_sigma = " << num(encode_sigma) << "\n"
       << "mix_lambda = " << num(mix_lambda) << "\n";
    return os.str();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// Calls fn(key, value) for every `key = value` line.
template <typename Fn>
void parse_key_values(std::istream& is, Fn&& fn) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(lineno) + ": expected 'key = value'");
    fn(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
}

inline RunConfig parse_run_config(std::istream& is, RunConfig base = {}) {
  parse_key_values(is, [&](const std::string& k, const std::string& v) { base.set(k, v); });
  base.validate();
  return base;
}

inline RunConfig parse_run_config(const std::string& text, RunConfig base = {}) {
  std::istringstream is(text);
  return parse_run_config(is, base);
}

inline RunConfig load_run_config(const std::string& path, RunConfig base = {}) {
  std::ifstream is(path);
  require(static_cast<bool>(is), "cannot open config file '" + path + "'");
  return parse_run_config(is, base);
}

}  // namespace semcolor
