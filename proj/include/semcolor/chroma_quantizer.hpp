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

// Quantized ab space: gamut-masked lattice of bin centers, Gaussian soft
// encoding of ground-truth chroma, empirical color prior, class-rebalancing
// weights and point-estimate decoding of predicted distributions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "semcolor/color_space.hpp"
#include "semcolor/error.hpp"

namespace semcolor {

inline constexpr double kLatticeBound = 110.0;

struct ChromaGrid {
  double grid_step = 10.0;
  std::vector<std::array<double, 2>> centers;  // (a, b), sorted by (a, b)

  int q() const { return static_cast<int>(centers.size()); }
  bool operator==(const ChromaGrid&) const = default;
};

// Per-pixel probability vectors over the q bins, pixel-major.
struct ChromaDistributionMap {
  int width = 0;
  int height = 0;
  int q = 0;
  std::vector<double> probs;

  ChromaDistributionMap() = default;
  ChromaDistributionMap(int w, int h, int bins)
      : width(w), height(h), q(bins), probs(static_cast<std::size_t>(w) * h * bins, 0.0) {}

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  double* row(std::size_t pixel) { return probs.data() + pixel * q; }
  const double* row(std::size_t pixel) const { return probs.data() + pixel * q; }

  // Every value in [0,1] and every row summing to 1 within tol.
  bool is_normalized(double tol = 1e-6) const {
    if (probs.size() != pixel_count() * q) return false;
    for (std::size_t p = 0; p < pixel_count(); ++p) {
      double s = 0.0;
      for (int k = 0; k < q; ++k) {
        const double v = row(p)[k];
        if (!(v >= 0.0 && v <= 1.0)) return false;
        s += v;
      }
      if (std::abs(s - 1.0) > tol) return false;
    }
    return true;
  }
};

struct RebalanceWeights {
  std::vector<double> w;
  double mix_lambda = 0.5;
};

struct SoftEncoding {
  int k = 5;
  double sigma = 5.0;
};

enum class DecodeMode { kMode, kMean, kAnnealed };

inline DecodeMode parse_decode_mode(const std::string& s) {
  if (s == "mode") return DecodeMode::kMode;
  if (s == "mean") return DecodeMode::kMean;
  if (s == "annealed") return DecodeMode::kAnnealed;
  throw Error("unknown decode mode '" + s + "' (expected mode|mean|annealed)");
}

inline const char* to_string(DecodeMode m) {
  switch (m) {
    case DecodeMode::kMode: return "mode";
    case DecodeMode::kMean: return "mean";
    case DecodeMode::kAnnealed: return "annealed";
  }
  return "?";
}

namespace detail {

// k-nearest-center search over a set of lattice points. Indices refer to the
// caller's center list; ties are broken by lower index.
class LatticeIndex {
 public:
  LatticeIndex(const std::vector<std::array<double, 2>>& centers, double step) : centers_(centers), step_(step) {
    for (int i = 0; i < static_cast<int>(centers.size()); ++i) {
      const auto key = cell_of(centers[i][0], centers[i][1]);
      cells_[key] = i;
      max_extent_ = std::max({max_extent_, std::abs(key.first), std::abs(key.second)});
    }
  }

  // Appends (squared distance, index) of the k nearest centers, sorted.
  void nearest(double a, double b, int k, std::vector<std::pair<double, int>>& out) const {
    out.clear();
    k = std::min<int>(k, static_cast<int>(centers_.size()));
    if (k <= 0) return;
    const auto [ia, ib] = cell_of(a, b);
    std::vector<std::pair<double, int>> cand;
    if (std::max(std::abs(ia), std::abs(ib)) > max_extent_ + 1) {
      // Far outside the lattice the ring search would scan mostly empty cells.
      for (int i = 0; i < static_cast<int>(centers_.size()); ++i) {
        const auto& c = centers_[i];
        cand.emplace_back((a - c[0]) * (a - c[0]) + (b - c[1]) * (b - c[1]), i);
      }
      std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
      cand.resize(static_cast<std::size_t>(k));
      out = std::move(cand);
      return;
    }
    const int r_max = max_extent_ + std::max(std::abs(ia), std::abs(ib)) + 1;
    for (int r = 0; r <= r_max; ++r) {
      for (int da = -r; da <= r; ++da) {
        for (int db = -r; db <= r; ++db) {
          if (std::max(std::abs(da), std::abs(db)) != r) continue;
          const auto it = cells_.find({ia + da, ib + db});
          if (it == cells_.end()) continue;
          const auto& c = centers_[it->second];
          const double d2 = (a - c[0]) * (a - c[0]) + (b - c[1]) * (b - c[1]);
          cand.emplace_back(d2, it->second);
        }
      }
      if (static_cast<int>(cand.size()) >= k) {
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        // Anything outside the searched square is at least (r + 0.5) steps away.
        const double bound = (r + 0.5) * step_;
        if (cand[k - 1].first <= bound * bound) break;
      }
    }
    std::sort(cand.begin(), cand.end());
    cand.resize(static_cast<std::size_t>(k));
    out = std::move(cand);
  }

 private:
  std::pair<int, int> cell_of(double a, double b) const {
    return {static_cast<int>(std::lround(a / step_)), static_cast<int>(std::lround(b / step_))};
  }

  const std::vector<std::array<double, 2>>& centers_;
  double step_;
  std::map<std::pair<int, int>, int> cells_;
  int max_extent_ = 0;
};

inline std::vector<std::array<double, 2>> full_lattice(double step) {
  const int n = static_cast<int>(std::floor(kLatticeBound / step + 1e-9));
  std::vector<std::array<double, 2>> pts;
  if (n < 1) return pts;  // only the origin fits: not a usable lattice
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) pts.push_back({i * step, j * step});
  return pts;
}

}  // namespace detail

// Builds the gamut-masked grid. A lattice cell is kept when it belongs to the
// `support_k` nearest lattice centers of at least one sample of an
// gamut_samples^3 sRGB lattice; support_k = 1 keeps exactly the cells that
// contain a sample.
inline ChromaGrid build_grid(double grid_step, int gamut_samples, int support_k = 5) {
  require(grid_step > 0.0, "build_grid: grid_step must be positive");
  require(gamut_samples >= 2, "build_grid: need at least 2 samples per RGB axis");
  require(support_k >= 1, "build_grid: support_k must be >= 1");
  const auto lattice = detail::full_lattice(grid_step);
  require(!lattice.empty(), "build_grid: empty grid (grid_step too large)");
  detail::LatticeIndex index(lattice, grid_step);

  std::vector<char> keep(lattice.size(), 0);
  std::vector<std::uint8_t> levels(static_cast<std::size_t>(gamut_samples));
  for (int i = 0; i < gamut_samples; ++i)
    levels[i] = static_cast<std::uint8_t>(std::lround(255.0 * i / (gamut_samples - 1)));

  std::vector<std::pair<double, int>> nn;
  for (auto r : levels)
    for (auto g : levels)
      for (auto b : levels) {
        const Lab lab = rgb_to_lab(r, g, b);
        index.nearest(lab.a, lab.b, support_k, nn);
        for (const auto& [d2, idx] : nn) keep[idx] = 1;
      }

  ChromaGrid grid;
  grid.grid_step = grid_step;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    if (keep[i]) grid.centers.push_back(lattice[i]);
  require(!grid.centers.empty(), "build_grid: empty grid (grid_step too large)");
  return grid;
}

// Stateful encoder so the lattice index is built once per grid.
class SoftEncoder {
 public:
  SoftEncoder(const ChromaGrid& grid, SoftEncoding params) : grid_(grid), params_(params), index_(grid_.centers, grid_.grid_step) {
    require(params.k >= 1, "encode_soft: k must be >= 1");
    require(params.sigma > 0.0, "encode_soft: sigma must be positive");
  }

  int q() const { return grid_.q(); }

  SoftEncoder(const SoftEncoder&) = delete;
  SoftEncoder& operator=(const SoftEncoder&) = delete;

  // Adds scale times the normalized Gaussian-kNN encoding into out[0..q).
  void encode_into(double a, double b, double* out, double scale = 1.0) const {
    index_.nearest(a, b, params_.k, nn_);
    // Shift by the nearest distance so the weights cannot all underflow.
    const double d0 = nn_.front().first;
    double sum = 0.0;
    weights_.resize(nn_.size());
    for (std::size_t i = 0; i < nn_.size(); ++i) {
      weights_[i] = std::exp(-(nn_[i].first - d0) / (2.0 * params_.sigma * params_.sigma));
      sum += weights_[i];
    }
    for (std::size_t i = 0; i < nn_.size(); ++i) out[nn_[i].second] += scale * weights_[i] / sum;
  }

  std::vector<double> encode(double a, double b) const {
    std::vector<double> out(static_cast<std::size_t>(grid_.q()), 0.0);
    encode_into(a, b, out.data());
    return out;
  }

 private:
  ChromaGrid grid_;
  SoftEncoding params_;
  detail::LatticeIndex index_;
  mutable std::vector<std::pair<double, int>> nn_;
  mutable std::vector<double> weights_;
};

inline std::vector<double> encode_soft(std::array<double, 2> ab, const ChromaGrid& grid, int k, double sigma) {
  return SoftEncoder(grid, {k, sigma}).encode(ab[0], ab[1]);
}

// Soft-encodes chroma planes, averaging the encodings over factor x factor
// blocks so the result sits at (w/factor, h/factor).
inline ChromaDistributionMap encode_planes(const ChromaPlanes& chroma, const SoftEncoder& enc, int factor = 1) {
  require(factor >= 1, "encode_planes: factor must be >= 1");
  require(chroma.width() % factor == 0 && chroma.height() % factor == 0,
          "encode_planes: size not divisible by factor");
  const int w = chroma.width() / factor;
  const int h = chroma.height() / factor;
  ChromaDistributionMap out(w, h, enc.q());
  const double scale = 1.0 / (factor * factor);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double* row = out.row(static_cast<std::size_t>(y) * w + x);
      for (int dy = 0; dy < factor; ++dy)
        for (int dx = 0; dx < factor; ++dx) {
          const int sx = x * factor + dx;
          const int sy = y * factor + dy;
          enc.encode_into(chroma.a.at(sx, sy), chroma.b.at(sx, sy), row, scale);
        }
    }
  return out;
}

inline std::vector<double> empirical_prior(const std::vector<LabImage>& dataset, const ChromaGrid& grid,
                                           SoftEncoding params = {}) {
  require(!dataset.empty(), "empirical_prior: empty dataset");
  SoftEncoder enc(grid, params);
  std::vector<double> hist(static_cast<std::size_t>(grid.q()), 0.0);
  std::size_t pixels = 0;
  for (const auto& img : dataset) {
    for (std::size_t i = 0; i < img.pixel_count(); ++i) enc.encode_into(img.a[i], img.b[i], hist.data());
    pixels += img.pixel_count();
  }
  require(pixels > 0, "empirical_prior: dataset has no pixels");
  for (auto& v : hist) v /= static_cast<double>(pixels);
  return hist;
}

inline RebalanceWeights rebalance_weights(const std::vector<double>& prior, double mix_lambda) {
  require(!prior.empty(), "rebalance_weights: empty prior");
  require(mix_lambda >= 0.0 && mix_lambda <= 1.0, "rebalance_weights: mix_lambda must lie in [0,1]");
  double total = 0.0;
  for (double p : prior) {
    require(p >= 0.0, "rebalance_weights: negative prior mass");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-6, "rebalance_weights: prior does not sum to 1");
  const double q = static_cast<double>(prior.size());
  RebalanceWeights rw;
  rw.mix_lambda = mix_lambda;
  rw.w.resize(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double denom = (1.0 - mix_lambda) * prior[i] + mix_lambda / q;
    require(denom > 0.0, "rebalance_weights: bin with zero prior mass; use mix_lambda > 0");
    rw.w[i] = 1.0 / denom;
  }
  double expectation = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) expectation += prior[i] * rw.w[i];
  for (auto& v : rw.w) v /= expectation;
  return rw;
}

inline RebalanceWeights uniform_weights(int q) {
  RebalanceWeights rw;
  rw.w.assign(static_cast<std::size_t>(q), 1.0);
  rw.mix_lambda = 1.0;
  return rw;
}

// Point estimate of one probability row.
inline std::array<double, 2> decode_row(const double* p, const ChromaGrid& grid, DecodeMode mode,
                                        double temperature, std::vector<double>& scratch) {
  const int q = grid.q();
  if (mode == DecodeMode::kMode) {
    int best = 0;
    for (int k = 1; k < q; ++k)
      if (p[k] > p[best]) best = k;
    return grid.centers[best];
  }
  const double* w = p;
  if (mode == DecodeMode::kAnnealed) {
    // probs^(1/T), renormalized; evaluated in the log domain.
    scratch.assign(static_cast<std::size_t>(q), 0.0);
    double max_log = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < q; ++k)
      if (p[k] > 0.0) max_log = std::max(max_log, std::log(p[k]) / temperature);
    double sum = 0.0;
    for (int k = 0; k < q; ++k) {
      scratch[k] = p[k] > 0.0 ? std::exp(std::log(p[k]) / temperature - max_log) : 0.0;
      sum += scratch[k];
    }
    for (auto& v : scratch) v /= sum;
    w = scratch.data();
  }
  double a = 0.0, b = 0.0;
  for (int k = 0; k < q; ++k) {
    a += w[k] * grid.centers[k][0];
    b += w[k] * grid.centers[k][1];
  }
  return {a, b};
}

inline ChromaPlanes decode(const ChromaDistributionMap& dist, const ChromaGrid& grid, DecodeMode mode,
                           double temperature = 0.38) {
  require(dist.q == grid.q(), "decode: distribution bin count differs from grid");
  require(mode != DecodeMode::kAnnealed || temperature > 0.0, "decode: temperature must be positive");
  require(dist.is_normalized(1e-6), "decode: distribution rows are not normalized");
  ChromaPlanes out(dist.width, dist.height);
  std::vector<double> scratch;
  for (std::size_t p = 0; p < dist.pixel_count(); ++p) {
    const auto ab = decode_row(dist.row(p), grid, mode, temperature, scratch);
    out.a.values[p] = ab[0];
    out.b.values[p] = ab[1];
  }
  return out;
}

inline void write_grid(std::ostream& os, const ChromaGrid& grid) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g %d\n", grid.grid_step, grid.q());
  os << buf;
  for (const auto& c : grid.centers) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", c[0], c[1]);
    os << buf;
  }
}

inline ChromaGrid read_grid(std::istream& is) {
  ChromaGrid grid;
  int q = 0;
  require(static_cast<bool>(is >> grid.grid_step >> q), "read_grid: malformed header");
  require(grid.grid_step > 0.0 && q > 0, "read_grid: invalid header values");
  grid.centers.resize(static_cast<std::size_t>(q));
  for (auto& c : grid.centers) require(static_cast<bool>(is >> c[0] >> c[1]), "read_grid: truncated center list");
  return grid;
}

inline void save_grid(const std::string& path, const ChromaGrid& grid) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), "cannot open '" + path + "' for writing");
  write_grid(os, grid);
}

inline ChromaGrid load_grid(const std::string& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), "cannot open grid file '" + path + "'");
  return read_grid(is);
}

}  // namespace semcolor
