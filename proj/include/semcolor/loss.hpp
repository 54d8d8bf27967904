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

// Training objectives: class-rebalanced multinomial cross-entropy for the
// colorization head, weighted softmax cross-entropy for the segmentation head,
// and their weighted sum. Gradients are taken wrt the pre-softmax scores.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "semcolor/chroma_quantizer.hpp"
#include "semcolor/error.hpp"

namespace semcolor {

// Per-pixel score vectors (pre-softmax), pixel-major.
struct ScoreMap {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> scores;

  ScoreMap() = default;
  ScoreMap(int w, int h, int c)
      : width(w), height(h), channels(c), scores(static_cast<std::size_t>(w) * h * c, 0.0) {}

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  double* row(std::size_t p) { return scores.data() + p * channels; }
  const double* row(std::size_t p) const { return scores.data() + p * channels; }
};

using SegLogitsMap = ScoreMap;

struct SegLabelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;

  SegLabelMap() = default;
  SegLabelMap(int w, int h, int fill = 0) : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  int& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
  int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const SegLabelMap&) const = default;
};

struct LossWeights {
  double lambda_c = 1.0;
  double lambda_s = 100.0;
};

struct SegClassWeights {
  std::vector<double> w;

  static SegClassWeights ones(int n_classes) { return {std::vector<double>(static_cast<std::size_t>(n_classes), 1.0)}; }
};

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as the scores
};

namespace detail {

inline double log_sum_exp(const double* z, int n) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) m = std::max(m, z[i]);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(z[i] - m);
  return m + std::log(s);
}

inline int argmax(const double* v, int n) {
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace detail

inline ChromaDistributionMap softmax(const ScoreMap& scores) {
  ChromaDistributionMap out(scores.width, scores.height, scores.channels);
  for (std::size_t p = 0; p < scores.pixel_count(); ++p) {
    const double* z = scores.row(p);
    const double lse = detail::log_sum_exp(z, scores.channels);
    double* o = out.row(p);
    for (int k = 0; k < scores.channels; ++k) o[k] = std::exp(z[k] - lse);
  }
  return out;
}

// -sum_{pixels} v(argmax Z) * sum_q Z_q log softmax(z)_q
inline LossResult colorization_loss(const ScoreMap& logits, const ChromaDistributionMap& target,
                                    const RebalanceWeights& weights) {
  require(logits.width == target.width && logits.height == target.height && logits.channels == target.q,
          "colorization_loss: prediction and target shapes differ");
  require(static_cast<int>(weights.w.size()) == target.q, "colorization_loss: weight vector length != q");
  const int q = target.q;
  LossResult r;
  r.grad.assign(logits.scores.size(), 0.0);
  for (std::size_t p = 0; p < logits.pixel_count(); ++p) {
    const double* z = logits.row(p);
    const double* t = target.row(p);
    const double v = weights.w[detail::argmax(t, q)];
    const double lse = detail::log_sum_exp(z, q);
    double term = 0.0;
    double mass = 0.0;
    for (int k = 0; k < q; ++k) {
      if (t[k] != 0.0) term += t[k] * (z[k] - lse);
      mass += t[k];
    }
    r.loss -= v * term;
    double* g = r.grad.data() + p * q;
    for (int k = 0; k < q; ++k) g[k] = v * (std::exp(z[k] - lse) * mass - t[k]);
  }
  return r;
}

// Value-only variant for an explicit probability map; bins with target mass
// and zero predicted probability give +inf.
inline double colorization_cross_entropy(const ChromaDistributionMap& pred, const ChromaDistributionMap& target,
                                         const RebalanceWeights& weights) {
  require(pred.width == target.width && pred.height == target.height && pred.q == target.q,
          "colorization_cross_entropy: prediction and target shapes differ");
  require(static_cast<int>(weights.w.size()) == target.q, "colorization_cross_entropy: weight vector length != q");
  double loss = 0.0;
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) {
    const double* t = target.row(p);
    const double* z = pred.row(p);
    double term = 0.0;
    for (int k = 0; k < target.q; ++k)
      if (t[k] != 0.0) term += t[k] * std::log(z[k]);
    loss -= weights.w[detail::argmax(t, target.q)] * term;
  }
  return loss;
}

// -sum_{pixels} v_s(label) * log softmax(scores)[label]
inline LossResult segmentation_loss(const SegLogitsMap& logits, const SegLabelMap& labels,
                                    const SegClassWeights& weights) {
  require(logits.width == labels.width && logits.height == labels.height,
          "segmentation_loss: logits and labels differ in size");
  require(static_cast<int>(weights.w.size()) == logits.channels, "segmentation_loss: weight vector length != classes");
  const int n = logits.channels;
  LossResult r;
  r.grad.assign(logits.scores.size(), 0.0);
  for (std::size_t p = 0; p < logits.pixel_count(); ++p) {
    const int label = labels.labels[p];
    require(label >= 0 && label < n, "segmentation_loss: label out of range");
    const double* z = logits.row(p);
    const double v = weights.w[label];
    const double lse = detail::log_sum_exp(z, n);
    r.loss -= v * (z[label] - lse);
    double* g = r.grad.data() + p * n;
    for (int k = 0; k < n; ++k) g[k] = v * std::exp(z[k] - lse);
    g[label] -= v;
  }
  return r;
}

inline double total_loss(double lc, double ls, const LossWeights& lw) { return lw.lambda_c * lc + lw.lambda_s * ls; }

// Per-pixel argmax of segmentation scores.
inline SegLabelMap predict_labels(const SegLogitsMap& logits) {
  SegLabelMap out(logits.width, logits.height);
  for (std::size_t p = 0; p < logits.pixel_count(); ++p) out.labels[p] = detail::argmax(logits.row(p), logits.channels);
  return out;
}

}  // namespace semcolor
