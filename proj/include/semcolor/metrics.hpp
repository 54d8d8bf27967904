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

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "semcolor/color_space.hpp"
#include "semcolor/error.hpp"
#include "semcolor/loss.hpp"

namespace semcolor {

struct PsnrResult {
  bool saturated = false;  // identical images
  double db = std::numeric_limits<double>::infinity();
};

struct IoUReport {
  std::vector<double> per_class_iou;
  std::vector<bool> present;  // class occurs in prediction or ground truth
  double mean_iou = 0.0;
};

// 10 log10(255^2 / MSE) over all pixels and channels.
inline PsnrResult psnr(const RgbImage& a, const RgbImage& b) {
  require(a.width == b.width && a.height == b.height && a.data.size() == b.data.size(),
          "psnr: image dimensions differ");
  require(!a.data.empty(), "psnr: empty images");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    sse += d * d;
  }
  if (sse == 0.0) return {true, std::numeric_limits<double>::infinity()};
  const double mse = sse / static_cast<double>(a.data.size());
  return {false, 10.0 * std::log10(255.0 * 255.0 / mse)};
}

inline IoUReport mean_iou(const SegLabelMap& pred, const SegLabelMap& gt, int n_classes) {
  require(pred.width == gt.width && pred.height == gt.height && pred.labels.size() == gt.labels.size(),
          "mean_iou: label map dimensions differ");
  require(n_classes >= 1, "mean_iou: n_classes must be positive");
  std::vector<std::size_t> inter(static_cast<std::size_t>(n_classes), 0), uni(static_cast<std::size_t>(n_classes), 0);
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    const int p = pred.labels[i], g = gt.labels[i];
    require(p >= 0 && p < n_classes && g >= 0 && g < n_classes, "mean_iou: label out of range");
    if (p == g) {
      ++inter[p];
      ++uni[p];
    } else {
      ++uni[p];
      ++uni[g];
    }
  }
  IoUReport r;
  r.per_class_iou.assign(static_cast<std::size_t>(n_classes), 0.0);
  r.present.assign(static_cast<std::size_t>(n_classes), false);
  double sum = 0.0;
  int count = 0;
  for (int c = 0; c < n_classes; ++c) {
    if (uni[c] == 0) continue;
    r.present[c] = true;
    r.per_class_iou[c] = static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
    sum += r.per_class_iou[c];
    ++count;
  }
  r.mean_iou = count > 0 ? sum / count : 0.0;
  return r;
}

inline std::string format_report(const PsnrResult& r) {
  if (r.saturated) return "psnr inf\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "psnr %.6f\n", r.db);
  return buf;
}

// Absent classes are omitted from the per-class lines.
inline std::string format_report(const IoUReport& r) {
  std::string out;
  char buf[64];
  for (std::size_t c = 0; c < r.per_class_iou.size(); ++c) {
    if (!r.present[c]) continue;
    std::snprintf(buf, sizeof(buf), "iou %zu %.6f\n", c, r.per_class_iou[c]);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "miou %.6f\n", r.mean_iou);
  out += buf;
  return out;
}

}  // namespace semcolor
