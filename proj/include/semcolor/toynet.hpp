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

// Miniature two-branch colorization network.
//
//   lightness -> conv1..conv4 (shared trunk, strides 1,2,2,2) -> conv5 -> conv6 -> conv7
//   segmentation: deconv(conv5) | deconv(conv6) | deconv(conv7)  -> concat -> 1x1 -> class scores
//   colorization: deconv(conv7) -> 1x1 -> softmax over the q chroma bins
//
// The segmentation deconvolutions restore the input resolution; the color head
// predicts at input_size / color_head_stride. Every conv/deconv except the two
// output layers is followed by a ReLU. Forward and backward passes are written
// out by hand and trained with plain SGD.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "semcolor/bilateral.hpp"
#include "semcolor/chroma_quantizer.hpp"
#include "semcolor/color_space.hpp"
#include "semcolor/error.hpp"
#include "semcolor/loss.hpp"
#include "semcolor/metrics.hpp"
#include "semcolor/nn.hpp"
#include "semcolor/resample.hpp"

namespace semcolor {

struct ToyNetConfig {
  int input_size = 32;
  std::vector<int> trunk_channels = {8, 16, 16, 32};
  std::vector<int> head_channels = {32, 32, 32};
  int seg_deconv_channels = 8;
  int color_deconv_channels = 32;
  int n_classes = 4;
  int q = 313;
  std::uint64_t seed = 1;
  int color_head_stride = 4;
  bool overlapping_deconv = true;  // kernel 2*stride; false gives kernel == stride

  int trunk_size() const { return input_size / 8; }
  int color_size() const { return input_size / color_head_stride; }

  void validate() const {
    require(input_size >= 8 && input_size % 8 == 0, "toynet: input_size must be a positive multiple of 8");
    require(trunk_channels.size() == 4, "toynet: trunk_channels needs 4 entries");
    require(head_channels.size() == 3, "toynet: head_channels needs 3 entries");
    for (int c : trunk_channels) require(c >= 1, "toynet: channel counts must be >= 1");
    for (int c : head_channels) require(c >= 1, "toynet: channel counts must be >= 1");
    require(seg_deconv_channels >= 1 && color_deconv_channels >= 1, "toynet: channel counts must be >= 1");
    require(n_classes >= 2, "toynet: n_classes must be >= 2");
    require(q >= 2, "toynet: q must be >= 2");
    require(color_head_stride >= 1 && 8 % color_head_stride == 0,
            "toynet: color_head_stride must divide 8");
  }
};

struct Param {
  std::string name;
  std::vector<int> shape;
  std::vector<double> values;
};

using ParamGrads = std::vector<std::vector<double>>;

struct NetOutput {
  ChromaDistributionMap color;  // color_size^2 x q
  ScoreMap color_logits;
  SegLogitsMap seg;  // input_size^2 x n_classes
};

struct BackwardResult {
  double total = 0.0;
  double colorization = 0.0;
  double segmentation = 0.0;
  ParamGrads grads;
};

class ToyNet {
 public:
  static ToyNet build(const ToyNetConfig& config) {
    config.validate();
    ToyNet net;
    net.config_ = config;
    const auto& t = config.trunk_channels;
    const auto& h = config.head_channels;
    // Trunk and conv5-7.
    const std::array<int, 8> chans = {1, t[0], t[1], t[2], t[3], h[0], h[1], h[2]};
    for (int i = 0; i < 7; ++i) {
      const int stride = (i >= 1 && i <= 3) ? 2 : 1;
      net.conv_[i] = net.add_layer("conv" + std::to_string(i + 1), {chans[i], chans[i + 1], 3, stride, 1}, false, true);
    }
    for (int i = 0; i < 3; ++i) {
      net.seg_deconv_[i] = net.add_layer("seg_deconv" + std::to_string(i + 5),
                                         upsampling_shape(h[i], config.seg_deconv_channels, 8, config), true, true);
    }
    net.seg_head_ = net.add_layer("seg_head", {3 * config.seg_deconv_channels, config.n_classes, 1, 1, 0}, false, false);
    const int up = 8 / config.color_head_stride;
    net.color_deconv_ = net.add_layer("color_deconv", upsampling_shape(h[2], config.color_deconv_channels, up, config), true, true);
    net.color_head_ = net.add_layer("color_head", {config.color_deconv_channels, config.q, 1, 1, 0}, false, false);
    net.initialize();
    return net;
  }

  // Overlapping upsampling uses kernel 2*factor with pad factor/2; either way
  // the output is exactly factor times the input.
  static nn::ConvShape upsampling_shape(int in, int out, int factor, const ToyNetConfig& config) {
    if (factor == 1 || !config.overlapping_deconv) return {in, out, factor, factor, 0};
    return {in, out, 2 * factor, factor, factor / 2};
  }

  const ToyNetConfig& config() const { return config_; }
  std::vector<Param>& params() { return params_; }
  const std::vector<Param>& params() const { return params_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.values.size();
    return n;
  }

  ParamGrads zero_grads() const {
    ParamGrads g;
    for (const auto& p : params_) g.emplace_back(p.values.size(), 0.0);
    return g;
  }

  // Lightness in [0,100] at input_size x input_size.
  NetOutput forward(const Plane& lightness) const {
    Activations act = run_forward(lightness);
    return make_output(act);
  }

  // Gradients of lambda_c * L_c + lambda_s * L_s. With seg_pixel_mean the
  // segmentation term is averaged over pixels instead of summed, which is what
  // makes a 100:1 lambda_s:lambda_c ratio put both terms on a similar scale.
  BackwardResult backward(const Plane& lightness, const ChromaDistributionMap& target_dist,
                          const SegLabelMap& target_labels, const LossWeights& lw, const RebalanceWeights& rebalance,
                          const SegClassWeights& seg_weights, bool seg_pixel_mean = false) const {
    const int cs = config_.color_size();
    const int n = config_.input_size;
    require(target_dist.width == cs && target_dist.height == cs && target_dist.q == config_.q,
            "toynet backward: color target shape does not match the color head");
    require(target_labels.width == n && target_labels.height == n,
            "toynet backward: label map shape does not match the input");

    Activations act = run_forward(lightness);
    const ScoreMap color_scores = to_score_map(act.color_logits);
    const ScoreMap seg_scores = to_score_map(act.seg_logits);
    const LossResult lc = colorization_loss(color_scores, target_dist, rebalance);
    LossResult ls = segmentation_loss(seg_scores, target_labels, seg_weights);
    if (seg_pixel_mean) {
      const double inv = 1.0 / static_cast<double>(seg_scores.pixel_count());
      ls.loss *= inv;
      for (auto& g : ls.grad) g *= inv;
    }

    BackwardResult r;
    r.colorization = lc.loss;
    r.segmentation = ls.loss;
    r.total = total_loss(lc.loss, ls.loss, lw);
    r.grads = zero_grads();

    nn::Tensor g7(act.a[6].c, act.a[6].h, act.a[6].w);
    std::array<nn::Tensor, 3> g_head;  // gradients reaching conv5/6/7 outputs from the seg branch
    bool have_seg = false;

    if (lw.lambda_c != 0.0) {
      nn::Tensor g = from_score_grad(lc.grad, act.color_logits, lw.lambda_c);
      nn::Tensor gcd = layer_backward(color_head_, act.color_feat, g, r.grads);
      nn::relu_backward_inplace(act.color_feat, gcd);
      g7 = layer_backward(color_deconv_, act.a[6], gcd, r.grads);
    }
    if (lw.lambda_s != 0.0) {
      nn::Tensor g = from_score_grad(ls.grad, act.seg_logits, lw.lambda_s);
      nn::Tensor gcat = layer_backward(seg_head_, act.seg_cat, g, r.grads);
      const std::size_t part = act.seg_feat[0].data.size();
      for (int i = 0; i < 3; ++i) {
        nn::Tensor gd(act.seg_feat[i].c, act.seg_feat[i].h, act.seg_feat[i].w);
        std::copy(gcat.data.begin() + i * part, gcat.data.begin() + (i + 1) * part, gd.data.begin());
        nn::relu_backward_inplace(act.seg_feat[i], gd);
        g_head[i] = layer_backward(seg_deconv_[i], act.a[4 + i], gd, r.grads);
      }
      have_seg = true;
    }

    // conv7 .. conv1, merging the branch gradients at conv5-7 outputs.
    nn::Tensor g = std::move(g7);
    if (have_seg) add_into(g, g_head[2]);
    for (int i = 6; i >= 0; --i) {
      nn::relu_backward_inplace(act.a[i], g);
      const nn::Tensor& input = i == 0 ? act.input : act.a[i - 1];
      nn::Tensor gin = layer_backward(conv_[i], input, g, r.grads);
      if (i == 0) break;
      if (have_seg && (i - 1) >= 4) add_into(gin, g_head[i - 1 - 4]);
      g = std::move(gin);
    }
    return r;
  }

  void sgd_step(const ParamGrads& grads, double lr) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& v = params_[i].values;
      const auto& g = grads[i];
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= lr * g[k];
    }
  }

  bool all_finite() const {
    for (const auto& p : params_)
      for (double v : p.values)
        if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  struct Layer {
    nn::ConvShape shape;
    bool transposed = false;
    bool relu = false;
    int weight = -1;
    int bias = -1;
  };

  struct Activations {
    nn::Tensor input;
    std::array<nn::Tensor, 7> a;         // post-ReLU conv1..conv7
    std::array<nn::Tensor, 3> seg_feat;  // post-ReLU seg deconvs
    nn::Tensor seg_cat;
    nn::Tensor seg_logits;
    nn::Tensor color_feat;
    nn::Tensor color_logits;
  };

  Layer add_layer(const std::string& name, nn::ConvShape shape, bool transposed, bool relu) {
    Layer l{shape, transposed, relu, static_cast<int>(params_.size()), static_cast<int>(params_.size()) + 1};
    Param w{name + ".weight", {}, std::vector<double>(shape.weight_count(), 0.0)};
    w.shape = transposed ? std::vector<int>{shape.in, shape.out, shape.kernel, shape.kernel}
                         : std::vector<int>{shape.out, shape.in, shape.kernel, shape.kernel};
    params_.push_back(std::move(w));
    params_.push_back(Param{name + ".bias", {shape.out}, std::vector<double>(static_cast<std::size_t>(shape.out), 0.0)});
    layers_.push_back(l);
    return l;
  }

  // Weights ~ U(-b, b) with b = sqrt(6 / fan_in) (sqrt(3 / fan_in) on output
  // layers); biases start at zero.
  void initialize() {
    std::mt19937_64 eng(config_.seed);
    for (const auto& l : layers_) {
      const auto& s = l.shape;
      const double fan_in = l.transposed ? static_cast<double>(s.in) * s.kernel * s.kernel / (s.stride * s.stride)
                                         : static_cast<double>(s.in) * s.kernel * s.kernel;
      const double bound = std::sqrt((l.relu ? 6.0 : 3.0) / fan_in);
      for (auto& v : params_[l.weight].values) {
        const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        v = (2.0 * u - 1.0) * bound;
      }
    }
  }

  nn::Tensor layer_forward(const Layer& l, const nn::Tensor& x) const {
    const double* w = params_[l.weight].values.data();
    const double* b = params_[l.bias].values.data();
    nn::Tensor y = l.transposed ? nn::deconv2d(x, l.shape, w, b) : nn::conv2d(x, l.shape, w, b);
    if (l.relu) nn::relu_inplace(y);
    return y;
  }

  nn::Tensor layer_backward(const Layer& l, const nn::Tensor& x, const nn::Tensor& gy, ParamGrads& grads) const {
    const double* w = params_[l.weight].values.data();
    double* gw = grads[l.weight].data();
    double* gb = grads[l.bias].data();
    return l.transposed ? nn::deconv2d_backward(x, l.shape, w, gy, gw, gb)
                        : nn::conv2d_backward(x, l.shape, w, gy, gw, gb);
  }

  Activations run_forward(const Plane& lightness) const {
    const int n = config_.input_size;
    require(lightness.width == n && lightness.height == n, "toynet forward: lightness resolution != input_size");
    Activations act;
    act.input = nn::Tensor(1, n, n);
    for (std::size_t i = 0; i < lightness.values.size(); ++i) act.input.data[i] = (lightness.values[i] - 50.0) / 50.0;
    for (int i = 0; i < 7; ++i) act.a[i] = layer_forward(conv_[i], i == 0 ? act.input : act.a[i - 1]);
    for (int i = 0; i < 3; ++i) act.seg_feat[i] = layer_forward(seg_deconv_[i], act.a[4 + i]);
    act.seg_cat = nn::concat_channels({&act.seg_feat[0], &act.seg_feat[1], &act.seg_feat[2]});
    act.seg_logits = layer_forward(seg_head_, act.seg_cat);
    act.color_feat = layer_forward(color_deconv_, act.a[6]);
    act.color_logits = layer_forward(color_head_, act.color_feat);
    return act;
  }

  static ScoreMap to_score_map(const nn::Tensor& t) {
    ScoreMap s(t.w, t.h, t.c);
    const std::size_t plane = t.plane();
    for (int k = 0; k < t.c; ++k) {
      const double* src = t.channel(k);
      for (std::size_t p = 0; p < plane; ++p) s.scores[p * t.c + k] = src[p];
    }
    return s;
  }

  static nn::Tensor from_score_grad(const std::vector<double>& grad, const nn::Tensor& like, double scale) {
    nn::Tensor g(like.c, like.h, like.w);
    const std::size_t plane = like.plane();
    for (int k = 0; k < like.c; ++k) {
      double* dst = g.channel(k);
      for (std::size_t p = 0; p < plane; ++p) dst[p] = scale * grad[p * like.c + k];
    }
    return g;
  }

  static void add_into(nn::Tensor& dst, const nn::Tensor& src) {
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
  }

  NetOutput make_output(const Activations& act) const {
    NetOutput out;
    out.color_logits = to_score_map(act.color_logits);
    out.color = softmax(out.color_logits);
    out.seg = to_score_map(act.seg_logits);
    return out;
  }

  ToyNetConfig config_;
  std::vector<Param> params_;
  std::vector<Layer> layers_;
  std::array<Layer, 7> conv_{};
  std::array<Layer, 3> seg_deconv_{};
  Layer seg_head_{};
  Layer color_deconv_{};
  Layer color_head_{};
};

// One training example at network resolution.
struct TrainingSample {
  Plane lightness;                // input_size^2, L in [0,100]
  ChromaDistributionMap target;   // color_size^2 soft-encoded ground truth
  SegLabelMap labels;             // input_size^2
};

inline TrainingSample make_training_sample(const LabImage& lab, const SegLabelMap& labels, const SoftEncoder& enc,
                                           const ToyNetConfig& config) {
  require(lab.width == config.input_size && lab.height == config.input_size,
          "make_training_sample: image size differs from input_size");
  auto [l, ab] = split_channels(lab);
  TrainingSample s;
  s.lightness = std::move(l);
  s.target = encode_planes(ab, enc, config.color_head_stride);
  s.labels = labels;
  return s;
}

struct TrainOptions {
  int epochs = 10;
  double lr = 1e-3;
  LossWeights loss_weights{};
  RebalanceWeights rebalance{};
  SegClassWeights seg_weights{};
  std::uint64_t shuffle_seed = 1;
  bool seg_pixel_mean = true;
};

struct EpochLosses {
  double colorization = 0.0;
  double segmentation = 0.0;
  double total = 0.0;
};

struct TrainReport {
  std::vector<EpochLosses> epochs;
  double heldout_ce = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
};

struct EvalResult {
  double colorization_ce = 0.0;  // mean unweighted cross-entropy per color-head pixel (nats)
  IoUReport iou;
};

inline EvalResult evaluate(const ToyNet& net, const std::vector<TrainingSample>& data) {
  require(!data.empty(), "evaluate: empty dataset");
  const int n = net.config().input_size;
  const auto ones = uniform_weights(net.config().q);
  double ce = 0.0;
  std::size_t pixels = 0;
  SegLabelMap all_pred(n, n * static_cast<int>(data.size()));
  SegLabelMap all_gt(n, n * static_cast<int>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const NetOutput out = net.forward(data[i].lightness);
    ce += colorization_loss(out.color_logits, data[i].target, ones).loss;
    pixels += data[i].target.pixel_count();
    const SegLabelMap pred = predict_labels(out.seg);
    std::copy(pred.labels.begin(), pred.labels.end(), all_pred.labels.begin() + i * pred.labels.size());
    std::copy(data[i].labels.labels.begin(), data[i].labels.labels.end(), all_gt.labels.begin() + i * pred.labels.size());
  }
  return {ce / static_cast<double>(pixels), mean_iou(all_pred, all_gt, net.config().n_classes)};
}

// Plain SGD, one sample per step, seeded shuffling every epoch. Stops early
// and flags the report when a loss turns non-finite.
inline TrainReport train(ToyNet& net, const std::vector<TrainingSample>& data, const TrainOptions& opt,
                         const std::vector<TrainingSample>* heldout = nullptr) {
  require(!data.empty(), "train: empty dataset");
  require(opt.epochs >= 0, "train: negative epoch count");
  SegClassWeights seg_weights = opt.seg_weights;
  if (seg_weights.w.empty()) seg_weights = SegClassWeights::ones(net.config().n_classes);
  RebalanceWeights rebalance = opt.rebalance;
  if (rebalance.w.empty()) rebalance = uniform_weights(net.config().q);

  TrainReport report;
  std::mt19937_64 eng(opt.shuffle_seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(eng() % i);
      std::swap(order[i - 1], order[j]);
    }
    EpochLosses sum;
    for (std::size_t idx : order) {
      const auto& s = data[idx];
      BackwardResult r = net.backward(s.lightness, s.target, s.labels, opt.loss_weights, rebalance, seg_weights,
                                       opt.seg_pixel_mean);
      if (!std::isfinite(r.total)) {
        report.diverged = true;
        return report;
      }
      sum.colorization += r.colorization;
      sum.segmentation += r.segmentation;
      sum.total += r.total;
      net.sgd_step(r.grads, opt.lr);
    }
    const double n = static_cast<double>(data.size());
    report.epochs.push_back({sum.colorization / n, sum.segmentation / n, sum.total / n});
    if (!net.all_finite()) {
      report.diverged = true;
      return report;
    }
  }
  if (heldout && !heldout->empty()) report.heldout_ce = evaluate(net, *heldout).colorization_ce;
  return report;
}

struct InferOptions {
  DecodeMode mode = DecodeMode::kAnnealed;
  double temperature = 0.38;
  BilateralParams bilateral{};
  bool use_jbu = true;
};

// Colorizes a full-resolution lightness plane: the net sees an area-resampled
// copy, its decoded low-resolution chroma is brought back to full resolution
// by joint bilateral upsampling against the original lightness (or bilinear
// interpolation), and the original lightness passes through unchanged.
inline LabImage infer_color(const ToyNet& net, const Plane& lightness, const ChromaGrid& grid,
                            const InferOptions& opt = {}) {
  const int n = net.config().input_size;
  require(lightness.width >= n && lightness.height >= n, "infer_color: image smaller than the network input");
  require(grid.q() == net.config().q, "infer_color: grid size does not match the network");
  const Plane small = (lightness.width == n && lightness.height == n) ? lightness : resize_area(lightness, n, n);
  const NetOutput out = net.forward(small);
  const ChromaPlanes low = decode(out.color, grid, opt.mode, opt.temperature);
  ChromaPlanes full = opt.use_jbu ? joint_bilateral_upsample(low, GuideImage{lightness}, opt.bilateral)
                                  : resize_bilinear(low, lightness.width, lightness.height);
  return merge_channels(lightness, full);
}

}  // namespace semcolor
