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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "semcolor/bilateral.hpp"
#include "semcolor/checkpoint.hpp"
#include "semcolor/commands.hpp"
#include "semcolor/loss.hpp"
#include "semcolor/metrics.hpp"
#include "semcolor/resample.hpp"
#include "semcolor/toynet.hpp"

namespace fs = std::filesystem;
using namespace semcolor;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("semcolor_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ------------------------------------------------------------------ 1

void jbu_oracle_equivalence() {
  std::mt19937_64 rng(20261019);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int wl = 1 + static_cast<int>(rng() % 16), hl = 1 + static_cast<int>(rng() % 16);
    const int wh = wl + static_cast<int>(rng() % static_cast<unsigned>(64 - wl + 1));
    const int hh = hl + static_cast<int>(rng() % static_cast<unsigned>(64 - hl + 1));
    std::uniform_real_distribution<double> ab(-100, 100), l(0, 100);
    ChromaPlanes low(wl, hl);
    for (auto& v : low.a.values) v = ab(rng);
    for (auto& v : low.b.values) v = ab(rng);
    Plane guide(wh, hh);
    for (auto& v : guide.values) v = l(rng);
    const BilateralParams params{3.0, 15.0, 0};
    const ChromaPlanes fast = joint_bilateral_upsample(low, GuideImage{guide}, params);
    const int r = params.effective_radius();
    const Plane ref_a = oracle::jbu(low.a, guide, 3.0, 15.0, r), ref_b = oracle::jbu(low.b, guide, 3.0, 15.0, r);
    for (std::size_t i = 0; i < ref_a.values.size(); ++i) {
      worst = std::max(worst, std::abs(fast.a.values[i] - ref_a.values[i]));
      worst = std::max(worst, std::abs(fast.b.values[i] - ref_b.values[i]));
    }
  }
  const double elapsed = seconds_since(t0);
  verdict(1, "jbu matches brute-force oracle", worst <= 1e-9 && elapsed < 10.0,
          "50 instances up to 16x16 -> 64x64, max |diff| " + fmt("%.3g", worst) + ", " + fmt("%.2f s", elapsed));
}

// ------------------------------------------------------------------ 2

void edge_keeping() {
  ChromaPlanes low(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) low.a.at(x, y) = x < 4 ? -40.0 : 40.0;
  Plane guide(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) guide.at(x, y) = x < 16 ? 20.0 : 80.0;
  const int jbu = max_transition_width(joint_bilateral_upsample(low, GuideImage{guide}).a, -40, 40);
  const int bilinear = max_transition_width(resize_bilinear(low.a, 32, 32), -40, 40);
  verdict(2, "edge keeping", jbu <= 1 && bilinear >= 3,
          "transition width jbu " + std::to_string(jbu) + ", bilinear x4 " + std::to_string(bilinear));
}

// ------------------------------------------------------------------ 3

// Worst relative error of a five-point central difference against `grad`.
double worst_loss_error(ScoreMap scores, const std::function<LossResult(const ScoreMap&)>& f) {
  const auto analytic = f(scores).grad;
  const double h = 1e-3;
  double worst = 0.0;
  for (std::size_t i = 0; i < scores.scores.size(); ++i) {
    const double keep = scores.scores[i];
    auto at = [&](double step) {
      scores.scores[i] = keep + step;
      return f(scores).loss;
    };
    const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    scores.scores[i] = keep;
    worst = std::max(worst, std::abs(fd - analytic[i]) / std::max({std::abs(fd), std::abs(analytic[i]), 1e-3}));
  }
  return worst;
}

void gradient_checks() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z(0.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  const int q = 6;
  ScoreMap color(4, 3, q);
  for (auto& v : color.scores) v = z(rng);
  ChromaDistributionMap target(4, 3, q);
  for (std::size_t p = 0; p < target.pixel_count(); ++p) {
    double s = 0;
    for (int k = 0; k < q; ++k) s += (target.row(p)[k] = u(rng));
    for (int k = 0; k < q; ++k) target.row(p)[k] /= s;
  }
  RebalanceWeights rw;
  for (int k = 0; k < q; ++k) rw.w.push_back(0.5 + u(rng));
  const double color_err =
      worst_loss_error(color, [&](const ScoreMap& s) { return colorization_loss(s, target, rw); });

  SegLogitsMap seg(4, 3, 4);
  for (auto& v : seg.scores) v = z(rng);
  SegLabelMap labels(4, 3);
  for (auto& v : labels.labels) v = static_cast<int>(rng() % 4);
  SegClassWeights sw{{0.6, 1.0, 1.4, 0.9}};
  const double seg_err = worst_loss_error(seg, [&](const ScoreMap& s) { return segmentation_loss(s, labels, sw); });

  ToyNetConfig c;
  c.input_size = 16;
  c.trunk_channels = {2, 2, 2, 1};
  c.head_channels = {1, 1, 1};
  c.seg_deconv_channels = 1;
  c.color_deconv_channels = 2;
  c.n_classes = 3;
  c.q = 4;
  c.seed = 3;
  c.overlapping_deconv = false;
  ToyNet net = ToyNet::build(c);
  for (auto& p : net.params())
    if (p.name.find("bias") != std::string::npos)
      for (std::size_t k = 0; k < p.values.size(); ++k) p.values[k] = 0.05 * (static_cast<int>(k % 3) - 1) + 0.01;
  Plane l(16, 16);
  for (auto& v : l.values) v = 100 * u(rng);
  ChromaDistributionMap t(c.color_size(), c.color_size(), c.q);
  for (std::size_t p = 0; p < t.pixel_count(); ++p) {
    double s = 0;
    for (int k = 0; k < c.q; ++k) s += (t.row(p)[k] = u(rng));
    for (int k = 0; k < c.q; ++k) t.row(p)[k] /= s;
  }
  SegLabelMap y(16, 16);
  for (auto& v : y.labels) v = static_cast<int>(rng() % 3);
  RebalanceWeights nrw{{0.7, 1.1, 1.3, 0.9}};
  SegClassWeights nsw{{1.0, 0.8, 1.2}};
  const LossWeights lw{1.0, 100.0};
  const auto r = net.backward(l, t, y, lw, nrw, nsw, true);
  double net_err = 0.0;
  int bad = 0;
  for (std::size_t i = 0; i < net.params().size(); ++i)
    for (std::size_t k = 0; k < net.params()[i].values.size(); ++k) {
      ToyNet probe = net;
      const double h = 1e-3, keep = probe.params()[i].values[k];
      auto at = [&](double step) {
        probe.params()[i].values[k] = keep + step;
        return probe.backward(l, t, y, lw, nrw, nsw, true).total;
      };
      const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h), an = r.grads[i][k];
      const double diff = std::abs(fd - an), scale = std::max(std::abs(fd), std::abs(an));
      if (diff > std::max(1e-4 * scale, 1e-7)) ++bad;
      if (scale > 1e-3) net_err = std::max(net_err, diff / scale);
    }
  const bool ok = color_err < 1e-6 && seg_err < 1e-6 && bad == 0 && net.parameter_count() <= 500;
  verdict(3, "gradient checks", ok,
          "colorization " + fmt("%.2g", color_err) + ", segmentation " + fmt("%.2g", seg_err) + ", net (" +
              std::to_string(net.parameter_count()) + " params) " + fmt("%.2g", net_err) + " on gradients above 1e-3, " +
              std::to_string(bad) + " outside tolerance");
}

// ------------------------------------------------------------------ 4, 5

struct SeedRun {
  double ce_joint = 0.0, ce_color_only = 0.0, miou_joint = 0.0, seconds = 0.0;
};

std::vector<TrainingSample> heldout_samples(const std::vector<cli::CorpusSample>& corpus, const Checkpoint& ck,
                                            std::size_t first) {
  const SoftEncoder enc(ck.grid, {});
  std::vector<TrainingSample> out;
  for (std::size_t i = first; i < corpus.size(); ++i)
    out.push_back(make_training_sample(corpus[i].lab, corpus[i].labels, enc, ck.net.config()));
  return out;
}

void ablation_and_jbu_quality() {
  const int kTrain = 400, kHeld = 100;
  std::vector<SeedRun> runs;
  bool budget_ok = true;
  double psnr_gap = std::numeric_limits<double>::quiet_NaN(), psnr_signed = psnr_gap, psnr_truth = psnr_gap;
  for (int seed = 1; seed <= 5; ++seed) {
    const auto t0 = Clock::now();
    const auto root = scratch("seed" + std::to_string(seed));
    SynthSpec spec;
    spec.n_images = kTrain + kHeld;
    spec.seed = static_cast<std::uint64_t>(seed);
    cli::cmd_synth(spec, (root / "corpus").string());

    RunConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    SeedRun run;
    cfg.lambda_s = 100.0;
    run.ce_joint = cli::cmd_train(cfg, (root / "corpus").string(), (root / "joint").string(), kHeld).report.heldout_ce;
    cfg.lambda_s = 0.0;
    run.ce_color_only =
        cli::cmd_train(cfg, (root / "corpus").string(), (root / "color").string(), kHeld).report.heldout_ce;

    const auto corpus = cli::load_corpus((root / "corpus").string(), cli::read_manifest((root / "corpus").string()));
    const Checkpoint joint = load_checkpoint((root / "joint").string());
    const auto held = heldout_samples(corpus, joint, kTrain);
    run.miou_joint = evaluate(joint.net, held).iou.mean_iou;
    run.seconds = seconds_since(t0);
    budget_ok = budget_ok && run.seconds < 900.0;
    std::printf("  seed %d: held-out CE joint %.4f, color-only %.4f; mIoU %.3f; %.0f s\n", seed, run.ce_joint,
                run.ce_color_only, run.miou_joint, run.seconds);
    std::fflush(stdout);
    runs.push_back(run);

    if (seed == 1) {
      // JBU neutrality on the first 20 held-out images of this corpus. The
      // same comparison on block-averaged ground-truth chroma separates the
      // filter's effect from the network's.
      std::vector<double> gaps, signed_gaps, truth_gaps;
      const int cs = joint.net.config().color_size();
      for (int i = kTrain; i < kTrain + 20; ++i) {
        const auto [l, ab] = split_channels(corpus[i].lab);
        const RgbImage truth = lab_to_rgb(corpus[i].lab);
        InferOptions with, without;
        without.use_jbu = false;
        const double a = psnr(lab_to_rgb(infer_color(joint.net, l, joint.grid, with)), truth).db;
        const double b = psnr(lab_to_rgb(infer_color(joint.net, l, joint.grid, without)), truth).db;
        gaps.push_back(std::abs(a - b));
        signed_gaps.push_back(a - b);
        ChromaPlanes low;
        low.a = resize_area(ab.a, cs, cs);
        low.b = resize_area(ab.b, cs, cs);
        const double ta = psnr(lab_to_rgb(merge_channels(l, joint_bilateral_upsample(low, GuideImage{l}))), truth).db;
        const double tb = psnr(lab_to_rgb(merge_channels(l, resize_bilinear(low, l.width, l.height))), truth).db;
        truth_gaps.push_back(ta - tb);
      }
      psnr_gap = median(gaps);
      psnr_signed = median(signed_gaps);
      psnr_truth = median(truth_gaps);
    }
    fs::remove_all(root);
  }

  std::vector<double> joint, color_only, miou;
  for (const auto& r : runs) {
    joint.push_back(r.ce_joint);
    color_only.push_back(r.ce_color_only);
    miou.push_back(r.miou_joint);
  }
  const double mj = median(joint), mc = median(color_only), mm = median(miou);
  const double chance = 1.0 / SynthSpec{}.n_classes;
  verdict(4, "semantics-helps ablation", mj < mc && mm >= chance + 0.2 && budget_ok,
          "median held-out CE " + fmt("%.4f", mj) + " (lambda_s=100) vs " + fmt("%.4f", mc) +
              " (lambda_s=0); median mIoU " + fmt("%.3f", mm) + " vs chance " + fmt("%.2f", chance) +
              (budget_ok ? "; every seed within 15 min" : "; a seed exceeded 15 min"));
  verdict(5, "jbu quality neutrality", psnr_gap <= 1.5,
          "median |PSNR(jbu) - PSNR(bilinear)| " + fmt("%.3f dB", psnr_gap) + " on 20 held-out images (signed " +
              fmt("%+.3f dB", psnr_signed) + "; on block-averaged true chroma " + fmt("%+.3f dB", psnr_truth) + ")");
}

// ------------------------------------------------------------------ 6

void quantizer() {
  const ChromaGrid g = build_grid(cli::kGridStep, cli::kGamutSamples, 5);
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> u8(0, 255);
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Lab lab = rgb_to_lab(u8(rng), u8(rng), u8(rng));
    ChromaDistributionMap one(1, 1, g.q());
    const auto enc = encode_soft({lab.a, lab.b}, g, 5, 5.0);
    std::copy(enc.begin(), enc.end(), one.row(0));
    const auto c = decode(one, g, DecodeMode::kMode);
    worst = std::max(worst, std::hypot(c.a.values[0] - lab.a, c.b.values[0] - lab.b));
  }
  const double bound = g.grid_step / std::sqrt(2.0);

  ChromaDistributionMap dist(5, 4, g.q());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t p = 0; p < dist.pixel_count(); ++p) {
    double s = 0;
    for (int k = 0; k < g.q(); ++k) s += (dist.row(p)[k] = std::pow(u(rng), 4.0));
    for (int k = 0; k < g.q(); ++k) dist.row(p)[k] /= s;
  }
  const auto mean = decode(dist, g, DecodeMode::kMean);
  const auto annealed = decode(dist, g, DecodeMode::kAnnealed, 1.0);
  double t1 = 0.0;
  for (std::size_t i = 0; i < mean.a.values.size(); ++i) {
    t1 = std::max(t1, std::abs(mean.a.values[i] - annealed.a.values[i]));
    t1 = std::max(t1, std::abs(mean.b.values[i] - annealed.b.values[i]));
  }
  verdict(6, "quantizer", std::abs(g.q() - 313) <= 7 && worst <= bound && t1 <= 1e-12,
          "q = " + std::to_string(g.q()) + ", worst decode(encode) error " + fmt("%.3f", worst) + " <= " +
              fmt("%.3f", bound) + ", |annealed(T=1) - mean| " + fmt("%.2g", t1));
}

// ------------------------------------------------------------------ 7

void color_space() {
  int worst = 0;
  std::vector<int> levels;
  for (int i = 0; i <= 16; ++i) levels.push_back(static_cast<int>(std::lround(255.0 * i / 16)));
  for (int r : levels)
    for (int g : levels)
      for (int b : levels) {
        const auto back = lab_to_rgb(rgb_to_lab(r, g, b));
        worst = std::max({worst, std::abs(back[0] - r), std::abs(back[1] - g), std::abs(back[2] - b)});
      }
  const Lab white = rgb_to_lab(255, 255, 255), black = rgb_to_lab(0, 0, 0);
  const auto white_rgb = lab_to_rgb(Lab{100, 0, 0});
  const auto clamped = lab_to_rgb(Lab{50, 200, 0});
  const bool anchors = std::abs(white.l - 100.0) <= 1e-9 && std::abs(white.a) <= 1e-6 && std::abs(white.b) <= 1e-6 &&
                       black.l == 0.0 && black.a == 0.0 && black.b == 0.0 && white_rgb[0] == 255 &&
                       white_rgb[1] == 255 && white_rgb[2] == 255 && clamped[0] == 255 && clamped[1] == 0;
  verdict(7, "color space", worst <= 1 && anchors,
          "worst roundtrip error over 17^3 lattice " + std::to_string(worst) + ", anchors " +
              (anchors ? "exact" : "wrong"));
}

// ------------------------------------------------------------------ 8

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SEMCOLOR_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// True when both directories hold the same file names with identical bytes.
bool same_tree(const fs::path& a, const fs::path& b) {
  std::vector<std::string> na, nb;
  for (const auto& e : fs::directory_iterator(a)) na.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) nb.push_back(e.path().filename().string());
  std::sort(na.begin(), na.end());
  std::sort(nb.begin(), nb.end());
  if (na != nb || na.empty()) return false;
  for (const auto& n : na)
    if (slurp(a / n) != slurp(b / n)) return false;
  return true;
}

void determinism() {
  const auto root = scratch("determinism");
  const std::string d = root.string();
  bool ran = true;
  for (const char* tag : {"1", "2"}) {
    ran = ran && run_cli("--seed 9 synth --out " + d + "/corpus" + tag + " -n 24") == 0;
    ran = ran && run_cli("--seed 9 train --corpus " + d + "/corpus1 --out " + d + "/model" + tag +
                         " --set epochs=3 --holdout 4") == 0;
    ran = ran && run_cli("colorize --model " + d + "/model1 --in " + d + "/corpus1/0000_rgb.png --out " + d +
                         "/color" + tag + ".png") == 0;
  }
  const bool synth_same = ran && same_tree(root / "corpus1", root / "corpus2");
  const bool train_same = ran && same_tree(root / "model1", root / "model2");
  const bool color_same = ran && slurp(root / "color1.png") == slurp(root / "color2.png") &&
                          !slurp(root / "color1.png").empty();
  verdict(8, "determinism", synth_same && train_same && color_same,
          std::string("synth ") + (synth_same ? "identical" : "differs") + ", train " +
              (train_same ? "identical" : "differs") + ", colorize " + (color_same ? "identical" : "differs") +
              (ran ? "" : " (a command failed)"));
  fs::remove_all(root);
}

}  // namespace

int main() {
  jbu_oracle_equivalence();
  edge_keeping();
  gradient_checks();
  quantizer();
  color_space();
  determinism();
  ablation_and_jbu_quality();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
