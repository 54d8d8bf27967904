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

// Subcommand implementations behind the `semcolor` CLI. Each returns normally
// on success and throws semcolor::Error on any contract violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "semcolor/bilateral.hpp"
#include "semcolor/checkpoint.hpp"
#include "semcolor/chroma_quantizer.hpp"
#include "semcolor/color_space.hpp"
#include "semcolor/image_io.hpp"
#include "semcolor/metrics.hpp"
#include "semcolor/run_config.hpp"
#include "semcolor/synth_data.hpp"
#include "semcolor/tensor_file.hpp"
#include "semcolor/toynet.hpp"

namespace semcolor::cli {

namespace fs = std::filesystem;

inline constexpr double kGridStep = 10.0;
inline constexpr int kGamutSamples = 18;

inline std::string sample_stem(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", i);
  return buf;
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), "cannot create output directory '" + dir + "'");
}

inline GrayImage labels_to_gray(const SegLabelMap& labels) {
  GrayImage g(labels.width, labels.height);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) g.data[i] = static_cast<std::uint8_t>(labels.labels[i]);
  return g;
}

inline SegLabelMap gray_to_labels(const GrayImage& g) {
  SegLabelMap m(g.width, g.height);
  for (std::size_t i = 0; i < g.data.size(); ++i) m.labels[i] = g.data[i];
  return m;
}

// ---------------------------------------------------------------- synth

struct CorpusEntry {
  std::string rgb;
  std::string label;
};

struct Manifest {
  SynthSpec spec;
  std::vector<CorpusEntry> entries;
};

inline void cmd_synth(const SynthSpec& spec, const std::string& out_dir) {
  spec.validate();
  ensure_dir(out_dir);
  const auto samples = generate(spec);
  std::ostringstream manifest;
  manifest << "# semcolor-corpus seed=" << spec.seed << " n=" << spec.n_images << " size=" << spec.size
           << " classes=" << spec.n_classes << " overlap=" << (spec.lightness_overlap ? 1 : 0) << "\n";
  for (int i = 0; i < spec.n_images; ++i) {
    const std::string stem = sample_stem(i);
    write_png((fs::path(out_dir) / (stem + "_rgb.png")).string(), lab_to_rgb(samples[i].lab));
    write_png((fs::path(out_dir) / (stem + "_label.png")).string(), labels_to_gray(samples[i].labels));
    manifest << stem << "_rgb.png " << stem << "_label.png\n";
  }
  std::ofstream os(fs::path(out_dir) / "manifest.txt", std::ios::binary);
  require(static_cast<bool>(os), "cannot write manifest in '" + out_dir + "'");
  os << manifest.str();
}

inline Manifest read_manifest(const std::string& dir) {
  std::ifstream is(fs::path(dir) / "manifest.txt");
  require(static_cast<bool>(is), "corpus '" + dir + "' has no manifest.txt");
  Manifest m;
  std::string line;
  require(static_cast<bool>(std::getline(is, line)) && line.rfind("# semcolor-corpus", 0) == 0,
          "manifest: missing header line");
  {
    std::istringstream hs(line.substr(std::string("# semcolor-corpus").size()));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      require(eq != std::string::npos, "manifest: malformed header field '" + tok + "'");
      const std::string k = tok.substr(0, eq);
      const long long v = std::stoll(tok.substr(eq + 1));
      if (k == "seed") m.spec.seed = static_cast<std::uint64_t>(v);
      else if (k == "n") m.spec.n_images = static_cast<int>(v);
      else if (k == "size") m.spec.size = static_cast<int>(v);
      else if (k == "classes") m.spec.n_classes = static_cast<int>(v);
      else if (k == "overlap") m.spec.lightness_overlap = v != 0;
    }
  }
  m.spec.class_chroma.resize(static_cast<std::size_t>(m.spec.n_classes));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    CorpusEntry e;
    require(static_cast<bool>(ls >> e.rgb >> e.label), "manifest: malformed entry '" + line + "'");
    m.entries.push_back(e);
  }
  require(static_cast<int>(m.entries.size()) == m.spec.n_images, "manifest: entry count does not match header");
  return m;
}

struct CorpusSample {
  LabImage lab;
  SegLabelMap labels;
};

inline std::vector<CorpusSample> load_corpus(const std::string& dir, const Manifest& m) {
  std::vector<CorpusSample> out;
  for (const auto& e : m.entries) {
    const auto rgb_path = fs::path(dir) / e.rgb;
    const auto label_path = fs::path(dir) / e.label;
    require(fs::exists(rgb_path) && fs::exists(label_path), "corpus: missing file listed in manifest: " + e.rgb);
    const RgbImage rgb = read_png_rgb(rgb_path.string());
    const GrayImage lab = read_png_gray(label_path.string());
    require(rgb.width == lab.width && rgb.height == lab.height, "corpus: image/label size mismatch for " + e.rgb);
    out.push_back({rgb_to_lab(rgb), gray_to_labels(lab)});
  }
  return out;
}

// Re-checks a corpus on disk: label values in range and every pixel's chroma
// within `tol` Lab units of its class color (PNG quantization included).
// Returns a list of problems, empty when the corpus is consistent.
inline std::vector<std::string> cmd_verify(const std::string& dir, double tol = 3.0) {
  const Manifest m = read_manifest(dir);
  const auto defaults = SynthSpec{}.class_chroma;
  std::vector<std::array<double, 2>> chroma(defaults.begin(), defaults.begin() + m.spec.n_classes);
  std::vector<std::string> problems;
  const auto corpus = load_corpus(dir, m);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus[i];
    if (s.lab.width != m.spec.size || s.lab.height != m.spec.size) problems.push_back(m.entries[i].rgb + ": wrong size");
    bool labels_ok = true;
    for (int v : s.labels.labels) labels_ok = labels_ok && v >= 0 && v < m.spec.n_classes;
    if (!labels_ok) {
      problems.push_back(m.entries[i].label + ": label out of range");
      continue;
    }
    if (!chroma_matches_labels(s.lab, s.labels, chroma, tol))
      problems.push_back(m.entries[i].rgb + ": chroma inconsistent with labels");
  }
  return problems;
}

// ---------------------------------------------------------------- train

struct TrainCommandResult {
  TrainReport report;
  int q = 0;
};

inline std::string format_train_report(const TrainReport& r) {
  std::ostringstream os;
  char buf[128];
  os << "epoch colorization segmentation total\n";
  for (std::size_t e = 0; e < r.epochs.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu %.9g %.9g %.9g\n", e + 1, r.epochs[e].colorization,
                  r.epochs[e].segmentation, r.epochs[e].total);
    os << buf;
  }
  if (std::isfinite(r.heldout_ce)) {
    std::snprintf(buf, sizeof(buf), "heldout_ce %.9g\n", r.heldout_ce);
    os << buf;
  }
  if (r.diverged) os << "diverged\n";
  return os.str();
}

// Trains on the first n - holdout corpus entries; the rest are held out.
inline TrainCommandResult cmd_train(const RunConfig& cfg, const std::string& corpus_dir, const std::string& out_dir,
                                    int holdout = 0) {
  cfg.validate();
  const Manifest m = read_manifest(corpus_dir);
  const auto corpus = load_corpus(corpus_dir, m);
  require(holdout >= 0 && holdout < static_cast<int>(corpus.size()), "train: holdout must leave training samples");
  for (const auto& s : corpus)
    require(s.lab.width == cfg.input_size && s.lab.height == cfg.input_size,
            "train: corpus image size does not match input_size");

  const std::size_t n_train = corpus.size() - static_cast<std::size_t>(holdout);
  const ChromaGrid grid = build_grid(kGridStep, kGamutSamples, cfg.k_neighbors);
  std::vector<LabImage> train_labs;
  for (std::size_t i = 0; i < n_train; ++i) train_labs.push_back(corpus[i].lab);
  const SoftEncoding enc_params{cfg.k_neighbors, cfg.encode_sigma};
  const auto prior = empirical_prior(train_labs, grid, enc_params);

  ToyNetConfig nc;
  nc.input_size = cfg.input_size;
  nc.n_classes = m.spec.n_classes;
  nc.q = grid.q();
  nc.seed = cfg.seed;
  ToyNet net = ToyNet::build(nc);

  SoftEncoder enc(grid, enc_params);
  std::vector<TrainingSample> train_set, held;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto s = make_training_sample(corpus[i].lab, corpus[i].labels, enc, nc);
    (i < n_train ? train_set : held).push_back(std::move(s));
  }

  TrainOptions opt;
  opt.epochs = cfg.epochs;
  opt.lr = cfg.lr;
  opt.loss_weights = {cfg.lambda_c, cfg.lambda_s};
  opt.rebalance = rebalance_weights(prior, cfg.mix_lambda);
  opt.shuffle_seed = cfg.seed;
  TrainCommandResult result{train(net, train_set, opt, held.empty() ? nullptr : &held), grid.q()};

  save_checkpoint(out_dir, net, grid);
  {
    std::ofstream os(fs::path(out_dir) / "report.txt", std::ios::binary);
    require(static_cast<bool>(os), "cannot write training report");
    os << format_train_report(result.report);
  }
  {
    std::ofstream os(fs::path(out_dir) / "run_config.txt", std::ios::binary);
    os << cfg.to_string();
  }
  require(!result.report.diverged, "train: loss became non-finite (report written to " + out_dir + ")");
  return result;
}

// ---------------------------------------------------------------- colorize

struct ColorizeOptions {
  bool use_jbu = true;
  DecodeMode mode = DecodeMode::kAnnealed;
  double temperature = 0.38;
  BilateralParams bilateral{};
};

// Grayscale PNG in, color PNG of the same size out. Color input is reduced to
// its lightness with a warning on `diag`.
inline void cmd_colorize(const std::string& model_dir, const std::string& in_png, const std::string& out_png,
                         const ColorizeOptions& opt, std::ostream& diag = std::cerr) {
  const Checkpoint ck = load_checkpoint(model_dir);
  const RgbImage in = read_png_rgb(in_png);
  if (!is_gray(in)) diag << "warning: '" << in_png << "' is not grayscale; using its luminance\n";
  const Plane lightness = lightness_of(in);
  InferOptions io;
  io.mode = opt.mode;
  io.temperature = opt.temperature;
  io.bilateral = opt.bilateral;
  io.use_jbu = opt.use_jbu;
  write_png(out_png, lab_to_rgb(infer_color(ck.net, lightness, ck.grid, io)));
}

// ---------------------------------------------------------------- eval

inline std::string cmd_eval_psnr(const std::string& pred_png, const std::string& ref_png) {
  return format_report(psnr(read_png_rgb(pred_png), read_png_rgb(ref_png)));
}

inline std::string cmd_eval_miou(const std::string& pred_labels, const std::string& ref_labels, int n_classes) {
  return format_report(
      mean_iou(gray_to_labels(read_png_gray(pred_labels)), gray_to_labels(read_png_gray(ref_labels)), n_classes));
}

// ---------------------------------------------------------------- filter / upsample

inline bool has_extension(const std::string& path, const std::string& ext) {
  return fs::path(path).extension() == ext;
}

// Chroma from a CFT1 (2,H,W) tensor or from the ab planes of a PNG.
inline ChromaPlanes load_chroma(const std::string& path) {
  if (has_extension(path, ".png")) return split_channels(rgb_to_lab(read_png_rgb(path))).second;
  return tensor_to_chroma(read_tensor(path));
}

inline GuideImage load_guide(const std::string& path) { return GuideImage{lightness_of(read_png_rgb(path))}; }

// .png output merges the chroma with the guide lightness; anything else is
// written as a CFT1 tensor.
inline void store_chroma(const std::string& path, const ChromaPlanes& chroma, const GuideImage& guide) {
  if (has_extension(path, ".png")) {
    write_png(path, lab_to_rgb(merge_channels(guide.lightness, chroma)));
  } else {
    write_tensor(path, chroma_to_tensor(chroma));
  }
}

inline void cmd_filter(const std::string& chroma_path, const std::string& guide_png, const BilateralParams& params,
                       const std::string& out_path) {
  const GuideImage guide = load_guide(guide_png);
  store_chroma(out_path, joint_bilateral_filter(load_chroma(chroma_path), guide, params), guide);
}

inline void cmd_upsample(const std::string& chroma_path, const std::string& guide_png, const BilateralParams& params,
                         const std::string& out_path) {
  const GuideImage guide = load_guide(guide_png);
  store_chroma(out_path, joint_bilateral_upsample(load_chroma(chroma_path), guide, params), guide);
}

// ---------------------------------------------------------------- grid

inline ChromaGrid cmd_grid(double step, int samples, int support_k, const std::string& out_path) {
  const ChromaGrid grid = build_grid(step, samples, support_k);
  save_grid(out_path, grid);
  return grid;
}

}  // namespace semcolor::cli
