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


#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "semcolor/commands.hpp"

namespace {

void add_bilateral_options(CLI::App* cmd, semcolor::BilateralParams& p) {
  cmd->add_option("--sigma-s", p.sigma_s, "spatial sigma in low-res pixels")->capture_default_str();
  cmd->add_option("--sigma-r", p.sigma_r, "range sigma in guide intensity units")->capture_default_str();
  cmd->add_option("--radius", p.radius, "window radius; 0 picks ceil(3*sigma_s)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = semcolor::cli;
  CLI::App app{"semcolor: semantic-aware colorization toolkit"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "seed for corpus generation and training");

  // synth
  semcolor::SynthSpec spec;
  std::string synth_out;
  bool no_overlap = false;
  auto* synth = app.add_subcommand("synth", "generate a labelled synthetic corpus");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("-n,--count", spec.n_images, "number of images")->capture_default_str();
  synth->add_option("--size", spec.size, "image side in pixels")->capture_default_str();
  synth->add_option("--classes", spec.n_classes, "number of classes (2..4)")->capture_default_str();
  synth->add_flag("--no-overlap", no_overlap, "give each class its own lightness band");

  // verify
  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "check a corpus against its label/chroma invariant");
  verify->add_option("--corpus", verify_dir, "corpus directory")->required();

  // train
  std::string train_corpus, train_out, train_config;
  std::vector<std::string> overrides;
  int holdout = 0;
  auto* train = app.add_subcommand("train", "train a model on a corpus");
  train->add_option("--corpus", train_corpus, "corpus directory")->required();
  train->add_option("--out", train_out, "checkpoint directory")->required();
  train->add_option("--config", train_config, "run configuration file (key = value)");
  train->add_option("--set", overrides, "override one configuration key, key=value");
  train->add_option("--holdout", holdout, "hold out the last N corpus images for evaluation")->capture_default_str();

  // colorize
  std::string model_dir, in_png, out_png, decode_name = "annealed";
  cli::ColorizeOptions color_opt;
  auto* colorize = app.add_subcommand("colorize", "colorize a grayscale image");
  colorize->add_option("--model", model_dir, "checkpoint directory")->required();
  colorize->add_option("--in", in_png, "input PNG")->required();
  colorize->add_option("--out", out_png, "output PNG")->required();
  colorize->add_flag("--jbu,!--no-jbu", color_opt.use_jbu, "joint bilateral upsampling (default on)");
  colorize->add_option("--decode", decode_name, "mode, mean or annealed")->capture_default_str();
  colorize->add_option("--temperature", color_opt.temperature, "annealed-mean temperature")->capture_default_str();
  add_bilateral_options(colorize, color_opt.bilateral);

  // eval
  std::string eval_metric, eval_pred, eval_ref;
  int eval_classes = 0;
  auto* eval = app.add_subcommand("eval", "compare a prediction with a reference");
  eval->add_option("metric", eval_metric, "psnr or miou")->required()->check(CLI::IsMember({"psnr", "miou"}));
  eval->add_option("prediction", eval_pred, "predicted PNG")->required();
  eval->add_option("reference", eval_ref, "reference PNG")->required();
  eval->add_option("--classes", eval_classes, "number of classes (miou)");

  // filter / upsample
  std::string chroma_path, guide_path, bf_out;
  semcolor::BilateralParams bf;
  auto* filter = app.add_subcommand("filter", "joint bilateral filter at guide resolution");
  auto* upsample = app.add_subcommand("upsample", "joint bilateral upsampling to guide resolution");
  for (auto* cmd : {filter, upsample}) {
    cmd->add_option("--chroma", chroma_path, "chroma as CFT1 (2,H,W) tensor or color PNG")->required();
    cmd->add_option("--guide", guide_path, "guide PNG")->required();
    cmd->add_option("--out", bf_out, "output: .png merges with the guide, otherwise CFT1")->required();
    add_bilateral_options(cmd, bf);
  }

  // grid
  std::string grid_out;
  double grid_step = cli::kGridStep;
  int grid_samples = cli::kGamutSamples, grid_k = 5;
  auto* grid = app.add_subcommand("grid", "build the quantized ab grid and write it as text");
  grid->add_option("--out", grid_out, "output file")->required();
  grid->add_option("--step", grid_step, "lattice step")->capture_default_str();
  grid->add_option("--samples", grid_samples, "sRGB samples per channel")->capture_default_str();
  grid->add_option("--support-k", grid_k, "neighbors per sample that mark a bin in gamut")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      if (seed) spec.seed = *seed;
      spec.lightness_overlap = !no_overlap;
      if (spec.n_classes >= 1 && spec.n_classes <= static_cast<int>(spec.class_chroma.size()))
        spec.class_chroma.resize(static_cast<std::size_t>(spec.n_classes));
      cli::cmd_synth(spec, synth_out);
    } else if (verify->parsed()) {
      const auto problems = cli::cmd_verify(verify_dir);
      for (const auto& p : problems) std::cerr << p << "\n";
      if (!problems.empty()) {
        std::cerr << "error: " << problems.size() << " invariant violation(s)\n";
        return 1;
      }
      std::cout << "ok\n";
    } else if (train->parsed()) {
      semcolor::RunConfig cfg;
      if (!train_config.empty()) cfg = semcolor::load_run_config(train_config);
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        semcolor::require(eq != std::string::npos, "--set expects key=value, got '" + kv + "'");
        cfg.set(semcolor::detail::trim(kv.substr(0, eq)), semcolor::detail::trim(kv.substr(eq + 1)));
      }
      if (seed) cfg.seed = *seed;
      const auto result = cli::cmd_train(cfg, train_corpus, train_out, holdout);
      std::cout << cli::format_train_report(result.report);
    } else if (colorize->parsed()) {
      color_opt.mode = semcolor::parse_decode_mode(decode_name);
      cli::cmd_colorize(model_dir, in_png, out_png, color_opt);
    } else if (eval->parsed()) {
      if (eval_metric == "psnr") {
        std::cout << cli::cmd_eval_psnr(eval_pred, eval_ref);
      } else {
        semcolor::require(eval_classes > 0, "miou needs --classes");
        std::cout << cli::cmd_eval_miou(eval_pred, eval_ref, eval_classes);
      }
    } else if (filter->parsed()) {
      cli::cmd_filter(chroma_path, guide_path, bf, bf_out);
    } else if (upsample->parsed()) {
      cli::cmd_upsample(chroma_path, guide_path, bf, bf_out);
    } else if (grid->parsed()) {
      const auto g = cli::cmd_grid(grid_step, grid_samples, grid_k, grid_out);
      std::cout << "q " << g.q() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
