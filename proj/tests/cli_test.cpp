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


#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "semcolor/commands.hpp"

namespace semcolor::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("semcolor_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(SEMCOLOR_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const fs::path kData = SEMCOLOR_TEST_DATA;

SynthSpec small_spec(int n) {
  SynthSpec s;
  s.n_images = n;
  s.seed = 5;
  return s;
}

TEST(Synth, WritesManifestAndIsReproducible) {
  const auto a = scratch_dir("synth_a"), b = scratch_dir("synth_b");
  cmd_synth(small_spec(6), a.string());
  cmd_synth(small_spec(6), b.string());
  const std::string manifest = slurp(a / "manifest.txt");
  EXPECT_EQ(std::count(manifest.begin(), manifest.end(), '\n'), 7);
  EXPECT_NE(manifest.find("seed=5"), std::string::npos);
  for (const auto& e : fs::directory_iterator(a)) EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename()));
  EXPECT_TRUE(cmd_verify(a.string()).empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Synth, VerifyFlagsTamperedCorpus) {
  const auto dir = scratch_dir("tamper");
  cmd_synth(small_spec(3), dir.string());
  GrayImage labels = read_png_gray((dir / "0001_label.png").string());
  for (auto& v : labels.data) v = static_cast<std::uint8_t>(v == 0 ? 1 : 0);
  write_png((dir / "0001_label.png").string(), labels);
  EXPECT_EQ(cmd_verify(dir.string()).size(), 1u);
  fs::remove(dir / "0002_rgb.png");
  EXPECT_THROW(cmd_verify(dir.string()), Error);
  fs::remove_all(dir);
}

TEST(Train, MissingManifestRejected) {
  const auto dir = scratch_dir("nomanifest");
  EXPECT_THROW(cmd_train(RunConfig{}, dir.string(), (dir / "model").string()), Error);
  fs::remove_all(dir);
}

class TrainedModel : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = scratch_dir("model");
    cmd_synth(small_spec(12), (root_ / "corpus").string());
    RunConfig cfg;
    cfg.epochs = 2;
    cfg.lr = 1e-3;
    result_ = cmd_train(cfg, (root_ / "corpus").string(), (root_ / "model").string(), 2);
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static fs::path root_;
  static TrainCommandResult result_;
};

fs::path TrainedModel::root_;
TrainCommandResult TrainedModel::result_;

TEST_F(TrainedModel, ReportHasOneRowPerEpoch) {
  const std::string report = slurp(root_ / "model" / "report.txt");
  std::istringstream is(report);
  std::string line;
  int rows = 0;
  std::getline(is, line);
  EXPECT_EQ(line, "epoch colorization segmentation total");
  while (std::getline(is, line))
    if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) ++rows;
  EXPECT_EQ(rows, 2);
  EXPECT_NE(report.find("heldout_ce"), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "model" / "grid.txt"));
  EXPECT_TRUE(fs::exists(root_ / "model" / "config.txt"));
}

TEST_F(TrainedModel, ColorizeKeepsSizeAndLightness) {
  const auto in = root_ / "gray.png";
  GrayImage g(48, 40);
  for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = static_cast<std::uint8_t>(40 + (i * 7) % 150);
  write_png(in.string(), g);
  ColorizeOptions jbu, plain;
  plain.use_jbu = false;
  cmd_colorize((root_ / "model").string(), in.string(), (root_ / "jbu.png").string(), jbu);
  cmd_colorize((root_ / "model").string(), in.string(), (root_ / "plain.png").string(), plain);
  const RgbImage a = read_png_rgb((root_ / "jbu.png").string()), b = read_png_rgb((root_ / "plain.png").string());
  EXPECT_EQ(a.width, 48);
  EXPECT_EQ(a.height, 40);
  const Plane la = lightness_of(a), lb = lightness_of(b), l0 = lightness_of(gray_to_rgb(g));
  for (std::size_t i = 0; i < l0.values.size(); ++i) {
    EXPECT_NEAR(la.values[i], l0.values[i], 1.5);
    EXPECT_NEAR(lb.values[i], l0.values[i], 1.5);
  }
}

TEST_F(TrainedModel, ColorInputWarns) {
  const auto in = root_ / "color.png";
  RgbImage img(32, 32);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<std::uint8_t>(i % 3 == 0 ? 200 : 30);
  write_png(in.string(), img);
  std::ostringstream diag;
  cmd_colorize((root_ / "model").string(), in.string(), (root_ / "out.png").string(), {}, diag);
  EXPECT_NE(diag.str().find("warning"), std::string::npos);
}

TEST_F(TrainedModel, CommandLineSubcommands) {
  const auto model = root_ / "model";
  EXPECT_EQ(run("colorize --model " + model.string() + " --in " + (root_ / "corpus" / "0000_rgb.png").string() +
                " --out " + (root_ / "cli.png").string() + " --no-jbu --decode mode"),
            0);
  EXPECT_EQ(run("eval psnr " + (root_ / "cli.png").string() + " " + (root_ / "corpus" / "0000_rgb.png").string()), 0);
  EXPECT_EQ(run("eval miou " + (root_ / "corpus" / "0000_label.png").string() + " " +
                (root_ / "corpus" / "0001_label.png").string() + " --classes 4"),
            0);
  EXPECT_NE(run("colorize --model " + (root_ / "nope").string() + " --in x.png --out y.png"), 0);
  EXPECT_NE(run("colorize --model " + model.string() + " --in x.png --out y.png --decode median"), 0);
  EXPECT_NE(run("train --corpus " + (root_ / "corpus").string() + " --out " + (root_ / "m2").string() +
                " --set epochs=x"),
            0);
}

TEST(Eval, PsnrAndMiouReports) {
  const auto dir = scratch_dir("eval");
  RgbImage a(4, 4), b(4, 4);
  std::fill(b.data.begin(), b.data.end(), 255);
  write_png((dir / "a.png").string(), a);
  write_png((dir / "b.png").string(), b);
  EXPECT_EQ(cmd_eval_psnr((dir / "a.png").string(), (dir / "b.png").string()), "psnr 0.000000\n");
  EXPECT_EQ(cmd_eval_psnr((dir / "a.png").string(), (dir / "a.png").string()), "psnr inf\n");
  GrayImage y(2, 2);
  y.data = {0, 1, 1, 0};
  write_png((dir / "y.png").string(), y);
  EXPECT_EQ(cmd_eval_miou((dir / "y.png").string(), (dir / "y.png").string(), 2),
            "iou 0 1.000000\niou 1 1.000000\nmiou 1.000000\n");
  write_png((dir / "c.png").string(), RgbImage(4, 5));
  EXPECT_THROW(cmd_eval_psnr((dir / "a.png").string(), (dir / "c.png").string()), Error);
  fs::remove_all(dir);
}

TEST(Upsample, MatchesCommittedOracleOutput) {
  const auto dir = scratch_dir("golden");
  cmd_upsample((kData / "upsample_chroma.cft").string(), (kData / "upsample_guide.png").string(), {},
               (dir / "out.cft").string());
  const TensorFile got = read_tensor((dir / "out.cft").string());
  const TensorFile want = read_tensor((kData / "upsample_golden.cft").string());
  ASSERT_EQ(got.dims, want.dims);
  for (std::size_t i = 0; i < got.values.size(); ++i)
    EXPECT_NEAR(got.values[i], want.values[i], 1e-5 * (1 + std::abs(want.values[i])));
  fs::remove_all(dir);
}

TEST(Filter, ScaleOneCommandsAgreeAndConstantChromaSurvives) {
  const auto dir = scratch_dir("filter");
  GrayImage guide(16, 12);
  for (std::size_t i = 0; i < guide.data.size(); ++i) guide.data[i] = static_cast<std::uint8_t>((i * 37) % 256);
  write_png((dir / "guide.png").string(), guide);
  ChromaPlanes c(16, 12);
  for (std::size_t i = 0; i < c.a.values.size(); ++i) {
    c.a.values[i] = static_cast<double>(i % 7) * 5 - 15;
    c.b.values[i] = 12.0;
  }
  write_tensor((dir / "c.cft").string(), chroma_to_tensor(c));
  const std::string g = (dir / "guide.png").string();
  cmd_filter((dir / "c.cft").string(), g, {}, (dir / "f.cft").string());
  cmd_upsample((dir / "c.cft").string(), g, {}, (dir / "u.cft").string());
  EXPECT_EQ(slurp(dir / "f.cft"), slurp(dir / "u.cft"));
  for (float v : tensor_to_chroma(read_tensor((dir / "f.cft").string())).b.values) EXPECT_NEAR(v, 12.0, 1e-5);

  EXPECT_EQ(run("filter --chroma " + (dir / "c.cft").string() + " --guide " + g + " --out " +
                (dir / "cli.png").string()),
            0);
  EXPECT_EQ(read_png_rgb((dir / "cli.png").string()).width, 16);
  EXPECT_NE(run("upsample --chroma " + (dir / "c.cft").string() + " --guide " + g + " --out " +
                (dir / "x.cft").string() + " --sigma-s -1"),
            0);
  write_png((dir / "small.png").string(), GrayImage(8, 8));
  EXPECT_THROW(cmd_upsample((dir / "c.cft").string(), (dir / "small.png").string(), {}, (dir / "y.cft").string()),
               Error);
  fs::remove_all(dir);
}

TEST(Grid, CommandWritesLoadableGrid) {
  const auto dir = scratch_dir("grid");
  const ChromaGrid g = cmd_grid(10, 18, 5, (dir / "grid.txt").string());
  EXPECT_EQ(load_grid((dir / "grid.txt").string()), g);
  EXPECT_EQ(run("grid --out " + (dir / "g2.txt").string()), 0);
  EXPECT_EQ(load_grid((dir / "g2.txt").string()), g);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace semcolor::cli
