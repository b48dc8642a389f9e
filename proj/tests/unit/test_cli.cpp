// Copyright 2026 The socrec Authors
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "socrec/cli.hpp"
#include "socrec/metrics.hpp"

namespace socrec::cli
{
namespace
{

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path & p, const std::string & text)
{
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::vector<std::string> lines(const fs::path & p)
{
  std::istringstream in(slurp(p));
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct Outcome
{
  int code = 0;
  std::string out, err;
};

Outcome invoke(std::initializer_list<std::string> args)
{
  std::vector<std::string> storage{"socrec"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto & s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  Outcome r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
           ("socrec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string & name) const { return (dir_ / name).string(); }

  /// A 20-scene synthetic set plus a small model config.
  void make_toy()
  {
    spit(path("synth.txt"), "n_scenes = 20\nagents_min = 2\nagents_max = 3\n");
    ASSERT_EQ(invoke({"synth", "--config", path("synth.txt"), "--out", path("toy.txt"), "--seed", "4"}).code, 0);
    spit(path("train.txt"),
         "d_m = 16\nd_ff = 32\nd_z = 8\nn_atthead = 2\ndropout = 0\nN_T = 2\nN_Int = 2\nbatch_size = 4\n"
         "n_epochs = 5\nseed = 11\n");
  }

  fs::path dir_;
};

TEST_F(Cli, SynthWritesHeaderAndIsReproducible)
{
  spit(path("synth.txt"), "n_scenes = 50\n");
  const Outcome a = invoke({"synth", "--config", path("synth.txt"), "--out", path("a.txt"), "--seed", "9"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("wrote 50 scenes"), std::string::npos) << a.out;
  ASSERT_EQ(invoke({"synth", "--config", path("synth.txt"), "--out", path("b.txt"), "--seed", "9"}).code, 0);
  const std::string text = slurp(path("a.txt"));
  EXPECT_EQ(text.rfind("# socrec-dataset v1", 0), 0u);
  EXPECT_EQ(text, slurp(path("b.txt")));
  std::size_t windows = 0;
  for (const auto & l : lines(path("a.txt"))) windows += l.rfind("# scene ", 0) == 0;
  EXPECT_EQ(windows, 50u);
}

TEST_F(Cli, SynthRejectsUnknownKey)
{
  spit(path("bad.txt"), "n_scenes = 5\nwobble = 3\n");
  const Outcome r = invoke({"synth", "--config", path("bad.txt"), "--out", path("x.txt")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("wobble"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("x.txt")));
}

TEST_F(Cli, TrainWritesArtifacts)
{
  make_toy();
  const Outcome r = invoke({"train", "--config", path("train.txt"), "--data", path("toy.txt"), "--out", path("run"),
                        "--strategy", "none"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("run/checkpoint.bin")));
  EXPECT_TRUE(fs::exists(path("run/config.txt")));
  const auto log = lines(path("run/train_log.csv"));
  ASSERT_EQ(log.size(), 6u);  // header + 5 epochs
  EXPECT_EQ(log[1].rfind("1,", 0), 0u);
  EXPECT_EQ(log[5].rfind("5,", 0), 0u);
  const json summary = json::parse(slurp(path("run/summary.json")));
  EXPECT_EQ(summary.at("strategy"), "none");
  EXPECT_TRUE(summary.at("refresh_epochs").empty());
  EXPECT_EQ(summary.at("epochs"), 5);
  EXPECT_EQ(summary.at("seed"), 11);
  EXPECT_TRUE(summary.at("final_metrics").is_null());
}

TEST_F(Cli, TrainWithCurriculumWritesPools)
{
  make_toy();
  const Outcome r = invoke({"train", "--config", path("train.txt"), "--data", path("toy.txt"), "--out", path("run"),
                        "--strategy", "difficulty", "--holdout", path("toy.txt"), "--k", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json summary = json::parse(slurp(path("run/summary.json")));
  EXPECT_EQ(summary.at("refresh_epochs"), json::array({2, 4}));
  EXPECT_TRUE(fs::exists(path("run/pool_epoch2.txt")));
  EXPECT_TRUE(fs::exists(path("run/pool_epoch4.txt")));
  const auto & m = summary.at("final_metrics").at("datasets").at(0);
  EXPECT_EQ(m.at("k"), 3);
}

TEST_F(Cli, ResumeContinuesEpochNumbering)
{
  make_toy();
  ASSERT_EQ(invoke({"train", "--config", path("train.txt"), "--data", path("toy.txt"), "--out", path("full"),
                    "--epochs", "5"}).code, 0);
  ASSERT_EQ(invoke({"train", "--config", path("train.txt"), "--data", path("toy.txt"), "--out", path("half"),
                    "--epochs", "3"}).code, 0);
  const Outcome r = invoke({"train", "--resume", path("half/checkpoint.bin"), "--out", path("rest"), "--epochs", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("resuming from epoch 3"), std::string::npos);
  const auto full = lines(path("full/train_log.csv"));
  const auto rest = lines(path("rest/train_log.csv"));
  ASSERT_EQ(full.size(), 6u);
  ASSERT_EQ(rest.size(), 6u);
  for (std::size_t i = 1; i < full.size(); ++i) {
    std::istringstream a(full[i]), b(rest[i]);
    std::string fa, fb;
    int col = 0;
    while (std::getline(a, fa, ',') && std::getline(b, fb, ',')) {
      if (col++ == 0) {
        EXPECT_EQ(fa, fb);
      } else {
        EXPECT_NEAR(std::stod(fa), std::stod(fb), 1e-6) << "row " << i << " col " << col;
      }
    }
  }
}

TEST_F(Cli, ResumeRejectsDifferentArchitecture)
{
  make_toy();
  ASSERT_EQ(invoke({"train", "--config", path("train.txt"), "--data", path("toy.txt"), "--out", path("a"),
                    "--epochs", "1", "--strategy", "none"}).code, 0);
  spit(path("wide.txt"), slurp(path("train.txt")) + "d_m = 32\n");
  const Outcome r = invoke({"train", "--config", path("wide.txt"), "--data", path("toy.txt"), "--out", path("b"),
                        "--resume", path("a/checkpoint.bin"), "--strategy", "none"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("architecture"), std::string::npos) << r.err;
}

TEST_F(Cli, EvalWritesReportAndDump)
{
  make_toy();
  ASSERT_EQ(invoke({"train", "--config", path("train.txt"), "--data", path("toy.txt"), "--out", path("run"),
                    "--epochs", "1", "--strategy", "none"}).code, 0);
  const Outcome r = invoke({"eval", "--checkpoint", path("run/checkpoint.bin"), "--holdout", path("toy.txt"), "--out",
                        path("ev"), "--k", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const metrics::MetricReport report = metrics::report_from_json(slurp(path("ev/metrics.json")));
  ASSERT_EQ(report.datasets.size(), 1u);
  const auto & m = report.datasets[0];
  EXPECT_EQ(m.dataset, "toy");
  EXPECT_EQ(m.k, 4u);
  EXPECT_DOUBLE_EQ(m.epsilon_m, 0.1);
  EXPECT_EQ(m.seed, 11u);
  EXPECT_LE(m.sampled.ade_min, m.sampled.ade_mean);
  EXPECT_LE(m.sampled.fde_min, m.sampled.fde_mean);
  EXPECT_TRUE(m.sampled.kde_nll.has_value());
  EXPECT_EQ(m.sampled.scenes, 20u);

  const auto csv = lines(path("ev/metrics.csv"));
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[0], metrics::kMetricCsvHeader);
  const auto dump = lines(path("ev/predictions_toy.csv"));
  EXPECT_EQ(dump[0], "scene_id,ped_id,sample_k,t,x,y");
  EXPECT_EQ(dump.size(), 1 + 4 * 12 * m.sampled.pedestrians);
}

TEST_F(Cli, EvalSingleSampleHasNoKde)
{
  make_toy();
  ASSERT_EQ(invoke({"train", "--config", path("train.txt"), "--data", path("toy.txt"), "--out", path("run"),
                    "--epochs", "1", "--strategy", "none"}).code, 0);
  ASSERT_EQ(invoke({"eval", "--checkpoint", path("run/checkpoint.bin"), "--holdout", path("toy.txt"), "--out",
                    path("ev"), "--k", "1"}).code, 0);
  const json j = json::parse(slurp(path("ev/metrics.json")));
  const auto & d = j.at("datasets").at(0);
  EXPECT_TRUE(d.at("sampled").at("kde_nll").is_null());
  EXPECT_EQ(d.at("sampled").at("ade_min"), d.at("mode_only").at("ade_min"));
}

TEST_F(Cli, EvalRejectsDamagedCheckpoint)
{
  make_toy();
  spit(path("junk.bin"), "not a checkpoint");
  const Outcome r = invoke({"eval", "--checkpoint", path("junk.bin"), "--holdout", path("toy.txt"), "--out", path("ev")});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, HelpAndBadFlags)
{
  const Outcome help = invoke({"train", "--help"});
  EXPECT_EQ(help.code, 0);
  for (const char * flag : {"--config", "--data", "--holdout", "--out", "--seed", "--strategy", "--resume"}) {
    EXPECT_NE(help.out.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(invoke({"train", "--frobnicate"}).code, 0);
  EXPECT_NE(invoke({"launch"}).code, 0);
  EXPECT_NE(invoke({"train", "--data", path("missing.txt"), "--out", path("o")}).code, 0);
}

TEST_F(Cli, BinaryExitCodes)
{
  const std::string bin = SOCREC_CLI_PATH;
  spit(path("bad.txt"), "colour = red\n");
  const std::string quiet = " > " + path("log.txt") + " 2>&1";
  EXPECT_EQ(std::system((bin + " synth --out " + path("ok.txt") + " --seed 1" + quiet).c_str()), 0);
  EXPECT_NE(std::system((bin + " synth --config " + path("bad.txt") + " --out " + path("no.txt") + quiet).c_str()), 0);
  EXPECT_NE(slurp(path("log.txt")).find("colour"), std::string::npos);
}

}  // namespace
}  // namespace socrec::cli
