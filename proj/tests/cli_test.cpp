// Copyright 2026 The bosehub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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
#include <json.hpp>
#include <sstream>

#include "commands.hpp"

namespace fs = std::filesystem;
using bosehub::cli::run;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("BOSEHUB_TEST_TMP");
  fs::path dir = fs::path(env != nullptr ? env : fs::temp_directory_path().string()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, ExactPrintsGroundEnergy) {
  const fs::path dir = scratch("exact_u2");
  const Outcome r = invoke({"--out", dir.string(), "exact", "--U", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("E0 = -7.54752"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir / "exact_ground_state.csv"));
  EXPECT_TRUE(fs::exists(dir / "exact_matrix.coo"));
  const auto j = nlohmann::json::parse(slurp(dir / "exact_summary.json"));
  EXPECT_EQ(j["command"], "exact");
  EXPECT_NEAR(j["results"]["energy"].get<double>(), -7.54752, 1e-5);
  EXPECT_EQ(j["results"]["dimension"], 252);
}

TEST(Cli, ExactDeformedReduced) {
  const fs::path dir = scratch("exact_phi");
  const Outcome r = invoke(
      {"--out", dir.string(), "exact", "--U", "5", "--phi", "1.5707963", "--basis", "reduced"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("E0 = -4.659"), std::string::npos) << r.out;
  const auto j = nlohmann::json::parse(slurp(dir / "exact_summary.json"));
  EXPECT_EQ(j["results"]["convention_study"].size(), 3u);
}

TEST(Cli, ExactZeroHopping) {
  const fs::path dir = scratch("exact_t0");
  const Outcome r = invoke({"--out", dir.string(), "exact", "--t", "0", "--U", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("E0 = 0.00000"), std::string::npos) << r.out;
}

TEST(Cli, ExactCheckPasses) {
  const fs::path dir = scratch("exact_check");
  const Outcome r = invoke({"--out", dir.string(), "--check", "exact", "--U", "8"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(Cli, RerunIsByteIdentical) {
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  for (const auto& dir : {a, b}) {
    const Outcome r = invoke({"--out", dir.string(), "--seed", "7", "--threads", "2", "train",
                              "--ansatz", "compressed", "--layers", "2", "--steps", "20", "--U",
                              "5"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* f : {"train_checkpoint.json", "train_trace.csv", "train_summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Cli, TrainWritesTraceAndCheckpoint) {
  const fs::path dir = scratch("train_nn");
  const Outcome r = invoke({"--out", dir.string(), "--check", "train", "--ansatz", "nn",
                            "--hidden", "8,4", "--steps", "30", "--U", "5"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("check gradient: PASS"), std::string::npos) << r.out;
  const std::string trace = slurp(dir / "train_trace.csv");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 31);
  const auto j = nlohmann::json::parse(slurp(dir / "train_checkpoint.json"));
  EXPECT_EQ(j["format"], "bosehub.checkpoint");
  EXPECT_EQ(j["model"]["U"], 5.0);
}

TEST(Cli, StudiesConsumeCheckpoint) {
  const fs::path dir = scratch("studies");
  ASSERT_EQ(invoke({"--out", dir.string(), "train", "--ansatz", "compressed", "--layers", "2",
                    "--steps", "30", "--U", "5"})
                .code,
            0);
  const std::string ckpt = (dir / "train_checkpoint.json").string();

  Outcome r = invoke({"--out", dir.string(), "study", "shots", "--checkpoint", ckpt, "--grid",
                      "100,1000", "--trials", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string shots = slurp(dir / "study_shots.csv");
  EXPECT_EQ(shots.rfind("shots,median_frac_dev,std\n", 0), 0u);
  EXPECT_EQ(std::count(shots.begin(), shots.end(), '\n'), 3);

  r = invoke({"--out", dir.string(), "study", "noise", "--checkpoint", ckpt, "--U", "5",
              "--trials", "3", "--shots", "2000", "--calibration-shots", "2000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string noise = slurp(dir / "study_noise.csv");
  EXPECT_EQ(noise.rfind("run,mode,U,energy,ideal_energy\n", 0), 0u);
  EXPECT_EQ(std::count(noise.begin(), noise.end(), '\n'), 1 + 3 * 4);

  r = invoke({"--out", dir.string(), "study", "noise", "--checkpoint", ckpt, "--U", "2",
              "--trials", "1"});
  EXPECT_EQ(r.code, bosehub::cli::kFailure);
  EXPECT_NE(r.err.find("U="), std::string::npos);

  r = invoke({"--out", dir.string(), "noise-run", "--checkpoint", ckpt, "--shots", "2000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "noise_calibration.csv"));
  EXPECT_TRUE(fs::exists(dir / "noise_energies.csv"));
}

TEST(Cli, StudyRejectsNetworkCheckpoint) {
  const fs::path dir = scratch("nn_ckpt");
  ASSERT_EQ(invoke({"--out", dir.string(), "train", "--ansatz", "nn", "--hidden", "4",
                    "--steps", "2"})
                .code,
            0);
  const Outcome r = invoke({"--out", dir.string(), "study", "shots", "--checkpoint",
                            (dir / "train_checkpoint.json").string()});
  EXPECT_EQ(r.code, bosehub::cli::kFailure);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, StudyLayersWritesTable) {
  const fs::path dir = scratch("layers");
  const Outcome r = invoke({"--out", dir.string(), "study", "layers", "--layers", "1,2",
                            "--steps", "10", "--U", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "study_layers.csv");
  EXPECT_EQ(csv.rfind("layers,energy\n1,", 0), 0u);
}

TEST(Cli, MissingCheckpointFails) {
  const fs::path dir = scratch("missing");
  const Outcome r = invoke({"--out", dir.string(), "study", "shots", "--checkpoint",
                            (dir / "nope.json").string()});
  EXPECT_EQ(r.code, bosehub::cli::kFailure);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST(Cli, MalformedCheckpointFails) {
  const fs::path dir = scratch("malformed");
  std::ofstream(dir / "bad.json") << "{\"format\": \"bosehub.checkpoint\", \"version\": 1}";
  const Outcome r = invoke({"--out", dir.string(), "noise-run", "--checkpoint",
                            (dir / "bad.json").string()});
  EXPECT_EQ(r.code, bosehub::cli::kFailure);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, bosehub::cli::kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, bosehub::cli::kUsage);
  EXPECT_EQ(invoke({"exact", "--basis", "sideways"}).code, bosehub::cli::kUsage);
  EXPECT_EQ(invoke({"train"}).code, bosehub::cli::kUsage);
  EXPECT_EQ(invoke({"exact", "--U", "abc"}).code, bosehub::cli::kUsage);
  EXPECT_EQ(invoke({"--help"}).code, bosehub::cli::kOk);
}

TEST(Cli, InvalidModelIsFailure) {
  const fs::path dir = scratch("invalid");
  const Outcome r = invoke({"--out", dir.string(), "exact", "--sites", "0"});
  EXPECT_EQ(r.code, bosehub::cli::kFailure);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, ConfigFileSuppliesOptions) {
  const fs::path dir = scratch("config");
  const fs::path cfg = dir / "run.toml";
  std::ofstream(cfg) << "[exact]\nU = 8\n";
  const Outcome r = invoke({"--config", cfg.string(), "--out", dir.string(), "exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("E0 = -4.37439"), std::string::npos) << r.out;
}

TEST(Cli, BasisCounts) {
  const fs::path dir = scratch("basis");
  const Outcome r = invoke({"--out", dir.string(), "basis"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("252"), std::string::npos);
  EXPECT_NE(r.out.find("42"), std::string::npos);
  EXPECT_NE(r.out.find("26"), std::string::npos);
}

TEST(Cli, VersionFlag) {
  const Outcome r = invoke({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(bosehub::cli::version()), std::string::npos);
}
