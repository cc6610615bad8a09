// tests/unit/test_cli.cpp

// Copyright 2026 The camo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "../support/fixtures.hpp"
#include "camo/asr/model.hpp"
#include "camo/asr/train.hpp"
#include "camo/audio/wav_io.hpp"
#include "camo/cli/app.hpp"
#include "camo/cli/config.hpp"
#include "camo/core/digest.hpp"
#include "camo/core/error.hpp"
#include "camo/core/rng.hpp"
#include "camo/stream/plan.hpp"

namespace camo {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "camo");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kTinyAsr = R"({"conv1_channels":4,"conv2_channels":4,"hidden":16,"rnn_layers":1})";

// ---- config

TEST(Config, DefaultsAndOverrides) {
  RunConfig c;
  EXPECT_EQ(c.at("attack.m").get<double>(), 0.008);
  c.set("attack.m", "0.02");
  EXPECT_EQ(c.at("attack.m").get<double>(), 0.02);
  c.set("defense", "denoiser");
  EXPECT_EQ(c.at("defense").get<std::string>(), "denoiser");
  c.set("evaluate.attacks", R"(["none","uniform"])");
  EXPECT_EQ(c.at("evaluate.attacks").size(), 2u);
  EXPECT_THROW(c.set("attack.nope", "1"), UsageError);
  EXPECT_THROW(c.at("nope"), UsageError);
}

TEST(Config, FileMergesAndRejectsUnknownKeys) {
  fixture::TempDir dir("cfg");
  std::ofstream(dir.path / "ok.json") << R"({"attack": {"delta": 0.75}, "sweep": {"values": [0.1, 0.2]}})";
  auto c = RunConfig::load(dir.path / "ok.json");
  EXPECT_EQ(c.at("attack.delta").get<double>(), 0.75);
  EXPECT_EQ(c.at("attack.m").get<double>(), 0.008);
  EXPECT_EQ(c.at("sweep.values").size(), 2u);
  std::ofstream(dir.path / "bad.json") << R"({"attack": {"dleta": 0.75}})";
  EXPECT_THROW(RunConfig::load(dir.path / "bad.json"), UsageError);
  std::ofstream(dir.path / "broken.json") << "{";
  EXPECT_THROW(RunConfig::load(dir.path / "broken.json"), UsageError);
  EXPECT_THROW(RunConfig::load(dir.path / "missing.json"), UsageError);
}

TEST(Config, DigestTracksContent) {
  RunConfig a, b;
  EXPECT_EQ(a.digest(), b.digest());
  b.set("seed", "2");
  EXPECT_NE(a.digest(), b.digest());
}

TEST(RunDirTest, FreezeKeepsHistory) {
  fixture::TempDir dir("freeze");
  RunDir rd(dir.path / "run");
  RunConfig c;
  rd.freeze(c, "one");
  c.set("seed", "5");
  rd.freeze(c, "two");
  EXPECT_TRUE(fs::is_directory(rd.checkpoints()));
  EXPECT_TRUE(fs::is_directory(rd.reports()));
  EXPECT_TRUE(fs::is_directory(rd.logs()));
  std::ifstream now(rd.root / "config.frozen"), old(rd.root / "config.frozen.1");
  auto jn = nlohmann::json::parse(now), jo = nlohmann::json::parse(old);
  EXPECT_EQ(jn["_command"], "two");
  EXPECT_EQ(jn["seed"], 5);
  EXPECT_EQ(jo["_command"], "one");
  EXPECT_EQ(jn["_digest"], c.digest());
}

// ---- exit codes

TEST(CliExit, HelpIsSuccess) { EXPECT_EQ(run({"--help"}).code, kExitOk); }

TEST(CliExit, NoCommandIsUsageError) { EXPECT_EQ(run({}).code, kExitUsage); }

TEST(CliExit, UnknownOptionIsUsageError) { EXPECT_EQ(run({"evaluate", "--bogus"}).code, kExitUsage); }

TEST(CliExit, MissingManifestNamesThePath) {
  fixture::TempDir dir("nomanifest");
  auto r = run({"--run-dir", dir.path.string(), "train-asr"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find((dir.path / "data" / "manifest.jsonl").string()), std::string::npos) << r.err;
}

TEST(CliExit, UnknownConfigKeyIsUsageError) {
  fixture::TempDir dir("badkey");
  auto r = run({"--run-dir", dir.path.string(), "--set", "attack.bogus=1", "report"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("attack.bogus"), std::string::npos);
}

TEST(CliExit, WrongTypeIsUsageError) {
  fixture::TempDir dir("badtype");
  write_wav(dir.path / "x.wav", fixture::speechlike(1.0, 1));
  auto r = run({"--run-dir", dir.path.string(), "--set", "attack.m=\"loud\"", "attack-file",
                (dir.path / "x.wav").string(), "--attack", "uniform"});
  EXPECT_EQ(r.code, kExitUsage) << r.err;
}

TEST(CliExit, UnsupportedDeviceIsUsageError) {
  fixture::TempDir dir("device");
  ::setenv("CAMO_DEVICE", "cuda", 1);
  auto r = run({"--run-dir", dir.path.string(), "report"});
  ::unsetenv("CAMO_DEVICE");
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("CAMO_DEVICE"), std::string::npos);
}

TEST(CliExit, BadThreadCountIsUsageError) {
  fixture::TempDir dir("threads");
  ::setenv("CAMO_THREADS", "zero", 1);
  auto r = run({"--run-dir", dir.path.string(), "report"});
  ::unsetenv("CAMO_THREADS");
  EXPECT_EQ(r.code, kExitUsage);
}

TEST(CliExit, CorruptCheckpointIsRuntimeError) {
  fixture::TempDir dir("corrupt");
  ASSERT_EQ(run({"--run-dir", dir.path.string(), "--set", "synth.min_duration=2.6", "--set",
                 "synth.max_duration=3.0", "ingest", "--synthetic", "4"})
                .code,
            kExitOk);
  fs::create_directories(dir.path / "checkpoints");
  std::ofstream(dir.path / "checkpoints" / "asr.camo") << "garbage";
  auto r = run({"--run-dir", dir.path.string(), "evaluate", "--attack", "none"});
  EXPECT_EQ(r.code, kExitRuntime) << r.err;
}

TEST(CliExit, ExecutableReportsSameCodes) {
  fixture::TempDir dir("exe");
  const std::string exe = CAMO_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(exe + " --help"), 0);
  EXPECT_EQ(status(exe + " --run-dir " + dir.path.string() + " train-asr"), 2);
  EXPECT_EQ(status(exe + " --run-dir " + dir.path.string() + " attack-file " + (dir.path / "none.wav").string()), 2);
}

TEST(CliIngest, EmptySourceDirectoryFails) {
  fixture::TempDir dir("ingest_empty");
  fs::create_directories(dir.path / "src");
  auto r = run({"--run-dir", (dir.path / "run").string(), "ingest", "--source", (dir.path / "src").string(),
                "--layout", "flat"});
  EXPECT_NE(r.code, kExitOk);
  EXPECT_NE(r.err.find("zero records"), std::string::npos) << r.err;
}

TEST(CliIngest, FlatSourceWritesManifest) {
  fixture::TempDir dir("ingest_flat");
  for (int i = 0; i < 3; ++i) {
    write_wav(dir.path / "src" / ("f" + std::to_string(i) + ".wav"), fixture::speechlike(0.5, i));
    std::ofstream(dir.path / "src" / ("f" + std::to_string(i) + ".txt")) << "word " << i;
  }
  auto r = run({"--run-dir", (dir.path / "run").string(), "ingest", "--source", (dir.path / "src").string(),
                "--layout", "flat", "--split", "test"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto recs = read_manifest(dir.path / "run" / "data" / "manifest.jsonl");
  EXPECT_EQ(recs.size(), 3u);
  for (const auto& rec : recs) EXPECT_EQ(rec.split, "test");
}

// ---- one small pipeline shared by the tests below

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fixture::TempDir("pipeline");
    auto base = common();
    auto a = base;
    a.insert(a.end(), {"ingest", "--synthetic", "10"});
    auto r = run(a);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    a = base;
    a.push_back("train-asr");
    r = run(a);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    a = base;
    a.push_back("train-predictor");
    r = run(a);
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::vector<std::string> common() {
    return {"--run-dir",
            root().string(),
            "--set",
            "synth.min_duration=2.8",
            "--set",
            "synth.max_duration=4.2",
            "--set",
            std::string("asr.architecture=") + kTinyAsr,
            "--set",
            "asr.train.epochs=0",
            "--set",
            "predictor.architecture=" + PredictorArchitecture::scaled(16).to_json().dump(),
            "--set",
            "predictor.train.epochs=0",
            "--set",
            "evaluate.timing_runs=1",
            "--set",
            "evaluate.timing_warmup=0"};
  }
  static fs::path root() { return dir_->path / "run"; }
  static CliResult cmd(std::initializer_list<std::string> extra) {
    auto a = common();
    a.insert(a.end(), extra);
    return run(a);
  }
  static fixture::TempDir* dir_;
};
fixture::TempDir* CliPipeline::dir_ = nullptr;

TEST_F(CliPipeline, LayoutAndFrozenConfig) {
  EXPECT_TRUE(fs::exists(root() / "config.frozen"));
  EXPECT_TRUE(fs::exists(root() / "checkpoints" / "asr.camo"));
  EXPECT_TRUE(fs::exists(root() / "checkpoints" / "predictor.camo"));
  EXPECT_TRUE(fs::exists(root() / "checkpoints" / "lm.json"));
  EXPECT_TRUE(fs::exists(root() / "logs"));
  std::ifstream is(root() / "config.frozen");
  auto j = nlohmann::json::parse(is);
  EXPECT_EQ(j["_command"], "train-predictor");
  EXPECT_EQ(j["asr"]["train"]["epochs"], 0);
  auto recs = read_manifest(root() / "data" / "manifest.jsonl");
  EXPECT_EQ(recs.size(), 10u);
  for (const auto& rec : recs) EXPECT_TRUE(fs::exists(root() / "data" / rec.audio_path)) << rec.audio_path;
}

TEST_F(CliPipeline, ZeroEpochCheckpointsEqualInitialization) {
  auto asr = load_asr(root() / "checkpoints" / "asr.camo");
  auto init = make_asr(AsrArchitecture::from_json(nlohmann::json::parse(kTinyAsr)), 1);
  EXPECT_EQ(parameter_digest(*asr), parameter_digest(*init));
  auto pred = load_predictor(root() / "checkpoints" / "predictor.camo");
  auto pinit = make_predictor(PredictorArchitecture::scaled(16), derive_seed(1, "predictor-init"));
  EXPECT_EQ(parameter_digest(*pred), parameter_digest(*pinit));
}

TEST_F(CliPipeline, EvaluateNoneGivesCleanRowOnly) {
  auto r = cmd({"evaluate", "--attack", "none", "--name", "clean"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream is(root() / "reports" / "clean" / "report.json");
  auto j = nlohmann::json::parse(is);
  ASSERT_EQ(j["rows"].size(), 1u);
  EXPECT_EQ(j["rows"][0]["attack"], "none");
  EXPECT_TRUE(fs::exists(root() / "reports" / "clean" / "table.csv"));
}

TEST_F(CliPipeline, EvaluatePredictiveUnderDenoiser) {
  auto r = cmd({"evaluate", "--attack", "predictive", "--defense", "denoiser", "--name", "den"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream is(root() / "reports" / "den" / "report.json");
  auto j = nlohmann::json::parse(is);
  ASSERT_EQ(j["rows"].size(), 1u);
  EXPECT_EQ(j["rows"][0]["attack"], "predictive");
  EXPECT_EQ(j["rows"][0]["defense"], "denoiser");
  EXPECT_TRUE(j.contains("provenance"));
}

TEST_F(CliPipeline, DelaySweepHasThreePoints) {
  auto r = cmd({"evaluate", "--attack", "none", "--sweep", "delay=0.5,0.75,1.0", "--name", "sw"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream cs(root() / "reports" / "sw" / "curve_delay.csv");
  std::string line;
  int lines = 0;
  while (std::getline(cs, line))
    if (!line.empty()) ++lines;
  EXPECT_EQ(lines, 4);  // header + 3
}

TEST_F(CliPipeline, AttackFileShortInput) {
  write_wav(dir_->path / "short.wav", fixture::speechlike(1.0, 3));
  auto r = cmd({"attack-file", (dir_->path / "short.wav").string(), "--attack", "predictive", "--out",
                (dir_->path / "short_out").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("empty plan"), std::string::npos);
  auto plan = read_plan(dir_->path / "short_out" / "short.json");
  EXPECT_TRUE(plan.chunks.empty());
  EXPECT_EQ(read_wav(dir_->path / "short_out" / "short_attacked.wav").samples,
            read_wav(dir_->path / "short.wav").samples);
}

TEST_F(CliPipeline, AttackFileFourSeconds) {
  write_wav(dir_->path / "four.wav", fixture::speechlike(4.0, 4));
  auto r = cmd({"attack-file", (dir_->path / "four.wav").string(), "--attack", "predictive", "--delay", "0.5",
                "--out", (dir_->path / "four_out").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("real-time feasible"), std::string::npos);
  auto plan = read_plan(dir_->path / "four_out" / "four.json");
  ASSERT_EQ(plan.chunks.size(), 3u);
  EXPECT_DOUBLE_EQ(plan.chunks[0].start_seconds(), 2.5);
  auto clean = read_wav(dir_->path / "four.wav"), attacked = read_wav(dir_->path / "four_out" / "four_attacked.wav");
  const float eps = compute_epsilon(clean, 0.008).epsilon;
  float worst = 0;
  for (std::int64_t i = 0; i < clean.size(); ++i)
    worst = std::max(worst, std::abs(attacked.samples[i] - clean.samples[i]));
  EXPECT_LE(worst, eps + 1.0f / 32768);
  EXPECT_GT(worst, 0.0f);
}

TEST_F(CliPipeline, AttackFileRejectsOfflinePgd) {
  write_wav(dir_->path / "off.wav", fixture::speechlike(3.0, 5));
  EXPECT_EQ(cmd({"attack-file", (dir_->path / "off.wav").string(), "--attack", "pgd-offline"}).code, kExitUsage);
}

TEST_F(CliPipeline, ReportPrintsTables) {
  ASSERT_EQ(cmd({"evaluate", "--attack", "none", "--name", "forreport"}).code, kExitOk);
  auto r = cmd({"report"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("forreport"), std::string::npos);
}

TEST_F(CliPipeline, CommandsAreDeterministic) {
  auto a = cmd({"evaluate", "--attack", "uniform", "--name", "det1"});
  auto b = cmd({"evaluate", "--attack", "uniform", "--name", "det2"});
  ASSERT_EQ(a.code, kExitOk);
  ASSERT_EQ(b.code, kExitOk);
  std::ifstream ia(root() / "reports" / "det1" / "report.json"), ib(root() / "reports" / "det2" / "report.json");
  auto ja = nlohmann::json::parse(ia), jb = nlohmann::json::parse(ib);
  EXPECT_EQ(ja["rows"][0]["wer"], jb["rows"][0]["wer"]);
  EXPECT_EQ(ja["rows"][0]["cer"], jb["rows"][0]["cer"]);
}

}  // namespace
}  // namespace camo
