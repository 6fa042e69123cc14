// Copyright 2026 The Synloco Authors
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

#include "synloco/config.h"

#include <string>

#include <gtest/gtest.h>

#include "synloco/errors.h"

namespace synloco {
namespace {

std::string ErrorOf(const std::string& text) {
  try {
    ValidateRunConfig(ParseRunConfig(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ConfigTest, DefaultsAreValid) {
  EXPECT_NO_THROW(ValidateRunConfig(RunConfig{}));
  EXPECT_NO_THROW(ValidateRunConfig(ParseRunConfig("{}")));
}

TEST(ConfigTest, RoundTripIsExact) {
  RunConfig c;
  c.seed = 77;
  c.planner.oscillator.phi = 0.1234567890123;
  c.network.hidden = {128, 64, 32};
  c.env.dr.friction = {0.6, 1.1};
  c.eval.profile = "piecewise";
  c.eval.knots = {{0.0, 0.1}, {2.5, 0.75}};
  c.demo.source = "demo.csv";
  c.env.physics.terrain.kind = Terrain::Kind::kSlope;
  c.env.physics.terrain.angle = 0.05;
  const std::string text = RunConfigToJson(c);
  const RunConfig back = ParseRunConfig(text);
  EXPECT_EQ(RunConfigToJson(back), text);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.planner.oscillator.phi, 0.1234567890123);
  EXPECT_EQ(back.network.hidden, (std::vector<int>{128, 64, 32}));
  EXPECT_EQ(back.env.physics.terrain.kind, Terrain::Kind::kSlope);
  EXPECT_EQ(ConfigHash(back), ConfigHash(c));
}

TEST(ConfigTest, FileRoundTrip) {
  RunConfig c;
  c.train.iterations = 12;
  const std::string path = ::testing::TempDir() + "/config_roundtrip.json";
  WriteRunConfig(path, c);
  EXPECT_EQ(LoadRunConfig(path).train.iterations, 12);
  EXPECT_THROW(LoadRunConfig(path + ".missing"), ConfigError);
}

TEST(ConfigTest, PartialConfigKeepsDefaults) {
  const RunConfig c = ParseRunConfig(R"({"train": {"num_envs": 8}})");
  EXPECT_EQ(c.train.num_envs, 8);
  EXPECT_EQ(c.train.horizon, TrainConfig{}.horizon);
  EXPECT_EQ(c.ppo.clip, PpoConfig{}.clip);
}

TEST(ConfigTest, UnknownKeyIsNamed) {
  try {
    ParseRunConfig(R"({"train": {"num_envz": 8}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("train.num_envz"), std::string::npos)
        << e.what();
  }
  EXPECT_THROW(ParseRunConfig(R"({"bogus": 1})"), ConfigError);
}

TEST(ConfigTest, WrongTypeIsNamed) {
  try {
    ParseRunConfig(R"({"ppo": {"clip": "wide"}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("ppo.clip"), std::string::npos)
        << e.what();
  }
  EXPECT_THROW(ParseRunConfig(R"({"train": {"num_envs": 1.5}})"),
               ConfigError);
  EXPECT_THROW(ParseRunConfig("{not json"), ConfigError);
}

TEST(ConfigTest, ValidationNamesTheBlock) {
  EXPECT_NE(ErrorOf(R"({"train": {"num_envs": 0}})").find("train"),
            std::string::npos);
  EXPECT_NE(ErrorOf(R"({"cpg": {"num_centers": 0}})").find("cpg"),
            std::string::npos);
  EXPECT_NE(ErrorOf(R"({"dr": {"friction": [2, 1]}})").find("env"),
            std::string::npos);
  EXPECT_NE(ErrorOf(R"({"eval": {"profile": "ramp"}})").find("eval"),
            std::string::npos);
  EXPECT_NE(ErrorOf(R"({"demo": {"trot": {"stance_fraction": 0.3}}})")
                .find("demo"),
            std::string::npos);
}

TEST(ConfigTest, HashIgnoresRunBookkeeping) {
  RunConfig a;
  RunConfig b = a;
  b.seed = 999;
  b.out_dir = "elsewhere";
  b.mode = "eval";
  b.eval.duration = 3.0;
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.ppo.clip = 0.25;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  RunConfig c = a;
  c.env.reward.tracking_sigma += 1e-12;
  EXPECT_NE(ConfigHash(a), ConfigHash(c));
  EXPECT_EQ(HashToHex(0x1aull), "000000000000001a");
}

TEST(EvalCommandTest, Profiles) {
  EvalConfig e;
  EXPECT_EQ(EvalCommandAt(e, 3.0), 0.5);
  e.profile = "piecewise";
  e.knots = {{0.0, 0.0}, {4.0, 1.0}, {5.0, 1.0}};
  EXPECT_EQ(EvalCommandAt(e, -1.0), 0.0);
  EXPECT_DOUBLE_EQ(EvalCommandAt(e, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(EvalCommandAt(e, 4.5), 1.0);
  EXPECT_EQ(EvalCommandAt(e, 60.0), 1.0);
}

}  // namespace
}  // namespace synloco
