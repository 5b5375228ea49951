// Copyright 2026 The Evalscope Authors
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

#include <nlohmann/json.hpp>

#include "evalscope/codec.h"
#include "evalscope/fixtures.h"
#include "evalscope/util.h"
#include "process.h"
#include "temp_dir.h"

namespace evalscope {
namespace {

namespace fs = std::filesystem;
using testing::run_command;

const std::string kCli = EVALSCOPE_CLI_PATH;
const fs::path kColorNet = fs::path(EVALSCOPE_SOURCE_DIR) / "data" / "colornet" / "colornet.yml";

void write_bytes(const fs::path& p, const std::vector<uint8_t>& bytes) {
  write_file_atomic(p, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

TEST(Cli, ValidateExitCodes) {
  testing::TempDir tmp;
  auto ok = run_command({kCli, "manifest", "validate", kColorNet.string()});
  EXPECT_EQ(ok.exit_code, 0) << ok.err;
  auto report = nlohmann::json::parse(ok.out);
  EXPECT_EQ(report["valid"], true);

  write_file_atomic(tmp / "bad.yml", "name: x\nversion: [1\n");
  auto bad = run_command({kCli, "manifest", "validate", (tmp / "bad.yml").string()});
  EXPECT_EQ(bad.exit_code, 1);
  auto bad_report = nlohmann::json::parse(bad.out);
  EXPECT_EQ(bad_report["valid"], false);
  EXPECT_TRUE(bad_report["violations"][0].contains("line"));

  auto missing = run_command({kCli, "manifest", "validate", (tmp / "nope.yml").string()});
  EXPECT_EQ(missing.exit_code, 2);
  EXPECT_EQ(run_command({kCli, "manifest", "frobnicate"}).exit_code, 2);
}

TEST(Cli, FormatIsIdempotent) {
  testing::TempDir tmp;
  auto first = run_command({kCli, "manifest", "format", kColorNet.string()});
  ASSERT_EQ(first.exit_code, 0) << first.err;
  write_file_atomic(tmp / "c.yml", first.out);
  auto second = run_command({kCli, "manifest", "format", (tmp / "c.yml").string()});
  EXPECT_EQ(first.out, second.out);
}

TEST(Cli, EvaluateIsByteIdenticalAcrossRuns) {
  testing::TempDir tmp;
  std::vector<std::string> argv = {kCli, "evaluate", "--manifest", kColorNet.string(), "--top-k",
                                   "2", "--cache-dir", (tmp / "cache").string()};
  for (const auto& f : red_blue_fixtures()) {
    const fs::path p = tmp / (f.id + ".png");
    write_bytes(p, encode_png(f.image));
    argv.insert(argv.end(), {"--input", p.string(), "--label", std::to_string(f.label)});
  }
  auto first = run_command(argv);
  ASSERT_EQ(first.exit_code, 0) << first.err;
  auto j = nlohmann::json::parse(first.out);
  EXPECT_EQ(j["results"].size(), 8u);
  EXPECT_EQ(j["metrics"]["top1"], 1.0);
  EXPECT_EQ(j["model"]["name"], "ColorNet");
  for (int i = 0; i < 2; ++i) EXPECT_EQ(run_command(argv).out, first.out);

  auto bgr = argv;
  bgr.insert(bgr.end(), {"--override", "decode.color_layout=BGR"});
  auto flipped = nlohmann::json::parse(run_command(bgr).out);
  EXPECT_EQ(flipped["metrics"]["top1"], 0.0);
  EXPECT_EQ(flipped["overrides"]["decode.color_layout"], "BGR");

  auto bad_level = argv;
  bad_level.insert(bad_level.end(), {"--trace-level", "verbose"});
  EXPECT_EQ(run_command(bad_level).exit_code, 2);
}

TEST(Cli, ServeRejectsBadConfig) {
  testing::TempDir tmp;
  write_file_atomic(tmp / "reg.yml", "port: 0\nbogus_key: 1\n");
  auto r = run_command({kCli, "serve", "registry", "--config", (tmp / "reg.yml").string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("bogus_key"), std::string::npos) << r.err;

  write_file_atomic(tmp / "orch.yml", "port: 0\n");
  EXPECT_EQ(run_command({kCli, "serve", "orchestrator", "--config", (tmp / "orch.yml").string()})
                .exit_code,
            2);
}

TEST(Cli, PitfallDemo) {
  auto r = run_command({kCli, "pitfall", "demo", "color-layout"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["changed"], j["total"]);
  EXPECT_EQ(run_command({kCli, "pitfall", "demo", "gamma"}).exit_code, 2);
}

}  // namespace
}  // namespace evalscope
