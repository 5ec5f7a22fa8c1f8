/*
 * Copyright 2026 The ggpeps Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <filesystem>

#include "ggpeps/io.hpp"
#include "ggpeps/runs.hpp"

namespace ggpeps {
namespace {

namespace fs = std::filesystem;

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ggpeps_runs_" + name);
  fs::remove_all(p);
  return p.string();
}

RunRequest exact_request(const std::string& out) {
  RunRequest r;
  r.command = "exact";
  r.config.g_grid = {0.8, 1.3};
  r.config.out_dir = out;
  r.params = {0.31, -0.22};
  return r;
}

TEST(Execute, ExactWritesTablesAndManifest) {
  const std::string out = scratch("exact");
  const RunReport rep = execute(exact_request(out));
  ASSERT_TRUE(rep.ok) << rep.message;
  for (const char* f : {"exact.csv", "exact.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
  const CsvTable t = from_csv(read_file(out + "/exact.csv"));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_NEAR(parse_double(t.rows[1][t.column("E")]), 2.7122172344717521, 1e-10);
  EXPECT_EQ(t.header.back(), "dE_dz1");
  fs::remove_all(out);
}

TEST(Replay, ReproducesCsvOutputsExactly) {
  const std::string out = scratch("replay_a");
  const std::string again = scratch("replay_b");
  ASSERT_TRUE(execute(exact_request(out)).ok);
  const RunRequest back = request_from_manifest(out + "/manifest.json");
  EXPECT_EQ(back.command, "exact");
  EXPECT_EQ(back.params, (std::vector<double>{0.31, -0.22}));
  EXPECT_EQ(format_config(back.config), format_config(exact_request(out).config));
  const ReplayReport rr = replay(out + "/manifest.json", again);
  EXPECT_TRUE(rr.run.ok);
  EXPECT_TRUE(rr.identical());
  EXPECT_EQ(rr.compared, std::vector<std::string>{"exact.csv"});
  fs::remove_all(out);
  fs::remove_all(again);
}

TEST(Replay, DetectsModifiedOutputs) {
  const std::string out = scratch("replay_c");
  const std::string again = scratch("replay_d");
  ASSERT_TRUE(execute(exact_request(out)).ok);
  write_file(out + "/exact.csv", read_file(out + "/exact.csv") + "tampered\n");
  const ReplayReport rr = replay(out + "/manifest.json", again);
  EXPECT_FALSE(rr.identical());
  EXPECT_EQ(rr.mismatched, std::vector<std::string>{"exact.csv"});
  fs::remove_all(out);
  fs::remove_all(again);
}

TEST(Execute, FitOfSyntheticAreaLaw) {
  const std::string out = scratch("fit");
  std::vector<WilsonRow> rows;
  for (const auto& [a, b] : loop_set(8, LoopRule::at_most_one)) {
    const double w = std::exp(-0.25 * a * b);
    rows.push_back({a, b, w, 0.0, 1e-3 * w, 1e-3 * w, 100});
  }
  write_file(out + "/in/wilson.csv", to_csv(wilson_table(rows)));
  RunRequest r;
  r.command = "fit";
  r.config.out_dir = out + "/res";
  r.input = out + "/in/wilson.csv";
  const RunReport rep = execute(r);
  ASSERT_TRUE(rep.ok) << rep.message;
  const CsvTable t = from_csv(read_file(out + "/res/fit.csv"));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "area");
  EXPECT_NEAR(parse_double(t.rows[0][t.column("slope")]), 0.25, 1e-12);
  EXPECT_EQ(t.rows[0][t.column("n_loops")], std::to_string(rows.size()));
  fs::remove_all(out);
}

TEST(Execute, FitReportsUnresolvableRegime) {
  const std::string out = scratch("fit_bad");
  const std::vector<WilsonRow> rows{{1, 1, 0.5, 0, 0.01, 0.01, 10}};
  write_file(out + "/w.csv", to_csv(wilson_table(rows)));
  RunRequest r;
  r.command = "fit";
  r.config.out_dir = out;
  r.input = out + "/w.csv";
  const RunReport rep = execute(r);
  EXPECT_FALSE(rep.ok);
  EXPECT_NE(rep.message.find("unresolvable regime"), std::string::npos);
  fs::remove_all(out);
}

TEST(Execute, InvalidRequestsThrow) {
  RunRequest r;
  r.command = "measure";
  r.config.out_dir = scratch("bad");
  EXPECT_THROW(execute(r), ConfigError);
  r.command = "launch";
  EXPECT_THROW(execute(r), ConfigError);
  r = exact_request(scratch("bad2"));
  r.params = {0.1};
  EXPECT_THROW(execute(r), ConfigError);
}

TEST(Execute, EdAndParamsFromTable) {
  const std::string out = scratch("ed");
  RunRequest r;
  r.command = "ed";
  r.config.g_grid = {2.0};
  r.config.out_dir = out;
  const RunReport rep = execute(r);
  ASSERT_TRUE(rep.ok);
  EXPECT_NE(rep.message.find("sector dimension = 243"), std::string::npos);
  const CsvTable t = from_csv(read_file(out + "/ed.csv"));
  EXPECT_NEAR(parse_double(t.rows[0][t.column("E0")]), 0.99476356925622811, 1e-9);

  SweepPoint p;
  p.g = 0.5;
  p.params = {0.1, 0.2};
  SweepPoint q = p;
  q.g = 1.0;
  q.params = {0.3, 0.4};
  write_file(out + "/s.csv", to_csv(sweep_table(std::vector<SweepPoint>{p, q}, 1)));
  EXPECT_EQ(params_from_table(out + "/s.csv", 1.0, 1), (std::vector<double>{0.3, 0.4}));
  EXPECT_THROW(params_from_table(out + "/s.csv", 2.0, 1), std::runtime_error);
  fs::remove_all(out);
}

}  // namespace
}  // namespace ggpeps
