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

#include "ggpeps/config.hpp"

namespace ggpeps {
namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST(Config, DefaultsAreValid) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.g(), 1.0);
  EXPECT_EQ(c.loops(), loop_set(2, LoopRule::at_most_one));
  EXPECT_EQ(c.geom(), LatticeGeom(2, 3));
}

TEST(Config, OptimizerFollowsModeUnlessSet) {
  RunConfig c;
  EXPECT_EQ(c.optimizer(), OptimizerKind::bfgs);
  set_key(c, "mode", "mc");
  EXPECT_EQ(c.optimizer(), OptimizerKind::descent);
  EXPECT_EQ(get_key(c, "opt.kind"), "default");
  set_key(c, "opt.kind", "bfgs");
  EXPECT_THROW(c.validate(), ConfigError);
  set_key(c, "opt.kind", "default");
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesKeysCommentsAndWhitespace) {
  const RunConfig c = parse_config(
      "# campaign\n"
      "lattice.L = 4\n"
      "  mode=mc   # inline\n"
      "opt.kind = descent\n"
      "coupling.g = 0.5\n"
      "mc.samples = 20000\n"
      "wilson.loops = 1x1,1x2\n"
      "seed = 99\n"
      "\n");
  EXPECT_EQ(c.L, 4);
  EXPECT_EQ(c.mode, EvalMode::mc);
  EXPECT_EQ(c.optimizer(), OptimizerKind::descent);
  EXPECT_EQ(c.g_grid, std::vector<double>{0.5});
  EXPECT_EQ(c.mc.samples, 20000);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.loops(), (std::vector<std::pair<int, int>>{{1, 1}, {1, 2}}));
}

TEST(Config, FormatRoundTrip) {
  RunConfig c;
  set_key(c, "coupling.grid", "0.5:2.0:4");
  set_key(c, "ansatz.layers", "3");
  set_key(c, "opt.grad_tol", "1e-6");
  set_key(c, "ansatz.init_y", "0.1234567890123456789");
  set_key(c, "out_dir", "runs/a b");
  const std::string text = format_config(c);
  const RunConfig d = parse_config(text);
  EXPECT_EQ(format_config(d), text);
  EXPECT_EQ(d.init_y, c.init_y);
  ASSERT_TRUE(d.grad_tol.has_value());
  EXPECT_EQ(*d.grad_tol, 1e-6);
  EXPECT_EQ(d.out_dir, "runs/a b");
  for (const std::string& k : config_keys()) EXPECT_EQ(get_key(d, k), get_key(c, k)) << k;
}

TEST(Config, GridSyntax) {
  EXPECT_EQ(parse_grid("0.5:2.0:4"), (std::vector<double>{0.5, 1.0, 1.5, 2.0}));
  EXPECT_EQ(parse_grid("1,2.5,3"), (std::vector<double>{1.0, 2.5, 3.0}));
  const std::vector<double> g = parse_grid("0.1:0.7:7");
  EXPECT_EQ(g.back(), 0.7);
  EXPECT_THROW(parse_grid("1:2"), std::invalid_argument);
  EXPECT_THROW(parse_grid("1:2:0"), std::invalid_argument);
  EXPECT_THROW(parse_grid("1,x"), std::invalid_argument);
}

TEST(Config, RejectionsNameTheField) {
  EXPECT_EQ(field_of("lattice.L = 3\n"), "lattice.L");
  EXPECT_EQ(field_of("lattice.L = 0\n"), "lattice.L");
  EXPECT_EQ(field_of("lattice.N = 2\n"), "lattice.N");
  EXPECT_EQ(field_of("lattice.L = 2.5\n"), "lattice.L");
  EXPECT_EQ(field_of("coupling.grid = 2,1\n"), "coupling.grid");
  EXPECT_EQ(field_of("coupling.g = -1\n"), "coupling.grid");
  EXPECT_EQ(field_of("mc.samples = 10\nmode = mc\nopt.kind = descent\n"), "mc.samples");
  EXPECT_EQ(field_of("opt.decay = 2\n"), "opt.decay");
  EXPECT_EQ(field_of("mode = mc\nopt.kind = bfgs\n"), "opt.kind");
  EXPECT_EQ(field_of("lattice.L = 4\n"), "mode");
  EXPECT_EQ(field_of("wilson.loops = 2x2\n"), "wilson.loops");
  EXPECT_EQ(field_of("no.such.key = 1\n"), "no.such.key");
  EXPECT_EQ(field_of("seed\n"), "line 1");
  EXPECT_EQ(field_of("coupling.g = 1\ncoupling.grid = 1,2\n"), "coupling");
  EXPECT_EQ(field_of("lattice.L = 4\nmode = mc\nopt.kind = descent\n"), "");
}

TEST(Config, SweepOptionsCarrySeedsAndTolerance) {
  RunConfig c;
  c.seed = 7;
  c.bfgs_starts = 3;
  SweepOptions o = c.sweep_options();
  EXPECT_EQ(o.mc.seed, 7u);
  EXPECT_EQ(o.bfgs.seed, 7u);
  EXPECT_EQ(o.bfgs.starts, 3);
  EXPECT_EQ(o.bfgs.grad_tol, BfgsOptions{}.grad_tol);
  EXPECT_EQ(o.schedule.grad_tol, DescentSchedule{}.grad_tol);
  c.grad_tol = 1e-3;
  o = c.sweep_options();
  EXPECT_EQ(o.bfgs.grad_tol, 1e-3);
  EXPECT_EQ(o.schedule.grad_tol, 1e-3);
}

TEST(Config, EnumNames) {
  EXPECT_STREQ(to_string(EvalMode::mc), "mc");
  EXPECT_STREQ(to_string(OptimizerKind::bfgs), "bfgs");
  EXPECT_STREQ(to_string(ContractionStrategy::gray), "gray");
  EXPECT_EQ(loop_rule_from_string(to_string(LoopRule::square_only)), LoopRule::square_only);
}

}  // namespace
}  // namespace ggpeps
