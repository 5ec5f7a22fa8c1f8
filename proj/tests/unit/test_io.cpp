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

#include <cmath>
#include <filesystem>

#include "ggpeps/io.hpp"
#include "ggpeps/rng.hpp"

namespace ggpeps {
namespace {

TEST(FormatDouble, BitExactRoundTrip) {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.normal(), rng.below(200) - 100);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  EXPECT_TRUE(std::isinf(parse_double("inf")));
  EXPECT_TRUE(std::isnan(parse_double("nan")));
  EXPECT_THROW(parse_double("1.5x"), std::invalid_argument);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
}

TEST(Csv, RoundTripAndColumns) {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"1", "x"}, {"2", "y"}};
  const std::string text = to_csv(t);
  EXPECT_EQ(text, "a,b\n1,x\n2,y\n");
  const CsvTable u = from_csv(text);
  EXPECT_EQ(u.header, t.header);
  EXPECT_EQ(u.rows, t.rows);
  EXPECT_EQ(u.column("b"), 1u);
  EXPECT_THROW(u.column("c"), std::out_of_range);
}

TEST(Csv, FilesCreateParentDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "ggpeps_io_test";
  std::filesystem::remove_all(dir);
  const std::string path = (dir / "x" / "t.csv").string();
  write_file(path, "h\n1\n");
  EXPECT_EQ(read_file(path), "h\n1\n");
  EXPECT_THROW(read_file((dir / "missing.csv").string()), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(Tables, SweepColumns) {
  SweepPoint p;
  p.g = 1.5;
  p.energy = 2.0;
  p.energy_density = 0.5;
  p.params = {0.1, 0.2, 0.3, 0.4};
  p.iterations = 12;
  p.converged = true;
  const CsvTable t = sweep_table(std::vector<SweepPoint>{p}, 2);
  EXPECT_EQ(t.header, (std::vector<std::string>{"g", "E", "E_density", "y1", "z1", "y2", "z2",
                                                "iters", "converged"}));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(parse_double(t.rows[0][t.column("z2")]), 0.4);
  EXPECT_EQ(t.rows[0][t.column("iters")], "12");
}

TEST(Tables, CheckpointColumns) {
  Checkpoint cp;
  cp.start = 2;
  cp.iteration = 5;
  cp.g = 0.7;
  cp.params = {0.25, -0.5};
  cp.energy = 1.25;
  cp.grad_norm = 1e-3;
  const auto h = checkpoint_header(1);
  const auto r = checkpoint_row(cp);
  ASSERT_EQ(h.size(), r.size());
  EXPECT_EQ(h.front(), "start");
  EXPECT_EQ(h.back(), "grad_norm");
  EXPECT_EQ(r[3], "0.25");
}

TEST(Tables, WilsonRoundTrip) {
  const std::vector<WilsonRow> rows{{1, 1, 0.5, 1e-3, 1e-4, 2e-4, 1000},
                                    {1, 2, 0.1234567890123, -0.0, 3e-5, 4e-5, 2000}};
  const std::vector<WilsonRow> back = wilson_rows(from_csv(to_csv(wilson_table(rows))));
  ASSERT_EQ(back.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].R1, rows[i].R1);
    EXPECT_EQ(back[i].R2, rows[i].R2);
    EXPECT_EQ(back[i].re, rows[i].re);
    EXPECT_EQ(back[i].err_im, rows[i].err_im);
    EXPECT_EQ(back[i].n_samples, rows[i].n_samples);
  }
}

}  // namespace
}  // namespace ggpeps
