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

#include <map>
#include <set>

#include "ggpeps/lattice.hpp"
#include "ggpeps/rng.hpp"

namespace ggpeps {
namespace {

TEST(LatticeGeom, Counts) {
  for (int L : {1, 2, 3, 6}) {
    const LatticeGeom g(L);
    EXPECT_EQ(g.n_vertices(), L * L);
    EXPECT_EQ(g.n_links(), 2 * L * L);
    EXPECT_EQ(g.n_plaquettes(), L * L);
    EXPECT_EQ(g.N(), 3);
  }
  EXPECT_THROW(LatticeGeom(0), std::invalid_argument);
  EXPECT_THROW(LatticeGeom(2, 1), std::invalid_argument);
}

TEST(LatticeGeom, PeriodicWrap) {
  const LatticeGeom g(4);
  EXPECT_EQ(g.wrap({-1, 5}), (Vertex{3, 1}));
  EXPECT_EQ(g.shift({3, 0}, Dir::horizontal), (Vertex{0, 0}));
  EXPECT_EQ(g.shift({0, 0}, Dir::vertical, -1), (Vertex{0, 3}));
}

TEST(LinkIndex, CanonicalExamples) {
  const LatticeGeom g(2);
  EXPECT_EQ(link_index(g, {{0, 0}, Dir::horizontal}), 0);
  EXPECT_EQ(link_index(g, {{0, 0}, Dir::vertical}), 1);
  EXPECT_EQ(link_index(g, {{1, 1}, Dir::vertical}), 7);
  EXPECT_EQ(link_index(g, {{3, -1}, Dir::vertical}), 7);
}

TEST(LinkIndex, BijectionUpToL6) {
  for (int L = 1; L <= 6; ++L) {
    const LatticeGeom g(L);
    std::set<int> seen;
    for (int x2 = 0; x2 < L; ++x2)
      for (int x1 = 0; x1 < L; ++x1)
        for (Dir d : {Dir::horizontal, Dir::vertical}) {
          const int i = link_index(g, {{x1, x2}, d});
          ASSERT_GE(i, 0);
          ASSERT_LT(i, g.n_links());
          seen.insert(i);
          EXPECT_EQ(link_at(g, i), (LinkId{{x1, x2}, d}));
        }
    EXPECT_EQ(static_cast<int>(seen.size()), g.n_links());
  }
}

TEST(Staggering, Examples) {
  EXPECT_EQ(staggering_sign({0, 0}), 1);
  EXPECT_EQ(staggering_sign({1, 0}), -1);
  EXPECT_EQ(staggering_sign({1, 1}), 1);
  EXPECT_EQ(staggering_sign({0, 3}), -1);
}

TEST(Plaquette, LinksDistinctAndEachLinkInTwo) {
  const LatticeGeom g(2);
  std::map<int, int> count;
  for (int v = 0; v < g.n_vertices(); ++v) {
    const auto pl = plaquette_links(g, g.vertex_at(v));
    std::set<int> s;
    for (const auto& ol : pl) s.insert(link_index(g, ol.link));
    EXPECT_EQ(s.size(), 4u);
    for (int i : s) ++count[i];
  }
  EXPECT_EQ(static_cast<int>(count.size()), g.n_links());
  for (const auto& [i, c] : count) EXPECT_EQ(c, 2) << "link " << i;
}

TEST(Plaquette, DaggerPatternAndOrientation) {
  const LatticeGeom g(4);
  const Vertex p{1, 2};
  const auto pl = plaquette_links(g, p);
  // top (-), left (-), bottom (+), right (+)
  EXPECT_EQ(pl[0].link, (LinkId{{1, 3}, Dir::horizontal}));
  EXPECT_EQ(pl[0].sign, -1);
  EXPECT_EQ(pl[1].link, (LinkId{{1, 2}, Dir::vertical}));
  EXPECT_EQ(pl[1].sign, -1);
  EXPECT_EQ(pl[2].link, (LinkId{{1, 2}, Dir::horizontal}));
  EXPECT_EQ(pl[2].sign, 1);
  EXPECT_EQ(pl[3].link, (LinkId{{2, 2}, Dir::vertical}));
  EXPECT_EQ(pl[3].sign, 1);
}

TEST(GaugeTransform, ZeroConfigExample) {
  const LatticeGeom g(2);
  const GaugeConfig G = gauge_transform(GaugeConfig(g), {0, 0});
  // On L = 2, x - e1 = (1, 0) and x - e2 = (0, 1).
  EXPECT_EQ((G[LinkId{{0, 0}, Dir::horizontal}]), 1);
  EXPECT_EQ((G[LinkId{{0, 0}, Dir::vertical}]), 1);
  EXPECT_EQ((G[LinkId{{1, 0}, Dir::horizontal}]), 2);
  EXPECT_EQ((G[LinkId{{0, 1}, Dir::vertical}]), 2);
  EXPECT_EQ((G[LinkId{{1, 0}, Dir::vertical}]), 0);
  EXPECT_EQ((G[LinkId{{0, 1}, Dir::horizontal}]), 0);
  EXPECT_EQ((G[LinkId{{1, 1}, Dir::horizontal}]), 0);
  EXPECT_EQ((G[LinkId{{1, 1}, Dir::vertical}]), 0);
}

TEST(GaugeTransform, NTimesIsIdentity) {
  Rng rng(3);
  for (int N : {2, 3, 5}) {
    const LatticeGeom g(4, N);
    GaugeConfig G(g);
    for (int i = 0; i < g.n_links(); ++i) G.set(i, rng.below(N));
    GaugeConfig H = G;
    for (int k = 0; k < N; ++k) H = gauge_transform(H, {2, 1});
    EXPECT_EQ(H, G);
    GaugeConfig J = G;
    gauge_transform_inplace(J, {2, 1}, N);
    EXPECT_EQ(J, G);
  }
}

TEST(GaugeTransform, AllVerticesComposeToIdentity) {
  Rng rng(4);
  for (int L : {2, 3}) {
    const LatticeGeom g(L);
    GaugeConfig G(g);
    for (int i = 0; i < g.n_links(); ++i) G.set(i, rng.below(3));
    GaugeConfig H = G;
    for (int v = 0; v < g.n_vertices(); ++v) H = gauge_transform(H, g.vertex_at(v));
    EXPECT_EQ(H, G);
  }
}

TEST(WilsonPath, RejectsOutOfRange) {
  const LatticeGeom g(4);
  EXPECT_THROW(wilson_path(g, {0, 0}, 0, 1), std::invalid_argument);
  EXPECT_THROW(wilson_path(g, {0, 0}, 1, 5), std::invalid_argument);
  EXPECT_NO_THROW(wilson_path(g, {0, 0}, 4, 4));
}

TEST(WilsonPath, TwoByOneOnL4) {
  const LatticeGeom g(4);
  const auto path = wilson_path(g, {0, 0}, 2, 1);
  ASSERT_EQ(path.size(), 6u);
  int plus = 0;
  for (const auto& ol : path) plus += ol.sign > 0;
  EXPECT_EQ(plus, 3);
}

TEST(WilsonPath, ClosedWithVertexDegreeTwo) {
  const LatticeGeom g(6);
  for (auto [a, b] : {std::pair{1, 1}, {2, 3}, {3, 2}, {3, 3}}) {
    const auto path = wilson_path(g, {4, 5}, a, b);
    EXPECT_EQ(static_cast<int>(path.size()), 2 * (a + b));
    std::map<int, int> degree;
    for (const auto& ol : path) {
      ++degree[g.vertex_index(ol.link.vertex)];
      ++degree[g.vertex_index(link_head(g, ol.link))];
    }
    for (const auto& [v, d] : degree) EXPECT_EQ(d, 2) << "vertex " << v;
    // Walking the path head-to-tail returns to the start.
    Vertex at = path.front().sign > 0 ? path.front().link.vertex
                                      : link_head(g, path.front().link);
    const Vertex start = at;
    for (const auto& ol : path) {
      const Vertex tail = ol.sign > 0 ? ol.link.vertex : link_head(g, ol.link);
      const Vertex head = ol.sign > 0 ? link_head(g, ol.link) : ol.link.vertex;
      EXPECT_EQ(tail, at);
      at = head;
    }
    EXPECT_EQ(at, start);
  }
}

TEST(WilsonPath, UnitLoopIsPlaquetteUpToCyclicOrder) {
  const LatticeGeom g(4);
  for (int v = 0; v < g.n_vertices(); ++v) {
    const Vertex p = g.vertex_at(v);
    const auto path = wilson_path(g, p, 1, 1);
    const auto pl = plaquette_links(g, p);
    std::set<std::pair<int, int>> a, b;
    for (const auto& ol : path) a.insert({link_index(g, ol.link), ol.sign});
    for (const auto& ol : pl) b.insert({link_index(g, ol.link), ol.sign});
    EXPECT_EQ(a, b);
  }
}

TEST(PathFlux, GaugeInvariantExhaustiveL2) {
  const LatticeGeom g(2);
  const auto p11 = wilson_path(g, {0, 0}, 1, 1);
  const auto p21 = wilson_path(g, {1, 0}, 2, 1);
  const auto p22 = wilson_path(g, {1, 1}, 2, 2);
  for (std::uint64_t c = 0; c < 6561; ++c) {
    const GaugeConfig G = GaugeConfig::from_code(g, c);
    ASSERT_EQ(G.code(), c);
    for (int v = 0; v < 4; ++v) {
      const GaugeConfig H = gauge_transform(G, g.vertex_at(v));
      ASSERT_EQ(path_flux(H, p11), path_flux(G, p11));
      ASSERT_EQ(path_flux(H, p21), path_flux(G, p21));
      ASSERT_EQ(path_flux(H, p22), path_flux(G, p22));
    }
  }
}

TEST(PathFlux, GaugeInvariantRandomized) {
  Rng rng(11);
  for (int L : {4, 6}) {
    const LatticeGeom g(L);
    for (int trial = 0; trial < 200; ++trial) {
      GaugeConfig G(g);
      for (int i = 0; i < g.n_links(); ++i) G.set(i, rng.below(3));
      const Vertex o = g.vertex_at(rng.below(g.n_vertices()));
      const auto path = wilson_path(g, o, 1 + rng.below(L), 1 + rng.below(L));
      const GaugeConfig H = gauge_transform(G, g.vertex_at(rng.below(g.n_vertices())));
      EXPECT_EQ(path_flux(H, path), path_flux(G, path));
    }
  }
}

TEST(GaugeConfig, EntriesReducedModN) {
  const LatticeGeom g(2);
  GaugeConfig G(g);
  G.set(3, 7);
  EXPECT_EQ(G[3], 1);
  G.set(3, -1);
  EXPECT_EQ(G[3], 2);
  EXPECT_EQ(G.size(), 8);
}

}  // namespace
}  // namespace ggpeps
