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

#include "ggpeps/ansatz.hpp"
#include "ggpeps/rng.hpp"
#include "ggpeps/sampler.hpp"

namespace ggpeps {
namespace {

GaugeConfig random_config(const LatticeGeom& g, Rng& rng) {
  GaugeConfig G(g);
  for (int i = 0; i < g.n_links(); ++i) G.set(i, rng.below(g.N()));
  return G;
}

TEST(TMatrix, EntriesAndLinearity) {
  const TMatrix T = t_matrix(0.4, std::sqrt(2.0));
  EXPECT_EQ(T(0, 1), cplx(0.4));
  EXPECT_EQ(T(2, 3), cplx(0.4));
  EXPECT_NEAR(T(0, 2).real(), 1.0, 1e-15);
  EXPECT_NEAR(T(3, 1).real(), -1.0, 1e-15);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(T(i, i), cplx(0.0));
  const TMatrix S = 0.4 * t_matrix_derivative(Param::y) +
                    std::sqrt(2.0) * t_matrix_derivative(Param::z);
  EXPECT_LT((S - T).norm(), 1e-15);
}

TEST(Ansatz, DefaultInitIsSeededAndBounded) {
  const LatticeGeom g(2);
  const Ansatz a = Ansatz::with_default_init(g, 3, 42);
  const Ansatz b = Ansatz::with_default_init(g, 3, 42);
  const Ansatz c = Ansatz::with_default_init(g, 3, 43);
  EXPECT_EQ(a.layers(), b.layers());
  EXPECT_NE(a.layers(), c.layers());
  EXPECT_EQ(a.n_params(), 6);
  for (const LayerParams& l : a.layers()) {
    EXPECT_LE(std::abs(l.y - 0.1), 0.01);
    EXPECT_LE(std::abs(l.z - 0.1), 0.01);
  }
  EXPECT_THROW(Ansatz::with_default_init(g, 0, 1), std::invalid_argument);
  EXPECT_THROW(Ansatz(g, {}), std::invalid_argument);
}

TEST(Ansatz, ParameterVectorRoundTripAndStaleness) {
  const LatticeGeom g(2);
  Ansatz a(g, {{0.1, 0.2}, {0.3, 0.4}});
  EXPECT_EQ(a.param_vector(), (std::vector<double>{0.1, 0.2, 0.3, 0.4}));
  EXPECT_FALSE(a.stale());
  const std::vector<double> p{-0.5, 0.6, 0.7, -0.8};
  a.set_param_vector(p);
  EXPECT_TRUE(a.stale());
  EXPECT_THROW(a.cache(0), std::logic_error);
  a.rebuild();
  EXPECT_EQ(a.param_vector(), p);
  EXPECT_EQ(a.cache(1).D.rows(), 64);
  const RMatrix d = vertex_D_block(t_matrix(0.7, -0.8)).gamma.real();
  EXPECT_LT((a.cache(1).d - d).norm(), 1e-15);
}

TEST(Ansatz, CachedBlockDerivatives) {
  const LatticeGeom g(1);
  const Ansatz a(g, {{0.25, -0.35}});
  const double h = 1e-6;
  const Ansatz ay(g, {{0.25 + h, -0.35}}), by(g, {{0.25 - h, -0.35}});
  const Ansatz az(g, {{0.25, -0.35 + h}}), bz(g, {{0.25, -0.35 - h}});
  EXPECT_LT((a.cache(0).dd[0] - (ay.cache(0).d - by.cache(0).d) / (2 * h)).norm(), 1e-7);
  EXPECT_LT((a.cache(0).dd[1] - (az.cache(0).d - bz.cache(0).d) / (2 * h)).norm(), 1e-7);
}

TEST(NormSq, ProductOverLayersAndGaugeInvariant) {
  const LatticeGeom g(2);
  Rng rng(5);
  const Ansatz one(g, {{0.3, 0.2}});
  const Ansatz two(g, {{0.3, 0.2}, {-0.1, 0.5}});
  const Ansatz other(g, {{-0.1, 0.5}});
  for (int t = 0; t < 10; ++t) {
    const GaugeConfig G = random_config(g, rng);
    const NormSq n2 = norm_sq(G, two);
    ASSERT_EQ(n2.log_layers.size(), 2u);
    EXPECT_NEAR(n2.log_total, norm_sq(G, one).log_total + norm_sq(G, other).log_total, 1e-12);
    EXPECT_NEAR(std::log(n2.value()), n2.log_total, 1e-12);
    const GaugeConfig H = gauge_transform(G, g.vertex_at(rng.below(4)));
    EXPECT_NEAR(norm_sq(H, two).log_total, n2.log_total, 1e-10);
  }
}

TEST(NormSq, RatiosAgreeWithPfaffianWeights) {
  const LatticeGeom g(2);
  Rng rng(6);
  const Ansatz a(g, {{0.45, -0.3}, {0.2, 0.1}});
  const GaugeConfig G0 = random_config(g, rng);
  const double base = norm_sq(G0, a).log_total - log_weight_fresh(G0, a);
  for (int t = 0; t < 10; ++t) {
    const GaugeConfig G = random_config(g, rng);
    EXPECT_NEAR(norm_sq(G, a).log_total - log_weight_fresh(G, a), base, 1e-10);
  }
}

TEST(NormSq, LogGradientMatchesFiniteDifference) {
  const LatticeGeom g(2);
  Rng rng(7);
  const GaugeConfig G = random_config(g, rng);
  const std::vector<LayerParams> base{{0.3, -0.2}, {0.15, 0.4}};
  const Ansatz A(g, base);
  const double h = 1e-6;
  for (int layer = 0; layer < 2; ++layer)
    for (Param p : {Param::y, Param::z}) {
      auto shifted = [&](double s) {
        std::vector<LayerParams> ls = base;
        (p == Param::y ? ls[layer].y : ls[layer].z) += s;
        return norm_sq(G, Ansatz(g, ls)).log_total;
      };
      const double fd = (shifted(h) - shifted(-h)) / (2 * h);
      EXPECT_NEAR(log_norm_grad(G, A, layer, p), fd, 1e-6);
    }
}

TEST(NormSq, FlatStateIsConfigurationIndependent) {
  const LatticeGeom g(2);
  Rng rng(8);
  const Ansatz A(g, {{0.0, 0.0}});
  const double ref = norm_sq(GaugeConfig(g), A).log_total;
  for (int t = 0; t < 5; ++t) EXPECT_NEAR(norm_sq(random_config(g, rng), A).log_total, ref, 1e-12);
}

}  // namespace
}  // namespace ggpeps
