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

#include "ggpeps/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "ggpeps/exact.hpp"
#include "ggpeps/fit.hpp"
#include "ggpeps/optimize.hpp"
#include "ggpeps/rng.hpp"
#include "ggpeps/sampler.hpp"

namespace ggpeps {

namespace {

std::string detail(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

double rel(double a, double b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

double rel(cplx a, cplx b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

std::vector<LayerParams> random_layers(Rng& rng, int k) {
  std::vector<LayerParams> out;
  for (int i = 0; i < k; ++i) out.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
  return out;
}

}  // namespace

std::vector<SelftestCase> run_selftest(std::uint64_t seed) {
  std::vector<SelftestCase> out;
  Rng rng(derive_seed(seed, 77));
  const LatticeGeom geom(2, 3);

  auto run = [&](const std::string& name,
                 const std::function<std::pair<bool, std::string>()>& body) {
    SelftestCase c;
    c.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      std::tie(c.passed, c.detail) = body();
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("threw: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(c));
  };

  run("pfaffian_squared_is_det", [&] {
    double worst = 0.0;
    for (int n : {2, 4, 8, 16, 32, 64}) {
      CMatrix A(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = cplx(rng.normal(), rng.normal());
      A = antisymmetrize(CMatrix(A));
      const cplx pf = pfaffian(A);
      worst = std::max(worst, rel(pf * pf, det(A)));
    }
    return std::pair{worst < 1e-8, detail("max rel err %.2e", worst)};
  });

  run("gauge_invariance_L2", [&] {
    const Ansatz A(geom, random_layers(rng, 2));
    const std::uint64_t n = exact_config_count(geom);
    std::vector<double> lw(n);
    for (std::uint64_t c = 0; c < n; ++c) {
      lw[c] = log_weight_fresh(GaugeConfig::from_code(geom, c), A);
    }
    double worst = 0.0;
    for (std::uint64_t c = 0; c < n; ++c) {
      const GaugeConfig G = GaugeConfig::from_code(geom, c);
      for (int v = 0; v < geom.n_vertices(); ++v) {
        const std::uint64_t t = gauge_transform(G, geom.vertex_at(v)).code();
        worst = std::max(worst, std::abs(std::expm1(lw[t] - lw[c])));
      }
    }
    return std::pair{worst < 1e-9, detail("max rel deviation %.2e", worst)};
  });

  run("flat_state_limit", [&] {
    const double g = 1.3;
    const Ansatz A(geom, {{0.0, 0.0}, {0.0, 0.0}});
    const ExactResult r = exact_contract(A, g);
    const double e = std::abs(r.energy_density - 1.0 / (g * g));
    const double p = std::abs(r.p - cplx(1.0, 0.0));
    return std::pair{e < 1e-10 && p < 1e-10, detail("|e - 1/g^2| = %.2e  |P - 1| = %.2e", e, p)};
  });

  run("orbit_equals_gray", [&] {
    const Ansatz A(geom, random_layers(rng, 1));
    ExactOptions o;
    const ExactResult a = exact_contract(A, 1.1, o);
    o.strategy = ContractionStrategy::gray;
    const ExactResult b = exact_contract(A, 1.1, o);
    double worst = rel(a.energy, b.energy);
    for (std::size_t i = 0; i < a.grad.size(); ++i) worst = std::max(worst, rel(a.grad[i], b.grad[i]));
    return std::pair{worst < 1e-9, detail("max rel diff %.2e", worst)};
  });

  run("gradient_vs_finite_difference", [&] {
    const std::vector<LayerParams> ls = random_layers(rng, 1);
    std::vector<double> p{ls[0].y, ls[0].z};
    const double g = 0.9;
    const ExactOptions ex;
    const Evaluation ev = exact_objective(geom, p, g, ex);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double h = 1e-6;
      std::vector<double> a = p, b = p;
      a[i] += h;
      b[i] -= h;
      const double fd =
          (exact_objective(geom, a, g, ex).energy - exact_objective(geom, b, g, ex).energy) /
          (2 * h);
      worst = std::max(worst, std::abs(fd - ev.grad[i]) / std::max(1.0, std::abs(fd)));
    }
    return std::pair{worst < 1e-5, detail("max rel err %.2e", worst)};
  });

  run("two_vertex_fock_oracle", [&] {
    double worst = 0.0;
    const double y = 0.37;
    for (int q0 = 0; q0 < 3; ++q0)
      for (int q1 = 0; q1 < 3; ++q1)
        for (int link = 0; link < 2; ++link)
          for (int s : {-1, 0, 1}) {
            const int r0 = link == 0 ? (q0 + 3 + s) % 3 : q0;
            const int r1 = link == 1 ? (q1 + 3 + s) % 3 : q1;
            const cplx lit = std::conj(ToyRing::fock_amplitude(y, r0, r1)) *
                             ToyRing::fock_amplitude(y, q0, q1);
            const cplx pipe = ToyRing::pipeline_product(y, q0, q1, link, s);
            worst = std::max(worst, std::abs(lit - pipe) /
                                        std::max(1e-12, std::abs(lit)));
          }
    return std::pair{worst < 1e-10, detail("max rel err %.2e", worst)};
  });

  run("variational_bound", [&] {
    const double g = 1.2;
    const Ansatz A(geom, random_layers(rng, 1));
    const double e = exact_contract(A, g).energy;
    const EDResult ed = ed_ground_energy(EDSpec{2, 3, g});
    return std::pair{e >= ed.E0 - 1e-10 && ed.sector_dim == 243,
                     detail("E = %.10g  E0 = %.10g", e, ed.E0)};
  });

  run("chain_flat_acceptance", [&] {
    const Ansatz A(geom, {{0.0, 0.0}});
    Chain ch(A, derive_seed(seed, 5));
    for (int i = 0; i < 20000; ++i) ch.step();
    return std::pair{ch.accepted() == ch.steps(),
                     detail("accepted %.0f of %.0f", double(ch.accepted()), double(ch.steps()))};
  });

  run("area_law_fit_synthetic", [&] {
    std::vector<WilsonRow> rows;
    Rng r2(derive_seed(seed, 9));
    for (const auto& [a, b] : loop_set(8, LoopRule::at_most_one)) {
      const double w = std::exp(-0.4 * a * b);
      rows.push_back({a, b, w * (1.0 + 0.01 * r2.normal()), 0.0, 0.01 * w, 0.01 * w, 1000});
    }
    const FitResult f = fit_area_law(rows);
    const bool ok = std::abs(f.slope - 0.4) < 0.02 && std::abs(f.slope - 0.4) < 3 * f.slope_err + 1e-3;
    return std::pair{ok, detail("sigma = %.5f +- %.5f", f.slope, f.slope_err)};
  });

  return out;
}

}  // namespace ggpeps
