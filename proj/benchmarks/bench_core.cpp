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

#include <benchmark/benchmark.h>

#include "ggpeps/exact.hpp"
#include "ggpeps/rng.hpp"
#include "ggpeps/sampler.hpp"

namespace {

using namespace ggpeps;

RMatrix random_antisymmetric(int n, std::uint64_t seed) {
  Rng rng(seed);
  RMatrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
  return antisymmetrize(RMatrix(A));
}

void BM_Pfaffian(benchmark::State& st) {
  const RMatrix A = random_antisymmetric(static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(log_pfaffian(A));
}
BENCHMARK(BM_Pfaffian)->Arg(64)->Arg(256)->Arg(576);

void BM_BlockRatio(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const PfaffianCache cache(random_antisymmetric(n, 2), 1000);
  const std::array<int, 8> S{0, 1, 2, 3, 16, 17, 18, 19};
  const RMatrix B = gather_block(cache.matrix(), S) + random_antisymmetric(8, 3);
  for (auto _ : st) benchmark::DoNotOptimize(cache.pfaffian_ratio(S, B));
}
BENCHMARK(BM_BlockRatio)->Arg(64)->Arg(256)->Arg(576);

void BM_ChainStep(benchmark::State& st) {
  const LatticeGeom g(static_cast<int>(st.range(0)), 3);
  const Ansatz A(g, {{0.3, 0.2}});
  Chain ch(A, 4);
  for (auto _ : st) benchmark::DoNotOptimize(ch.step());
}
BENCHMARK(BM_ChainStep)->Arg(2)->Arg(4)->Arg(6);

void BM_ExactContract(benchmark::State& st) {
  const LatticeGeom g(2, 3);
  const Ansatz A(g, std::vector<LayerParams>(static_cast<std::size_t>(st.range(0)), {0.3, 0.2}));
  ExactOptions o;
  o.strategy = st.range(1) ? ContractionStrategy::gray : ContractionStrategy::orbit;
  for (auto _ : st) benchmark::DoNotOptimize(exact_contract(A, 1.0, o));
}
BENCHMARK(BM_ExactContract)->Args({1, 0})->Args({1, 1})->Args({3, 0})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
