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

#include "ggpeps/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>

#include "ggpeps/gstate.hpp"

namespace ggpeps {

void MCConfig::validate() const {
  auto bad = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (warmup < 0) bad("mc.warmup", "must be non-negative");
  if (samples < 1) bad("mc.samples", "must be positive");
  if (recompute_interval < 1) bad("mc.recompute_interval", "must be positive");
  if (chains < 1) bad("mc.chains", "must be positive");
  if (n_bins < 2) bad("mc.n_bins", "must be at least 2");
  if (thin < 1) bad("mc.thin", "must be positive");
  if (samples / thin < 2L * n_bins) {
    bad("mc.samples", "too few measurements for " + std::to_string(n_bins) +
                          " bins");
  }
}

double binned_error(std::span<const double> samples, int n_bins) {
  if (n_bins < 2 || samples.size() < 2 * static_cast<std::size_t>(n_bins)) {
    throw std::invalid_argument("binned_error: need at least 2 * n_bins samples");
  }
  const long per = static_cast<long>(samples.size()) / n_bins;
  BinnedChannels ch(1, per);
  // Trailing samples that do not fill a whole bin are dropped.
  for (long i = 0; i < per * n_bins; ++i) {
    const double v = samples[static_cast<std::size_t>(i)];
    ch.add(std::span<const double>(&v, 1));
  }
  return ch.jackknife([](const std::vector<double>& m) { return m[0]; }).err;
}

std::pair<double, double> binned_error(std::span<const cplx> samples,
                                       int n_bins) {
  std::vector<double> re(samples.size()), im(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    re[i] = samples[i].real();
    im[i] = samples[i].imag();
  }
  return {binned_error(re, n_bins), binned_error(im, n_bins)};
}

double log_weight_fresh(const GaugeConfig& G, const Ansatz& A) {
  const RMatrix Gin = assemble_Gamma_in(G);
  double lw = 0.0;
  for (int i = 0; i < A.n_layers(); ++i)
    lw += log_det(RMatrix(Gin + A.cache(i).D)).log_abs / 2.0;
  return lw;
}

// --- Chain -------------------------------------------------------------------

Chain::Chain(const Ansatz& A, std::uint64_t seed, int recompute_interval)
    : A_(&A), G_(A.geom()), rng_(seed) {
  const RMatrix Gin = assemble_Gamma_in(G_);
  for (int i = 0; i < A.n_layers(); ++i)
    caches_.emplace_back(Gin + A.cache(i).D, recompute_interval);
}

bool Chain::step() {
  const LatticeGeom& geom = G_.geom();
  const int N = geom.N();
  const int l = rng_.below(geom.n_links());
  const int q = G_[l];
  const int qn = (q + 1 + rng_.below(N - 1)) % N;
  const LinkId link = link_at(geom, l);
  const int s = staggering_sign(link.vertex);
  const LinkBlockTable& tab = link_block_table(N);
  const RMatrix change = tab.block(link.dir, s, qn) - tab.block(link.dir, s, q);
  const auto S = link_majorana_indices(geom, link);

  std::vector<RMatrix> blocks;
  std::vector<double> ratios;
  blocks.reserve(caches_.size());
  ratios.reserve(caches_.size());
  double ratio = 1.0;
  for (PfaffianCache& c : caches_) {
    blocks.push_back(gather_block(c.matrix(), S) + change);
    ratios.push_back(c.pfaffian_ratio(S, blocks.back()));
    ratio *= ratios.back();
  }
  ++steps_;
  if (ratio < -1e-8) ++negative_;
  const double u = rng_.uniform();
  if (!(u < ratio)) return false;

  for (std::size_t i = 0; i < caches_.size(); ++i) {
    caches_[i].accept(S, blocks[i], ratios[i]);
    if (caches_[i].needs_refresh()) caches_[i].refresh();
  }
  G_.set(l, qn);
  ++accepted_;
  return true;
}

std::vector<const RMatrix*> Chain::inverses() const {
  std::vector<const RMatrix*> out;
  for (const PfaffianCache& c : caches_) out.push_back(&c.inverse());
  return out;
}

double Chain::log_weight() const {
  double lw = 0.0;
  for (const PfaffianCache& c : caches_) lw += c.log_abs_pfaffian();
  return lw;
}

void Chain::refresh() {
  for (PfaffianCache& c : caches_) c.refresh();
}

// --- run_chain -------------------------------------------------------------

namespace {

struct ChainOutput {
  EnergyAccumulator energy;
  BinnedChannels wilson;
  long steps = 0;
  long accepted = 0;
  long excluded = 0;
  long negative = 0;
  double drift = 0.0;
};

ChainOutput run_one(const Ansatz& A, double g, const ObservableSet& obs,
                    const MCConfig& cfg, std::uint64_t seed) {
  const LatticeGeom& geom = A.geom();
  const long n_meas = cfg.samples / cfg.thin;
  const long bin_size = std::max(1L, n_meas / cfg.n_bins);
  const int nw = static_cast<int>(obs.wilson_loops.size());

  std::vector<std::vector<std::vector<OrientedLink>>> paths;
  for (auto [R1, R2] : obs.wilson_loops) {
    std::vector<std::vector<OrientedLink>> per;
    if (obs.wilson_translation_average) {
      for (int v = 0; v < geom.n_vertices(); ++v)
        per.push_back(wilson_path(geom, geom.vertex_at(v), R1, R2));
    } else {
      per.push_back(wilson_path(geom, {0, 0}, R1, R2));
    }
    paths.push_back(std::move(per));
  }

  ChainOutput out{EnergyAccumulator(geom, g, A.n_params(), bin_size),
                  BinnedChannels(std::max(1, 2 * nw), bin_size)};
  Chain chain(A, seed, cfg.recompute_interval);
  for (long t = 0; t < cfg.warmup; ++t) chain.step();

  EstimatorOptions est = obs.estimator;
  est.with_grad = obs.gradient;
  std::vector<double> wv(static_cast<std::size_t>(std::max(1, 2 * nw)), 0.0);
  for (long t = 0; t < cfg.samples; ++t) {
    chain.step();
    if ((t + 1) % cfg.thin != 0) continue;
    const GaugeConfig& G = chain.config();
    if (obs.energy) {
      const auto inv = chain.inverses();
      const LocalSample s = evaluate_local(G, A, inv, est);
      if (s.singular) {
        ++out.excluded;
      } else {
        out.energy.add(s);
      }
    }
    if (nw > 0) {
      for (int k = 0; k < nw; ++k) {
        cplx w(0);
        for (const auto& p : paths[k]) w += wilson_estimator(G, p);
        w /= static_cast<double>(paths[k].size());
        wv[2 * k] = w.real();
        wv[2 * k + 1] = w.imag();
      }
      out.wilson.add(wv);
    }
  }
  out.steps = chain.steps();
  out.accepted = chain.accepted();
  out.negative = chain.negative_ratios();
  const double tracked = chain.log_weight();
  const double fresh = log_weight_fresh(chain.config(), A);
  out.drift = std::abs(tracked - fresh) / std::max(1.0, std::abs(fresh));
  return out;
}

}  // namespace

RunResult run_chain(const Ansatz& A, double g, const ObservableSet& obs,
                    const MCConfig& cfg) {
  cfg.validate();
  if (A.stale()) throw std::logic_error("run_chain: ansatz caches are stale");
  std::vector<std::future<ChainOutput>> futs;
  for (int c = 0; c < cfg.chains; ++c) {
    const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(c));
    futs.push_back(std::async(cfg.chains > 1 ? std::launch::async : std::launch::deferred,
                              run_one, std::cref(A), g, std::cref(obs),
                              std::cref(cfg), seed));
  }
  std::vector<ChainOutput> outs;
  for (auto& f : futs) outs.push_back(f.get());

  ChainOutput& total = outs.front();
  for (std::size_t c = 1; c < outs.size(); ++c) {
    total.energy.merge(outs[c].energy);
    total.wilson.merge(outs[c].wilson);
    total.steps += outs[c].steps;
    total.accepted += outs[c].accepted;
    total.excluded += outs[c].excluded;
    total.negative += outs[c].negative;
    total.drift = std::max(total.drift, outs[c].drift);
  }

  RunResult r;
  r.n_measurements = (cfg.samples / cfg.thin) * cfg.chains;
  r.excluded = total.excluded;
  r.negative_ratios = total.negative;
  r.max_cache_drift = total.drift;
  r.acceptance_rate = static_cast<double>(total.accepted) /
                      static_cast<double>(std::max(1L, total.steps));
  if (obs.energy) {
    const double rate = static_cast<double>(r.excluded) /
                        static_cast<double>(r.n_measurements);
    if (rate > 1e-6) {
      throw NumericalError(
          "run_chain: " + std::to_string(r.excluded) + " of " +
              std::to_string(r.n_measurements) +
              " samples had a near-singular electric estimator (rate " +
              std::to_string(rate) + " > 1e-6)",
          rate);
    }
    r.energy = total.energy.result();
  }
  for (std::size_t k = 0; k < obs.wilson_loops.size(); ++k) {
    WilsonEstimate we;
    we.R1 = obs.wilson_loops[k].first;
    we.R2 = obs.wilson_loops[k].second;
    const int c = static_cast<int>(2 * k);
    const JackknifeValue re =
        total.wilson.jackknife([c](const std::vector<double>& m) { return m[c]; });
    const JackknifeValue im = total.wilson.jackknife(
        [c](const std::vector<double>& m) { return m[c + 1]; });
    we.estimate.mean = {re.mean, im.mean};
    we.estimate.stderr_re = re.err;
    we.estimate.stderr_im = im.err;
    we.estimate.n_samples = total.wilson.n_samples();
    we.estimate.n_bins = total.wilson.n_bins();
    we.estimate.acceptance_rate = r.acceptance_rate;
    r.wilson.push_back(we);
  }
  return r;
}

}  // namespace ggpeps
