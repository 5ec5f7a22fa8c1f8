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

#include "ggpeps/exact.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ggpeps/fock.hpp"
#include "ggpeps/gstate.hpp"
#include "ggpeps/rng.hpp"

namespace ggpeps {

namespace {

// Weights below exp(-kNegligibleLog) relative to the largest one are zero
// at double precision and are skipped.
constexpr double kNegligibleLog = 80.0;

struct LayerFactor {
  RMatrix ainv;
  double log_abs_pf = 0.0;
  bool singular = false;
};

LayerFactor factor_layer(const RMatrix& A, bool with_inverse) {
  const Eigen::PartialPivLU<RMatrix> lu(A);
  LayerFactor f;
  const auto& LU = lu.matrixLU();
  for (Eigen::Index i = 0; i < LU.rows(); ++i)
    f.log_abs_pf += 0.5 * std::log(std::abs(LU(i, i)));
  f.singular = !(lu.rcond() > 1e-14);
  if (with_inverse && !f.singular) f.ainv = antisymmetrize(RMatrix(lu.inverse()));
  return f;
}

double fresh_log_weight(const GaugeConfig& G, const Ansatz& A) {
  const RMatrix Gin = assemble_Gamma_in(G);
  double lw = 0.0;
  for (int i = 0; i < A.n_layers(); ++i)
    lw += factor_layer(Gin + A.cache(i).D, false).log_abs_pf;
  return lw;
}

struct ConfigResult {
  double log_w = 0.0;
  double multiplicity = 1.0;
  bool skipped = false;
  LocalSample sample;
  cplx f_raise;
};

ConfigResult evaluate_config(const GaugeConfig& G, const Ansatz& A,
                             const ExactOptions& opts,
                             const std::vector<const RMatrix*>& inv) {
  ConfigResult r;
  r.sample = evaluate_local(G, A, inv, opts.estimator);
  if (opts.with_raise) {
    r.f_raise = 1.0;
    for (int i = 0; i < A.n_layers(); ++i) {
      r.f_raise *= electric_layer(*inv[i], A.cache(i), G,
                                  opts.estimator.electric_link, +1, false)
                       .value;
    }
  }
  return r;
}

[[noreturn]] void throw_singular(const GaugeConfig& G) {
  throw NumericalError("exact: singular Pfaffian matrix at configuration " +
                           std::to_string(G.code()) + " with non-negligible weight",
                       INFINITY);
}

ConfigResult evaluate_fresh(const GaugeConfig& G, const Ansatz& A,
                            const ExactOptions& opts) {
  const RMatrix Gin = assemble_Gamma_in(G);
  std::vector<LayerFactor> f;
  std::vector<const RMatrix*> inv;
  double lw = 0.0;
  for (int i = 0; i < A.n_layers(); ++i) {
    f.push_back(factor_layer(Gin + A.cache(i).D, true));
    if (f.back().singular) throw_singular(G);
    lw += f.back().log_abs_pf;
  }
  for (const LayerFactor& x : f) inv.push_back(&x.ainv);
  ConfigResult r = evaluate_config(G, A, opts, inv);
  r.log_w = lw;
  return r;
}

// Knuth's loopless reflected mixed-radix Gray code; visit(digits, j, step)
// is called after digit j changed by step (j = -1 on the first visit).
template <class Visit>
void gray_walk(int n, int radix, Visit&& visit) {
  std::vector<int> a(n, 0), o(n, 1), f(n + 1);
  for (int j = 0; j <= n; ++j) f[j] = j;
  visit(a, -1, 0);
  while (true) {
    const int j = f[0];
    f[0] = 0;
    if (j == n) return;
    a[j] += o[j];
    visit(a, j, o[j]);
    if (a[j] == 0 || a[j] == radix - 1) {
      o[j] = -o[j];
      f[j] = f[j + 1];
      f[j + 1] = j + 1;
    }
  }
}

// Per-layer Pfaffian caches along the walk. A layer whose matrix becomes
// singular drops its cache and is rebuilt from scratch once it recovers.
class GrayCaches {
 public:
  GrayCaches(const Ansatz& A, int interval) : G_(A.geom()), interval_(interval) {
    const RMatrix Gin = assemble_Gamma_in(G_);
    for (int i = 0; i < A.n_layers(); ++i) {
      mats_.push_back(Gin + A.cache(i).D);
      caches_.emplace_back();
      rebuild(static_cast<std::size_t>(i));
    }
  }

  void move(int link, int step) {
    const LatticeGeom& geom = G_.geom();
    const LinkId id = link_at(geom, link);
    const int s = staggering_sign(id.vertex);
    const int q = G_[link];
    const int qn = ((q + step) % geom.N() + geom.N()) % geom.N();
    const LinkBlockTable& tab = link_block_table(geom.N());
    const RMatrix change = tab.block(id.dir, s, qn) - tab.block(id.dir, s, q);
    const auto S = link_majorana_indices(geom, id);
    for (std::size_t i = 0; i < caches_.size(); ++i) {
      const RMatrix nb = gather_block(mats_[i], S) + change;
      for (int a = 0; a < kLinkMajoranas; ++a)
        for (int b = 0; b < kLinkMajoranas; ++b) mats_[i](S[a], S[b]) = nb(a, b);
      if (caches_[i]) {
        const double ratio = caches_[i]->pfaffian_ratio(S, nb);
        if (std::abs(ratio) > 1e-6) {
          caches_[i]->accept(S, nb, ratio);
          if (caches_[i]->needs_refresh()) caches_[i]->refresh();
          continue;
        }
      }
      rebuild(i);
    }
    G_.set(link, qn);
  }

  const GaugeConfig& config() const { return G_; }
  bool valid() const {
    return std::all_of(caches_.begin(), caches_.end(),
                       [](const auto& c) { return c.has_value(); });
  }
  double log_w() const {
    double lw = 0.0;
    for (const auto& c : caches_) {
      if (!c) return -INFINITY;
      lw += c->log_abs_pfaffian();
    }
    return lw;
  }
  std::vector<const RMatrix*> inverses() const {
    std::vector<const RMatrix*> v;
    for (const auto& c : caches_) v.push_back(&c->inverse());
    return v;
  }

 private:
  void rebuild(std::size_t i) {
    caches_[i].reset();
    if (factor_layer(mats_[i], false).singular) return;
    try {
      caches_[i].emplace(mats_[i], interval_);
    } catch (const NumericalError&) {
      caches_[i].reset();
    }
  }

  GaugeConfig G_;
  int interval_;
  std::vector<RMatrix> mats_;
  std::vector<std::optional<PfaffianCache>> caches_;
};

std::uint64_t ipow(int base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::uint64_t>(base);
  return r;
}

}  // namespace

std::uint64_t exact_config_count(const LatticeGeom& geom) {
  const double count = std::pow(static_cast<double>(geom.N()), geom.n_links());
  if (count > kMaxExactConfigs) {
    throw std::invalid_argument(
        "exact: " + std::to_string(geom.N()) + "^" +
        std::to_string(geom.n_links()) +
        " configurations exceed the exact-contraction limit of 1e7; use "
        "mode = mc");
  }
  return ipow(geom.N(), geom.n_links());
}

GaugeOrbits gauge_orbits(const LatticeGeom& geom) {
  const std::uint64_t n = exact_config_count(geom);
  GaugeOrbits out;
  out.orbit_of.assign(n, -1);
  std::vector<std::uint64_t> stack;
  for (std::uint64_t c = 0; c < n; ++c) {
    if (out.orbit_of[c] >= 0) continue;
    const int id = static_cast<int>(out.representatives.size());
    out.representatives.push_back(c);
    int size = 0;
    stack.assign(1, c);
    out.orbit_of[c] = id;
    while (!stack.empty()) {
      const std::uint64_t cur = stack.back();
      stack.pop_back();
      ++size;
      const GaugeConfig G = GaugeConfig::from_code(geom, cur);
      for (int v = 0; v < geom.n_vertices(); ++v) {
        const std::uint64_t nxt = gauge_transform(G, geom.vertex_at(v)).code();
        if (out.orbit_of[nxt] < 0) {
          out.orbit_of[nxt] = id;
          stack.push_back(nxt);
        }
      }
    }
    out.sizes.push_back(size);
  }
  return out;
}

std::vector<double> exact_log_weights(const Ansatz& A,
                                      ContractionStrategy strategy,
                                      int recompute_interval) {
  if (A.stale()) throw std::logic_error("exact_log_weights: ansatz caches are stale");
  const LatticeGeom& geom = A.geom();
  const std::uint64_t n = exact_config_count(geom);
  std::vector<double> lw(n, 0.0);
  if (strategy == ContractionStrategy::gray) {
    GrayCaches walk(A, recompute_interval);
    gray_walk(geom.n_links(), geom.N(),
              [&](const std::vector<int>&, int j, int step) {
                if (j >= 0) walk.move(j, step);
                lw[walk.config().code()] = walk.log_w();
              });
    return lw;
  }
  const GaugeOrbits orbits = gauge_orbits(geom);
  std::vector<double> per(orbits.representatives.size());
  for (std::size_t o = 0; o < per.size(); ++o) {
    per[o] = fresh_log_weight(
        GaugeConfig::from_code(geom, orbits.representatives[o]), A);
  }
  for (std::uint64_t c = 0; c < n; ++c) lw[c] = per[orbits.orbit_of[c]];
  return lw;
}

namespace {

struct ExactAccum {
  EnergyAccumulator energy;
  cplx raise_sum{0.0};
  double weight_sum = 0.0;
};

constexpr long kOneBin = std::numeric_limits<long>::max();

void accumulate(ExactAccum& acc, const ConfigResult& r, double weight) {
  if (r.sample.singular) {
    throw NumericalError("exact_contract: near-singular electric estimator",
                         INFINITY);
  }
  acc.energy.add(r.sample, weight);
  acc.raise_sum += weight * r.f_raise;
  acc.weight_sum += weight;
}

}  // namespace

ExactResult exact_contract(const Ansatz& A, double g, const ExactOptions& opts) {
  if (A.stale()) throw std::logic_error("exact_contract: ansatz caches are stale");
  if (opts.threads < 1) throw std::invalid_argument("exact.threads must be positive");
  const LatticeGeom& geom = A.geom();
  const std::uint64_t n = exact_config_count(geom);
  ExactAccum total{EnergyAccumulator(geom, g, A.n_params(), kOneBin)};
  ExactResult out;

  if (opts.strategy == ContractionStrategy::orbit) {
    const GaugeOrbits orbits = gauge_orbits(geom);
    const std::size_t n_orb = orbits.representatives.size();
    std::vector<double> lw(n_orb);
    for (std::size_t o = 0; o < n_orb; ++o)
      lw[o] = fresh_log_weight(GaugeConfig::from_code(geom, orbits.representatives[o]), A);
    const double lmax = *std::max_element(lw.begin(), lw.end());
    if (!std::isfinite(lmax)) throw NumericalError("exact: every weight vanishes", INFINITY);

    std::vector<ConfigResult> res(n_orb);
    auto work = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t o = lo; o < hi; ++o) {
        if (lw[o] - lmax < -kNegligibleLog) {
          res[o].skipped = true;
          continue;
        }
        res[o] = evaluate_fresh(
            GaugeConfig::from_code(geom, orbits.representatives[o]), A, opts);
        res[o].multiplicity = orbits.sizes[o];
      }
    };
    const std::size_t nt = std::min<std::size_t>(opts.threads, n_orb);
    const std::size_t chunk = (n_orb + nt - 1) / nt;
    std::vector<std::future<void>> futs;
    for (std::size_t t = 1; t < nt; ++t) {
      futs.push_back(std::async(std::launch::async, work, t * chunk,
                                std::min(n_orb, (t + 1) * chunk)));
    }
    work(0, std::min(n_orb, chunk));
    for (auto& f : futs) f.get();

    for (const ConfigResult& r : res) {
      if (r.skipped) continue;
      accumulate(total, r, r.multiplicity * std::exp(r.log_w - lmax));
    }
    out.n_configs = n_orb;
  } else {
    const std::vector<double> lw =
        exact_log_weights(A, ContractionStrategy::gray, opts.recompute_interval);
    const double lmax = *std::max_element(lw.begin(), lw.end());
    if (!std::isfinite(lmax)) throw NumericalError("exact: every weight vanishes", INFINITY);
    GrayCaches walk(A, opts.recompute_interval);
    gray_walk(geom.n_links(), geom.N(),
              [&](const std::vector<int>&, int j, int step) {
                if (j >= 0) walk.move(j, step);
                const double l = walk.log_w();
                if (l - lmax < -kNegligibleLog) return;
                if (!walk.valid()) throw_singular(walk.config());
                ConfigResult r =
                    evaluate_config(walk.config(), A, opts, walk.inverses());
                accumulate(total, r, std::exp(l - lmax));
              });
    out.n_configs = n;
  }

  const EnergyAccumulator::Result r = total.energy.result();
  out.energy = r.energy.mean;
  out.energy_density = r.energy_density.mean;
  out.p = {r.p_re.mean, r.p_im.mean};
  out.w11 = {r.w_re.mean, r.w_im.mean};
  if (opts.with_raise) out.p_dag = total.raise_sum / total.weight_sum;
  for (std::size_t p = 0; p < r.grad.size(); ++p) {
    out.grad.push_back(r.grad[p].mean);
    out.grad_imag.push_back(r.grad_imag[p].mean);
    out.p_grad_re.push_back(r.p_grad_re[p].mean);
  }
  return out;
}

cplx exact_diagonal_expectation(const Ansatz& A,
                                std::span<const OrientedLink> path) {
  const LatticeGeom& geom = A.geom();
  const std::vector<double> lw = exact_log_weights(A, ContractionStrategy::gray);
  const double lmax = *std::max_element(lw.begin(), lw.end());
  cplx num(0);
  double den = 0.0;
  for (std::uint64_t c = 0; c < lw.size(); ++c) {
    const double w = std::exp(lw[c] - lmax);
    num += w * wilson_estimator(GaugeConfig::from_code(geom, c), path);
    den += w;
  }
  return num / den;
}

// --- Full-matrix overlap formulas -------------------------------------------

namespace {

struct ProjectorData {
  CMatrix gamma;  // covariance of prod_l |omega_l(G')><omega_l(G)|
  cplx trace;     // <omega_G|omega_G'>
};

ProjectorData projector(const GaugeConfig& G, LinkId link, int shift) {
  const LatticeGeom& geom = G.geom();
  const int N = geom.N();
  const int dim = covariance_dim(geom);
  ProjectorData X{CMatrix::Zero(dim, dim), cplx(1.0)};
  const int target = link_index(geom, link);
  for (int l = 0; l < geom.n_links(); ++l) {
    const LinkId id = link_at(geom, l);
    const int s = staggering_sign(id.vertex);
    const auto idx = link_majorana_indices(geom, id);
    const LinkBlock in = link_in_block(G[l], id.dir, s, N);
    if (l == target && shift != 0) {
      const MixedLinkBlock mb = mixed_link_block(G[l], shift, id.dir, s, N);
      place_link_block<cplx>(X.gamma, idx, mb.gamma);
      X.trace *= in.norm_sq * mb.overlap_ratio;
    } else {
      place_link_block<cplx>(X.gamma, idx, in.gamma.cast<cplx>());
      X.trace *= in.norm_sq;
    }
  }
  return X;
}

CMatrix projector_inverse(const GaugeConfig& G, const CMatrix& gamma) {
  const LatticeGeom& geom = G.geom();
  CMatrix inv = CMatrix::Zero(gamma.rows(), gamma.cols());
  for (int l = 0; l < geom.n_links(); ++l) {
    const auto idx = link_majorana_indices(geom, link_at(geom, l));
    const CMatrix blk = gather_block<cplx>(gamma, idx);
    place_link_block<cplx>(inv, idx, CMatrix(blk.inverse()));
  }
  return inv;
}

double vertex_norm_product(const Ansatz& A, int layer) {
  const LayerParams& p = A.layer(layer);
  const double nv = vertex_D_block(t_matrix(p.y, p.z)).norm_sq;
  return std::pow(nv, A.geom().n_vertices());
}

}  // namespace

cplx electric_overlap_oracle(const Ansatz& A, LinkId link, int shift) {
  const LatticeGeom& geom = A.geom();
  const std::uint64_t n = exact_config_count(geom);
  auto term = [&](const GaugeConfig& G, int sh) {
    const ProjectorData X = projector(G, link, sh);
    const CMatrix Xinv = projector_inverse(G, X.gamma);
    const cplx pf_x = pfaffian<cplx>(X.gamma);
    cplx prod(1.0);
    for (int i = 0; i < A.n_layers(); ++i) {
      const CMatrix M = A.cache(i).D.cast<cplx>() - Xinv;
      prod *= X.trace * pf_x * pfaffian<cplx>(M);
    }
    return prod;
  };
  cplx num(0), den(0);
  for (std::uint64_t c = 0; c < n; ++c) {
    const GaugeConfig G = GaugeConfig::from_code(geom, c);
    num += term(G, shift);
    den += term(G, 0);
  }
  return num / den;
}

cplx pipeline_amplitude_product(const Ansatz& A, const GaugeConfig& G,
                                LinkId link, int shift) {
  const LatticeGeom& geom = A.geom();
  const ProjectorData X = projector(G, link, shift);
  const double scale = std::pow(0.5, kModesPerVertex * geom.n_vertices());
  cplx prod(1.0);
  for (int i = 0; i < A.n_layers(); ++i) {
    const CMatrix D = A.cache(i).D.cast<cplx>();
    prod *= vertex_norm_product(A, i) * X.trace * scale * pfaffian<cplx>(D) *
            pfaffian<cplx>(CMatrix(X.gamma + D));
  }
  return prod;
}

// --- Exact diagonalization ---------------------------------------------------

Eigen::SparseMatrix<double> build_hamiltonian(const LatticeGeom& geom,
                                              double g) {
  if (!(g > 0)) throw std::invalid_argument("ed: g must be positive");
  const std::uint64_t n = exact_config_count(geom);
  const double g2 = g * g;
  const double delta = 2.0 * std::numbers::pi / geom.N();
  std::vector<std::array<OrientedLink, 4>> plaqs;
  for (int v = 0; v < geom.n_vertices(); ++v)
    plaqs.push_back(plaquette_links(geom, geom.vertex_at(v)));

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n * (1 + 2 * geom.n_links()));
  std::vector<std::uint64_t> stride(geom.n_links(), 1);
  for (int l = 1; l < geom.n_links(); ++l)
    stride[l] = stride[l - 1] * static_cast<std::uint64_t>(geom.N());
  const int N = geom.N();
  for (std::uint64_t c = 0; c < n; ++c) {
    const GaugeConfig G = GaugeConfig::from_code(geom, c);
    double diag = geom.n_links() * g2;
    for (const auto& p : plaqs) {
      const int flux = path_flux(G, p);
      diag += (2.0 - 2.0 * std::cos(delta * flux)) / (2.0 * g2);
    }
    trip.emplace_back(c, c, diag);
    for (int l = 0; l < geom.n_links(); ++l) {
      const int q = G[l];
      const std::uint64_t base = c - static_cast<std::uint64_t>(q) * stride[l];
      for (int sh : {-1, +1}) {
        const int qn = ((q + sh) % N + N) % N;
        trip.emplace_back(base + static_cast<std::uint64_t>(qn) * stride[l], c,
                          -g2 / 2.0);
      }
    }
  }
  Eigen::SparseMatrix<double> H(static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(n));
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

namespace {

void project_sector(const GaugeOrbits& orbits, Eigen::VectorXd& v) {
  std::vector<double> sum(orbits.sizes.size(), 0.0);
  for (Eigen::Index c = 0; c < v.size(); ++c) sum[orbits.orbit_of[c]] += v[c];
  for (Eigen::Index c = 0; c < v.size(); ++c) {
    const int o = orbits.orbit_of[c];
    v[c] = sum[o] / orbits.sizes[o];
  }
}

std::string cache_file(const EDSpec& spec, const std::string& dir) {
  char name[128];
  std::snprintf(name, sizeof(name), "ed_L%d_N%d_g%.17g.json", spec.L, spec.N,
                spec.g);
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

EDResult ed_ground_energy(const EDSpec& spec, const std::string& cache_dir) {
  if (!cache_dir.empty()) {
    std::ifstream in(cache_file(spec, cache_dir));
    if (in) {
      const nlohmann::json j = nlohmann::json::parse(in);
      EDResult r;
      r.E0 = j.at("E0").get<double>();
      r.residual = j.at("residual").get<double>();
      r.sector_dim = j.at("sector_dim").get<int>();
      r.lanczos_steps = j.at("lanczos_steps").get<int>();
      r.from_cache = true;
      return r;
    }
  }

  const LatticeGeom geom(spec.L, spec.N);
  const Eigen::SparseMatrix<double> H = build_hamiltonian(geom, spec.g);
  const GaugeOrbits orbits = gauge_orbits(geom);
  const Eigen::Index n = H.rows();
  const int sector = static_cast<int>(orbits.sizes.size());
  const int max_steps = std::min(sector, 300);

  Rng rng(derive_seed(0x6564, static_cast<std::uint64_t>(spec.L)));
  Eigen::VectorXd start(n);
  for (Eigen::Index c = 0; c < n; ++c) start[c] = 1.0 + 0.1 * rng.uniform(-1.0, 1.0);
  project_sector(orbits, start);
  start.normalize();

  EDResult r;
  r.sector_dim = sector;
  for (int restart = 0; restart < 10; ++restart) {
    std::vector<Eigen::VectorXd> Q{start};
    std::vector<double> alpha, beta;
    for (int k = 0; k < max_steps; ++k) {
      Eigen::VectorXd w = H * Q[k];
      project_sector(orbits, w);
      alpha.push_back(Q[k].dot(w));
      for (int pass = 0; pass < 2; ++pass)
        for (const Eigen::VectorXd& q : Q) w -= q.dot(w) * q;
      const double b = w.norm();
      ++r.lanczos_steps;
      if (b < 1e-12 || k + 1 == max_steps) break;
      beta.push_back(b);
      Q.push_back(w / b);
    }
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      Tm(i, i) = alpha[i];
      if (i + 1 < m) Tm(i, i + 1) = Tm(i + 1, i) = beta[i];
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tm);
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) psi += es.eigenvectors()(i, 0) * Q[i];
    project_sector(orbits, psi);
    psi.normalize();
    const double e = psi.dot(H * psi);
    r.E0 = e;
    r.residual = (H * psi - e * psi).norm();
    r.ground_state.assign(psi.data(), psi.data() + n);
    if (r.residual <= 1e-9) break;
    start = psi;
  }
  if (r.residual > 1e-9) {
    throw NumericalError("ed: Lanczos did not converge (residual " +
                             std::to_string(r.residual) + ")",
                         r.residual);
  }

  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    const nlohmann::json j = {{"L", spec.L},
                              {"N", spec.N},
                              {"g", spec.g},
                              {"E0", r.E0},
                              {"residual", r.residual},
                              {"sector_dim", r.sector_dim},
                              {"lanczos_steps", r.lanczos_steps}};
    std::ofstream(cache_file(spec, cache_dir)) << j.dump(2) << "\n";
  }
  return r;
}

double ed_dense_ground_energy(const EDSpec& spec) {
  const LatticeGeom geom(spec.L, spec.N);
  const Eigen::SparseMatrix<double> H = build_hamiltonian(geom, spec.g);
  const GaugeOrbits orbits = gauge_orbits(geom);
  const Eigen::Index m = static_cast<Eigen::Index>(orbits.sizes.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index c = 0; c < H.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(H, c); it; ++it) {
      const int o = orbits.orbit_of[it.col()];
      const int op = orbits.orbit_of[it.row()];
      M(op, o) += it.value() / std::sqrt(static_cast<double>(orbits.sizes[o]) *
                                         orbits.sizes[op]);
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

double gauss_law_residual(const LatticeGeom& geom, std::span<const double> psi) {
  const std::uint64_t n = exact_config_count(geom);
  if (psi.size() != n) throw std::invalid_argument("gauss_law_residual: size mismatch");
  double worst = 0.0;
  for (int v = 0; v < geom.n_vertices(); ++v) {
    double s = 0.0;
    for (std::uint64_t c = 0; c < n; ++c) {
      const std::uint64_t t =
          gauge_transform(GaugeConfig::from_code(geom, c), geom.vertex_at(v)).code();
      const double d = psi[t] - psi[c];
      s += d * d;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

// --- Literal Fock amplitudes -------------------------------------------------

namespace {

using fock::annihilate;
using fock::create;

double angle(int N) { return 2.0 * std::numbers::pi / N; }

}  // namespace

cplx fock_amplitude_single_vertex(const LayerParams& params,
                                  const GaugeConfig& G) {
  const LatticeGeom& geom = G.geom();
  if (geom.L() != 1) {
    throw std::invalid_argument("fock_amplitude_single_vertex: needs L = 1");
  }
  const fock::FockSpace space(kModesPerVertex);
  const double d = angle(geom.N());
  const int qh = G[0];
  const int qv = G[1];
  const fock::OperatorProgram prog = {
      fock::ExpQuadratic{fiducial_exponent(t_matrix(params.y, params.z))},
      fock::NumberPhase{kRPlus, qh * d},
      fock::NumberPhase{kRMinus, -qh * d},
      fock::NumberPhase{kUPlus, qv * d},
      fock::NumberPhase{kUMinus, -qv * d},
      fock::ExpQuadratic{{{1.0, annihilate(kRMinus), annihilate(kLPlus)},
                          {1.0, annihilate(kRPlus), annihilate(kLMinus)},
                          {1.0, annihilate(kDMinus), annihilate(kUPlus)},
                          {1.0, annihilate(kDPlus), annihilate(kUMinus)}}},
  };
  return space.run(prog)[0];
}

namespace {

constexpr int kToyModes = 4;  // l+, l-, r+, r-
constexpr std::array<int, 2> kToySign{+1, -1};

int toy_mode(int vertex, int m) { return kToyModes * vertex + m; }

fock::QuadraticOp toy_vertex_exponent(double y, int v) {
  return {{y, create(toy_mode(v, 0)), create(toy_mode(v, 2))},
          {-y, create(toy_mode(v, 3)), create(toy_mode(v, 1))}};
}

// Link k runs from r(x_k) to l(x_{1-k}).
std::array<int, kLinkMajoranas> toy_link_indices(int k) {
  const int t = k, h = 1 - k;
  const std::array<int, 4> modes{toy_mode(t, 2), toy_mode(t, 3), toy_mode(h, 0),
                                 toy_mode(h, 1)};
  std::array<int, kLinkMajoranas> idx{};
  for (int i = 0; i < 4; ++i) {
    idx[2 * i] = 2 * modes[i];
    idx[2 * i + 1] = 2 * modes[i] + 1;
  }
  return idx;
}

}  // namespace

cplx ToyRing::fock_amplitude(double y, int q0, int q1, int N) {
  const fock::FockSpace space(2 * kToyModes);
  const double d = angle(N);
  fock::QuadraticOp a = toy_vertex_exponent(y, 0);
  for (const auto& t : toy_vertex_exponent(y, 1)) a.push_back(t);
  fock::OperatorProgram prog{fock::ExpQuadratic{a}};
  const std::array<int, 2> q{q0, q1};
  fock::QuadraticOp w;
  for (int k = 0; k < 2; ++k) {
    const int t = k, h = 1 - k;
    const double phi = kToySign[k] * q[k] * d;
    prog.push_back(fock::NumberPhase{toy_mode(t, 2), phi});
    prog.push_back(fock::NumberPhase{toy_mode(t, 3), -phi});
    w.push_back({1.0, annihilate(toy_mode(t, 3)), annihilate(toy_mode(h, 0))});
    w.push_back({1.0, annihilate(toy_mode(t, 2)), annihilate(toy_mode(h, 1))});
  }
  prog.push_back(fock::ExpQuadratic{w});
  return space.run(prog)[0];
}

cplx ToyRing::pipeline_product(double y, int q0, int q1, int link, int shift,
                               int N) {
  const fock::FockSpace vspace(kToyModes);
  const fock::FockCovariance vc =
      fock::state_covariance(vspace, vspace.apply_exp(toy_vertex_exponent(y, 0),
                                                      vspace.vacuum()));
  const int dim = 4 * kToyModes;
  CMatrix D = CMatrix::Zero(dim, dim);
  for (int v = 0; v < 2; ++v)
    D.block(2 * kToyModes * v, 2 * kToyModes * v, 2 * kToyModes, 2 * kToyModes) =
        vc.gamma;

  CMatrix X = CMatrix::Zero(dim, dim);
  cplx trace(1.0);
  const std::array<int, 2> q{q0, q1};
  for (int k = 0; k < 2; ++k) {
    const auto idx = toy_link_indices(k);
    const LinkBlock in = link_in_block(q[k], Dir::horizontal, kToySign[k], N);
    if (k == link && shift != 0) {
      const MixedLinkBlock mb =
          mixed_link_block(q[k], shift, Dir::horizontal, kToySign[k], N);
      place_link_block<cplx>(X, idx, mb.gamma);
      trace *= in.norm_sq * mb.overlap_ratio;
    } else {
      place_link_block<cplx>(X, idx, in.gamma.cast<cplx>());
      trace *= in.norm_sq;
    }
  }
  const double scale = std::pow(0.5, 2 * kToyModes);
  return vc.norm_sq * vc.norm_sq * trace * scale * pfaffian<cplx>(D) *
         pfaffian<cplx>(CMatrix(X + D));
}

}  // namespace ggpeps
