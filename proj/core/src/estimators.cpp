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

#include "ggpeps/estimators.hpp"

#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ggpeps {

namespace {

// Rows S of a (antisymmetric) inverse.
RMatrix gather_rows(const RMatrix& M, std::span<const int> S) {
  RMatrix Y(static_cast<Eigen::Index>(S.size()), M.cols());
  for (std::size_t i = 0; i < S.size(); ++i) Y.row(i) = M.row(S[i]);
  return Y;
}

// Y dD Y^T for the block-diagonal dD.
RMatrix sandwich_vertex_blocks(const RMatrix& Y, const RMatrix& block) {
  RMatrix Z(Y.rows(), Y.cols());
  for (Eigen::Index o = 0; o < Y.cols(); o += kMajoranaPerVertex) {
    Z.middleCols(o, kMajoranaPerVertex).noalias() =
        Y.middleCols(o, kMajoranaPerVertex) * block;
  }
  return Z * Y.transpose();
}

RMatrix fresh_inverse(const GaugeConfig& G, const LayerCache& c) {
  return inverse(RMatrix(assemble_Gamma_in(G) + c.D), 1e14);
}

}  // namespace

cplx wilson_estimator(const GaugeConfig& G,
                      std::span<const OrientedLink> path) {
  const int flux = path_flux(G, path);
  return std::polar(1.0, 2.0 * std::numbers::pi * flux / G.geom().N());
}

double magnetic_energy_estimator(const GaugeConfig& G, double g, Vertex p) {
  if (!(g > 0.0)) throw std::invalid_argument("coupling g must be positive");
  const auto plaq = plaquette_links(G.geom(), p);
  const cplx w = wilson_estimator(G, plaq);
  return (2.0 - 2.0 * w.real()) / (2.0 * g * g);
}

ElectricLayer electric_layer(const RMatrix& ainv, const LayerCache& cache,
                             const GaugeConfig& G, LinkId link, int shift,
                             bool with_grad) {
  if (shift != 1 && shift != -1) {
    throw std::invalid_argument("electric_layer: shift must be +1 or -1");
  }
  const LatticeGeom& geom = G.geom();
  const auto S = link_majorana_indices(geom, link);
  const int s = staggering_sign(link.vertex);
  const int q = G[link];
  const LinkBlockTable& tab = link_block_table(geom.N());
  const MixedLinkBlock& mx = tab.mixed(link.dir, s, q, shift);
  const CMatrix delta = mx.gamma - tab.block(link.dir, s, q).cast<cplx>();
  const CMatrix V = gather_block(ainv, S).cast<cplx>();

  ElectricLayer out;
  out.value = mx.overlap_ratio * pfaffian_block_ratio(V, delta);
  out.dvalue = {cplx(0), cplx(0)};
  if (!with_grad) return out;

  const RMatrix Y = gather_rows(ainv, S);
  const CMatrix M = CMatrix::Identity(kLinkMajoranas, kLinkMajoranas) + delta * V;
  const Eigen::PartialPivLU<CMatrix> lu(M);
  if (lu.rcond() > 1e-12) {
    // d log Pf(A~) - d log Pf(A) = 1/2 Tr((A~^-1 - A^-1) dD) = 1/2 Tr(K Y dD Y^T).
    const CMatrix K = lu.solve(delta);
    for (int a = 0; a < 2; ++a) {
      const RMatrix B = sandwich_vertex_blocks(Y, cache.dd[a]);
      out.dvalue[a] =
          out.value * 0.5 * (K.array() * B.transpose().cast<cplx>().array()).sum();
    }
    return out;
  }
  // The modified matrix is (numerically) singular: differentiate the bordered
  // Pfaffian through its cofactors instead. dV = Y dD Y^T.
  constexpr int k = kLinkMajoranas;
  CMatrix bordered(2 * k, 2 * k);
  bordered << delta, CMatrix::Identity(k, k), -CMatrix::Identity(k, k), V;
  const CMatrix C = pfaffian_cofactors<cplx>(bordered, k, k);
  const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
  for (int a = 0; a < 2; ++a) {
    const RMatrix B = sandwich_vertex_blocks(Y, cache.dd[a]);
    out.dvalue[a] = mx.overlap_ratio * sign * 0.5 *
                    (C.array() * B.cast<cplx>().array()).sum();
  }
  if (!std::isfinite(std::abs(out.dvalue[0])) || !std::isfinite(std::abs(out.dvalue[1])))
    out.singular = true;
  return out;
}

double log_norm_grad_from_inverse(const RMatrix& ainv, const LayerCache& cache,
                                  Param alpha) {
  return 0.5 * trace_with_vertex_blocks(ainv, cache.dd[static_cast<int>(alpha)]);
}

cplx electric_estimator(const GaugeConfig& G, LinkId link, const Ansatz& A,
                        int shift) {
  cplx f(1.0);
  for (int i = 0; i < A.n_layers(); ++i) {
    const RMatrix ainv = fresh_inverse(G, A.cache(i));
    f *= electric_layer(ainv, A.cache(i), G, link, shift, false).value;
  }
  return f;
}

cplx electric_grad_estimator(const GaugeConfig& G, LinkId link,
                             const Ansatz& A, int layer, Param alpha,
                             int shift) {
  cplx rest(1.0);
  cplx d(0.0);
  for (int i = 0; i < A.n_layers(); ++i) {
    const RMatrix ainv = fresh_inverse(G, A.cache(i));
    const ElectricLayer el =
        electric_layer(ainv, A.cache(i), G, link, shift, i == layer);
    if (el.singular) {
      throw NumericalError("electric_grad_estimator: singular modified block",
                           std::numeric_limits<double>::infinity());
    }
    if (i == layer) {
      d = el.dvalue[static_cast<int>(alpha)];
    } else {
      rest *= el.value;
    }
  }
  return rest * d;
}

LocalSample evaluate_local(const GaugeConfig& G, const Ansatz& A,
                           std::span<const RMatrix* const> ainv,
                           const EstimatorOptions& opts) {
  const LatticeGeom& geom = G.geom();
  const int nl = A.n_layers();
  if (static_cast<int>(ainv.size()) != nl) {
    throw std::invalid_argument("evaluate_local: one inverse per layer expected");
  }
  LocalSample out;
  out.R.assign(static_cast<std::size_t>(2 * nl), 0.0);
  out.df_el.assign(static_cast<std::size_t>(2 * nl), cplx(0));

  std::vector<LinkId> links;
  std::vector<Vertex> plaqs;
  if (opts.average_translations) {
    for (int l = 0; l < geom.n_links(); ++l) links.push_back(link_at(geom, l));
    for (int v = 0; v < geom.n_vertices(); ++v) plaqs.push_back(geom.vertex_at(v));
  } else {
    links.push_back(opts.electric_link);
    plaqs.push_back(opts.plaquette);
  }

  out.f_w = 0.0;
  for (Vertex p : plaqs) out.f_w += wilson_estimator(G, plaquette_links(geom, p));
  out.f_w /= static_cast<double>(plaqs.size());

  out.f_el = 0.0;
  std::vector<ElectricLayer> layers(static_cast<std::size_t>(nl));
  for (LinkId link : links) {
    cplx f(1.0);
    for (int i = 0; i < nl; ++i) {
      layers[i] = electric_layer(*ainv[i], A.cache(i), G, link, -1, opts.with_grad);
      if (layers[i].singular) out.singular = true;
      f *= layers[i].value;
    }
    out.f_el += f;
    if (opts.with_grad) {
      for (int i = 0; i < nl; ++i) {
        cplx rest(1.0);
        for (int j = 0; j < nl; ++j)
          if (j != i) rest *= layers[j].value;
        for (int a = 0; a < 2; ++a) out.df_el[2 * i + a] += rest * layers[i].dvalue[a];
      }
    }
  }
  const double nlinks = static_cast<double>(links.size());
  out.f_el /= nlinks;
  for (cplx& d : out.df_el) d /= nlinks;

  if (opts.with_grad) {
    for (int i = 0; i < nl; ++i) {
      for (Param a : {Param::y, Param::z}) {
        out.R[2 * i + static_cast<int>(a)] =
            log_norm_grad_from_inverse(*ainv[i], A.cache(i), a);
      }
    }
  }
  return out;
}

double local_energy(const LatticeGeom& geom, double g, cplx f_el, cplx f_w) {
  return geom.n_links() * (g * g / 2.0) * (2.0 - 2.0 * f_el.real()) +
         geom.n_plaquettes() * (1.0 / (2.0 * g * g)) * (2.0 - 2.0 * f_w.real());
}

std::vector<cplx> gradient_assemble(std::span<const GradientSample> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("gradient_assemble: at least 2 samples required");
  }
  const std::size_t np = samples.front().R.size();
  const double n = static_cast<double>(samples.size());
  cplx mF(0);
  std::vector<cplx> mdF(np, 0.0), mFR(np, 0.0);
  std::vector<double> mR(np, 0.0);
  for (const GradientSample& s : samples) {
    if (s.R.size() != np || s.dF.size() != np) {
      throw std::invalid_argument("gradient_assemble: inconsistent sample sizes");
    }
    mF += s.F;
    for (std::size_t p = 0; p < np; ++p) {
      mdF[p] += s.dF[p];
      mFR[p] += s.F * s.R[p];
      mR[p] += s.R[p];
    }
  }
  mF /= n;
  std::vector<cplx> out(np);
  for (std::size_t p = 0; p < np; ++p)
    out[p] = mdF[p] / n + mFR[p] / n - mF * (mR[p] / n);
  return out;
}

// --- BinnedChannels --------------------------------------------------------

BinnedChannels::BinnedChannels(int n_channels, long bin_size)
    : n_(n_channels), bin_size_(bin_size),
      open_(static_cast<std::size_t>(n_channels), 0.0) {
  if (n_channels < 1 || bin_size < 1) {
    throw std::invalid_argument("BinnedChannels: invalid channel count or bin size");
  }
}

void BinnedChannels::add(std::span<const double> values, double weight) {
  for (int c = 0; c < n_; ++c) open_[c] += weight * values[c];
  open_w_ += weight;
  ++count_;
  if (++in_bin_ == bin_size_) close_bin();
}

void BinnedChannels::close_bin() {
  bins_.push_back(open_);
  bin_w_.push_back(open_w_);
  std::fill(open_.begin(), open_.end(), 0.0);
  open_w_ = 0.0;
  in_bin_ = 0;
}

void BinnedChannels::merge(const BinnedChannels& other) {
  if (other.n_ != n_) {
    throw std::invalid_argument("BinnedChannels::merge: channel count mismatch");
  }
  bins_.insert(bins_.end(), other.bins_.begin(), other.bins_.end());
  bin_w_.insert(bin_w_.end(), other.bin_w_.begin(), other.bin_w_.end());
  if (other.open_w_ > 0.0) {
    bins_.push_back(other.open_);
    bin_w_.push_back(other.open_w_);
  }
  count_ += other.count_;
}

std::vector<double> BinnedChannels::means() const {
  std::vector<double> m = open_;
  double w = open_w_;
  for (std::size_t b = 0; b < bins_.size(); ++b) {
    for (int c = 0; c < n_; ++c) m[c] += bins_[b][c];
    w += bin_w_[b];
  }
  for (double& x : m) x /= w;
  return m;
}

// --- EnergyAccumulator -------------------------------------------------------

EnergyAccumulator::EnergyAccumulator(const LatticeGeom& geom, double g,
                                     int n_params, long bin_size)
    : geom_(geom), g_(g), np_(n_params), ch_(4 + 7 * n_params, bin_size) {
  if (!(g > 0.0)) throw std::invalid_argument("coupling g must be positive");
}

void EnergyAccumulator::add(const LocalSample& s, double weight) {
  std::vector<double> v(static_cast<std::size_t>(ch_.n_channels()));
  v[0] = s.f_el.real();
  v[1] = s.f_el.imag();
  v[2] = s.f_w.real();
  v[3] = s.f_w.imag();
  for (int p = 0; p < np_; ++p) {
    const double R = p < static_cast<int>(s.R.size()) ? s.R[p] : 0.0;
    const cplx dF = p < static_cast<int>(s.df_el.size()) ? s.df_el[p] : cplx(0);
    const int b = base(p);
    v[b + 0] = R;
    v[b + 1] = dF.real();
    v[b + 2] = dF.imag();
    v[b + 3] = s.f_el.real() * R;
    v[b + 4] = s.f_el.imag() * R;
    v[b + 5] = s.f_w.real() * R;
    v[b + 6] = s.f_w.imag() * R;
  }
  ch_.add(v, weight);
}

void EnergyAccumulator::merge(const EnergyAccumulator& other) {
  ch_.merge(other.ch_);
}

EnergyAccumulator::Result EnergyAccumulator::result() const {
  const double a = geom_.n_links() * g_ * g_;
  const double b = geom_.n_plaquettes() / (g_ * g_);
  const double c0 = a + b;
  const double nplaq = geom_.n_plaquettes();
  Result r;
  r.energy = ch_.jackknife([&](const std::vector<double>& m) {
    return c0 - a * m[0] - b * m[2];
  });
  r.energy_density = {r.energy.mean / nplaq, r.energy.err / nplaq};
  r.p_re = ch_.jackknife([](const std::vector<double>& m) { return m[0]; });
  r.p_im = ch_.jackknife([](const std::vector<double>& m) { return m[1]; });
  r.w_re = ch_.jackknife([](const std::vector<double>& m) { return m[2]; });
  r.w_im = ch_.jackknife([](const std::vector<double>& m) { return m[3]; });
  for (int p = 0; p < np_; ++p) {
    const int k = base(p);
    r.grad.push_back(ch_.jackknife([&](const std::vector<double>& m) {
      return -a * m[k + 1] - a * (m[k + 3] - m[0] * m[k]) -
             b * (m[k + 5] - m[2] * m[k]);
    }));
    r.grad_imag.push_back(ch_.jackknife([&](const std::vector<double>& m) {
      return -a * m[k + 2] - a * (m[k + 4] - m[1] * m[k]) -
             b * (m[k + 6] - m[3] * m[k]);
    }));
    r.p_grad_re.push_back(ch_.jackknife([&](const std::vector<double>& m) {
      return m[k + 1] + m[k + 3] - m[0] * m[k];
    }));
  }
  r.n_samples = ch_.n_samples();
  r.n_bins = ch_.n_bins();
  return r;
}

}  // namespace ggpeps
