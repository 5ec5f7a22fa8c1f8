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

/**
 * @brief Per-configuration estimators and their parameter derivatives.
 *
 * For every layer i the Pfaffian matrix is A_i(G) = Gamma_in(G) + D_i;
 * |Psi_i(G)|^2 is proportional to Pf(A_i), and the fast kernels below only
 * need the inverse of A_i. Parameter index p = 2 * layer + alpha.
 */

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ggpeps/ansatz.hpp"
#include "ggpeps/galg.hpp"
#include "ggpeps/gstate.hpp"
#include "ggpeps/lattice.hpp"

namespace ggpeps {

/// prod exp(i sign q 2 pi / N) along the path.
cplx wilson_estimator(const GaugeConfig& G, std::span<const OrientedLink> path);

/// (1 / 2g^2)(2 - 2 Re W) for the plaquette with lower-left corner p.
double magnetic_energy_estimator(const GaugeConfig& G, double g,
                                 Vertex p = {0, 0});

/// Psi*(G')Psi(G) / |Psi(G)|^2 with G' = G shifted by `shift` (-1 lowers,
/// +1 raises) on `link`; the product over layers. Built from scratch.
cplx electric_estimator(const GaugeConfig& G, LinkId link, const Ansatz& A,
                        int shift = -1);

/// Explicit derivative of electric_estimator with respect to (layer, alpha).
cplx electric_grad_estimator(const GaugeConfig& G, LinkId link,
                             const Ansatz& A, int layer, Param alpha,
                             int shift = -1);

/// One layer's contribution to the electric estimator, from A_i^{-1}.
struct ElectricLayer {
  cplx value;               // overlap prefactor * Pf(A~) / Pf(A)
  std::array<cplx, 2> dvalue;  // d value / d alpha
  bool singular = false;      // derivative not finite
};

/// `ainv` is A_i^{-1} for the configuration G.
ElectricLayer electric_layer(const RMatrix& ainv, const LayerCache& cache,
                             const GaugeConfig& G, LinkId link, int shift,
                             bool with_grad);

/// R_i,alpha = d log |Psi_i|^2 / d alpha = 1/2 Tr(A_i^{-1} dD_i).
double log_norm_grad_from_inverse(const RMatrix& ainv, const LayerCache& cache,
                                  Param alpha);

struct EstimatorOptions {
  LinkId electric_link{{0, 0}, Dir::horizontal};
  Vertex plaquette{0, 0};
  /// Averages the electric and magnetic estimators over all links and
  /// plaquettes instead of using one representative.
  bool average_translations = false;
  bool with_grad = true;
};

/// Everything measured on one configuration.
struct LocalSample {
  cplx f_el;                 // electric (lowering) estimator
  cplx f_w;                  // plaquette estimator
  std::vector<double> R;     // per parameter
  std::vector<cplx> df_el;   // per parameter, explicit derivative
  bool singular = false;
};

/// `ainv[i]` is A_i^{-1} for the configuration G.
LocalSample evaluate_local(const GaugeConfig& G, const Ansatz& A,
                           std::span<const RMatrix* const> ainv,
                           const EstimatorOptions& opts);

/// n_links (g^2/2)(2 - 2 Re F_el) + n_plaq (1/2g^2)(2 - 2 Re F_W).
double local_energy(const LatticeGeom& geom, double g, cplx f_el, cplx f_w);

struct GradientSample {
  cplx F;
  std::vector<cplx> dF;    // explicit term, per parameter
  std::vector<double> R;   // log-derivative of |Psi|^2, per parameter
};

/// <dF> + <F R> - <F><R> per parameter. Throws for fewer than 2 samples.
std::vector<cplx> gradient_assemble(std::span<const GradientSample> samples);

/// Mean and jackknife error of a function of channel means.
struct JackknifeValue {
  double mean = 0.0;
  double err = 0.0;
};

/**
 * Weighted, binned accumulator of real channels. Bins are closed every
 * `bin_size` samples; jackknife resampling over bins gives errors for any
 * function of the channel means.
 */
class BinnedChannels {
 public:
  BinnedChannels(int n_channels, long bin_size);

  void add(std::span<const double> values, double weight = 1.0);
  /// Adds all bins of another accumulator with the same channel count.
  void merge(const BinnedChannels& other);

  int n_channels() const noexcept { return n_; }
  long n_samples() const noexcept { return count_; }
  int n_bins() const noexcept { return static_cast<int>(bins_.size()); }

  std::vector<double> means() const;

  /// f maps the vector of channel means to a scalar. With fewer than two
  /// bins the error is 0.
  template <class F>
  JackknifeValue jackknife(F&& f) const;

 private:
  void close_bin();

  int n_;
  long bin_size_;
  long count_ = 0;
  long in_bin_ = 0;
  std::vector<double> open_;
  double open_w_ = 0.0;
  std::vector<std::vector<double>> bins_;
  std::vector<double> bin_w_;
};

template <class F>
JackknifeValue BinnedChannels::jackknife(F&& f) const {
  // A partially filled last bin takes part as its own (lighter) bin.
  std::vector<const std::vector<double>*> sums;
  std::vector<double> w;
  for (std::size_t b = 0; b < bins_.size(); ++b) {
    sums.push_back(&bins_[b]);
    w.push_back(bin_w_[b]);
  }
  if (open_w_ > 0.0) {
    sums.push_back(&open_);
    w.push_back(open_w_);
  }
  const std::size_t n = static_cast<std::size_t>(n_);
  std::vector<double> tot(n, 0.0);
  double wtot = 0.0;
  for (std::size_t b = 0; b < sums.size(); ++b) {
    for (std::size_t c = 0; c < n; ++c) tot[c] += (*sums[b])[c];
    wtot += w[b];
  }
  std::vector<double> m(n);
  for (std::size_t c = 0; c < n; ++c) m[c] = tot[c] / wtot;
  JackknifeValue out;
  out.mean = f(static_cast<const std::vector<double>&>(m));
  const std::size_t nb = sums.size();
  if (nb < 2) return out;
  std::vector<double> jk(nb);
  double jbar = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const double wb = wtot - w[b];
    for (std::size_t c = 0; c < n; ++c) m[c] = (tot[c] - (*sums[b])[c]) / wb;
    jk[b] = f(static_cast<const std::vector<double>&>(m));
    jbar += jk[b];
  }
  jbar /= static_cast<double>(nb);
  double s = 0.0;
  for (double v : jk) s += (v - jbar) * (v - jbar);
  out.err = std::sqrt(s * static_cast<double>(nb - 1) / static_cast<double>(nb));
  return out;
}

/// Energy, plaquette, electric and gradient statistics accumulated from
/// LocalSamples.
class EnergyAccumulator {
 public:
  EnergyAccumulator(const LatticeGeom& geom, double g, int n_params,
                    long bin_size);

  void add(const LocalSample& s, double weight = 1.0);
  void merge(const EnergyAccumulator& other);

  long n_samples() const noexcept { return ch_.n_samples(); }
  int n_bins() const noexcept { return ch_.n_bins(); }
  const BinnedChannels& channels() const noexcept { return ch_; }

  struct Result {
    JackknifeValue energy;
    JackknifeValue energy_density;
    JackknifeValue p_re, p_im;   // <P>
    JackknifeValue w_re, w_im;   // <W(1,1)>
    std::vector<JackknifeValue> grad;       // dE / dp
    std::vector<JackknifeValue> grad_imag;  // imaginary part of the complex
                                            // local-energy gradient
    std::vector<JackknifeValue> p_grad_re;  // d Re<P> / dp
    long n_samples = 0;
    int n_bins = 0;
  };
  Result result() const;

 private:
  static int base(int p) { return 4 + 7 * p; }

  LatticeGeom geom_;
  double g_;
  int np_;
  BinnedChannels ch_;
};

}  // namespace ggpeps
