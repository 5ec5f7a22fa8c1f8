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

#include "ggpeps/lattice.hpp"

#include <stdexcept>
#include <string>

namespace ggpeps {

namespace {

int mod(int a, int n) noexcept {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

LatticeGeom::LatticeGeom(int L, int N) : L_(L), N_(N) {
  if (L < 1) {
    throw std::invalid_argument("lattice.L must be positive, got " +
                                std::to_string(L));
  }
  if (N < 2) {
    throw std::invalid_argument("lattice.N must be at least 2, got " +
                                std::to_string(N));
  }
}

Vertex LatticeGeom::wrap(Vertex v) const noexcept {
  return {mod(v.x1, L_), mod(v.x2, L_)};
}

int LatticeGeom::vertex_index(Vertex v) const noexcept {
  const Vertex w = wrap(v);
  return w.x1 + L_ * w.x2;
}

Vertex LatticeGeom::vertex_at(int index) const noexcept {
  return {index % L_, index / L_};
}

Vertex LatticeGeom::shift(Vertex v, Dir d, int steps) const noexcept {
  if (d == Dir::horizontal) {
    v.x1 += steps;
  } else {
    v.x2 += steps;
  }
  return wrap(v);
}

int link_index(const LatticeGeom& geom, LinkId link) noexcept {
  return 2 * geom.vertex_index(link.vertex) + static_cast<int>(link.dir);
}

LinkId link_at(const LatticeGeom& geom, int ordinal) noexcept {
  return {geom.vertex_at(ordinal / 2),
          ordinal % 2 == 0 ? Dir::horizontal : Dir::vertical};
}

Vertex link_head(const LatticeGeom& geom, LinkId link) noexcept {
  return geom.shift(link.vertex, link.dir);
}

int staggering_sign(Vertex v) noexcept {
  return mod(v.x1 + v.x2, 2) == 0 ? 1 : -1;
}

std::array<OrientedLink, 4> plaquette_links(const LatticeGeom& geom,
                                            Vertex p) {
  p = geom.wrap(p);
  const Vertex right = geom.shift(p, Dir::horizontal);
  const Vertex up = geom.shift(p, Dir::vertical);
  return {{
      {{up, Dir::horizontal}, -1},
      {{p, Dir::vertical}, -1},
      {{p, Dir::horizontal}, +1},
      {{right, Dir::vertical}, +1},
  }};
}

std::vector<OrientedLink> wilson_path(const LatticeGeom& geom, Vertex origin,
                                      int R1, int R2) {
  const int L = geom.L();
  if (R1 < 1 || R1 > L || R2 < 1 || R2 > L) {
    throw std::invalid_argument("wilson_path: extents must satisfy 1 <= R <= " +
                                std::to_string(L) + ", got (" +
                                std::to_string(R1) + ", " + std::to_string(R2) +
                                ")");
  }
  std::vector<OrientedLink> path;
  path.reserve(2 * (R1 + R2));
  Vertex v = geom.wrap(origin);
  for (int i = 0; i < R1; ++i) {
    path.push_back({{v, Dir::horizontal}, +1});
    v = geom.shift(v, Dir::horizontal);
  }
  for (int i = 0; i < R2; ++i) {
    path.push_back({{v, Dir::vertical}, +1});
    v = geom.shift(v, Dir::vertical);
  }
  for (int i = 0; i < R1; ++i) {
    v = geom.shift(v, Dir::horizontal, -1);
    path.push_back({{v, Dir::horizontal}, -1});
  }
  for (int i = 0; i < R2; ++i) {
    v = geom.shift(v, Dir::vertical, -1);
    path.push_back({{v, Dir::vertical}, -1});
  }
  return path;
}

GaugeConfig::GaugeConfig(const LatticeGeom& geom)
    : geom_(geom), q_(static_cast<std::size_t>(geom.n_links()), 0) {}

GaugeConfig::GaugeConfig(const LatticeGeom& geom, std::vector<int> q)
    : geom_(geom), q_(std::move(q)) {
  if (static_cast<int>(q_.size()) != geom.n_links()) {
    throw std::invalid_argument("GaugeConfig: expected " +
                                std::to_string(geom.n_links()) +
                                " link values, got " +
                                std::to_string(q_.size()));
  }
  for (int& v : q_) v = mod(v, geom.N());
}

void GaugeConfig::set(int ordinal, int value) noexcept {
  q_[static_cast<std::size_t>(ordinal)] = mod(value, geom_.N());
}

std::uint64_t GaugeConfig::code() const noexcept {
  std::uint64_t c = 0;
  for (auto it = q_.rbegin(); it != q_.rend(); ++it) {
    c = c * static_cast<std::uint64_t>(geom_.N()) +
        static_cast<std::uint64_t>(*it);
  }
  return c;
}

GaugeConfig GaugeConfig::from_code(const LatticeGeom& geom,
                                   std::uint64_t code) {
  GaugeConfig G(geom);
  const auto N = static_cast<std::uint64_t>(geom.N());
  for (int l = 0; l < geom.n_links(); ++l) {
    G.q_[static_cast<std::size_t>(l)] = static_cast<int>(code % N);
    code /= N;
  }
  return G;
}

void gauge_transform_inplace(GaugeConfig& G, Vertex x, int times) {
  const LatticeGeom& geom = G.geom();
  x = geom.wrap(x);
  const LinkId right{x, Dir::horizontal};
  const LinkId up{x, Dir::vertical};
  const LinkId left{geom.shift(x, Dir::horizontal, -1), Dir::horizontal};
  const LinkId down{geom.shift(x, Dir::vertical, -1), Dir::vertical};
  // Sequential updates so that self-loops (L = 1) cancel correctly.
  G.set(right, G[right] + times);
  G.set(up, G[up] + times);
  G.set(left, G[left] - times);
  G.set(down, G[down] - times);
}

GaugeConfig gauge_transform(const GaugeConfig& G, Vertex x) {
  GaugeConfig out = G;
  gauge_transform_inplace(out, x);
  return out;
}

int path_flux(const GaugeConfig& G, std::span<const OrientedLink> path) {
  int flux = 0;
  for (const OrientedLink& ol : path) flux += ol.sign * G[ol.link];
  return mod(flux, G.geom().N());
}

}  // namespace ggpeps
