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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace ggpeps {

/// Link direction. Horizontal links point along +e1 ("right"), vertical
/// links along +e2 ("up").
enum class Dir : std::uint8_t { horizontal = 0, vertical = 1 };

struct Vertex {
  int x1 = 0;
  int x2 = 0;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// Periodic L x L square lattice carrying a Z_N gauge field.
///
/// Canonical ordering: vertices row-major with x1 fastest
/// (index = x1 + L * x2); links ordered by vertex, horizontal before
/// vertical (index = 2 * vertex + dir).
class LatticeGeom {
 public:
  explicit LatticeGeom(int L, int N = 3);

  int L() const noexcept { return L_; }
  int N() const noexcept { return N_; }
  int n_vertices() const noexcept { return L_ * L_; }
  int n_links() const noexcept { return 2 * L_ * L_; }
  int n_plaquettes() const noexcept { return L_ * L_; }

  Vertex wrap(Vertex v) const noexcept;
  int vertex_index(Vertex v) const noexcept;
  Vertex vertex_at(int index) const noexcept;
  Vertex shift(Vertex v, Dir d, int steps = 1) const noexcept;

  friend bool operator==(const LatticeGeom&, const LatticeGeom&) = default;

 private:
  int L_;
  int N_;
};

struct LinkId {
  Vertex vertex;
  Dir dir = Dir::horizontal;
  friend bool operator==(const LinkId&, const LinkId&) = default;
};

/// A link together with the sense in which a path traverses it:
/// +1 along the link orientation, -1 against it.
struct OrientedLink {
  LinkId link;
  int sign = 1;
};

int link_index(const LatticeGeom& geom, LinkId link) noexcept;
LinkId link_at(const LatticeGeom& geom, int ordinal) noexcept;

/// Endpoint of a link: the vertex the link points to.
Vertex link_head(const LatticeGeom& geom, LinkId link) noexcept;

/// (-1)^(x1 + x2); the origin is even.
int staggering_sign(Vertex v) noexcept;

/// The four links of the plaquette whose lower-left corner is p, in the
/// order (p1, p2, p3, p4) of the magnetic term Q_p1^dag Q_p2^dag Q_p3 Q_p4:
/// top (-), left (-), bottom (+), right (+). The signs give the
/// counter-clockwise orientation.
std::array<OrientedLink, 4> plaquette_links(const LatticeGeom& geom, Vertex p);

/// Counter-clockwise rectangular loop with R1 horizontal and R2 vertical
/// extent, starting at origin: bottom edge, right edge, top edge, left edge.
/// Throws std::invalid_argument unless 1 <= R1, R2 <= L.
std::vector<OrientedLink> wilson_path(const LatticeGeom& geom, Vertex origin,
                                      int R1, int R2);

/// Z_N group elements q in [0, N) on every link of the lattice.
class GaugeConfig {
 public:
  explicit GaugeConfig(const LatticeGeom& geom);
  GaugeConfig(const LatticeGeom& geom, std::vector<int> q);

  const LatticeGeom& geom() const noexcept { return geom_; }
  int size() const noexcept { return static_cast<int>(q_.size()); }

  int operator[](int ordinal) const noexcept { return q_[ordinal]; }
  int operator[](LinkId link) const noexcept {
    return q_[link_index(geom_, link)];
  }
  /// Stores value mod N.
  void set(int ordinal, int value) noexcept;
  void set(LinkId link, int value) noexcept {
    set(link_index(geom_, link), value);
  }

  std::span<const int> values() const noexcept { return q_; }

  /// Mixed-radix integer code of the configuration (link 0 least
  /// significant). Only meaningful when N^(2L^2) fits in 64 bits.
  std::uint64_t code() const noexcept;
  static GaugeConfig from_code(const LatticeGeom& geom, std::uint64_t code);

  friend bool operator==(const GaugeConfig& a, const GaugeConfig& b) {
    return a.geom_ == b.geom_ && a.q_ == b.q_;
  }

 private:
  LatticeGeom geom_;
  std::vector<int> q_;
};

/// Applies the local gauge transformation Theta(x):
/// q(x,r) += 1, q(x,u) += 1, q(x-e1,r) -= 1, q(x-e2,u) -= 1 (mod N).
GaugeConfig gauge_transform(const GaugeConfig& G, Vertex x);
void gauge_transform_inplace(GaugeConfig& G, Vertex x, int times = 1);

/// Sum of sign * q over the path, reduced to [0, N).
int path_flux(const GaugeConfig& G, std::span<const OrientedLink> path);

}  // namespace ggpeps
