// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OED_MESH_HPP
#define OED_MESH_HPP

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace oed {

/// Uniform Friedrichs-Keller triangulation of the unit square.
///
/// Every square cell of width 2^-level is split along its SW->NE diagonal,
/// so all triangles are right isoceles with legs 2^-level and diameter
/// h = sqrt(2) * 2^-level. Nodes are ordered lexicographically in (x1, x2).
struct Mesh {
  int level = 0;
  int nodes_per_side = 0;
  double h = 0.0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<bool> boundary;

  int node_count() const { return static_cast<int>(nodes.rows()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int interior_count() const {
    const int m = nodes_per_side - 2;
    return m * m;
  }
  bool is_boundary(int node) const { return boundary[static_cast<std::size_t>(node)]; }

  int node_index(int i, int j) const { return i * nodes_per_side + j; }

  /// Grid node closest to an arbitrary point of [0,1]^2 (ties round up).
  int nearest_node(const Eigen::Vector2d& p) const;
};

/// Builds the level-k triangulation; level must lie in [1, 12].
Mesh build_mesh(int level);

} // namespace oed

#endif
