// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#include "oed/mesh.hpp"

#include "oed/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oed {

int Mesh::nearest_node(const Eigen::Vector2d& p) const {
  const double cells = static_cast<double>(nodes_per_side - 1);
  const auto clamp_index = [&](double coord) {
    const long idx = std::lround(std::clamp(coord, 0.0, 1.0) * cells);
    return static_cast<int>(std::clamp<long>(idx, 0, nodes_per_side - 1));
  };
  return node_index(clamp_index(p.x()), clamp_index(p.y()));
}

Mesh build_mesh(int level) {
  if (level < 1 || level > 12) {
    throw ConfigError("mesh level " + std::to_string(level) + " outside [1, 12]");
  }

  Mesh mesh;
  mesh.level = level;
  mesh.nodes_per_side = (1 << level) + 1;
  mesh.h = std::sqrt(2.0) * std::pow(2.0, -level);

  const int n = mesh.nodes_per_side;
  const double spacing = 1.0 / static_cast<double>(n - 1);

  mesh.nodes.resize(static_cast<Eigen::Index>(n) * n, 2);
  mesh.boundary.assign(static_cast<std::size_t>(n) * n, false);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int id = mesh.node_index(i, j);
      mesh.nodes(id, 0) = i * spacing;
      mesh.nodes(id, 1) = j * spacing;
      mesh.boundary[static_cast<std::size_t>(id)] =
          (i == 0 || j == 0 || i == n - 1 || j == n - 1);
    }
  }

  mesh.triangles.reserve(2u * static_cast<std::size_t>(n - 1) * (n - 1));
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j + 1 < n; ++j) {
      const int sw = mesh.node_index(i, j);
      const int se = mesh.node_index(i + 1, j);
      const int ne = mesh.node_index(i + 1, j + 1);
      const int nw = mesh.node_index(i, j + 1);
      mesh.triangles.push_back({sw, se, ne});
      mesh.triangles.push_back({sw, ne, nw});
    }
  }
  return mesh;
}

} // namespace oed
