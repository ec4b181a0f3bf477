// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#include "oed/sparsify.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace oed {

namespace {

constexpr double kRankRel = 1e-12;
constexpr double kTieRel = 1e-12;

// Isometric vectorization of s s^T: upper triangle, off-diagonal scaled by
// sqrt(2), so the rank test matches the Frobenius geometry.
Eigen::VectorXd vectorize_rank_one(const Eigen::VectorXd& s) {
  const Eigen::Index n = s.size();
  Eigen::VectorXd v(n * (n + 1) / 2);
  Eigen::Index pos = 0;
  const double root2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[pos++] = s[i] * s[i];
    for (Eigen::Index j = i + 1; j < n; ++j) v[pos++] = root2 * s[i] * s[j];
  }
  return v;
}

} // namespace

std::optional<PruneDirection> null_direction(const std::vector<Atom>& atoms,
                                             const SensitivityBasis& basis) {
  const int m = static_cast<int>(atoms.size());
  if (m == 0) return std::nullopt;
  const int n = basis.parameter_count();
  const int dim = n * (n + 1) / 2;

  Eigen::MatrixXd vecs(dim, m);
  for (int j = 0; j < m; ++j) {
    vecs.col(j) = vectorize_rank_one(basis.vector_at(atoms[static_cast<std::size_t>(j)].node));
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vecs, Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;

  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > kRankRel * sigma_max) ++rank;
  }
  if (rank >= m) return std::nullopt;

  PruneDirection dir;
  dir.gamma = svd.matrixV().col(m - 1);
  const double total = dir.gamma.sum();
  if (total < 0.0) dir.gamma = -dir.gamma;

  auto max_ratio = [&] {
    double mu = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      mu = std::max(mu, dir.gamma[j] / atoms[static_cast<std::size_t>(j)].weight);
    }
    return mu;
  };
  dir.mu = max_ratio();
  if (!(dir.mu > 0.0)) {
    // sum gamma == 0 with all components nonpositive: flip the SVD sign.
    dir.gamma = -dir.gamma;
    dir.mu = max_ratio();
  }
  return dir;
}

DesignMeasure prune(const DesignMeasure& omega, const SensitivityBasis& basis) {
  DesignMeasure result = omega;
  for (int pass = 0; pass < omega.support_size(); ++pass) {
    const auto dir = null_direction(result.atoms(), basis);
    if (!dir) break;

    Eigen::VectorXd weights = result.weights();
    for (int j = 0; j < weights.size(); ++j) {
      const double ratio = dir->gamma[j] / weights[j];
      // All atoms attaining mu hit zero weight analytically; drop them together.
      weights[j] = ratio >= dir->mu * (1.0 - kTieRel) ? 0.0
                                                      : weights[j] - dir->gamma[j] / dir->mu;
    }
    result = result.with_weights(weights);
  }
  return result;
}

} // namespace oed
