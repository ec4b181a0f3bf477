// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OED_SPARSIFY_HPP
#define OED_SPARSIFY_HPP

#include "oed/design.hpp"

#include <optional>

namespace oed {

/// Direction gamma with sum_j gamma_j s_j s_j^T = 0 and sum_j gamma_j >= 0,
/// together with mu = max_j gamma_j / lambda_j > 0.
struct PruneDirection {
  Eigen::VectorXd gamma;
  double mu = 0.0;
};

/// Kernel direction of the vectorized rank-one matrices of the support, or
/// nothing when they are linearly independent. Rank is decided by a singular
/// value cutoff of 1e-12 relative to the largest one.
std::optional<PruneDirection> null_direction(const std::vector<Atom>& atoms,
                                             const SensitivityBasis& basis);

/// Caratheodory-style support-point removal: repeatedly moves along a kernel
/// direction until the rank-one matrices of the remaining atoms are linearly
/// independent. Preserves the Fisher matrix, never increases the total mass,
/// and bounds the support by n(n+1)/2 atoms.
DesignMeasure prune(const DesignMeasure& omega, const SensitivityBasis& basis);

} // namespace oed

#endif
