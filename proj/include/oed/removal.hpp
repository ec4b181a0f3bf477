// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OED_REMOVAL_HPP
#define OED_REMOVAL_HPP

#include "oed/design.hpp"

namespace oed {

/// Coefficient optimization problem on a fixed support:
///   min_{lambda >= 0} g(lambda) + beta ||lambda||_1,
///   g(lambda) = Psi(sum_j lambda_j s_j s_j^T + prior).
struct Subproblem {
  Eigen::MatrixXd svecs; ///< one sensitivity row per support point
  SymMatrix prior;
  Criterion criterion;
  double beta = 1.0;

  int size() const { return static_cast<int>(svecs.rows()); }

  SymMatrix information(const Eigen::VectorXd& lambda) const;

  /// g(lambda) + beta ||lambda||_1; +infinity outside dom Psi.
  double objective(const Eigen::VectorXd& lambda) const;

  /// grad g(lambda)_j = s_j^T Psi'(N(lambda)) s_j. Throws DomainError.
  Eigen::VectorXd smooth_gradient(const Eigen::VectorXd& lambda) const;
};

/// One projected-gradient step lambda_j <- max(lambda_j - sigma (grad_j + beta), 0)
/// with sigma halved from sigma_0 = max{100, -2 min_j lambda_j / (-grad_j - beta)}
/// until the objective does not increase. Returns lambda unchanged after 60
/// failed halvings. `gradient` holds psi' evaluated at the current support.
Eigen::VectorXd spinat_step(const Subproblem& sub, const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& gradient);

/// Hessian of lambda -> Psi(N(lambda)); positive semidefinite. For the A
/// criterion H_ij = 2 (s_i^T N^-1 s_j) (s_i^T N^-2 s_j).
Eigen::MatrixXd coefficient_hessian(const Subproblem& sub, const Eigen::VectorXd& lambda);

struct SubproblemResult {
  Eigen::VectorXd lambda;
  bool converged = false;
  bool used_fallback = false;
  int iterations = 0;
};

/// Solves the subproblem with a primal active-set semismooth Newton method,
/// warm-started at `warm_start` and globalized by backtracking on the
/// objective. Terminates when ||min(lambda, grad g + beta)||_inf <= tol;
/// after 100 Newton iterations it falls back to projected-gradient steps.
SubproblemResult pdap_subproblem(const Subproblem& sub, const Eigen::VectorXd& warm_start,
                                 double tol = 1e-12);

} // namespace oed

#endif
