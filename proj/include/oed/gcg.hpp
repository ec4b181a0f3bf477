// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OED_GCG_HPP
#define OED_GCG_HPP

#include "oed/design.hpp"
#include "oed/mesh.hpp"

#include <functional>
#include <string>
#include <vector>

namespace oed {

/// Weight-optimization strategy applied after each point insertion:
/// none (plain conditional gradient), one projected-gradient step (SPINAT),
/// or an exact solve of the support subproblem (PDAP).
enum class Variant { GCG, SPINAT, PDAP };

Variant variant_from_name(const std::string& name);
std::string variant_name(Variant variant);

struct SolverConfig {
  double beta = 1.0;
  SymMatrix prior;                      ///< I0; empty means zero
  Criterion criterion = Criterion::a();
  Variant variant = Variant::PDAP;
  bool post_process = true;             ///< support-point removal each iteration
  double armijo_alpha = 0.5;            ///< in (0, 1/2]
  double armijo_gamma = 0.5;            ///< in (0, 1)
  double tol = 1e-9;                    ///< primal-dual gap tolerance
  int max_iter = 20000;
  DesignMeasure initial_design;
};

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;  ///< F(omega^k)
  double gap = 0.0;        ///< Phi(omega^k)
  int support_size = 0;
  double step = 0.0;       ///< s^k; 0 on the terminating record
  int inserted_node = -1;  ///< -1 when theta^k = 0
  double wall_time_s = 0.0;
  double total_mass = 0.0;
  bool newton_fallback = false;
};

struct SolveResult {
  DesignMeasure design;
  std::vector<IterationRecord> history;
  bool converged = false;
  double m0 = 0.0;
  double objective = 0.0;
  double gap = 0.0;
};

/// Surrogate cost of the total mass: t below m0, quadratic growth above,
/// C^1 across the knee.
double phi_m0(double t, double m0);

struct InsertionCandidate {
  int node = -1;
  double gradient_value = 0.0;
  double coefficient = 0.0;  ///< theta; 0 when the gradient is >= -beta
};

/// Global minimizer of the gradient field (ties broken by lowest node index)
/// with theta = -(m0/beta) psi'(x_hat) where the bound -beta is violated.
/// v = theta * delta_{x_hat} minimizes the partially linearized problem.
InsertionCandidate insertion_candidate(const Eigen::VectorXd& gradient_field, double beta,
                                       double m0);

/// Phi(omega) = <psi'(omega), omega - v> + beta ||omega|| - beta phi_m0(||v||).
/// Upper bound for F(omega) - F(optimal); zero exactly at minimizers.
double primal_dual_gap(const DesignMeasure& omega, const Eigen::VectorXd& gradient_field,
                       const InsertionCandidate& candidate, double beta, double m0);

struct ArmijoResult {
  double step = 1.0;
  double trial_objective = 0.0;
  int halvings = 0;
};

/// Quasi-Armijo-Goldstein backtracking: the largest s = gamma^n with
/// alpha s Phi <= F(omega) - F_m0(omega + s (v - omega)). Non-finite trial
/// objectives count as failures; throws SolverError after 60 reductions.
ArmijoResult armijo_step(const std::function<double(double)>& objective_of_step,
                         double current_objective, double gap, double alpha, double gamma);

/// Successive point insertion: gradient scan, atom insertion, quasi-Armijo
/// step, then the variant's weight optimization and optional support pruning,
/// until the primal-dual gap falls below tol or max_iter is reached.
SolveResult solve(const SolverConfig& config, const SensitivityBasis& basis);

/// Unit weights at the nodes nearest (0.25,0.25), (0.25,0.75), (0.75,0.5),
/// extended by fallback nodes until the information matrix is positive
/// definite.
DesignMeasure default_initial_design(const Mesh& mesh, const SensitivityBasis& basis,
                                     const SymMatrix& prior = {});

} // namespace oed

#endif
