// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#include "oed/gcg.hpp"

#include "oed/errors.hpp"
#include "oed/removal.hpp"
#include "oed/sparsify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace oed {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::MatrixXd support_vectors(const DesignMeasure& omega, const SensitivityBasis& basis) {
  Eigen::MatrixXd svecs(omega.support_size(), basis.parameter_count());
  for (int j = 0; j < omega.support_size(); ++j) {
    svecs.row(j) = basis.values.row(omega.atoms()[static_cast<std::size_t>(j)].node);
  }
  return svecs;
}

} // namespace

Variant variant_from_name(const std::string& name) {
  if (name == "gcg") return Variant::GCG;
  if (name == "spinat") return Variant::SPINAT;
  if (name == "pdap") return Variant::PDAP;
  throw ConfigError("unknown variant '" + name + "' (expected gcg, spinat, or pdap)");
}

std::string variant_name(Variant variant) {
  switch (variant) {
    case Variant::GCG: return "gcg";
    case Variant::SPINAT: return "spinat";
    case Variant::PDAP: return "pdap";
  }
  return "gcg";
}

double phi_m0(double t, double m0) {
  return t <= m0 ? t : (t * t + m0 * m0) / (2.0 * m0);
}

InsertionCandidate insertion_candidate(const Eigen::VectorXd& gradient_field, double beta,
                                       double m0) {
  InsertionCandidate candidate;
  if (gradient_field.size() == 0) return candidate;

  candidate.node = 0;
  candidate.gradient_value = gradient_field[0];
  for (Eigen::Index i = 1; i < gradient_field.size(); ++i) {
    if (gradient_field[i] < candidate.gradient_value) {
      candidate.gradient_value = gradient_field[i];
      candidate.node = static_cast<int>(i);
    }
  }
  candidate.coefficient = candidate.gradient_value >= -beta
                              ? 0.0
                              : -(m0 / beta) * candidate.gradient_value;
  return candidate;
}

double primal_dual_gap(const DesignMeasure& omega, const Eigen::VectorXd& gradient_field,
                       const InsertionCandidate& candidate, double beta, double m0) {
  double grad_dot = 0.0;
  for (const Atom& atom : omega.atoms()) grad_dot += atom.weight * gradient_field[atom.node];

  double gap = grad_dot + beta * omega.total_mass();
  if (candidate.coefficient > 0.0) {
    gap -= candidate.coefficient * candidate.gradient_value +
           beta * phi_m0(candidate.coefficient, m0);
  }
  return std::max(gap, 0.0);
}

ArmijoResult armijo_step(const std::function<double(double)>& objective_of_step,
                         double current_objective, double gap, double alpha, double gamma) {
  double step = 1.0;
  for (int halvings = 0; halvings <= 60; ++halvings) {
    const double trial = objective_of_step(step);
    if (std::isfinite(trial) && alpha * step * gap <= current_objective - trial) {
      return {step, trial, halvings};
    }
    step *= gamma;
  }
  throw SolverError("quasi-Armijo line search stagnated after 60 step reductions");
}

DesignMeasure default_initial_design(const Mesh& mesh, const SensitivityBasis& basis,
                                     const SymMatrix& prior) {
  const int n = basis.parameter_count();
  const SymMatrix prior_mat = prior.rows() == n ? prior : zero_prior(n);

  const Eigen::Vector2d reference[] = {{0.25, 0.25}, {0.25, 0.75}, {0.75, 0.5}};
  const Eigen::Vector2d fallback[] = {{0.5, 0.5}, {0.25, 0.5}, {0.75, 0.25}};

  DesignMeasure design;
  for (const auto& p : reference) {
    const int node = mesh.nearest_node(p);
    design.add(node, basis.point_at(node), 1.0);
  }
  for (const auto& p : fallback) {
    if (positive_definite(fisher(design, basis) + prior_mat)) break;
    const int node = mesh.nearest_node(p);
    design.add(node, basis.point_at(node), 1.0);
  }
  if (!positive_definite(fisher(design, basis) + prior_mat)) {
    throw ConfigError("default initial design has a singular information matrix");
  }
  return design;
}

SolveResult solve(const SolverConfig& config, const SensitivityBasis& basis) {
  if (!(config.beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(config.armijo_alpha > 0.0 && config.armijo_alpha <= 0.5)) {
    throw ConfigError("armijo_alpha must lie in (0, 1/2]");
  }
  if (!(config.armijo_gamma > 0.0 && config.armijo_gamma < 1.0)) {
    throw ConfigError("armijo_gamma must lie in (0, 1)");
  }
  if (!(config.tol > 0.0)) throw ConfigError("tol must be positive");
  if (config.max_iter < 1) throw ConfigError("max_iter must be at least 1");

  const int n = basis.parameter_count();
  const SymMatrix prior = config.prior.rows() == n ? config.prior : zero_prior(n);
  if (prior.rows() != n || prior.cols() != n) {
    throw ConfigError("prior matrix dimension does not match the basis");
  }
  const Criterion& criterion = config.criterion;
  const double beta = config.beta;

  DesignMeasure design = config.initial_design;
  if (design.support_size() > n * (n + 1) / 2) {
    throw ConfigError("initial design exceeds n(n+1)/2 support points");
  }
  for (const Atom& atom : design.atoms()) {
    if (atom.node < 0 || atom.node >= basis.count()) {
      throw ConfigError("initial design atom outside the candidate set");
    }
  }
  double objective_value = objective(design, basis, criterion, prior, beta);
  if (!std::isfinite(objective_value)) {
    throw ConfigError("initial design outside dom psi (information matrix not PD)");
  }

  SolveResult result;
  result.m0 = objective_value / beta;
  const double m0 = result.m0;
  const auto start = Clock::now();

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const SymMatrix info = fisher(design, basis);
    const SymMatrix crit_grad = criterion.gradient(info + prior);
    const Eigen::VectorXd field = gradient_field_from(crit_grad, basis);

    const InsertionCandidate candidate = insertion_candidate(field, beta, m0);
    const double gap = primal_dual_gap(design, field, candidate, beta, m0);

    IterationRecord record;
    record.iter = iter;
    record.objective = objective_value;
    record.gap = gap;
    record.support_size = design.support_size();
    record.total_mass = design.total_mass();
    record.wall_time_s = seconds_since(start);

    if (gap <= config.tol) {
      result.history.push_back(record);
      result.converged = true;
      break;
    }

    // Quasi-Armijo step along (1-s) omega + s v; the trial Fisher matrix is
    // the convex combination of the cached one and the inserted rank-one term.
    const double mass = design.total_mass();
    Eigen::VectorXd inserted;
    if (candidate.coefficient > 0.0) inserted = basis.vector_at(candidate.node);
    const auto trial_objective = [&](double s) {
      SymMatrix trial_info = (1.0 - s) * info;
      if (candidate.coefficient > 0.0) {
        trial_info += (s * candidate.coefficient) * (inserted * inserted.transpose());
      }
      const double value = criterion.value(trial_info + prior);
      if (!std::isfinite(value)) return value;
      return value + beta * phi_m0((1.0 - s) * mass + s * candidate.coefficient, m0);
    };
    const ArmijoResult armijo = armijo_step(trial_objective, objective_value, gap,
                                            config.armijo_alpha, config.armijo_gamma);

    DesignMeasure half = design;
    half.scale(1.0 - armijo.step);
    if (candidate.coefficient > 0.0) {
      half.add(candidate.node, basis.point_at(candidate.node),
               armijo.step * candidate.coefficient);
    }
    double objective_half = armijo.trial_objective;

    DesignMeasure next = half;
    double objective_next = objective_half;
    bool used_fallback = false;
    if (config.variant != Variant::GCG && !half.empty()) {
      Subproblem sub{support_vectors(half, basis), prior, criterion, beta};
      if (config.variant == Variant::SPINAT) {
        const SymMatrix half_grad = criterion.gradient(sub.information(half.weights()));
        Eigen::VectorXd grad_at_atoms(sub.size());
        for (int j = 0; j < sub.size(); ++j) {
          grad_at_atoms[j] = sub.svecs.row(j) * half_grad * sub.svecs.row(j).transpose();
        }
        next = half.with_weights(spinat_step(sub, half.weights(), grad_at_atoms));
      } else {
        const SubproblemResult sol = pdap_subproblem(sub, half.weights());
        next = half.with_weights(sol.lambda);
        used_fallback = sol.used_fallback;
      }
      objective_next = objective(next, basis, criterion, prior, beta);
    }

    if (config.post_process) {
      const DesignMeasure pruned = prune(next, basis);
      if (pruned.support_size() < next.support_size()) {
        next = pruned;
        objective_next = objective(next, basis, criterion, prior, beta);
      }
    }

    if (!(objective_next <= objective_half + 1e-12 * std::max(1.0, std::abs(objective_half)))) {
      next = half;
      objective_next = objective_half;
    }

    design = next;
    objective_value = objective_next;

    if (design.total_mass() > m0 * (1.0 + 1e-9)) {
      throw SolverError("iterate mass exceeds the bound M0 = F(omega_1)/beta");
    }

    record.step = armijo.step;
    record.inserted_node = candidate.coefficient > 0.0 ? candidate.node : -1;
    record.newton_fallback = used_fallback;
    result.history.push_back(record);
  }

  result.design = design;
  result.objective = objective_value;
  result.gap = result.history.empty() ? 0.0 : result.history.back().gap;
  return result;
}

} // namespace oed
