// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#include "oed/removal.hpp"

#include "oed/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oed {

namespace {

Eigen::VectorXd clipped(const Eigen::VectorXd& v) { return v.cwiseMax(0.0); }

} // namespace

SymMatrix Subproblem::information(const Eigen::VectorXd& lambda) const {
  const Eigen::Index n = svecs.cols();
  SymMatrix info = prior.rows() == n ? SymMatrix(prior) : SymMatrix::Zero(n, n);
  for (int j = 0; j < size() && j < lambda.size(); ++j) {
    if (lambda[j] != 0.0) {
      info.selfadjointView<Eigen::Lower>().rankUpdate(svecs.row(j).transpose(), lambda[j]);
    }
  }
  info.triangularView<Eigen::StrictlyUpper>() = info.transpose();
  return info;
}

double Subproblem::objective(const Eigen::VectorXd& lambda) const {
  if ((lambda.array() < 0.0).any()) return std::numeric_limits<double>::infinity();
  const double value = criterion.value(information(lambda));
  return std::isfinite(value) ? value + beta * lambda.sum() : value;
}

Eigen::VectorXd Subproblem::smooth_gradient(const Eigen::VectorXd& lambda) const {
  const SymMatrix grad = criterion.gradient(information(lambda));
  Eigen::VectorXd out(size());
  for (int j = 0; j < size(); ++j) {
    out[j] = svecs.row(j) * grad * svecs.row(j).transpose();
  }
  return out;
}

Eigen::VectorXd spinat_step(const Subproblem& sub, const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& gradient) {
  const int m = sub.size();
  if (m == 0) return lambda;

  // sigma_0 = max{100, -2 min_j lambda_j / (-psi'(x_j) - beta)}; atoms with
  // -psi' = beta exactly contribute no update and are skipped.
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    const double denom = -gradient[j] - sub.beta;
    if (denom != 0.0) min_ratio = std::min(min_ratio, lambda[j] / denom);
  }
  const double sigma0 =
      std::isfinite(min_ratio) ? std::max(100.0, -2.0 * min_ratio) : 100.0;

  const double f_current = sub.objective(lambda);
  const Eigen::VectorXd direction = (gradient.array() + sub.beta).matrix();

  double sigma = sigma0;
  for (int halvings = 0; halvings <= 60; ++halvings) {
    const Eigen::VectorXd trial = clipped(lambda - sigma * direction);
    if (sub.objective(trial) <= f_current) return trial;
    sigma *= 0.5;
  }
  return lambda; // no descent found; keep the weights unchanged
}

Eigen::MatrixXd coefficient_hessian(const Subproblem& sub, const Eigen::VectorXd& lambda) {
  const SymMatrix info = sub.information(lambda);
  Eigen::LLT<SymMatrix> llt(info);
  if (llt.info() != Eigen::Success) {
    throw DomainError("coefficient Hessian requested outside PD(n)");
  }
  const Eigen::Index n = info.rows();
  const SymMatrix inv = llt.solve(SymMatrix::Identity(n, n));
  const Eigen::MatrixXd first = sub.svecs * inv * sub.svecs.transpose();

  Eigen::MatrixXd hess;
  switch (sub.criterion.kind()) {
    case Criterion::Kind::A: {
      const Eigen::MatrixXd second = sub.svecs * (inv * inv) * sub.svecs.transpose();
      hess = 2.0 * first.cwiseProduct(second);
      break;
    }
    case Criterion::Kind::WeightedA: {
      const SymMatrix& w = sub.criterion.weight();
      const Eigen::MatrixXd second = sub.svecs * (inv * w * w * inv) * sub.svecs.transpose();
      hess = 2.0 * first.cwiseProduct(second);
      break;
    }
    case Criterion::Kind::D: {
      double log_det = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixLLT()(i, i));
      const Eigen::VectorXd diag = first.diagonal();
      hess = std::exp(-log_det) * (diag * diag.transpose() + first.cwiseProduct(first));
      break;
    }
  }
  return 0.5 * (hess + hess.transpose());
}

SubproblemResult pdap_subproblem(const Subproblem& sub, const Eigen::VectorXd& warm_start,
                                 double tol) {
  SubproblemResult result;
  result.lambda = clipped(warm_start);
  if (sub.size() == 0) {
    result.converged = true;
    return result;
  }

  double f_current = sub.objective(result.lambda);
  if (!std::isfinite(f_current)) {
    throw DomainError("subproblem warm start outside dom psi");
  }
  Eigen::VectorXd best_lambda = result.lambda;
  double best_objective = f_current;

  const int m = sub.size();
  constexpr int kMaxNewton = 100;
  // Near the solution the descent per step drops below roundoff in F, so the
  // line search accepts a tiny relative drift; progress is measured by the
  // nonsmooth residual and the best iterate is tracked separately.
  const auto acceptable = [](double trial, double current) {
    return trial <= current + 1e-13 * std::max(1.0, std::abs(current));
  };

  for (int it = 1; it <= kMaxNewton; ++it) {
    result.iterations = it;
    const Eigen::VectorXd shifted =
        (sub.smooth_gradient(result.lambda).array() + sub.beta).matrix();
    const Eigen::VectorXd residual = result.lambda.cwiseMin(shifted);
    if (residual.lpNorm<Eigen::Infinity>() <= tol) {
      result.converged = true;
      return result;
    }

    // Active set A = {j : lambda_j - (grad g_j + beta) <= 0}; active weights
    // move to zero, the reduced Newton system runs on the complement.
    std::vector<int> inactive;
    inactive.reserve(static_cast<std::size_t>(m));
    Eigen::VectorXd direction(m);
    for (int j = 0; j < m; ++j) {
      if (result.lambda[j] - shifted[j] <= 0.0) {
        direction[j] = -result.lambda[j];
      } else {
        inactive.push_back(j);
      }
    }

    if (!inactive.empty()) {
      const Eigen::MatrixXd hess = coefficient_hessian(sub, result.lambda);
      const int mi = static_cast<int>(inactive.size());
      Eigen::MatrixXd hii(mi, mi);
      Eigen::VectorXd rhs(mi);
      for (int a = 0; a < mi; ++a) {
        const int ja = inactive[static_cast<std::size_t>(a)];
        rhs[a] = -shifted[ja];
        for (int b = 0; b < mi; ++b) {
          hii(a, b) = hess(ja, inactive[static_cast<std::size_t>(b)]);
        }
        for (int j = 0; j < m; ++j) {
          if (result.lambda[j] - shifted[j] <= 0.0) rhs[a] -= hess(ja, j) * direction[j];
        }
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hii);
      Eigen::VectorXd di = ldlt.solve(rhs);
      if (ldlt.info() != Eigen::Success || !di.allFinite()) {
        const double ridge = 1e-12 * std::max(1.0, hii.diagonal().maxCoeff());
        ldlt.compute(hii + ridge * Eigen::MatrixXd::Identity(mi, mi));
        di = ldlt.solve(rhs);
        if (!di.allFinite()) break;
      }
      for (int a = 0; a < mi; ++a) direction[inactive[static_cast<std::size_t>(a)]] = di[a];
    }

    bool accepted = false;
    double step = 1.0;
    for (int halvings = 0; halvings <= 60; ++halvings) {
      const Eigen::VectorXd trial = clipped(result.lambda + step * direction);
      const double f_trial = sub.objective(trial);
      if (std::isfinite(f_trial) && acceptable(f_trial, f_current)) {
        result.lambda = trial;
        f_current = f_trial;
        if (f_trial < best_objective) {
          best_objective = f_trial;
          best_lambda = trial;
        }
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }

  // Newton did not reach the tolerance: fall back to projected-gradient
  // steps, which keep the objective non-increasing.
  result.used_fallback = true;
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd grad = sub.smooth_gradient(result.lambda);
    const Eigen::VectorXd residual =
        result.lambda.cwiseMin((grad.array() + sub.beta).matrix());
    if (residual.lpNorm<Eigen::Infinity>() <= tol) {
      result.converged = true;
      break;
    }
    const Eigen::VectorXd next = spinat_step(sub, result.lambda, grad);
    if ((next - result.lambda).lpNorm<Eigen::Infinity>() == 0.0) break;
    result.lambda = next;
  }
  if (sub.objective(result.lambda) > best_objective) {
    result.lambda = best_lambda;
  }
  return result;
}

} // namespace oed
