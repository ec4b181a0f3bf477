// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#include "oed/estimator.hpp"

#include "oed/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace oed {

SymMatrix covariance(const DesignMeasure& omega, const SensitivityBasis& basis,
                     const SymMatrix& prior) {
  const int n = basis.parameter_count();
  const SymMatrix info = fisher(omega, basis) + (prior.rows() == n ? prior : zero_prior(n));
  Eigen::LLT<SymMatrix> llt(info);
  if (llt.info() != Eigen::Success) {
    throw DomainError("covariance undefined: information matrix not positive definite");
  }
  SymMatrix cov = llt.solve(SymMatrix::Identity(n, n));
  return 0.5 * (cov + cov.transpose());
}

LinearizedModel make_linearized_model(const DesignMeasure& omega, const SensitivityBasis& basis,
                                      const NodalField& state, const Eigen::VectorXd& q_hat) {
  const int m = omega.support_size();
  LinearizedModel model;
  model.sensitivity.resize(m, basis.parameter_count());
  model.weights.resize(m);
  model.reference.resize(m);
  model.anchor = q_hat;
  for (int j = 0; j < m; ++j) {
    const Atom& atom = omega.atoms()[static_cast<std::size_t>(j)];
    model.sensitivity.row(j) = basis.values.row(atom.node);
    model.weights[j] = atom.weight;
    model.reference[j] = state[atom.node];
  }
  return model;
}

Eigen::VectorXd linearized_estimate(const LinearizedModel& model, const Eigen::VectorXd& data) {
  const Eigen::MatrixXd weighted = model.weights.asDiagonal() * model.sensitivity;
  const SymMatrix normal_matrix = model.sensitivity.transpose() * weighted;
  Eigen::LLT<SymMatrix> llt(normal_matrix);
  if (llt.info() != Eigen::Success) {
    throw SolverError("linearized estimate: sensitivity matrix is rank deficient");
  }
  return model.anchor + llt.solve(weighted.transpose() * (data - model.reference));
}

double regularized_gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;

  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    // Series expansion of P(a, x).
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int k = 0; k < 500; ++k) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma_a);
  }

  // Continued fraction for Q(a, x) (modified Lentz).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k <= 500; ++k) {
    const double an = -k * (k - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - log_gamma_a) * h;
  return 1.0 - q;
}

double chi2_quantile(int dof, double confidence_level) {
  if (dof < 1) throw ConfigError("chi2 quantile requires dof >= 1");
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw ConfigError("confidence level must lie in (0, 1)");
  }

  const double a = 0.5 * dof;
  double lo = 0.0;
  double hi = dof + 40.0;
  while (regularized_gamma_p(a, 0.5 * hi) < confidence_level) hi *= 2.0;

  while (hi - lo > 1e-11) {
    const double mid = 0.5 * (lo + hi);
    (regularized_gamma_p(a, 0.5 * mid) < confidence_level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Ellipse confidence_ellipse(const SymMatrix& cov, int i, int j, double confidence_level,
                           const Eigen::Vector2d& center) {
  if (i < 0 || j < 0 || i >= cov.rows() || j >= cov.rows() || i == j) {
    throw ConfigError("invalid parameter pair (" + std::to_string(i) + ", " +
                      std::to_string(j) + ") for the confidence ellipse");
  }
  Eigen::Matrix2d marginal;
  marginal << cov(i, i), cov(i, j), cov(j, i), cov(j, j);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(marginal);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw DomainError("marginal covariance is not positive definite");
  }

  const double scale = chi2_quantile(2, confidence_level);

  Ellipse ellipse;
  ellipse.center = center;
  ellipse.confidence_level = confidence_level;
  // Major axis first, deterministic sign (largest component positive).
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2d axis = eig.eigenvectors().col(1 - k);
    int lead;
    axis.cwiseAbs().maxCoeff(&lead);
    if (axis[lead] < 0.0) axis = -axis;
    ellipse.axes.col(k) = axis;
    ellipse.lengths[k] = std::sqrt(scale * eig.eigenvalues()[1 - k]);
  }
  return ellipse;
}

DesignMeasure scale_to_budget(const DesignMeasure& omega, double budget) {
  if (!(budget > 0.0)) throw ConfigError("budget K must be positive");
  const double mass = omega.total_mass();
  if (!(mass > 0.0)) throw ConfigError("cannot scale the zero measure to a budget");
  DesignMeasure scaled = omega;
  scaled.scale(budget / mass);
  return scaled;
}

double NormalSampler::uniform() {
  // 53-bit mantissa draw mapped to (0, 1].
  return 1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalSampler::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

} // namespace oed
