// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OED_ESTIMATOR_HPP
#define OED_ESTIMATOR_HPP

#include "oed/design.hpp"

#include <cstdint>
#include <random>

namespace oed {

/// Covariance of the linearized estimator, (I(omega) + prior)^-1.
SymMatrix covariance(const DesignMeasure& omega, const SensitivityBasis& basis,
                     const SymMatrix& prior);

/// Linearization of the parameter-to-observation map around the anchor q_hat:
/// data y_j ~ N(reference_j, 1/weights_j) at the measurement nodes, with
/// sensitivity rows X_jk = d_k S[q_hat](x_j).
struct LinearizedModel {
  Eigen::MatrixXd sensitivity;
  Eigen::VectorXd weights;
  Eigen::VectorXd reference;
  Eigen::VectorXd anchor;

  int measurement_count() const { return static_cast<int>(sensitivity.rows()); }
  int parameter_count() const { return static_cast<int>(sensitivity.cols()); }
};

LinearizedModel make_linearized_model(const DesignMeasure& omega, const SensitivityBasis& basis,
                                      const NodalField& state, const Eigen::VectorXd& q_hat);

/// Weighted least-squares estimate
///   q_hat + (X^T S^-1 X)^-1 X^T S^-1 (data - reference).
/// Throws SolverError when X is column rank deficient.
Eigen::VectorXd linearized_estimate(const LinearizedModel& model, const Eigen::VectorXd& data);

/// t with P(chi^2_dof <= t) = confidence_level, absolute error <= 1e-10.
double chi2_quantile(int dof, double confidence_level);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Confidence ellipse of a parameter pair: eigen-decomposition of the 2x2
/// marginal covariance, semi-axes sqrt(quantile * eigenvalue). Axis columns
/// are orthonormal, major axis first.
struct Ellipse {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Matrix2d axes = Eigen::Matrix2d::Identity();
  Eigen::Vector2d lengths = Eigen::Vector2d::Zero();
  double confidence_level = 0.5;

  Eigen::Vector2d point(double angle) const {
    return center + std::cos(angle) * lengths[0] * axes.col(0) +
           std::sin(angle) * lengths[1] * axes.col(1);
  }
};

Ellipse confidence_ellipse(const SymMatrix& cov, int i, int j, double confidence_level,
                           const Eigen::Vector2d& center);

/// K * omega / ||omega||: the budget-K design with the same support. Valid
/// for positively homogeneous criteria with zero prior.
DesignMeasure scale_to_budget(const DesignMeasure& omega, double budget);

/// Deterministic standard-normal stream (64-bit Mersenne Twister with a
/// Box-Muller transform), reproducible across platforms for a fixed seed.
class NormalSampler {
public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in (0, 1].
  double uniform();
  double normal();

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace oed

#endif
