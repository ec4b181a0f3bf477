// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OED_DESIGN_HPP
#define OED_DESIGN_HPP

#include "oed/fem.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace oed {

/// Dense symmetric matrix (Fisher information N = I(omega) + I0 and friends).
using SymMatrix = Eigen::MatrixXd;

struct Atom {
  int node = -1;
  Eigen::Vector2d point = Eigen::Vector2d::Zero();
  double weight = 0.0;
};

/// Finite nonnegative atomic measure omega = sum_j lambda_j delta_{x_j}.
///
/// Atoms are keyed by node index: inserting an existing node merges weights,
/// and weights below 1e-14 of the total mass are pruned, so all stored atoms
/// are distinct with strictly positive weight.
class DesignMeasure {
public:
  DesignMeasure() = default;
  explicit DesignMeasure(std::vector<Atom> atoms);

  static DesignMeasure single(int node, const Eigen::Vector2d& point, double weight);

  const std::vector<Atom>& atoms() const { return atoms_; }
  int support_size() const { return static_cast<int>(atoms_.size()); }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const;

  Eigen::VectorXd weights() const;

  /// Multiplies every weight by a nonnegative factor.
  void scale(double factor);

  /// Adds mass at a node, merging into an existing atom if present.
  void add(int node, const Eigen::Vector2d& point, double weight);

  /// Same support with replaced weights; nonpositive entries drop the atom.
  DesignMeasure with_weights(const Eigen::VectorXd& weights) const;

private:
  std::vector<Atom> atoms_;

  void normalize();
};

/// Design quality criterion on symmetric matrices with dom Psi = PD(n):
/// A (trace of the inverse), weighted A (Tr(W N^-1 W)), or D (det(N^-1)).
class Criterion {
public:
  enum class Kind { A, WeightedA, D };

  Criterion() = default;
  static Criterion a();
  static Criterion weighted_a(SymMatrix w);
  static Criterion d();
  static Criterion from_name(const std::string& name, const SymMatrix& w = {});

  Kind kind() const { return kind_; }
  const SymMatrix& weight() const { return weight_; }
  std::string name() const;

  /// Psi(N); +infinity outside PD(n).
  double value(const SymMatrix& n_mat) const;

  /// Psi'(N) as a symmetric matrix. Throws DomainError outside PD(n).
  SymMatrix gradient(const SymMatrix& n_mat) const;

private:
  Kind kind_ = Kind::A;
  SymMatrix weight_;
};

/// Fisher information I(omega) = sum_j lambda_j s(x_j) s(x_j)^T.
SymMatrix fisher(const DesignMeasure& omega, const SensitivityBasis& basis);

/// psi'(omega)(x) = s(x)^T Psi'(N) s(x) for every candidate node,
/// N = I(omega) + prior. All values are <= 0.
Eigen::VectorXd reduced_gradient_field(const DesignMeasure& omega, const SensitivityBasis& basis,
                                       const Criterion& criterion, const SymMatrix& prior);

/// Same field given a precomputed criterion gradient G = Psi'(N).
Eigen::VectorXd gradient_field_from(const SymMatrix& criterion_gradient,
                                    const SensitivityBasis& basis);

/// F(omega) = Psi(I(omega) + prior) + beta ||omega||; +infinity outside dom.
double objective(const DesignMeasure& omega, const SensitivityBasis& basis,
                 const Criterion& criterion, const SymMatrix& prior, double beta);

/// Threshold beta_0 = max_x -s(x)^T Psi'(prior) s(x): the zero measure is
/// optimal exactly for beta > beta_0. Requires a positive definite prior.
double beta_zero(const SensitivityBasis& basis, const Criterion& criterion,
                 const SymMatrix& prior);

/// First-order optimality certificate, cf. the support condition
/// -psi'(omega) <= beta with equality on the support.
struct OptimalityReport {
  /// max_x(-psi'(x)) - beta; <= 0 at solutions of the penalized problem.
  double global_violation = 0.0;
  /// max over support atoms of |psi'(x_j) + beta|; 0 for empty support.
  double support_gap = 0.0;
  /// <psi', omega> - min_x psi'(x) * ||omega|| (Kiefer-Wolfowitz residual).
  double kw_residual = 0.0;
  double gradient_min = 0.0;
  bool within_tolerance = false;
};

OptimalityReport check_optimality(const DesignMeasure& omega, const SensitivityBasis& basis,
                                  const Criterion& criterion, const SymMatrix& prior,
                                  double beta, double tol);

/// Zero prior of matching dimension, for the common I0 = 0 case.
SymMatrix zero_prior(int n);

/// Cholesky-based membership test for PD(n).
bool positive_definite(const SymMatrix& m);

} // namespace oed

#endif
