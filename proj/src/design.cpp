// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#include "oed/design.hpp"

#include "oed/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oed {

namespace {

constexpr double kWeightPruneRel = 1e-14;

struct Factorization {
  Eigen::LLT<SymMatrix> llt;
  bool positive_definite = false;
  double log_det = 0.0;
};

Factorization factorize(const SymMatrix& n_mat) {
  Factorization f;
  if (n_mat.rows() == 0 || n_mat.rows() != n_mat.cols()) return f;
  f.llt.compute(n_mat);
  if (f.llt.info() != Eigen::Success) return f;
  const auto& l = f.llt.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double d = l(i, i);
    if (!(d > 0.0) || !std::isfinite(d)) return f;
    log_det += 2.0 * std::log(d);
  }
  f.log_det = log_det;
  f.positive_definite = true;
  return f;
}

SymMatrix symmetrized(SymMatrix m) { return 0.5 * (m + m.transpose()); }

} // namespace

DesignMeasure::DesignMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  // Merge duplicate nodes, keeping first-occurrence order.
  std::vector<Atom> merged;
  merged.reserve(atoms_.size());
  for (const Atom& atom : atoms_) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Atom& a) { return a.node == atom.node; });
    if (it == merged.end()) {
      merged.push_back(atom);
    } else {
      it->weight += atom.weight;
    }
  }
  atoms_ = std::move(merged);
  normalize();
}

DesignMeasure DesignMeasure::single(int node, const Eigen::Vector2d& point, double weight) {
  return DesignMeasure({Atom{node, point, weight}});
}

double DesignMeasure::total_mass() const {
  double mass = 0.0;
  for (const Atom& atom : atoms_) mass += atom.weight;
  return mass;
}

Eigen::VectorXd DesignMeasure::weights() const {
  Eigen::VectorXd w(support_size());
  for (int j = 0; j < support_size(); ++j) w[j] = atoms_[static_cast<std::size_t>(j)].weight;
  return w;
}

void DesignMeasure::scale(double factor) {
  for (Atom& atom : atoms_) atom.weight *= factor;
  normalize();
}

void DesignMeasure::add(int node, const Eigen::Vector2d& point, double weight) {
  auto it = std::find_if(atoms_.begin(), atoms_.end(),
                         [&](const Atom& a) { return a.node == node; });
  if (it == atoms_.end()) {
    atoms_.push_back(Atom{node, point, weight});
  } else {
    it->weight += weight;
  }
  normalize();
}

DesignMeasure DesignMeasure::with_weights(const Eigen::VectorXd& weights) const {
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size());
  for (int j = 0; j < support_size() && j < weights.size(); ++j) {
    if (weights[j] > 0.0) {
      Atom atom = atoms_[static_cast<std::size_t>(j)];
      atom.weight = weights[j];
      atoms.push_back(atom);
    }
  }
  return DesignMeasure(std::move(atoms));
}

void DesignMeasure::normalize() {
  const double mass = total_mass();
  const double cutoff = kWeightPruneRel * mass;
  std::erase_if(atoms_, [&](const Atom& a) { return !(a.weight > cutoff); });
}

Criterion Criterion::a() { return Criterion{}; }

Criterion Criterion::weighted_a(SymMatrix w) {
  Criterion c;
  c.kind_ = Kind::WeightedA;
  c.weight_ = std::move(w);
  return c;
}

Criterion Criterion::d() {
  Criterion c;
  c.kind_ = Kind::D;
  return c;
}

Criterion Criterion::from_name(const std::string& name, const SymMatrix& w) {
  if (name == "A") return a();
  if (name == "D") return d();
  if (name == "wA") {
    if (w.rows() == 0) throw ConfigError("criterion wA requires a weight matrix");
    return weighted_a(w);
  }
  throw ConfigError("unknown criterion '" + name + "' (expected A, wA, or D)");
}

std::string Criterion::name() const {
  switch (kind_) {
    case Kind::A: return "A";
    case Kind::WeightedA: return "wA";
    case Kind::D: return "D";
  }
  return "A";
}

double Criterion::value(const SymMatrix& n_mat) const {
  const Factorization f = factorize(n_mat);
  if (!f.positive_definite) return std::numeric_limits<double>::infinity();
  const Eigen::Index n = n_mat.rows();
  switch (kind_) {
    case Kind::A:
      return f.llt.solve(SymMatrix::Identity(n, n)).trace();
    case Kind::WeightedA:
      return (f.llt.solve(SymMatrix::Identity(n, n)) * (weight_ * weight_)).trace();
    case Kind::D:
      return std::exp(-f.log_det);
  }
  return std::numeric_limits<double>::infinity();
}

SymMatrix Criterion::gradient(const SymMatrix& n_mat) const {
  const Factorization f = factorize(n_mat);
  if (!f.positive_definite) {
    throw DomainError("criterion gradient requested outside PD(n)");
  }
  const Eigen::Index n = n_mat.rows();
  const SymMatrix inv = f.llt.solve(SymMatrix::Identity(n, n));
  switch (kind_) {
    case Kind::A:
      return symmetrized(-inv * inv);
    case Kind::WeightedA:
      return symmetrized(-inv * weight_ * weight_ * inv);
    case Kind::D:
      return symmetrized(-std::exp(-f.log_det) * inv);
  }
  throw DomainError("unreachable criterion kind");
}

SymMatrix fisher(const DesignMeasure& omega, const SensitivityBasis& basis) {
  const int n = basis.parameter_count();
  SymMatrix info = SymMatrix::Zero(n, n);
  for (const Atom& atom : omega.atoms()) {
    info.selfadjointView<Eigen::Lower>().rankUpdate(basis.values.row(atom.node).transpose(),
                                                    atom.weight);
  }
  info.triangularView<Eigen::StrictlyUpper>() = info.transpose();
  return info;
}

Eigen::VectorXd gradient_field_from(const SymMatrix& criterion_gradient,
                                    const SensitivityBasis& basis) {
  const int m = basis.count();
  Eigen::VectorXd field(m);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    field[i] = basis.values.row(i) * criterion_gradient * basis.values.row(i).transpose();
  }
  return field;
}

Eigen::VectorXd reduced_gradient_field(const DesignMeasure& omega, const SensitivityBasis& basis,
                                       const Criterion& criterion, const SymMatrix& prior) {
  const SymMatrix n_mat = fisher(omega, basis) + prior;
  return gradient_field_from(criterion.gradient(n_mat), basis);
}

double objective(const DesignMeasure& omega, const SensitivityBasis& basis,
                 const Criterion& criterion, const SymMatrix& prior, double beta) {
  const double value = criterion.value(fisher(omega, basis) + prior);
  return std::isfinite(value) ? value + beta * omega.total_mass() : value;
}

double beta_zero(const SensitivityBasis& basis, const Criterion& criterion,
                 const SymMatrix& prior) {
  SymMatrix grad;
  try {
    grad = criterion.gradient(prior);
  } catch (const DomainError&) {
    throw DomainError("beta_zero requires a positive definite prior");
  }
  const Eigen::VectorXd field = gradient_field_from(grad, basis);
  return field.size() > 0 ? -field.minCoeff() : 0.0;
}

OptimalityReport check_optimality(const DesignMeasure& omega, const SensitivityBasis& basis,
                                  const Criterion& criterion, const SymMatrix& prior,
                                  double beta, double tol) {
  const Eigen::VectorXd field = reduced_gradient_field(omega, basis, criterion, prior);

  OptimalityReport report;
  report.gradient_min = field.size() > 0 ? field.minCoeff() : 0.0;
  report.global_violation = -report.gradient_min - beta;

  double support_gap = 0.0;
  double grad_dot = 0.0;
  for (const Atom& atom : omega.atoms()) {
    const double g = field[atom.node];
    support_gap = std::max(support_gap, std::abs(g + beta));
    grad_dot += atom.weight * g;
  }
  report.support_gap = support_gap;
  report.kw_residual = grad_dot - report.gradient_min * omega.total_mass();

  report.within_tolerance = report.global_violation <= tol * beta &&
                            report.support_gap <= tol * beta &&
                            std::abs(report.kw_residual) <= tol * std::max(1.0, std::abs(grad_dot));
  return report;
}

SymMatrix zero_prior(int n) { return SymMatrix::Zero(n, n); }

bool positive_definite(const SymMatrix& m) { return factorize(m).positive_definite; }

} // namespace oed
