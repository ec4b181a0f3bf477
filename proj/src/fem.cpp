// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#include "oed/fem.hpp"

#include "oed/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace oed {

double default_forcing(double x1, double x2) {
  return std::exp(3.0 * (x1 * x1 + x2 * x2 * x2));
}

SensitivityBasis SensitivityBasis::from_matrix(Eigen::MatrixXd vals) {
  SensitivityBasis basis;
  basis.points = Eigen::Matrix<double, Eigen::Dynamic, 2>::Zero(vals.rows(), 2);
  basis.values = std::move(vals);
  return basis;
}

Operators assemble(const Mesh& mesh, const ParameterVector& q) {
  return assemble(mesh, q, default_forcing);
}

Operators assemble(const Mesh& mesh, const ParameterVector& q, const ScalarField& forcing) {
  if (!(q.diffusion > 0.0)) {
    throw ConfigError("diffusion coefficient q1 must be positive");
  }

  const int n = mesh.node_count();
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> k_entries, cx_entries, cy_entries;
  k_entries.reserve(9u * mesh.triangles.size());
  cx_entries.reserve(9u * mesh.triangles.size());
  cy_entries.reserve(9u * mesh.triangles.size());

  Eigen::VectorXd load = Eigen::VectorXd::Zero(n);

  for (const auto& tri : mesh.triangles) {
    Eigen::Vector2d p0 = mesh.nodes.row(tri[0]);
    Eigen::Vector2d p1 = mesh.nodes.row(tri[1]);
    Eigen::Vector2d p2 = mesh.nodes.row(tri[2]);

    const Eigen::Vector2d e1 = p1 - p0;
    const Eigen::Vector2d e2 = p2 - p0;
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    const double area = 0.5 * std::abs(det);

    // Constant P1 gradients: grad phi_a = (1/det) * rotated opposite edge.
    Eigen::Matrix<double, 3, 2> grad;
    grad.row(0) = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / det;
    grad.row(1) = Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) / det;
    grad.row(2) = Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) / det;

    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        k_entries.emplace_back(tri[a], tri[b], area * grad.row(a).dot(grad.row(b)));
        // int_T phi_a d(phi_b)/dx_i = (area/3) * grad_b_i, since int phi_a = area/3.
        cx_entries.emplace_back(tri[a], tri[b], area / 3.0 * grad(b, 0));
        cy_entries.emplace_back(tri[a], tri[b], area / 3.0 * grad(b, 1));
      }
    }

    // Edge midpoints; hat function a has value 1/2 on its two adjacent ones.
    const Eigen::Vector2d m01 = 0.5 * (p0 + p1);
    const Eigen::Vector2d m12 = 0.5 * (p1 + p2);
    const Eigen::Vector2d m20 = 0.5 * (p2 + p0);
    const double f01 = forcing(m01.x(), m01.y());
    const double f12 = forcing(m12.x(), m12.y());
    const double f20 = forcing(m20.x(), m20.y());
    load[tri[0]] += area / 3.0 * 0.5 * (f01 + f20);
    load[tri[1]] += area / 3.0 * 0.5 * (f01 + f12);
    load[tri[2]] += area / 3.0 * 0.5 * (f12 + f20);
  }

  Operators ops;
  ops.stiffness.resize(n, n);
  ops.convection_x.resize(n, n);
  ops.convection_y.resize(n, n);
  ops.stiffness.setFromTriplets(k_entries.begin(), k_entries.end());
  ops.convection_x.setFromTriplets(cx_entries.begin(), cx_entries.end());
  ops.convection_y.setFromTriplets(cy_entries.begin(), cy_entries.end());
  ops.load = std::move(load);
  return ops;
}

FemSolver::FemSolver(const Mesh& mesh, const ParameterVector& q)
    : mesh_(mesh), ops_(assemble(mesh, q)) {
  factorize(q);
}

FemSolver::FemSolver(const Mesh& mesh, const ParameterVector& q, const ScalarField& forcing)
    : mesh_(mesh), ops_(assemble(mesh, q, forcing)) {
  factorize(q);
}

void FemSolver::factorize(const ParameterVector& q) {
  const int n = mesh_.node_count();
  std::vector<int> interior_index(static_cast<std::size_t>(n), -1);
  interior_nodes_.reserve(static_cast<std::size_t>(mesh_.interior_count()));
  for (int i = 0; i < n; ++i) {
    if (!mesh_.is_boundary(i)) {
      interior_index[static_cast<std::size_t>(i)] = static_cast<int>(interior_nodes_.size());
      interior_nodes_.push_back(i);
    }
  }

  Eigen::SparseMatrix<double> full = q.diffusion * ops_.stiffness +
                                     q.convection_x * ops_.convection_x +
                                     q.convection_y * ops_.convection_y;

  const int ni = static_cast<int>(interior_nodes_.size());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (int col = 0; col < full.outerSize(); ++col) {
    const int cj = interior_index[static_cast<std::size_t>(col)];
    if (cj < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it) {
      const int ri = interior_index[static_cast<std::size_t>(it.row())];
      if (ri >= 0) entries.emplace_back(ri, cj, it.value());
    }
  }
  system_.resize(ni, ni);
  system_.setFromTriplets(entries.begin(), entries.end());
  system_.makeCompressed();

  lu_.compute(system_);
  if (lu_.info() != Eigen::Success) {
    throw SolverError("sparse LU factorization of A(q) failed");
  }
}

NodalField FemSolver::solve_load(const Eigen::VectorXd& rhs) const {
  const int ni = static_cast<int>(interior_nodes_.size());
  Eigen::VectorXd b(ni);
  for (int i = 0; i < ni; ++i) b[i] = rhs[interior_nodes_[static_cast<std::size_t>(i)]];

  Eigen::VectorXd u = lu_.solve(b);
  if (lu_.info() != Eigen::Success) {
    throw SolverError("sparse LU back-substitution failed");
  }

  const double b_norm = b.norm();
  const double residual = (system_ * u - b).norm();
  if (b_norm > 0.0 && residual > 1e-10 * b_norm) {
    throw SolverError("linear solve residual " + std::to_string(residual / b_norm) +
                      " exceeds 1e-10");
  }

  NodalField field = NodalField::Zero(mesh_.node_count());
  for (int i = 0; i < ni; ++i) field[interior_nodes_[static_cast<std::size_t>(i)]] = u[i];
  return field;
}

NodalField FemSolver::solve_state() const { return solve_load(ops_.load); }

std::array<NodalField, 3> FemSolver::solve_sensitivities(const NodalField& state) const {
  return {solve_load(-(ops_.stiffness * state)),
          solve_load(-(ops_.convection_x * state)),
          solve_load(-(ops_.convection_y * state))};
}

SensitivityBasis extract_basis(const Mesh& mesh, const std::array<NodalField, 3>& sensitivities) {
  const int n = mesh.node_count();
  for (const auto& field : sensitivities) {
    if (field.size() != n) {
      throw std::logic_error("sensitivity field length does not match mesh");
    }
  }
  SensitivityBasis basis;
  basis.values.resize(n, 3);
  for (int k = 0; k < 3; ++k) basis.values.col(k) = sensitivities[static_cast<std::size_t>(k)];
  basis.points = mesh.nodes;
  return basis;
}

SensitivityBasis compute_sensitivity_basis(const Mesh& mesh, const ParameterVector& q) {
  FemSolver solver(mesh, q);
  const NodalField state = solver.solve_state();
  return extract_basis(mesh, solver.solve_sensitivities(state));
}

} // namespace oed
