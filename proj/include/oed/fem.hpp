// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OED_FEM_HPP
#define OED_FEM_HPP

#include "oed/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <array>
#include <functional>

namespace oed {

/// Diffusion and convection coefficients (q1, q2, q3) of the state equation
///   -q1 lap(y) + (q2, q3) . grad(y) = f  on (0,1)^2,  y = 0 on the boundary.
struct ParameterVector {
  double diffusion = 1.0;
  double convection_x = 0.0;
  double convection_y = 0.0;

  Eigen::Vector3d as_vector() const {
    return {diffusion, convection_x, convection_y};
  }
  static ParameterVector from_vector(const Eigen::Vector3d& q) {
    return {q[0], q[1], q[2]};
  }
};

/// One value per mesh node; zero on the Dirichlet boundary when the field
/// represents an H^1_0 function.
using NodalField = Eigen::VectorXd;

using ScalarField = std::function<double(double, double)>;

/// Forcing of the convection-diffusion example, f = exp(3 (x1^2 + x2^3)).
double default_forcing(double x1, double x2);

/// Galerkin operators over all nodes (no boundary conditions applied):
/// the system matrix is A(q) = q1 K + q2 Cx + q3 Cy restricted to interior
/// nodes. The load uses a three-point edge-midpoint rule per triangle,
/// exact for quadratic integrands.
struct Operators {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> convection_x;
  Eigen::SparseMatrix<double> convection_y;
  Eigen::VectorXd load;
};

Operators assemble(const Mesh& mesh, const ParameterVector& q);
Operators assemble(const Mesh& mesh, const ParameterVector& q, const ScalarField& forcing);

/// Sensitivity vectors s(x) = (dy1, dy2, dy3)(x) packed per candidate node.
/// `values` has one row per candidate; rows at boundary nodes vanish.
struct SensitivityBasis {
  Eigen::MatrixXd values;
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;

  int count() const { return static_cast<int>(values.rows()); }
  int parameter_count() const { return static_cast<int>(values.cols()); }
  Eigen::VectorXd vector_at(int i) const { return values.row(i).transpose(); }
  Eigen::Vector2d point_at(int i) const { return points.row(i).transpose(); }

  static SensitivityBasis from_matrix(Eigen::MatrixXd vals);
};

/// Direct solver for A(q) on the interior nodes; one factorization serves
/// the state and all sensitivity right-hand sides. Solutions carry zero
/// boundary values and a relative residual of at most 1e-10.
class FemSolver {
public:
  FemSolver(const Mesh& mesh, const ParameterVector& q);
  FemSolver(const Mesh& mesh, const ParameterVector& q, const ScalarField& forcing);

  const Operators& operators() const { return ops_; }

  /// State y with A(q) y = b_f.
  NodalField solve_state() const;

  /// Sensitivities dy_k with A(q) dy_1 = -K y, A(q) dy_2 = -Cx y,
  /// A(q) dy_3 = -Cy y.
  std::array<NodalField, 3> solve_sensitivities(const NodalField& state) const;

  /// Solves A(q) u = rhs for a full-length nodal right-hand side.
  NodalField solve_load(const Eigen::VectorXd& rhs) const;

private:
  const Mesh& mesh_;
  Operators ops_;
  std::vector<int> interior_nodes_;
  Eigen::SparseMatrix<double> system_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;

  void factorize(const ParameterVector& q);
};

SensitivityBasis extract_basis(const Mesh& mesh, const std::array<NodalField, 3>& sensitivities);

/// Convenience pipeline: assemble, solve state and sensitivities, pack the
/// per-node basis for the design problem.
SensitivityBasis compute_sensitivity_basis(const Mesh& mesh, const ParameterVector& q);

} // namespace oed

#endif
