#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sbpsat/accuracy.hpp"
#include "sbpsat/errors.hpp"

namespace sbpsat {

// First-derivative SBP operator D = P^-1 Q on a uniform grid x_j = j*h.
// P holds the diagonal norm weights (length units). Q is assembled from exact
// rational tables, mirrored so that Q + Q^T - diag(-1,0,...,0,1) cancels to
// exactly zero entry by entry.
struct FirstDerivativeOperator {
  AccuracyOrder order;
  Eigen::Index n_points = 0;
  double h = 0.0;
  Eigen::VectorXd P;
  Eigen::MatrixXd Q;

  int block_rows = 0;  // rows carrying the boundary closure
  int block_cols = 0;

  // Banded parts, stored at D scale (1/h) for fast application.
  Eigen::MatrixXd d_block;        // block_rows x block_cols
  Eigen::VectorXd d_interior;     // centered stencil

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  void apply_into(const Eigen::VectorXd& u, Eigen::VectorXd& out) const;
  Eigen::MatrixXd dense_D() const;
};

// Narrow second-derivative operator D2 = P^-1 (-S^T M + B) S. D2 itself is
// assembled from exact rational tables; S carries one-sided boundary
// derivative rows; M is rebuilt on demand from the stored parts.
struct SecondDerivativeOperator {
  AccuracyOrder order;
  Eigen::Index n_points = 0;
  double h = 0.0;
  Eigen::VectorXd P;

  int block_rows = 0;
  int block_cols = 0;

  Eigen::MatrixXd d2_block;       // 1/h^2 scale
  Eigen::VectorXd d2_interior;
  Eigen::VectorXd s_boundary;     // one-sided first-derivative row, 1/h scale

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  void apply_into(const Eigen::VectorXd& u, Eigen::VectorXd& out) const;

  // Boundary derivative approximations (S u)_0 and (S u)_N.
  double s_left(const Eigen::VectorXd& u) const;
  double s_right(const Eigen::VectorXd& u) const;

  // u^T A u with A = B S - P D2, the dissipation quadratic form of the
  // energy identity. Needs only the banded parts.
  double dissipation(const Eigen::VectorXd& u) const;

  Eigen::MatrixXd dense_D2() const;
  Eigen::MatrixXd dense_S() const;
  Eigen::MatrixXd dense_A() const;
  // Symmetric positive definite M with S^T M S = A; two dense solves.
  Eigen::MatrixXd m_matrix() const;
};

struct AccuracyResidual {
  int degree = 0;
  double interior_residual = 0.0;
  double boundary_residual = 0.0;
};

struct OperatorReport {
  double max_sbp_residual = 0.0;
  std::vector<AccuracyResidual> accuracy;
  bool spd_check = false;
  double min_norm_ratio = 0.0;  // min P_i / h

  bool passes(double sbp_tol = 1e-13, double acc_tol = 1e-10) const;
};

struct SecondDerivativeReport {
  double reconstruction_residual_unit = 0.0;  // h^2-normalized max norm
  double reconstruction_residual_abs = 0.0;
  std::vector<AccuracyResidual> accuracy;     // D2 x^k vs k(k-1)x^(k-2)
  bool m_spd = false;                          // Cholesky of M succeeds
  double m_eig_min = 0.0;                      // recorded, not asserted
  double m_eig_max = 0.0;
  double a_symmetry_residual = 0.0;

  bool passes(double rec_tol = 1e-13, double acc_tol = 1e-10) const;
};

FirstDerivativeOperator build_first_derivative(AccuracyOrder order,
                                               Eigen::Index n, double h);
SecondDerivativeOperator build_second_derivative(AccuracyOrder order,
                                                 Eigen::Index n, double h);

OperatorReport verify_first_derivative(const FirstDerivativeOperator& op);
SecondDerivativeReport verify_second_derivative(
    const SecondDerivativeOperator& op);

// D*D, the wide second derivative (boundary order r-1).
Eigen::MatrixXd compose_wide_second_derivative(
    const FirstDerivativeOperator& op);

// JSON document {order:{p,r}, n, h, P:[...], Q:[[...]]}.
std::string to_json(const FirstDerivativeOperator& op, int indent = 2);

Eigen::Index min_grid_size(AccuracyOrder order);

}  // namespace sbpsat
