#include "sbpsat/sbp_time.hpp"

#include <Eigen/LU>
#include <cmath>

#include "sbpsat/errors.hpp"

namespace sbpsat {

SbpTimeProblem make_sbp_time_problem(AccuracyOrder order, Eigen::Index nodes,
                                     double t_final,
                                     std::complex<double> lambda,
                                     std::complex<double> f) {
  if (!(t_final > 0.0)) throw Error("final time must be positive");
  SbpTimeProblem p;
  p.lambda = lambda;
  p.f = f;
  p.t_final = t_final;
  p.op = build_first_derivative(order, nodes, t_final / double(nodes - 1));
  p.unstable_lambda = lambda.real() > 0.0;
  return p;
}

SbpTimeSolution sbp_time_solve(const SbpTimeProblem& problem) {
  const auto& op = problem.op;
  const Eigen::Index n = op.n_points;
  const std::complex<double> lambda = problem.lambda;
  const double sigma = problem.sigma;

  // (Q - lambda P - sigma e0 e0^T) U = -sigma f e0
  Eigen::MatrixXcd A = op.Q.cast<std::complex<double>>();
  A.diagonal() -= lambda * op.P.cast<std::complex<double>>();
  A(0, 0) -= sigma;
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  b[0] = -sigma * problem.f;

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
  if (!lu.isInvertible())
    throw SingularSystem("time discretization matrix is singular");

  SbpTimeSolution sol;
  sol.U = lu.solve(b);

  double norm_p_sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    norm_p_sq += op.P[i] * std::norm(sol.U[i]);

  const double un2 = std::norm(sol.U[n - 1]);
  const double f2 = std::norm(problem.f);
  const double pin2 = std::norm(sol.U[0] - problem.f);
  const double lhs = un2 - 2.0 * lambda.real() * norm_p_sq;
  const double rhs = f2 - pin2;

  auto& d = sol.diagnostics;
  d.norm_u_p_sq = norm_p_sq;
  d.un_abs = std::sqrt(un2);
  d.u0_minus_f_abs = std::sqrt(pin2);
  d.identity_residual_abs = std::abs(lhs - rhs);
  const double denom =
      un2 + 2.0 * std::abs(lambda.real()) * norm_p_sq + f2 + pin2;
  d.identity_residual_rel =
      denom > 0.0 ? d.identity_residual_abs / denom : 0.0;
  return sol;
}

}  // namespace sbpsat
