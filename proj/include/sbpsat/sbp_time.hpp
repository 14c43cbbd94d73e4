#pragma once

#include <Eigen/Dense>
#include <complex>

#include "sbpsat/operators.hpp"

namespace sbpsat {

// Global discretization of u_t = lambda u on [0,T] with the initial value
// enforced weakly at the first time node. sigma is fixed at -1, which also
// makes the discretization dual consistent.
struct SbpTimeProblem {
  std::complex<double> lambda{0.0, 0.0};
  std::complex<double> f{1.0, 0.0};
  double t_final = 1.0;
  FirstDerivativeOperator op;  // built on [0, T]
  double sigma = -1.0;
  bool unstable_lambda = false;  // Re(lambda) > 0, permitted but flagged
};

SbpTimeProblem make_sbp_time_problem(AccuracyOrder order, Eigen::Index nodes,
                                     double t_final,
                                     std::complex<double> lambda,
                                     std::complex<double> f);

struct SbpTimeDiagnostics {
  double identity_residual_abs = 0.0;  // | |U_N|^2 - 2Re(l)||U||^2_P
                                       //   - |f|^2 + |U_0 - f|^2 |
  double identity_residual_rel = 0.0;
  double un_abs = 0.0;
  double u0_minus_f_abs = 0.0;
  double norm_u_p_sq = 0.0;
};

struct SbpTimeSolution {
  Eigen::VectorXcd U;
  SbpTimeDiagnostics diagnostics;
};

SbpTimeSolution sbp_time_solve(const SbpTimeProblem& problem);

}  // namespace sbpsat
