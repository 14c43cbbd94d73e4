#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "sbpsat/system.hpp"

namespace sbpsat {

struct TimeGrid {
  double t_final = 0.0;
  Eigen::Index n_steps = 0;
  double dt() const { return t_final / double(n_steps); }
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> energies;  // squared norm at each sample
};

// Classical four-stage RK4. Samples every sample_every steps; the initial
// and final states are always recorded. Throws NonFiniteState with the step
// index when the state stops being finite.
TrajectoryRecord rk4_integrate(const SemiDiscreteSystem& system,
                               const Eigen::VectorXd& u0, const TimeGrid& grid,
                               Eigen::Index sample_every = 1);

// Stable step estimate: safety * 2.6 / rho, where rho is the spectral radius
// of the rhs linearization estimated by power iteration (2.6 is roughly the
// reach of RK4's stability region along the imaginary axis). Nonlinear
// systems are linearized about u_ref by directional differences. A zero rhs
// yields t_cap.
double cfl_timestep(const SemiDiscreteSystem& system, double safety = 0.5,
                    double t_cap = std::numeric_limits<double>::infinity(),
                    const Eigen::VectorXd& u_ref = Eigen::VectorXd(),
                    int max_iter = 600);

// Dense LU solve with a verified residual ||Ax-b|| <= 1e-10 ||b||.
Eigen::VectorXd solve_steady(const Eigen::MatrixXd& matrix,
                             const Eigen::VectorXd& rhs);

}  // namespace sbpsat
