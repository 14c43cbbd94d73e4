#include "sbpsat/time_integration.hpp"

#include <Eigen/LU>
#include <cmath>
#include <random>

#include "sbpsat/errors.hpp"

namespace sbpsat {

TrajectoryRecord rk4_integrate(const SemiDiscreteSystem& system,
                               const Eigen::VectorXd& u0, const TimeGrid& grid,
                               Eigen::Index sample_every) {
  if (u0.size() != system.state_dim)
    throw DimensionMismatch("initial state does not match the system");
  if (!(grid.t_final > 0.0) || grid.n_steps < 1)
    throw Error("time grid must have positive extent and steps");
  if (sample_every < 1) sample_every = 1;

  const double dt = grid.dt();
  TrajectoryRecord rec;
  const Eigen::Index samples = grid.n_steps / sample_every + 2;
  rec.times.reserve(samples);
  rec.states.reserve(samples);
  rec.energies.reserve(samples);

  Eigen::VectorXd u = u0;
  auto record = [&](double t) {
    rec.times.push_back(t);
    rec.states.push_back(u);
    rec.energies.push_back(system.norm_squared(u));
  };
  record(0.0);

  Eigen::VectorXd k1, k2, k3, k4;
  for (Eigen::Index step = 1; step <= grid.n_steps; ++step) {
    const double t = dt * double(step - 1);
    k1 = system.rhs(u, t);
    k2 = system.rhs(u + (0.5 * dt) * k1, t + 0.5 * dt);
    k3 = system.rhs(u + (0.5 * dt) * k2, t + 0.5 * dt);
    k4 = system.rhs(u + dt * k3, t + dt);
    u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t_now = dt * double(step);
    if (!u.allFinite())
      throw NonFiniteState(
          "state became non-finite at step " + std::to_string(step), step,
          t_now);
    if (step % sample_every == 0 || step == grid.n_steps) record(t_now);
  }
  return rec;
}

double cfl_timestep(const SemiDiscreteSystem& system, double safety,
                    double t_cap, const Eigen::VectorXd& u_ref, int max_iter) {
  if (!(safety > 0.0) || safety > 1.0)
    throw Error("safety factor must lie in (0, 1]");
  Eigen::VectorXd base = u_ref;
  if (base.size() == 0) base = Eigen::VectorXd::Zero(system.state_dim);
  if (base.size() != system.state_dim)
    throw DimensionMismatch("reference state does not match the system");

  const Eigen::VectorXd r0 = system.rhs(base, 0.0);
  const double delta = system.linear ? 1.0 : 1e-3;

  std::mt19937_64 rng(0x5bb5a75u);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd w(system.state_dim);
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
  w /= w.norm();

  std::vector<double> log_growth;
  log_growth.reserve(max_iter);
  Eigen::VectorXd lw;
  for (int it = 0; it < max_iter; ++it) {
    lw = (system.rhs(base + delta * w, 0.0) - r0) / delta;
    const double nr = lw.norm();
    if (nr == 0.0) return t_cap;  // rhs imposes no constraint
    log_growth.push_back(std::log(nr));
    w = lw / nr;
  }

  // Geometric mean of the growth over the second half; the two quarters of
  // that window must agree or the estimate is not trusted.
  const size_t half = log_growth.size() / 2;
  const size_t quarter = (log_growth.size() - half) / 2;
  double sum1 = 0.0, sum2 = 0.0;
  for (size_t k = half; k < half + quarter; ++k) sum1 += log_growth[k];
  for (size_t k = half + quarter; k < log_growth.size(); ++k)
    sum2 += log_growth[k];
  const double gm1 = sum1 / double(quarter);
  const double gm2 = sum2 / double(log_growth.size() - half - quarter);
  if (std::abs(gm2 - gm1) > std::log(1.02))
    throw PowerIterationNoConverge("spectral radius estimate drifted by " +
                                   std::to_string(std::exp(std::abs(gm2 - gm1))));

  const double rho = std::exp((sum1 + sum2) / double(log_growth.size() - half));
  const double dt = safety * 2.6 / rho;
  return std::min(dt, t_cap);
}

Eigen::VectorXd solve_steady(const Eigen::MatrixXd& matrix,
                             const Eigen::VectorXd& rhs) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size())
    throw DimensionMismatch("system must be square and match the data");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(matrix);
  if (!lu.isInvertible()) throw SingularSystem("matrix is singular");
  const Eigen::VectorXd x = lu.solve(rhs);
  const double resid = (matrix * x - rhs).norm();
  if (resid > 1e-10 * rhs.norm())
    throw SingularSystem("solve residual " + std::to_string(resid) +
                         " above 1e-10 of the data norm");
  return x;
}

}  // namespace sbpsat
