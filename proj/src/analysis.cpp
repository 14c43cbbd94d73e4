#include "sbpsat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "sbpsat/errors.hpp"

namespace sbpsat {

double discrete_norm(const Eigen::VectorXd& state,
                     const SemiDiscreteSystem& system) {
  if (state.size() != system.state_dim)
    throw DimensionMismatch("state does not match the system");
  return std::sqrt(system.norm_squared(state));
}

EnergyAudit energy_rate_audit(const SemiDiscreteSystem& system,
                              const Eigen::VectorXd& state, double t) {
  EnergyAudit audit;
  audit.measured = 2.0 * state.cwiseProduct(system.norm_weights)
                             .dot(system.rhs(state, t));
  audit.predicted = system.boundary_rate(state, t);
  audit.residual = std::abs(audit.measured - audit.predicted);
  return audit;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DimensionMismatch("fit needs matching samples, at least two");
  const double n = double(x.size());
  double sx = 0, sy = 0;
  for (size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw Error("fit abscissae are all equal");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (size_t k = 0; k < x.size(); ++k) {
    const double pred = fit.intercept + fit.slope * x[k];
    ss_res += (y[k] - pred) * (y[k] - pred);
    ss_tot += (y[k] - my) * (y[k] - my);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

namespace {

ConvergenceRecord run_level(const LevelFactory& factory, Eigen::Index n,
                            double t_final, double cfl_safety,
                            double expected_rate) {
  StudyLevel level = factory(n);
  const Eigen::VectorXd u0 = level.exact_trace(0.0);

  const double dt_cfl =
      cfl_timestep(level.system, cfl_safety, t_final, u0);
  // Subordinate the O(dt^4) time error to the expected O(h^rate) space error.
  const double dt_sub =
      0.31622776601683794 * std::pow(level.h, expected_rate / 4.0);
  const double dt = std::min(dt_cfl, dt_sub);
  TimeGrid grid{t_final, Eigen::Index(std::ceil(t_final / dt))};

  TrajectoryRecord traj =
      rk4_integrate(level.system, u0, grid, grid.n_steps);
  const Eigen::VectorXd err =
      traj.states.back() - level.exact_trace(t_final);

  ConvergenceRecord rec;
  rec.n = level.n;
  rec.h = level.h;
  rec.err_P = discrete_norm(err, level.system);
  rec.err_max = err.cwiseAbs().maxCoeff();
  return rec;
}

}  // namespace

ConvergenceReport run_convergence_study(const LevelFactory& factory,
                                        const std::vector<Eigen::Index>& levels,
                                        double t_final, double cfl_safety,
                                        double expected_rate) {
  if (levels.size() < 3) throw Error("a study needs at least three levels");

  std::vector<std::future<ConvergenceRecord>> futures;
  futures.reserve(levels.size());
  for (Eigen::Index n : levels)
    futures.push_back(std::async(std::launch::async, run_level,
                                 std::cref(factory), n, t_final, cfl_safety,
                                 expected_rate));

  ConvergenceReport report;
  for (auto& f : futures) report.records.push_back(f.get());
  std::sort(report.records.begin(), report.records.end(),
            [](const ConvergenceRecord& a, const ConvergenceRecord& b) {
              return a.h > b.h;
            });

  auto fit_tail = [&](size_t skip) {
    std::vector<double> lh, le;
    for (size_t k = skip; k < report.records.size(); ++k) {
      lh.push_back(std::log(report.records[k].h));
      le.push_back(std::log(report.records[k].err_P));
    }
    return fit_line(lh, le);
  };

  LineFit fit = fit_tail(0);
  if (fit.r_squared < 0.98 && report.records.size() > 3) {
    fit = fit_tail(1);  // the coarsest level is the usual pre-asymptotic one
    report.dropped_coarsest = true;
  }
  report.fitted_rate = fit.slope;
  report.r_squared = fit.r_squared;
  return report;
}

GrowthEstimate estimate_growth(const TrajectoryRecord& trajectory,
                               double window_begin, double window_end) {
  std::vector<double> ts, le;
  for (size_t k = 0; k < trajectory.times.size(); ++k) {
    const double t = trajectory.times[k];
    if (t < window_begin || t > window_end) continue;
    const double e = trajectory.energies[k];
    if (!(e > 0.0))
      throw NonPositiveEnergy("energy not positive at t = " +
                              std::to_string(t));
    ts.push_back(t);
    le.push_back(std::log(e));
  }
  if (ts.size() < 2) throw Error("growth window holds fewer than two samples");

  GrowthEstimate est;
  est.alpha_d = 0.5 * fit_line(ts, le).slope;
  est.window_begin = ts.front();
  est.window_end = ts.back();
  return est;
}

double evaluate_functional(const FunctionalSpec& spec,
                           const Eigen::VectorXd& state) {
  if (spec.w.size() != state.size() || spec.P.size() != state.size())
    throw DimensionMismatch("functional weights do not match the state");
  return spec.w.cwiseProduct(spec.P).dot(state);
}

InterfaceCheck interface_conservation_check(
    const TwoBlockSystem& two_block,
    const std::function<double(double)>& test_function,
    const TrajectoryRecord& trajectory) {
  const Eigen::Index nL = two_block.n_left;
  const double a = two_block.a;
  const double sL = two_block.sigma_left;
  const double sR = two_block.sigma_right;
  const double phi = test_function(1.0);  // both restrictions at the joint

  InterfaceCheck check;
  for (const Eigen::VectorXd& state : trajectory.states) {
    const double vN = state[nL - 1];
    const double u0 = state[nL];
    const double left = phi * (-a * vN + sL * (vN - u0));
    const double right = phi * (a * u0 + sR * (u0 - vN));
    check.residual = std::max(check.residual, std::abs(left + right));
    const double scale = std::abs(phi) * (std::abs(a * vN) +
                                          std::abs(sL * (vN - u0)) +
                                          std::abs(a * u0) +
                                          std::abs(sR * (u0 - vN)));
    check.scale = std::max(check.scale, scale);
  }
  return check;
}

}  // namespace sbpsat
