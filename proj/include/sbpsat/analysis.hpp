#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sbpsat/problems.hpp"
#include "sbpsat/system.hpp"
#include "sbpsat/time_integration.hpp"

namespace sbpsat {

double discrete_norm(const Eigen::VectorXd& state,
                     const SemiDiscreteSystem& system);

struct EnergyAudit {
  double measured = 0.0;   // 2 <state, rhs>_norm
  double predicted = 0.0;  // system.boundary_rate
  double residual = 0.0;
};

EnergyAudit energy_rate_audit(const SemiDiscreteSystem& system,
                              const Eigen::VectorXd& state, double t);

struct ConvergenceRecord {
  Eigen::Index n = 0;
  double h = 0.0;
  double err_P = 0.0;
  double err_max = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRecord> records;
  double fitted_rate = 0.0;
  double r_squared = 0.0;
  bool dropped_coarsest = false;  // refit without the coarsest level
};

// One refinement level of a study: the assembled system, its exact solution
// sampled on the level's own grid, and the spacing used for the rate fit.
struct StudyLevel {
  SemiDiscreteSystem system;
  std::function<Eigen::VectorXd(double t)> exact_trace;
  double h = 0.0;
  Eigen::Index n = 0;  // points per direction, reported in the records
};

using LevelFactory = std::function<StudyLevel(Eigen::Index n)>;

// Integrates every level to t_final with RK4 and fits log(err_P) against
// log(h) by least squares. dt is the CFL estimate capped so that the O(dt^4)
// time error stays under roughly 1% of the expected spatial error
// (dt <= 0.3162 h^{rate/4}). Levels run concurrently; records are assembled
// in level order. If the fit has r^2 < 0.98 the coarsest level is dropped
// once and the fit redone.
ConvergenceReport run_convergence_study(const LevelFactory& factory,
                                        const std::vector<Eigen::Index>& levels,
                                        double t_final, double cfl_safety,
                                        double expected_rate);

struct GrowthEstimate {
  double alpha_d = 0.0;  // half the fitted slope of log(energy) vs t
  double window_begin = 0.0;
  double window_end = 0.0;
};

GrowthEstimate estimate_growth(const TrajectoryRecord& trajectory,
                               double window_begin, double window_end);

struct FunctionalSpec {
  Eigen::VectorXd w;  // weight samples
  Eigen::VectorXd P;  // the operator's own quadrature
};

double evaluate_functional(const FunctionalSpec& spec,
                           const Eigen::VectorXd& state);

struct InterfaceCheck {
  double residual = 0.0;  // max over samples of the summed flux terms
  double scale = 0.0;     // max over samples of the term magnitudes
};

// Forms the phi-weighted interface flux terms of both blocks at every
// trajectory sample and measures how far they are from cancelling. phi is a
// smooth test function on the composite domain, zero at the outer
// boundaries, single-valued at the interface.
InterfaceCheck interface_conservation_check(
    const TwoBlockSystem& two_block,
    const std::function<double(double)>& test_function,
    const TrajectoryRecord& trajectory);

// Least-squares slope of y against x with its r^2; shared by the rate and
// growth fits.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sbpsat
