#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>

#include "sbpsat/grid.hpp"
#include "sbpsat/operators.hpp"
#include "sbpsat/system.hpp"

namespace sbpsat {

// Time-dependent grid forcing, already sampled on the nodes. Empty means no
// forcing; when present the predicted energy rate gains 2<u,F>_P so the
// audit stays an equality.
using GridForcing = std::function<Eigen::VectorXd(double t)>;

struct PenaltyConfig {
  double sigma = -1.0;        // single inflow penalty (advection family)
  double sigma0 = -1.0;       // advection-diffusion inflow
  double sigma1 = -1.0;       // advection-diffusion outflow
  double sigma_left = 0.0;    // interface penalty, left block side
  double sigma_right_shift = 0.0;  // deviation from the conservative pairing
};

struct SymmetricPair {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::Index dim() const { return A.rows(); }
};

// Monotone map of [0,1] onto the physical interval, with the analytic
// inverse metric d(xi)/dx evaluated at xi.
struct MappingSpec {
  std::function<double(double)> x_of_xi;
  std::function<double(double)> xi_x;
  std::string description;

  static MappingSpec identity();
  // x = xi + 0.2 sin(pi xi)/pi, metric bounded in [1/1.2, 1/0.8].
  static MappingSpec default_stretch();
};

// Vector-valued boundary data on one side of the 2-D domain; coord is the
// coordinate running along that side (y for west/east, x for south/north).
struct SideSignal2D {
  std::function<Eigen::VectorXd(double coord, double t)> evaluate;
  static SideSignal2D zero(Eigen::Index m);
};

struct BoundarySignals2D {
  SideSignal2D west, east, south, north;
  static BoundarySignals2D zero(Eigen::Index m);
};

SemiDiscreteSystem assemble_advection(double a,
                                      const FirstDerivativeOperator& op,
                                      double sigma, BoundarySignal g0,
                                      GridForcing forcing = {});

enum class D2Mode { wide, narrow };

// Narrow mode builds the matching second-derivative operator internally.
SemiDiscreteSystem assemble_advection_diffusion(
    double a, double epsilon, const FirstDerivativeOperator& op, D2Mode mode,
    BoundarySignal g0, BoundarySignal g1, GridForcing forcing = {});

// Two coupled blocks sharing the interface point; composite state is the
// left block followed by the right block.
struct TwoBlockSystem {
  SemiDiscreteSystem system;
  Grid1D grid_left;
  Grid1D grid_right;
  double a = 1.0;
  double sigma_left = 0.0;
  double sigma_right = 0.0;  // as assembled, shift included
  Eigen::Index n_left = 0;
  Eigen::Index n_right = 0;
};

TwoBlockSystem assemble_two_block_advection(
    double a, const FirstDerivativeOperator& op_left,
    const FirstDerivativeOperator& op_right, double sigma_left,
    BoundarySignal g_left, double sigma_right_shift = 0.0);

SemiDiscreteSystem assemble_split_variable_advection(
    const std::function<double(double)>& a_of_x,
    const FirstDerivativeOperator& op, const Grid1D& grid,
    BoundarySignal g_left, double sigma = -1.0);

SemiDiscreteSystem assemble_stretched_advection(
    const MappingSpec& map, const FirstDerivativeOperator& op,
    BoundarySignal g_left);

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> matrix_signed_parts(
    const Eigen::MatrixXd& A);

struct System2D {
  SemiDiscreteSystem system;
  Eigen::Index m = 0;
  Eigen::Index nx = 0;
  Eigen::Index ny = 0;
  Grid1D grid_x;
  Grid1D grid_y;

  // Component c fastest, then x, then y.
  Eigen::Index index(Eigen::Index c, Eigen::Index i, Eigen::Index j) const {
    return c + m * (i + nx * j);
  }
};

System2D assemble_2d_hyperbolic(const SymmetricPair& pair,
                                const FirstDerivativeOperator& op_x,
                                const FirstDerivativeOperator& op_y,
                                BoundarySignals2D signals);

SemiDiscreteSystem assemble_burgers_split(const FirstDerivativeOperator& op,
                                          BoundarySignal g_left);

struct SteadyTransport {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

SteadyTransport assemble_steady_transport(
    const FirstDerivativeOperator& op,
    const std::function<double(double)>& forcing, double g0,
    double sigma = -1.0);

}  // namespace sbpsat
