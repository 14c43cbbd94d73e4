#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace sbpsat {

struct Grid1D {
  Eigen::Index n_points = 0;
  double h = 0.0;
  Eigen::VectorXd nodes;

  static Grid1D uniform(Eigen::Index n, double x0, double x1) {
    Grid1D g;
    g.n_points = n;
    g.h = (x1 - x0) / double(n - 1);
    g.nodes = Eigen::VectorXd::LinSpaced(n, x0, x1);
    return g;
  }
};

// Scalar boundary data as a function of time.
struct BoundarySignal {
  std::function<double(double)> evaluate;
  std::string description;

  static BoundarySignal zero() {
    return BoundarySignal{[](double) { return 0.0; }, "zero"};
  }
  double operator()(double t) const { return evaluate(t); }
};

}  // namespace sbpsat
