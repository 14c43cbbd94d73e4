#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace sbpsat {

// A semi-discrete system u_t = rhs(u, t) together with the diagonal weights of
// its energy norm and the exact algebraic rate d/dt ||u||^2 predicted by the
// energy method for this problem. boundary_rate carries every term of the
// identity (boundary data, interface jumps, dissipation ledger, forcing
// power), so the audit |2<u, rhs>_W - boundary_rate| tests an equality.
struct SemiDiscreteSystem {
  Eigen::Index state_dim = 0;
  Eigen::VectorXd norm_weights;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> rhs;
  std::function<double(const Eigen::VectorXd&, double)> boundary_rate;
  std::string label;
  bool linear = true;
  bool penalty_warning = false;

  double norm_squared(const Eigen::VectorXd& u) const {
    return u.cwiseProduct(norm_weights).dot(u);
  }
};

}  // namespace sbpsat
