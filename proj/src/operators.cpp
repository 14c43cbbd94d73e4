#include "sbpsat/operators.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

#include "coeff_tables.hpp"

namespace sbpsat {

namespace {

void check_grid(const tables::OrderTable& t, Eigen::Index n, double h,
                int extra_cols) {
  if (h <= 0.0) throw Error("grid spacing must be positive");
  const Eigen::Index rows = Eigen::Index(t.q_block.size());
  const Eigen::Index cols =
      extra_cols > 0 ? Eigen::Index(extra_cols) : Eigen::Index(t.q_block[0].size());
  if (n < rows + cols)
    throw GridTooSmall("grid of " + std::to_string(n) +
                       " points is too small for order (" +
                       std::to_string(t.p) + "," + std::to_string(t.p / 2) +
                       "); need at least " + std::to_string(rows + cols));
}

Eigen::VectorXd norm_weights(const tables::OrderTable& t, Eigen::Index n,
                             double h) {
  Eigen::VectorXd P = Eigen::VectorXd::Ones(n);
  const int nb = int(t.p_weights.size());
  for (int i = 0; i < nb; ++i) {
    const double w = t.p_weights[i].value();
    P[i] = w;
    P[n - 1 - i] = w;
  }
  return P * h;
}

}  // namespace

Eigen::Index min_grid_size(AccuracyOrder order) {
  const auto& t = tables::order_table(order.interior_order);
  return Eigen::Index(t.q_block.size() + t.q_block[0].size());
}

FirstDerivativeOperator build_first_derivative(AccuracyOrder order,
                                               Eigen::Index n, double h) {
  order = AccuracyOrder::from_interior(order.interior_order);
  const auto& t = tables::order_table(order.interior_order);
  check_grid(t, n, h, 0);

  FirstDerivativeOperator op;
  op.order = order;
  op.n_points = n;
  op.h = h;
  op.P = norm_weights(t, n, h);
  op.block_rows = int(t.q_block.size());
  op.block_cols = int(t.q_block[0].size());

  op.Q = Eigen::MatrixXd::Zero(n, n);
  const int hw = int(t.q_interior.size() - 1) / 2;
  for (Eigen::Index i = op.block_rows; i < n - op.block_rows; ++i)
    for (int k = 0; k < int(t.q_interior.size()); ++k)
      op.Q(i, i - hw + k) = t.q_interior[k].value();
  for (int i = 0; i < op.block_rows; ++i)
    for (int j = 0; j < op.block_cols; ++j) {
      const double v = t.q_block[i][j].value();
      op.Q(i, j) = v;
      op.Q(n - 1 - i, n - 1 - j) = -v;
    }

  op.d_block.resize(op.block_rows, op.block_cols);
  for (int i = 0; i < op.block_rows; ++i) {
    const double pi = t.p_weights[i].value() * h;
    for (int j = 0; j < op.block_cols; ++j)
      op.d_block(i, j) = t.q_block[i][j].value() / pi;
  }
  op.d_interior.resize(Eigen::Index(t.q_interior.size()));
  for (int k = 0; k < int(t.q_interior.size()); ++k)
    op.d_interior[k] = t.q_interior[k].value() / h;
  return op;
}

void FirstDerivativeOperator::apply_into(const Eigen::VectorXd& u,
                                         Eigen::VectorXd& out) const {
  const Eigen::Index n = n_points;
  out.resize(n);
  const int hw = int(d_interior.size() - 1) / 2;
  for (int i = 0; i < block_rows; ++i) {
    double top = 0.0, bot = 0.0;
    for (int j = 0; j < block_cols; ++j) {
      top += d_block(i, j) * u[j];
      bot -= d_block(i, j) * u[n - 1 - j];
    }
    out[i] = top;
    out[n - 1 - i] = bot;
  }
  for (Eigen::Index i = block_rows; i < n - block_rows; ++i) {
    double acc = 0.0;
    for (int k = 0; k < d_interior.size(); ++k)
      acc += d_interior[k] * u[i - hw + k];
    out[i] = acc;
  }
}

Eigen::VectorXd FirstDerivativeOperator::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out;
  apply_into(u, out);
  return out;
}

Eigen::MatrixXd FirstDerivativeOperator::dense_D() const {
  const Eigen::Index n = n_points;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  const int hw = int(d_interior.size() - 1) / 2;
  for (Eigen::Index i = block_rows; i < n - block_rows; ++i)
    for (int k = 0; k < d_interior.size(); ++k) D(i, i - hw + k) = d_interior[k];
  for (int i = 0; i < block_rows; ++i)
    for (int j = 0; j < block_cols; ++j) {
      D(i, j) = d_block(i, j);
      D(n - 1 - i, n - 1 - j) = -d_block(i, j);
    }
  return D;
}

SecondDerivativeOperator build_second_derivative(AccuracyOrder order,
                                                 Eigen::Index n, double h) {
  order = AccuracyOrder::from_interior(order.interior_order);
  const auto& t = tables::order_table(order.interior_order);
  check_grid(t, n, h, int(t.d2_block[0].size()));

  SecondDerivativeOperator op;
  op.order = order;
  op.n_points = n;
  op.h = h;
  op.P = norm_weights(t, n, h);
  op.block_rows = int(t.d2_block.size());
  op.block_cols = int(t.d2_block[0].size());

  const double h2 = h * h;
  op.d2_block.resize(op.block_rows, op.block_cols);
  for (int i = 0; i < op.block_rows; ++i)
    for (int j = 0; j < op.block_cols; ++j)
      op.d2_block(i, j) = t.d2_block[i][j].value() / h2;
  op.d2_interior.resize(Eigen::Index(t.d2_interior.size()));
  for (int k = 0; k < int(t.d2_interior.size()); ++k)
    op.d2_interior[k] = t.d2_interior[k].value() / h2;
  op.s_boundary.resize(Eigen::Index(t.s_row.size()));
  for (int k = 0; k < int(t.s_row.size()); ++k)
    op.s_boundary[k] = t.s_row[k].value() / h;
  return op;
}

void SecondDerivativeOperator::apply_into(const Eigen::VectorXd& u,
                                          Eigen::VectorXd& out) const {
  const Eigen::Index n = n_points;
  out.resize(n);
  const int hw = int(d2_interior.size() - 1) / 2;
  for (int i = 0; i < block_rows; ++i) {
    double top = 0.0, bot = 0.0;
    for (int j = 0; j < block_cols; ++j) {
      top += d2_block(i, j) * u[j];
      bot += d2_block(i, j) * u[n - 1 - j];
    }
    out[i] = top;
    out[n - 1 - i] = bot;
  }
  for (Eigen::Index i = block_rows; i < n - block_rows; ++i) {
    double acc = 0.0;
    for (int k = 0; k < d2_interior.size(); ++k)
      acc += d2_interior[k] * u[i - hw + k];
    out[i] = acc;
  }
}

Eigen::VectorXd SecondDerivativeOperator::apply(
    const Eigen::VectorXd& u) const {
  Eigen::VectorXd out;
  apply_into(u, out);
  return out;
}

double SecondDerivativeOperator::s_left(const Eigen::VectorXd& u) const {
  double acc = 0.0;
  for (int j = 0; j < s_boundary.size(); ++j) acc += s_boundary[j] * u[j];
  return acc;
}

double SecondDerivativeOperator::s_right(const Eigen::VectorXd& u) const {
  const Eigen::Index n = n_points;
  double acc = 0.0;
  for (int j = 0; j < s_boundary.size(); ++j)
    acc -= s_boundary[j] * u[n - 1 - j];
  return acc;
}

double SecondDerivativeOperator::dissipation(const Eigen::VectorXd& u) const {
  // u^T (B S - P D2) u; B S touches only the first and last rows of S.
  Eigen::VectorXd d2u;
  apply_into(u, d2u);
  const double flux = -u[0] * s_left(u) + u[n_points - 1] * s_right(u);
  return flux - u.dot(P.cwiseProduct(d2u));
}

Eigen::MatrixXd SecondDerivativeOperator::dense_D2() const {
  const Eigen::Index n = n_points;
  Eigen::MatrixXd D2 = Eigen::MatrixXd::Zero(n, n);
  const int hw = int(d2_interior.size() - 1) / 2;
  for (Eigen::Index i = block_rows; i < n - block_rows; ++i)
    for (int k = 0; k < d2_interior.size(); ++k)
      D2(i, i - hw + k) = d2_interior[k];
  for (int i = 0; i < block_rows; ++i)
    for (int j = 0; j < block_cols; ++j) {
      D2(i, j) = d2_block(i, j);
      D2(n - 1 - i, n - 1 - j) = d2_block(i, j);
    }
  return D2;
}

Eigen::MatrixXd SecondDerivativeOperator::dense_S() const {
  // One-sided derivative rows at the edges, forward differences between:
  // every row annihilates constants, which the M construction relies on.
  const Eigen::Index n = n_points;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    S(i, i) = -1.0 / h;
    S(i, i + 1) = 1.0 / h;
  }
  for (int j = 0; j < s_boundary.size(); ++j) {
    S(0, j) = s_boundary[j];
    S(n - 1, n - 1 - j) = -s_boundary[j];
  }
  return S;
}

Eigen::MatrixXd SecondDerivativeOperator::dense_A() const {
  const Eigen::Index n = n_points;
  Eigen::MatrixXd BS = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < s_boundary.size(); ++j) {
    BS(0, j) = -s_boundary[j];
    BS(n - 1, n - 1 - j) = -s_boundary[j];
  }
  Eigen::MatrixXd A = BS - P.asDiagonal() * dense_D2();
  return 0.5 * (A + A.transpose());
}

Eigen::MatrixXd SecondDerivativeOperator::m_matrix() const {
  // M = Shat^-T (A + gamma 1 1^T) Shat^-1 with Shat = S + theta e_last 1^T.
  // Since S 1 = 0 and A 1 = 0, S^T M S = A exactly and M inherits positive
  // definiteness from A being PSD with null space span(1).
  const Eigen::Index n = n_points;
  const double theta = 1.0 / (h * std::sqrt(double(n)));
  const double gamma = 1.0 / (h * double(n));
  Eigen::MatrixXd Shat = dense_S();
  Shat.row(n - 1).array() += theta;
  Eigen::MatrixXd Ag = dense_A();
  Ag.array() += gamma;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Shat.transpose());
  Eigen::MatrixXd X = lu.solve(Ag);                     // Shat^-T Ag
  Eigen::MatrixXd M = lu.solve(X.transpose()).transpose();
  return 0.5 * (M + M.transpose());
}

Eigen::MatrixXd compose_wide_second_derivative(
    const FirstDerivativeOperator& op) {
  const Eigen::MatrixXd D = op.dense_D();
  return D * D;
}

bool OperatorReport::passes(double sbp_tol, double acc_tol) const {
  if (!spd_check || max_sbp_residual > sbp_tol) return false;
  for (const auto& row : accuracy) {
    if (row.interior_residual > acc_tol) return false;
    if (row.boundary_residual > acc_tol) return false;
  }
  return true;
}

bool SecondDerivativeReport::passes(double rec_tol, double acc_tol) const {
  if (!m_spd || reconstruction_residual_unit > rec_tol) return false;
  for (const auto& row : accuracy) {
    if (row.interior_residual > acc_tol) return false;
    if (row.boundary_residual > acc_tol) return false;
  }
  return true;
}

OperatorReport verify_first_derivative(const FirstDerivativeOperator& op) {
  const Eigen::Index n = op.n_points;
  OperatorReport rep;

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  B(0, 0) = -1.0;
  B(n - 1, n - 1) = 1.0;
  rep.max_sbp_residual =
      (op.Q + op.Q.transpose() - B).cwiseAbs().maxCoeff();

  rep.spd_check = op.P.minCoeff() > 0.0;
  rep.min_norm_ratio = op.P.minCoeff() / op.h;

  const int p = op.order.interior_order;
  const int r = op.order.boundary_order;
  const Eigen::VectorXd x =
      Eigen::VectorXd::LinSpaced(n, 0.0, double(n - 1) * op.h);
  for (int k = 0; k <= p; ++k) {
    Eigen::VectorXd xk(n), dxk(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      xk[j] = std::pow(x[j], k);
      dxk[j] = k == 0 ? 0.0 : double(k) * std::pow(x[j], k - 1);
    }
    const Eigen::VectorXd resid = (op.apply(xk) - dxk).cwiseAbs();
    AccuracyResidual row;
    row.degree = k;
    double bd = 0.0, interior = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool boundary = i < op.block_rows || i >= n - op.block_rows;
      (boundary ? bd : interior) = std::max(boundary ? bd : interior, resid[i]);
    }
    row.interior_residual = interior;
    // Boundary closures are exact only through degree r; above that the
    // truncation error is the design order, not a defect.
    row.boundary_residual = k <= r ? bd : 0.0;
    rep.accuracy.push_back(row);
  }
  return rep;
}

SecondDerivativeReport verify_second_derivative(
    const SecondDerivativeOperator& op) {
  const Eigen::Index n = op.n_points;
  SecondDerivativeReport rep;

  const Eigen::MatrixXd D2 = op.dense_D2();
  const Eigen::MatrixXd S = op.dense_S();
  const Eigen::MatrixXd M = op.m_matrix();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  B(0, 0) = -1.0;
  B(n - 1, n - 1) = 1.0;

  const Eigen::MatrixXd rebuilt =
      op.P.cwiseInverse().asDiagonal() * ((B - S.transpose() * M) * S);
  rep.reconstruction_residual_abs = (D2 - rebuilt).cwiseAbs().maxCoeff();
  rep.reconstruction_residual_unit =
      rep.reconstruction_residual_abs * op.h * op.h;

  {
    Eigen::MatrixXd raw = B * S - Eigen::MatrixXd(op.P.asDiagonal()) * D2;
    rep.a_symmetry_residual =
        (raw - raw.transpose()).cwiseAbs().maxCoeff() * op.h;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(M);
  rep.m_spd = llt.info() == Eigen::Success;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M,
                                                    Eigen::EigenvaluesOnly);
  rep.m_eig_min = es.eigenvalues().minCoeff();
  rep.m_eig_max = es.eigenvalues().maxCoeff();

  const int p = op.order.interior_order;
  const int r = op.order.boundary_order;
  const Eigen::VectorXd x =
      Eigen::VectorXd::LinSpaced(n, 0.0, double(n - 1) * op.h);
  for (int k = 0; k <= p + 1; ++k) {
    Eigen::VectorXd xk(n), ddxk(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      xk[j] = std::pow(x[j], k);
      ddxk[j] = k < 2 ? 0.0 : double(k) * double(k - 1) * std::pow(x[j], k - 2);
    }
    const Eigen::VectorXd resid = (op.apply(xk) - ddxk).cwiseAbs();
    AccuracyResidual row;
    row.degree = k;
    double bd = 0.0, interior = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool boundary = i < op.block_rows || i >= n - op.block_rows;
      (boundary ? bd : interior) = std::max(boundary ? bd : interior, resid[i]);
    }
    row.interior_residual = interior;
    row.boundary_residual = k <= r + 1 ? bd : 0.0;
    rep.accuracy.push_back(row);
  }
  return rep;
}

std::string to_json(const FirstDerivativeOperator& op, int indent) {
  nlohmann::json j;
  j["order"] = {{"p", op.order.interior_order},
                {"r", op.order.boundary_order}};
  j["n"] = op.n_points;
  j["h"] = op.h;
  j["P"] = std::vector<double>(op.P.data(), op.P.data() + op.P.size());
  std::vector<std::vector<double>> q(op.n_points);
  for (Eigen::Index i = 0; i < op.n_points; ++i) {
    q[i].resize(op.n_points);
    for (Eigen::Index k = 0; k < op.n_points; ++k) q[i][k] = op.Q(i, k);
  }
  j["Q"] = q;
  return j.dump(indent);
}

}  // namespace sbpsat
