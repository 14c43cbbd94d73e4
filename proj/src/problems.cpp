#include "sbpsat/problems.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>

namespace sbpsat {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0))
    throw NonpositiveCoefficient(std::string(name) + " must be positive");
}

// Assemblers that sample coordinates assume the operator spans a
// unit-length interval.
void require_unit_span(const FirstDerivativeOperator& op) {
  if (std::abs(op.h * double(op.n_points - 1) - 1.0) > 1e-9)
    throw DimensionMismatch("operator does not span a unit interval");
}

double forcing_power(const GridForcing& forcing, const Eigen::VectorXd& P,
                     const Eigen::VectorXd& u, double t) {
  if (!forcing) return 0.0;
  return 2.0 * u.cwiseProduct(P).dot(forcing(t));
}

}  // namespace

MappingSpec MappingSpec::identity() {
  MappingSpec m;
  m.x_of_xi = [](double xi) { return xi; };
  m.xi_x = [](double) { return 1.0; };
  m.description = "identity";
  return m;
}

MappingSpec MappingSpec::default_stretch() {
  MappingSpec m;
  m.x_of_xi = [](double xi) { return xi + 0.2 * std::sin(M_PI * xi) / M_PI; };
  m.xi_x = [](double xi) { return 1.0 / (1.0 + 0.2 * std::cos(M_PI * xi)); };
  m.description = "sine stretch, amplitude 0.2";
  return m;
}

SideSignal2D SideSignal2D::zero(Eigen::Index m) {
  return SideSignal2D{[m](double, double) { return Eigen::VectorXd::Zero(m); }};
}

BoundarySignals2D BoundarySignals2D::zero(Eigen::Index m) {
  return BoundarySignals2D{SideSignal2D::zero(m), SideSignal2D::zero(m),
                           SideSignal2D::zero(m), SideSignal2D::zero(m)};
}

SemiDiscreteSystem assemble_advection(double a,
                                      const FirstDerivativeOperator& op,
                                      double sigma, BoundarySignal g0,
                                      GridForcing forcing) {
  require_positive(a, "wave speed");
  auto sp = std::make_shared<const FirstDerivativeOperator>(op);

  SemiDiscreteSystem sys;
  sys.state_dim = op.n_points;
  sys.norm_weights = op.P;
  sys.label = "advection";
  sys.penalty_warning = sigma >= -0.5;

  sys.rhs = [sp, a, sigma, g0, forcing](const Eigen::VectorXd& u, double t) {
    Eigen::VectorXd out = sp->apply(u) * -a;
    out[0] += sigma * a * (u[0] - g0(t)) / sp->P[0];
    if (forcing) out += forcing(t);
    return out;
  };
  sys.boundary_rate = [sp, a, sigma, g0, forcing](const Eigen::VectorXd& u,
                                                  double t) {
    const Eigen::Index n = sp->n_points;
    const double g = g0(t);
    return a * (1.0 + 2.0 * sigma) * u[0] * u[0] - a * u[n - 1] * u[n - 1] -
           2.0 * a * sigma * u[0] * g + forcing_power(forcing, sp->P, u, t);
  };
  return sys;
}

SemiDiscreteSystem assemble_advection_diffusion(
    double a, double epsilon, const FirstDerivativeOperator& op, D2Mode mode,
    BoundarySignal g0, BoundarySignal g1, GridForcing forcing) {
  require_positive(a, "wave speed");
  require_positive(epsilon, "diffusion coefficient");
  auto sp = std::make_shared<const FirstDerivativeOperator>(op);
  std::shared_ptr<const SecondDerivativeOperator> sp2;
  if (mode == D2Mode::narrow)
    sp2 = std::make_shared<const SecondDerivativeOperator>(
        build_second_derivative(op.order, op.n_points, op.h));

  SemiDiscreteSystem sys;
  sys.state_dim = op.n_points;
  sys.norm_weights = op.P;
  sys.label = mode == D2Mode::narrow ? "advection-diffusion narrow"
                                     : "advection-diffusion wide";

  // Both boundary penalties are -1: SATs sigma0 (a u0 - eps u_x(0) - g0) at
  // the inflow and sigma1 (eps u_x(N) - g1) at the outflow.
  sys.rhs = [sp, sp2, a, epsilon, g0, g1, forcing](const Eigen::VectorXd& u,
                                                   double t) {
    const Eigen::Index n = sp->n_points;
    Eigen::VectorXd du = sp->apply(u);
    Eigen::VectorXd out;
    double flux0, fluxN;
    if (sp2) {
      sp2->apply_into(u, out);
      out = epsilon * out - a * du;
      flux0 = sp2->s_left(u);
      fluxN = sp2->s_right(u);
    } else {
      out = epsilon * sp->apply(du) - a * du;
      flux0 = du[0];
      fluxN = du[n - 1];
    }
    out[0] -= (a * u[0] - epsilon * flux0 - g0(t)) / sp->P[0];
    out[n - 1] -= (epsilon * fluxN - g1(t)) / sp->P[n - 1];
    if (forcing) out += forcing(t);
    return out;
  };
  sys.boundary_rate = [sp, sp2, a, epsilon, g0, g1, forcing](
                          const Eigen::VectorXd& u, double t) {
    const Eigen::Index n = sp->n_points;
    double dissipation;
    if (sp2) {
      dissipation = sp2->dissipation(u);
    } else {
      const Eigen::VectorXd du = sp->apply(u);
      dissipation = du.cwiseProduct(sp->P).dot(du);
    }
    return -a * u[0] * u[0] + 2.0 * u[0] * g0(t) - a * u[n - 1] * u[n - 1] +
           2.0 * u[n - 1] * g1(t) - 2.0 * epsilon * dissipation +
           forcing_power(forcing, sp->P, u, t);
  };
  return sys;
}

TwoBlockSystem assemble_two_block_advection(
    double a, const FirstDerivativeOperator& op_left,
    const FirstDerivativeOperator& op_right, double sigma_left,
    BoundarySignal g_left, double sigma_right_shift) {
  require_positive(a, "wave speed");
  require_unit_span(op_left);
  require_unit_span(op_right);

  TwoBlockSystem tb;
  tb.a = a;
  tb.sigma_left = sigma_left;
  tb.sigma_right = sigma_left - a + sigma_right_shift;
  tb.n_left = op_left.n_points;
  tb.n_right = op_right.n_points;
  tb.grid_left = Grid1D::uniform(tb.n_left, 0.0, 1.0);
  tb.grid_right = Grid1D::uniform(tb.n_right, 1.0, 2.0);

  auto spL = std::make_shared<const FirstDerivativeOperator>(op_left);
  auto spR = std::make_shared<const FirstDerivativeOperator>(op_right);
  const double sL = tb.sigma_left, sR = tb.sigma_right;
  const Eigen::Index nL = tb.n_left, nR = tb.n_right;

  SemiDiscreteSystem sys;
  sys.state_dim = nL + nR;
  sys.norm_weights.resize(nL + nR);
  sys.norm_weights << op_left.P, op_right.P;
  sys.label = "two-block advection";
  sys.penalty_warning = sigma_left > a / 2.0;

  sys.rhs = [spL, spR, a, sL, sR, g_left, nL,
             nR](const Eigen::VectorXd& state, double t) {
    Eigen::VectorXd out(nL + nR);
    Eigen::VectorXd part;

    const Eigen::VectorXd v = state.head(nL);
    const Eigen::VectorXd u = state.tail(nR);
    const double jump_vn = v[nL - 1] - u[0];

    spL->apply_into(v, part);
    part *= -a;
    part[0] -= a * (v[0] - g_left(t)) / spL->P[0];
    part[nL - 1] += sL * jump_vn / spL->P[nL - 1];
    out.head(nL) = part;

    spR->apply_into(u, part);
    part *= -a;
    part[0] += sR * -jump_vn / spR->P[0];
    out.tail(nR) = part;
    return out;
  };
  sys.boundary_rate = [spL, spR, a, sL, sR, g_left, nL,
                       nR](const Eigen::VectorXd& state, double t) {
    const double v0 = state[0];
    const double vN = state[nL - 1];
    const double u0 = state[nL];
    const double uN = state[nL + nR - 1];
    const double g = g_left(t);
    // General form; collapses to (2 sigma_L - a)(vN - u0)^2 at the interface
    // when sigma_R = sigma_L - a.
    return a * v0 * v0 - 2.0 * a * v0 * (v0 - g) - a * vN * vN +
           a * u0 * u0 - a * uN * uN + 2.0 * sL * vN * (vN - u0) +
           2.0 * sR * u0 * (u0 - vN);
  };
  tb.system = std::move(sys);
  return tb;
}

SemiDiscreteSystem assemble_split_variable_advection(
    const std::function<double(double)>& a_of_x,
    const FirstDerivativeOperator& op, const Grid1D& grid,
    BoundarySignal g_left, double sigma) {
  if (grid.n_points != op.n_points || std::abs(grid.h - op.h) > 1e-12 * op.h)
    throw DimensionMismatch("grid does not match the operator");

  Eigen::VectorXd a(op.n_points);
  for (Eigen::Index j = 0; j < op.n_points; ++j) {
    a[j] = a_of_x(grid.nodes[j]);
    if (!(a[j] > 0.0))
      throw NonpositiveCoefficient("coefficient non-positive at node " +
                                   std::to_string(j));
  }
  const Eigen::VectorXd da = op.apply(a);  // numeric a_x, part of the identity
  auto sp = std::make_shared<const FirstDerivativeOperator>(op);

  SemiDiscreteSystem sys;
  sys.state_dim = op.n_points;
  sys.norm_weights = op.P;
  sys.label = "split variable advection";
  sys.penalty_warning = sigma >= -0.5;

  sys.rhs = [sp, a, da, sigma, g_left](const Eigen::VectorXd& u, double t) {
    Eigen::VectorXd out = sp->apply(a.cwiseProduct(u));
    out += a.cwiseProduct(sp->apply(u));
    out += da.cwiseProduct(u);
    out *= -0.5;
    out[0] += sigma * a[0] * (u[0] - g_left(t)) / sp->P[0];
    return out;
  };
  sys.boundary_rate = [sp, a, da, sigma, g_left](const Eigen::VectorXd& u,
                                                 double t) {
    const Eigen::Index n = sp->n_points;
    const double volume =
        sp->P.cwiseProduct(da).dot(u.cwiseProduct(u));
    return a[0] * u[0] * u[0] - a[n - 1] * u[n - 1] * u[n - 1] - volume +
           2.0 * sigma * a[0] * u[0] * (u[0] - g_left(t));
  };
  return sys;
}

SemiDiscreteSystem assemble_stretched_advection(
    const MappingSpec& map, const FirstDerivativeOperator& op,
    BoundarySignal g_left) {
  require_unit_span(op);
  const Eigen::Index n = op.n_points;
  Eigen::VectorXd lam(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    lam[j] = map.xi_x(double(j) * op.h);
    if (!(lam[j] > 0.0))
      throw SingularMapping("mapping metric non-positive at node " +
                            std::to_string(j));
  }
  auto sp = std::make_shared<const FirstDerivativeOperator>(op);

  SemiDiscreteSystem sys;
  sys.state_dim = n;
  sys.norm_weights = op.P.cwiseQuotient(lam);  // the metric-weighted norm
  sys.label = "stretched advection";

  sys.rhs = [sp, lam, g_left](const Eigen::VectorXd& u, double t) {
    Eigen::VectorXd out = lam.cwiseProduct(sp->apply(u));
    out *= -1.0;
    out[0] -= 0.5 * lam[0] * (u[0] - g_left(t)) / sp->P[0];
    return out;
  };
  sys.boundary_rate = [n, g_left](const Eigen::VectorXd& u, double t) {
    return -u[n - 1] * u[n - 1] + u[0] * g_left(t);
  };
  return sys;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> matrix_signed_parts(
    const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw NotSymmetric("matrix is not square");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw NotSymmetric("matrix is not symmetric within 1e-12");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (A + A.transpose()));
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd X = es.eigenvectors();
  Eigen::MatrixXd plus = X * lam.cwiseMax(0.0).asDiagonal() * X.transpose();
  Eigen::MatrixXd minus = X * lam.cwiseMin(0.0).asDiagonal() * X.transpose();
  return {0.5 * (plus + plus.transpose()), 0.5 * (minus + minus.transpose())};
}

System2D assemble_2d_hyperbolic(const SymmetricPair& pair,
                                const FirstDerivativeOperator& op_x,
                                const FirstDerivativeOperator& op_y,
                                BoundarySignals2D signals) {
  const Eigen::Index m = pair.dim();
  if (m < 1 || pair.A.cols() != m || pair.B.rows() != m || pair.B.cols() != m)
    throw DimensionMismatch("coefficient matrices must be square and equal");
  if ((pair.A - pair.A.transpose()).cwiseAbs().maxCoeff() > 1e-14 ||
      (pair.B - pair.B.transpose()).cwiseAbs().maxCoeff() > 1e-14)
    throw NotSymmetric("coefficient matrices must be symmetric");
  require_unit_span(op_x);
  require_unit_span(op_y);

  System2D s2;
  s2.m = m;
  s2.nx = op_x.n_points;
  s2.ny = op_y.n_points;
  s2.grid_x = Grid1D::uniform(s2.nx, 0.0, 1.0);
  s2.grid_y = Grid1D::uniform(s2.ny, 0.0, 1.0);

  auto spx = std::make_shared<const FirstDerivativeOperator>(op_x);
  auto spy = std::make_shared<const FirstDerivativeOperator>(op_y);
  auto [Ap, Am] = matrix_signed_parts(pair.A);
  auto [Bp, Bm] = matrix_signed_parts(pair.B);
  const Eigen::MatrixXd A = 0.5 * (pair.A + pair.A.transpose());
  const Eigen::MatrixXd B = 0.5 * (pair.B + pair.B.transpose());
  const Eigen::Index nx = s2.nx, ny = s2.ny;

  SemiDiscreteSystem sys;
  sys.state_dim = m * nx * ny;
  sys.norm_weights.resize(sys.state_dim);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i)
      for (Eigen::Index c = 0; c < m; ++c)
        sys.norm_weights[c + m * (i + nx * j)] = op_x.P[i] * op_y.P[j];
  sys.label = "2-D hyperbolic system";

  auto idx = [m, nx](Eigen::Index c, Eigen::Index i, Eigen::Index j) {
    return c + m * (i + nx * j);
  };

  sys.rhs = [=](const Eigen::VectorXd& v, double t) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m * nx * ny);
    Eigen::VectorXd line_in(nx), line_out(nx);
    Eigen::VectorXd col_in(ny), col_out(ny);

    // -(A applied pointwise to the x-derivative of each component line)
    for (Eigen::Index j = 0; j < ny; ++j) {
      for (Eigen::Index c = 0; c < m; ++c) {
        for (Eigen::Index i = 0; i < nx; ++i) line_in[i] = v[idx(c, i, j)];
        spx->apply_into(line_in, line_out);
        for (Eigen::Index i = 0; i < nx; ++i)
          for (Eigen::Index cc = 0; cc < m; ++cc)
            out[idx(cc, i, j)] -= A(cc, c) * line_out[i];
      }
    }
    for (Eigen::Index i = 0; i < nx; ++i) {
      for (Eigen::Index c = 0; c < m; ++c) {
        for (Eigen::Index j = 0; j < ny; ++j) col_in[j] = v[idx(c, i, j)];
        spy->apply_into(col_in, col_out);
        for (Eigen::Index j = 0; j < ny; ++j)
          for (Eigen::Index cc = 0; cc < m; ++cc)
            out[idx(cc, i, j)] -= B(cc, c) * col_out[j];
      }
    }

    Eigen::VectorXd trace(m), g(m);
    for (Eigen::Index j = 0; j < ny; ++j) {
      const double y = double(j) * spy->h;
      g = signals.west.evaluate(y, t);
      for (Eigen::Index c = 0; c < m; ++c) trace[c] = v[idx(c, 0, j)];
      trace = Ap * (trace - g) / spx->P[0];
      for (Eigen::Index c = 0; c < m; ++c) out[idx(c, 0, j)] -= trace[c];

      g = signals.east.evaluate(y, t);
      for (Eigen::Index c = 0; c < m; ++c) trace[c] = v[idx(c, nx - 1, j)];
      trace = Am * (trace - g) / spx->P[nx - 1];
      for (Eigen::Index c = 0; c < m; ++c) out[idx(c, nx - 1, j)] += trace[c];
    }
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double x = double(i) * spx->h;
      g = signals.south.evaluate(x, t);
      for (Eigen::Index c = 0; c < m; ++c) trace[c] = v[idx(c, i, 0)];
      trace = Bp * (trace - g) / spy->P[0];
      for (Eigen::Index c = 0; c < m; ++c) out[idx(c, i, 0)] -= trace[c];

      g = signals.north.evaluate(x, t);
      for (Eigen::Index c = 0; c < m; ++c) trace[c] = v[idx(c, i, ny - 1)];
      trace = Bm * (trace - g) / spy->P[ny - 1];
      for (Eigen::Index c = 0; c < m; ++c) out[idx(c, i, ny - 1)] += trace[c];
    }
    return out;
  };

  sys.boundary_rate = [=](const Eigen::VectorXd& v, double t) {
    double rate = 0.0;
    Eigen::VectorXd w(m), g(m), d(m);
    for (Eigen::Index j = 0; j < ny; ++j) {
      const double y = double(j) * spy->h;
      const double py = spy->P[j];

      g = signals.west.evaluate(y, t);
      for (Eigen::Index c = 0; c < m; ++c) w[c] = v[idx(c, 0, j)];
      d = w - g;
      rate += py * (g.dot(Ap * g) - d.dot(Ap * d) + w.dot(Am * w));

      g = signals.east.evaluate(y, t);
      for (Eigen::Index c = 0; c < m; ++c) w[c] = v[idx(c, nx - 1, j)];
      d = w - g;
      rate += py * (-w.dot(Ap * w) + d.dot(Am * d) - g.dot(Am * g));
    }
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double x = double(i) * spx->h;
      const double px = spx->P[i];

      g = signals.south.evaluate(x, t);
      for (Eigen::Index c = 0; c < m; ++c) w[c] = v[idx(c, i, 0)];
      d = w - g;
      rate += px * (g.dot(Bp * g) - d.dot(Bp * d) + w.dot(Bm * w));

      g = signals.north.evaluate(x, t);
      for (Eigen::Index c = 0; c < m; ++c) w[c] = v[idx(c, i, ny - 1)];
      d = w - g;
      rate += px * (-w.dot(Bp * w) + d.dot(Bm * d) - g.dot(Bm * g));
    }
    return rate;
  };
  s2.system = std::move(sys);
  return s2;
}

SemiDiscreteSystem assemble_burgers_split(const FirstDerivativeOperator& op,
                                          BoundarySignal g_left) {
  auto sp = std::make_shared<const FirstDerivativeOperator>(op);

  SemiDiscreteSystem sys;
  sys.state_dim = op.n_points;
  sys.norm_weights = op.P;
  sys.label = "split-form Burgers";
  sys.linear = false;

  // Inflow penalty scaled by the local wave speed, active only when the
  // boundary is actually an inflow (u0 > 0).
  sys.rhs = [sp, g_left](const Eigen::VectorXd& u, double t) {
    Eigen::VectorXd out = sp->apply(u.cwiseProduct(u));
    out += u.cwiseProduct(sp->apply(u));
    out /= -3.0;
    const double sb = -(2.0 / 3.0) * std::max(u[0], 0.0);
    out[0] += sb * (u[0] - g_left(t)) / sp->P[0];
    return out;
  };
  sys.boundary_rate = [sp, g_left](const Eigen::VectorXd& u, double t) {
    const Eigen::Index n = sp->n_points;
    const double sb = -(2.0 / 3.0) * std::max(u[0], 0.0);
    return -(2.0 / 3.0) * (u[n - 1] * u[n - 1] * u[n - 1] -
                           u[0] * u[0] * u[0]) +
           2.0 * sb * u[0] * (u[0] - g_left(t));
  };
  return sys;
}

SteadyTransport assemble_steady_transport(
    const FirstDerivativeOperator& op,
    const std::function<double(double)>& forcing, double g0, double sigma) {
  if (sigma != -1.0)
    throw InadmissiblePenalty("steady transport requires sigma = -1");
  require_unit_span(op);

  SteadyTransport st;
  st.matrix = op.dense_D();
  st.matrix(0, 0) -= sigma / op.P[0];
  st.rhs.resize(op.n_points);
  for (Eigen::Index j = 0; j < op.n_points; ++j)
    st.rhs[j] = forcing(double(j) * op.h);
  st.rhs[0] -= sigma * g0 / op.P[0];
  return st;
}

}  // namespace sbpsat
