// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmm/simulation.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace phmm
{

namespace
{

// Classical fixed-step fourth-order Runge-Kutta for z' = M z.
Matrix integrate_linear(const Matrix &M, const Vector &z0, Index steps, double dt)
{
  Matrix z(z0.size(), steps + 1);
  z.col(0) = z0;
  Vector k1(z0.size()), k2(z0.size()), k3(z0.size()), k4(z0.size());
  for (Index k = 0; k < steps; ++k)
  {
    const Vector &zk = z.col(k);
    k1 = M * zk;
    k2 = M * (zk + 0.5 * dt * k1);
    k3 = M * (zk + 0.5 * dt * k2);
    k4 = M * (zk + dt * k3);
    z.col(k + 1) = zk + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return z;
}

double max_abs_eig(const ComplexVector &eig)
{
  return eig.size() ? eig.cwiseAbs().maxCoeff() : 0.0;
}

void check_grid(double horizon, double dt, double fastest)
{
  require(horizon > 0.0 && dt > 0.0 && horizon >= 2.0 * dt, Errc::invalid_argument,
          "simulate: need horizon > 0 and at least two grid points");
  if (fastest > 0.0)
  {
    require(dt < 2.8 / fastest, Errc::degenerate_step,
            "simulate: dt exceeds the Runge-Kutta stability bound 2.8/max|lambda|");
  }
}

void check_stable(const ComplexVector &eig, const char *what)
{
  for (Index i = 0; i < eig.size(); ++i)
  {
    require(eig(i).real() < 0.0, Errc::unstable_plant, what);
  }
}

void check_generator_spectrum(const ComplexVector &eig)
{
  for (Index i = 0; i < eig.size(); ++i)
  {
    require(std::abs(eig(i).real()) <= 1.0e-8 * (1.0 + std::abs(eig(i))),
            Errc::invalid_argument,
            "simulate_right: generator spectrum must lie on the imaginary axis");
  }
}

bool transient_bound_ok(const ComplexVector &plant_eig, double horizon)
{
  double slowest = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < plant_eig.size(); ++i)
  {
    slowest = std::min(slowest, std::abs(plant_eig(i).real()));
  }
  return plant_eig.size() == 0 || std::exp(-slowest * 0.8 * horizon) <= 1.0e-6;
}

double tail_residual_of(const Matrix &y, const Matrix &y_pred)
{
  const Index cols = y.cols();
  const Index start = cols - std::max<Index>(cols / 5, 1);
  double peak = 0.0;
  for (Index k = start; k < cols; ++k)
  {
    peak = std::max(peak, y_pred.col(k).cwiseAbs().maxCoeff());
  }
  double worst = 0.0;
  for (Index k = start; k < cols; ++k)
  {
    worst = std::max(worst, (y.col(k) - y_pred.col(k)).norm());
  }
  return worst / (1.0 + peak);
}

Matrix real_part_or_throw(const ComplexMatrix &X, const char *what)
{
  require(linalg::is_real(X), Errc::not_real, std::string(what) + ": data must be real");
  return X.real();
}

// E X S = F X + G Ldrive for the interconnection's steady-state map.
Matrix steady_state_map(const Matrix &E, const Matrix &F, const Matrix &G,
                        const Matrix &Ldrive, const Matrix &S)
{
  const Index n = E.rows();
  const Index nu = S.rows();
  Matrix M = Matrix::Zero(n * nu, n * nu);
  for (Index i = 0; i < nu; ++i)
  {
    for (Index j = 0; j < nu; ++j)
    {
      if (S(j, i) != 0.0)
      {
        M.block(i * n, j * n, n, n) += S(j, i) * E;  // S^T (x) E
      }
    }
    M.block(i * n, i * n, n, n) -= F;
  }
  Matrix rhs = G * Ldrive;
  rhs.resize(n * nu, 1);
  Matrix x = linalg::solve_linear(M, rhs);
  x.resize(n, nu);
  return x;
}

}  // namespace

SimResult simulate_right(const LtiSystem &sys, const GeneratorRight &gen, const Vector &w0,
                         double horizon, double dt)
{
  DescriptorModel plain;
  plain.E = Matrix::Identity(sys.states(), sys.states());
  plain.F = sys.A;
  plain.G = sys.B;
  plain.H = sys.C;
  return simulate_right(plain, gen, w0, horizon, dt);
}

SimResult simulate_right(const PortHamiltonianSystem &sys, const GeneratorRight &gen,
                         const Vector &w0, double horizon, double dt)
{
  return simulate_right(ph_to_lti(sys), gen, w0, horizon, dt);
}

SimResult simulate_right(const DescriptorModel &sys, const GeneratorRight &gen,
                         const Vector &w0, double horizon, double dt)
{
  const Matrix S = real_part_or_throw(gen.S, "simulate_right generator S");
  const Matrix L = real_part_or_throw(gen.L, "simulate_right generator L");
  const Index nu = S.rows();
  require(w0.size() == nu, Errc::dimension_error, "simulate_right: w0 must have nu entries");

  Matrix Fx;
  Matrix Gx;
  try
  {
    Fx = linalg::solve_linear(sys.E, sys.F);
    Gx = linalg::solve_linear(sys.E, sys.G);
  }
  catch (const Error &err)
  {
    if (err.code() == Errc::singular_matrix)
    {
      fail(Errc::invalid_argument, "simulate_right: E must be invertible for integration");
    }
    throw;
  }
  const Index n = Fx.rows();

  const ComplexVector plant_eig = linalg::spectrum(Fx);
  check_stable(plant_eig, "simulate_right: plant is not asymptotically stable");
  const ComplexVector gen_eig = linalg::spectrum(S);
  check_generator_spectrum(gen_eig);
  check_grid(horizon, dt, std::max(max_abs_eig(plant_eig), max_abs_eig(gen_eig)));

  // Drive is u = L w, or u' = L S w when the model consumes the derivative.
  const Matrix Ldrive = sys.input_derivative ? Matrix(L * S) : L;

  const Index steps = static_cast<Index>(std::llround(horizon / dt));
  Matrix M = Matrix::Zero(n + nu, n + nu);
  M.topLeftCorner(n, n) = Fx;
  M.topRightCorner(n, nu) = Gx * Ldrive;
  M.bottomRightCorner(nu, nu) = S;
  Vector z0 = Vector::Zero(n + nu);
  z0.tail(nu) = w0;
  const Matrix z = integrate_linear(M, z0, steps, dt);

  const Matrix X = steady_state_map(sys.E, sys.F, sys.G, Ldrive, S);

  SimResult result;
  result.t = Vector::LinSpaced(steps + 1, 0.0, steps * dt);
  result.x = z.topRows(n);
  const Matrix omega = z.bottomRows(nu);
  if (sys.output_derivative)
  {
    // y = H x' with x' read off the right-hand side.
    result.y = sys.H * (Fx * result.x + Gx * Ldrive * omega);
    result.y_pred = sys.H * X * S * omega;
  }
  else
  {
    result.y = sys.H * result.x;
    result.y_pred = sys.H * X * omega;
  }
  result.tail_residual = tail_residual_of(result.y, result.y_pred);
  result.transient_bound_ok = transient_bound_ok(plant_eig, horizon);
  return result;
}

SimResult simulate_left(const LtiSystem &sys, const GeneratorLeft &gen, InputKind input,
                        LeftSimPath path, double horizon, double dt)
{
  require(sys.inputs() == 1, Errc::invalid_argument,
          "simulate_left: single-input systems only");
  const Matrix Qc = real_part_or_throw(gen.Qc, "simulate_left generator Qc");
  const Matrix Rc = real_part_or_throw(gen.Rc, "simulate_left generator Rc");
  require(Rc.cols() == sys.outputs(), Errc::dimension_error,
          "simulate_left: Rc must have one column per plant output");
  const Index n = sys.states();
  const Index nu = Qc.rows();

  const ComplexVector plant_eig = linalg::spectrum(sys.A);
  check_stable(plant_eig, "simulate_left: plant is not asymptotically stable");

  // Plant flow and read-out for the generator drive y.
  Matrix Ax;          // state matrix of the smooth (t > 0) dynamics
  Matrix Cy;          // y = Cy x feeding w' = Qc w + Rc y
  Vector x_jump;      // x(0+)
  Vector w_jump;      // w(0+)
  Matrix d_state;     // d = d_w w + d_x x
  Matrix d_gain_w;
  Vector d0;          // closed-form initial value of d
  if (path == LeftSimPath::finite)
  {
    require(input == InputKind::impulse, Errc::invalid_argument,
            "simulate_left: the finite path takes an impulse input");
    const ComplexMatrix Ups = linalg::solve_sylvester(
        linalg::SylvesterForm::finite_left, sys.A.cast<Complex>(), Qc.cast<Complex>(),
        ComplexMatrix(Rc.cast<Complex>() * sys.C.cast<Complex>()));
    const Matrix U = real_part_or_throw(Ups, "simulate_left Upsilon");
    Ax = sys.A;
    Cy = sys.C;
    x_jump = sys.B.col(0);
    w_jump = Vector::Zero(nu);
    d_gain_w = Matrix::Identity(nu, nu);
    d_state = U;  // d = w + Upsilon x
    d0 = U * sys.B.col(0);
  }
  else
  {
    Matrix Ainv;
    try
    {
      Ainv = linalg::solve_linear(sys.A, Matrix(Matrix::Identity(n, n)));
    }
    catch (const Error &err)
    {
      if (err.code() == Errc::singular_matrix)
      {
        fail(Errc::invalid_argument, "simulate_left: descriptor path needs invertible A");
      }
      throw;
    }
    Ax = Ainv;
    x_jump = -Ainv * sys.B.col(0);
    if (input == InputKind::impulse)
    {
      // A x' = x - B u with y = C x'; the impulse passes through y into w.
      const ComplexMatrix Ups = linalg::solve_sylvester(
          linalg::SylvesterForm::markov_left, sys.A.cast<Complex>(), Qc.cast<Complex>(),
          ComplexMatrix(Rc.cast<Complex>() * sys.C.cast<Complex>()));
      const Matrix U = real_part_or_throw(Ups, "simulate_left Upsilon");
      Cy = sys.C * Ainv;
      w_jump = Rc * (sys.C * x_jump);
      d_gain_w = Matrix::Identity(nu, nu);
      d_state = -U;  // d = w - Upsilon x
      d0 = Qc * U * sys.B.col(0);
    }
    else
    {
      // A x' = x - B u' driven by the unit step; u' = delta only jolts x.
      const ComplexMatrix UpsHat = linalg::solve_sylvester(
          linalg::SylvesterForm::markov_left_shifted, sys.A.cast<Complex>(),
          Qc.cast<Complex>(), ComplexMatrix(Rc.cast<Complex>() * sys.C.cast<Complex>()));
      const Matrix U = real_part_or_throw(UpsHat, "simulate_left UpsilonHat");
      Cy = sys.C;
      w_jump = Vector::Zero(nu);
      d_gain_w = Qc;
      d_state = -Qc * U;  // d_hat = Qc (w - UpsilonHat x)
      d0 = Qc * (Qc * U + Rc * sys.C) * sys.B.col(0);
    }
  }

  const ComplexVector flow_eig = linalg::spectrum(Ax);
  const ComplexVector gen_eig = linalg::spectrum(Qc);
  check_grid(horizon, dt, std::max(max_abs_eig(flow_eig), max_abs_eig(gen_eig)));

  const Index steps = static_cast<Index>(std::llround(horizon / dt));
  Matrix M = Matrix::Zero(n + nu, n + nu);
  M.topLeftCorner(n, n) = Ax;
  M.bottomLeftCorner(nu, n) = Rc * Cy;
  M.bottomRightCorner(nu, nu) = Qc;
  Vector z0(n + nu);
  z0.head(n) = x_jump;
  z0.tail(nu) = w_jump;
  const Matrix z = integrate_linear(M, z0, steps, dt);

  SimResult result;
  result.t = Vector::LinSpaced(steps + 1, 0.0, steps * dt);
  result.x = z.topRows(n);
  result.y = d_gain_w * z.bottomRows(nu) + d_state * result.x;

  // Closed-form evolution of d: d' = Qc d from the jump value.
  result.y_pred.resize(nu, steps + 1);
  const Matrix propagator = (Qc * dt).exp();
  Vector d_exact = d0;
  for (Index k = 0; k <= steps; ++k)
  {
    result.y_pred.col(k) = d_exact;
    d_exact = propagator * d_exact;
  }
  result.tail_residual = tail_residual_of(result.y, result.y_pred);
  result.transient_bound_ok = transient_bound_ok(plant_eig, horizon);
  return result;
}

SimResult simulate_left(const PortHamiltonianSystem &sys, const GeneratorLeft &gen,
                        InputKind input, LeftSimPath path, double horizon, double dt)
{
  return simulate_left(ph_to_lti(sys), gen, input, path, horizon, dt);
}

double energy_audit(const PortHamiltonianSystem &sys,
                    const std::function<Vector(double)> &input, const Vector &x0,
                    double horizon, double dt)
{
  require(sys.r_psd && sys.q_pd, Errc::flags_missing,
          "energy_audit: r_psd and q_pd flags must be set and verified");
  require(x0.size() == sys.states(), Errc::dimension_error,
          "energy_audit: x0 must have n entries");
  require(horizon > 0.0 && dt > 0.0 && horizon >= 2.0 * dt, Errc::invalid_argument,
          "energy_audit: need horizon > 0 and at least two steps");

  const LtiSystem lti = ph_to_lti(sys);
  const ComplexVector eig = linalg::spectrum(lti.A);
  require(dt < 2.8 / std::max(max_abs_eig(eig), 1e-12), Errc::degenerate_step,
          "energy_audit: dt exceeds the stability bound");

  auto flow = [&](double t, const Vector &x) -> Vector {
    return lti.A * x + lti.B * input(t);
  };
  auto rk4 = [&](double t, const Vector &x, double h) -> Vector {
    const Vector k1 = flow(t, x);
    const Vector k2 = flow(t + 0.5 * h, x + 0.5 * h * k1);
    const Vector k3 = flow(t + 0.5 * h, x + 0.5 * h * k2);
    const Vector k4 = flow(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  auto hamiltonian = [&](const Vector &x) { return 0.5 * x.dot(sys.Q * x); };
  auto supplied = [&](double t, const Vector &x) {
    return input(t).dot(lti.C * x);
  };

  const Index steps = static_cast<Index>(std::llround(horizon / dt));
  double worst = 0.0;
  Vector x = x0;
  double t = 0.0;
  for (Index k = 0; k < steps; ++k)
  {
    const Vector x_mid = rk4(t, x, 0.5 * dt);
    const Vector x_next = rk4(t + 0.5 * dt, x_mid, 0.5 * dt);
    // Simpson quadrature of the supplied power over the step.
    const double power = (dt / 6.0) * (supplied(t, x) + 4.0 * supplied(t + 0.5 * dt, x_mid) +
                                       supplied(t + dt, x_next));
    const double gain = hamiltonian(x_next) - hamiltonian(x);
    worst = std::max(worst, gain - power);
    x = x_next;
    t += dt;
  }
  return std::max(worst, 0.0);
}

}  // namespace phmm
