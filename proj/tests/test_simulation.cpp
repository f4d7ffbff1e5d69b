// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "phmm/reduction.hpp"
#include "phmm/simulation.hpp"

using namespace phmm;

namespace
{

PortHamiltonianSystem unit_ladder()
{
  return ladder_system({1, 1, 1}, {1, 1}, {1, 1});
}

GeneratorRight constant_generator()
{
  ComplexMatrix S = ComplexMatrix::Zero(1, 1);
  ComplexMatrix L = ComplexMatrix::Ones(1, 1);
  return make_generator_right(S, L);
}

GeneratorRight ramp_generator()
{
  ComplexMatrix L = ComplexMatrix::Zero(1, 2);
  L(0, 0) = 1.0;
  return make_generator_right(linalg::jordan_block(Complex(0.0, 0.0), 2), L);
}

GeneratorRight oscillator_generator(double omega)
{
  ComplexMatrix S(2, 2);
  S << Complex(0.0, 0.0), Complex(omega, 0.0), Complex(-omega, 0.0), Complex(0.0, 0.0);
  ComplexMatrix L(1, 2);
  L << Complex(1.0, 0.0), Complex(0.0, 0.0);
  return make_generator_right(S, L);
}

GeneratorLeft nilpotent_left(Index size)
{
  ComplexMatrix Rc = ComplexMatrix::Zero(size, 1);
  Rc(0, 0) = 1.0;
  return make_generator_left(
      ComplexMatrix(linalg::jordan_block(Complex(0.0, 0.0), size).transpose()), Rc);
}

}  // namespace

TEST_CASE("simulate_right: constant generator settles on the dc gain")
{
  const PortHamiltonianSystem sys = unit_ladder();
  const SimResult result =
      simulate_right(sys, constant_generator(), Vector::Ones(1), 80.0, 1e-3);
  CHECK(result.transient_bound_ok);
  CHECK(result.tail_residual <= 1e-4);
  CHECK(std::abs(result.y(0, result.y.cols() - 1) - 3.0) <= 1e-4 * 4.0);
}

TEST_CASE("simulate_right: ramp generator follows the two-moment prediction")
{
  const PortHamiltonianSystem sys = unit_ladder();
  Vector w0(2);
  w0 << 0.0, 1.0;
  const SimResult result = simulate_right(sys, ramp_generator(), w0, 80.0, 1e-3);
  CHECK(result.tail_residual <= 1e-4);
  // Predicted signal is phi * omega(t) = 3 t - 11 on this drive.
  const Index last = result.t.size() - 1;
  const double t_end = result.t(last);
  CHECK(std::abs(result.y_pred(0, last) - (3.0 * t_end - 11.0)) < 1e-8 * (1.0 + 3.0 * t_end));
}

TEST_CASE("simulate_right: sinusoid amplitude and phase match the transfer value")
{
  const PortHamiltonianSystem sys = unit_ladder();
  const double omega = 1.0;
  const SimResult result =
      simulate_right(sys, oscillator_generator(omega), Vector::Unit(2, 0), 80.0, 1e-3);
  CHECK(result.tail_residual <= 1e-4);

  // Least-squares fit of the tail against cos / sin: u = cos(w t) makes the
  // steady output Re K cos(w t) - Im K sin(w t).
  const Index cols = result.t.size();
  const Index start = cols - cols / 5;
  Eigen::MatrixXd basis(cols - start, 2);
  Vector rhs(cols - start);
  for (Index k = start; k < cols; ++k)
  {
    basis(k - start, 0) = std::cos(omega * result.t(k));
    basis(k - start, 1) = std::sin(omega * result.t(k));
    rhs(k - start) = result.y(0, k);
  }
  const Vector fit = basis.colPivHouseholderQr().solve(rhs);
  const Complex K = transfer_eval(sys, Complex(0.0, omega))(0, 0);
  CHECK(std::abs(fit(0) - K.real()) < 1e-4);
  CHECK(std::abs(fit(1) + K.imag()) < 1e-4);
}

TEST_CASE("simulate_right: fourth-order convergence against the analytic solution")
{
  // x' = -x + cos(t), x(0) = 0: x(t) = (cos t + sin t - e^{-t}) / 2.
  LtiSystem sys;
  sys.A = -Matrix::Identity(1, 1);
  sys.B = Matrix::Identity(1, 1);
  sys.C = Matrix::Identity(1, 1);
  auto worst_error = [&](double dt) {
    const SimResult result =
        simulate_right(sys, oscillator_generator(1.0), Vector::Unit(2, 0), 20.0, dt);
    double worst = 0.0;
    for (Index k = 0; k < result.t.size(); ++k)
    {
      const double t = result.t(k);
      const double exact = 0.5 * (std::cos(t) + std::sin(t) - std::exp(-t));
      worst = std::max(worst, std::abs(result.y(0, k) - exact));
    }
    return worst;
  };
  const double coarse = worst_error(0.02);
  const double fine = worst_error(0.01);
  CHECK(coarse / fine >= 8.0);
}

TEST_CASE("simulate_right: guards on stability and step size")
{
  LtiSystem unstable;
  unstable.A = Matrix::Ones(1, 1);
  unstable.B = Matrix::Ones(1, 1);
  unstable.C = Matrix::Ones(1, 1);
  CHECK_THROWS_WITH_AS(
      simulate_right(unstable, constant_generator(), Vector::Ones(1), 10.0, 1e-2),
      doctest::Contains("UnstablePlant"), Error);

  CHECK_THROWS_WITH_AS(
      simulate_right(unit_ladder(), constant_generator(), Vector::Ones(1), 10.0, 2.0),
      doctest::Contains("DegenerateStep"), Error);

  // A generator off the imaginary axis is rejected.
  ComplexMatrix S(1, 1), L(1, 1);
  S << Complex(-0.5, 0.0);
  L << Complex(1.0, 0.0);
  CHECK_THROWS_WITH_AS(simulate_right(unit_ladder(), make_generator_right(S, L),
                                      Vector::Ones(1), 10.0, 1e-2),
                       doctest::Contains("imaginary axis"), Error);
}

TEST_CASE("simulate_right: the two descriptor readings agree in steady state")
{
  const LtiSystem lti = ph_to_lti(unit_ladder());
  const DescriptorModel path_i = descriptor_from_lti(lti, 1);
  const DescriptorModel path_ii = descriptor_from_lti(lti, 2);
  Vector w0(2);
  w0 << 0.0, 1.0;
  const SimResult a = simulate_right(path_i, ramp_generator(), w0, 80.0, 1e-3);
  const SimResult b = simulate_right(path_ii, ramp_generator(), w0, 80.0, 1e-3);
  CHECK(a.tail_residual <= 1e-4);
  CHECK(b.tail_residual <= 1e-4);
  const Index cols = a.t.size();
  double worst = 0.0;
  double scale = 1.0;
  for (Index k = cols - cols / 5; k < cols; ++k)
  {
    worst = std::max(worst, std::abs(a.y(0, k) - b.y(0, k)));
    scale = std::max(scale, std::abs(a.y(0, k)));
  }
  CHECK(worst / scale <= 1e-4);
}

TEST_CASE("simulate_left: impulse through the descriptor interconnection")
{
  const PortHamiltonianSystem sys = unit_ladder();
  const GeneratorLeft gen = nilpotent_left(2);
  const SimResult result =
      simulate_left(sys, gen, InputKind::impulse, LeftSimPath::markov, 40.0, 1e-3);
  CHECK(result.tail_residual <= 1e-4);

  // The d-signal follows the polynomial with coefficient vector Qc Upsilon B.
  const MomentData data = moments_markov(sys, gen, MomentKind::markov_upsilon);
  const Vector drive = data.moments.stacked().real();
  const Index last = result.t.size() - 1;
  const double t_end = result.t(last);
  CHECK(std::abs(result.y_pred(0, last) - drive(0)) < 1e-9 * (1.0 + std::abs(drive(0))));
  CHECK(std::abs(result.y_pred(1, last) - (drive(1) + t_end * drive(0))) <
        1e-9 * (1.0 + std::abs(drive(1)) + t_end));
}

TEST_CASE("simulate_left: step input follows the hatted drive")
{
  const PortHamiltonianSystem sys = unit_ladder();
  const GeneratorLeft gen = nilpotent_left(2);
  const SimResult result =
      simulate_left(sys, gen, InputKind::step, LeftSimPath::markov, 40.0, 1e-3);
  CHECK(result.tail_residual <= 1e-4);
  const MomentData data = moments_markov(sys, gen, MomentKind::markov_upsilon_hat);
  const Vector drive = data.moments.stacked().real();
  CHECK(std::abs(result.y_pred(0, 0) - drive(0)) < 1e-10 * (1.0 + std::abs(drive(0))));
  CHECK(std::abs(result.y_pred(1, 0) - drive(1)) < 1e-10 * (1.0 + std::abs(drive(1))));
}

TEST_CASE("simulate_left: finite path carries the moments of Upsilon B")
{
  const PortHamiltonianSystem sys = unit_ladder();
  const GeneratorLeft gen = nilpotent_left(2);
  const SimResult result =
      simulate_left(sys, gen, InputKind::impulse, LeftSimPath::finite, 40.0, 1e-3);
  CHECK(result.tail_residual <= 1e-4);
  const MomentData data = moments_finite(sys, gen);
  const Vector phi = data.moments.stacked().real();
  CHECK(std::abs(result.y_pred(0, 0) - phi(0)) < 1e-10 * (1.0 + std::abs(phi(0))));

  CHECK_THROWS_WITH_AS(
      simulate_left(sys, gen, InputKind::step, LeftSimPath::finite, 10.0, 1e-3),
      doctest::Contains("impulse"), Error);
}

TEST_CASE("simulate_left: zero port gives the zero signal")
{
  Matrix J(2, 2), R(2, 2), Q(2, 2);
  J << 0, 1, -1, 0;
  R = Matrix::Identity(2, 2);
  Q = Matrix::Identity(2, 2);
  const PortHamiltonianSystem sys = make_ph(J, R, Q, Matrix(Matrix::Zero(2, 1)));
  const SimResult result = simulate_left(sys, nilpotent_left(2), InputKind::impulse,
                                         LeftSimPath::finite, 10.0, 1e-3);
  CHECK(result.y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("energy_audit: dissipation under zero and bounded inputs")
{
  const PortHamiltonianSystem sys = unit_ladder();
  Vector x0(4);
  x0 << 1.0, -0.5, 0.25, 0.75;
  auto zero_input = [](double) { return Vector::Zero(1); };
  CHECK(energy_audit(sys, zero_input, x0, 20.0, 1e-3) <= 1e-8);

  auto sine_input = [](double t) {
    Vector u(1);
    u(0) = std::sin(1.3 * t) + 0.5 * std::cos(0.4 * t);
    return u;
  };
  const double dt = 1e-3;
  CHECK(energy_audit(sys, sine_input, x0, 20.0, dt) <= 10.0 * dt * dt * dt * 10.0);

  // A reduced model from the structure-preserving path passes the same audit.
  GeneratorRight gen = [&] {
    ComplexMatrix L = ComplexMatrix::Zero(1, 2);
    L(0, 0) = 1.0;
    return make_generator_right(linalg::jordan_block(Complex(0.0, 0.0), 2), L);
  }();
  const PhReduction reduction = reduce_ph_finite(sys, gen);
  Vector xr0(2);
  xr0 << 0.3, -0.2;
  CHECK(energy_audit(reduction.model, sine_input, xr0, 20.0, dt) <= 1e-6);
}

TEST_CASE("energy_audit: flags are mandatory")
{
  Matrix J(2, 2), R(2, 2), Q(2, 2), B(2, 1);
  J << 0, 1, -1, 0;
  R = Matrix::Identity(2, 2);
  Q = Matrix::Identity(2, 2);
  B << 1, 0;
  const PortHamiltonianSystem unflagged = make_ph(J, R, Q, B);
  auto zero_input = [](double) { return Vector::Zero(1); };
  CHECK_THROWS_WITH_AS(energy_audit(unflagged, zero_input, Vector::Zero(2), 5.0, 1e-3),
                       doctest::Contains("FlagsMissing"), Error);
}
