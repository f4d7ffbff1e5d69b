// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "oracles.hpp"
#include "phmm/systems.hpp"

using namespace phmm;

namespace
{

PortHamiltonianSystem unit_ladder()
{
  return ladder_system({1, 1, 1}, {1, 1}, {1, 1});
}

// The "C2 = 2" ladder variant used throughout: Q = diag(1, 1, 2, 1).
PortHamiltonianSystem c2_ladder()
{
  return ladder_system({1, 1, 1}, {1, 0.5}, {1, 1});
}

}  // namespace

TEST_CASE("make_ph: structural invariants enforced")
{
  Matrix J(2, 2), R(2, 2), Q(2, 2), B(2, 1);
  J << 0, 1, -1, 0;
  R << 1, 0, 0, 1;
  Q << 2, 0, 0, 3;
  B << 1, 0;
  CHECK_NOTHROW(make_ph(J, R, Q, B));

  Matrix J_bad = J;
  J_bad(0, 1) = 2.0;  // no longer skew
  CHECK_THROWS_WITH_AS(make_ph(J_bad, R, Q, B), doctest::Contains("skew"), Error);
  // The repair mode projects instead.
  const PortHamiltonianSystem repaired = make_ph(J_bad, R, Q, B, false, false, true);
  CHECK((repaired.J + repaired.J.transpose()).norm() == 0.0);

  Matrix R_bad = R;
  R_bad(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(make_ph(J, R_bad, Q, B), Error);

  Matrix Q_sing(2, 2);
  Q_sing << 1, 1, 1, 1;
  CHECK_THROWS_WITH_AS(make_ph(J, R, Q_sing, B), doctest::Contains("singular"), Error);

  Matrix R_indef(2, 2);
  R_indef << 1, 0, 0, -1;
  CHECK_THROWS_AS(make_ph(J, R_indef, Q, B, /*r_psd=*/true), Error);
  CHECK_NOTHROW(make_ph(J, R_indef, Q, B));  // without the flag it is allowed
}

TEST_CASE("ph_to_lti: trivial and ladder cases")
{
  Matrix B(3, 1);
  B << 1, 0, 0;
  const PortHamiltonianSystem triv =
      make_ph(Matrix::Zero(3, 3), Matrix::Identity(3, 3), Matrix::Identity(3, 3), B);
  const LtiSystem lti = ph_to_lti(triv);
  CHECK((lti.A + Matrix::Identity(3, 3)).norm() == 0.0);
  CHECK((lti.C - B.transpose()).norm() == 0.0);

  Matrix expected(4, 4);
  expected << 0, -1, 0, 0,  //
      1, -1, -1, 0,         //
      0, 1, 0, -1,          //
      0, 0, 1, -2;
  CHECK((ph_to_lti(unit_ladder()).A - expected).norm() == 0.0);

  Matrix expected_c2(4, 4);
  expected_c2 << 0, -1, 0, 0,  //
      1, -1, -2, 0,            //
      0, 1, 0, -1,             //
      0, 0, 2, -2;
  CHECK((ph_to_lti(c2_ladder()).A - expected_c2).norm() == 0.0);
}

TEST_CASE("ladder_system: parameters and invariants")
{
  const PortHamiltonianSystem sys = unit_ladder();
  CHECK(sys.Q.isIdentity(0.0));
  CHECK(sys.R(1, 1) == 1.0);
  CHECK(sys.R(3, 3) == 2.0);
  CHECK(sys.r_psd);
  CHECK(sys.q_pd);

  CHECK_THROWS_WITH_AS(ladder_system({1, -1, 1}, {1, 1}, {1, 1}),
                       doctest::Contains("NonPositiveParameter"), Error);

  // K(0) = R1 + R2 + R3 (the printed "3 R1" under equal resistances).
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(0.3, 2.5);
  for (int trial = 0; trial < 4; ++trial)
  {
    const double r1 = unif(rng);
    const double r2 = unif(rng);
    const double r3 = unif(rng);
    const PortHamiltonianSystem random_ladder =
        ladder_system({r1, r2, r3}, {unif(rng), unif(rng)}, {unif(rng), unif(rng)});
    const ComplexMatrix K0 = transfer_eval(random_ladder, Complex(0.0, 0.0));
    const double dc = r1 + r2 + r3;
    CHECK(std::abs(K0(0, 0) - dc) < 1e-10 * (1.0 + dc));

    const PortHamiltonianSystem equal_ladder =
        ladder_system({r1, r1, r1}, {unif(rng), unif(rng)}, {unif(rng), unif(rng)});
    CHECK(std::abs(transfer_eval(equal_ladder, Complex(0.0, 0.0))(0, 0) - 3.0 * r1) <
          1e-10 * (1.0 + 3.0 * r1));
  }
}

TEST_CASE("ladder transfer matches the closed-form rational function under equal parameters")
{
  // With C1 = C2, L1 = L2, R1 = R2 = R3 the transfer function is
  //   (L^2 C s^3 + 3 L R C s^2 + (2L + 2R^2 C) s + 3R) /
  //   (C^2 L^2 s^4 + 3 C^2 L R s^3 + (3 C L + 2 C^2 R^2) s^2 + 5 R C s + 1).
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(0.4, 2.0);
  for (int trial = 0; trial < 4; ++trial)
  {
    const double r = unif(rng);
    const double c = unif(rng);
    const double l = unif(rng);
    const PortHamiltonianSystem sys = ladder_system({r, r, r}, {c, c}, {l, l});
    const testing::RationalCoeffs coeffs = testing::leverrier(ph_to_lti(sys));

    const double lead = c * c * l * l;
    const std::vector<double> den_expected = {1.0 / lead, 5.0 * r * c / lead,
                                              (3.0 * c * l + 2.0 * c * c * r * r) / lead,
                                              3.0 * c * c * l * r / lead, 1.0};
    const std::vector<double> num_expected = {3.0 * r / lead, (2.0 * l + 2.0 * r * r * c) / lead,
                                              3.0 * l * r * c / lead, l * l * c / lead};
    for (size_t k = 0; k < den_expected.size(); ++k)
    {
      CHECK(std::abs(coeffs.den[k] - den_expected[k]) <=
            1e-12 * (1.0 + std::abs(den_expected[k])));
    }
    for (size_t k = 0; k < num_expected.size(); ++k)
    {
      CHECK(std::abs(coeffs.num[k](0, 0) - num_expected[k]) <=
            1e-12 * (1.0 + std::abs(num_expected[k])));
    }
  }
}

TEST_CASE("transfer_eval: poles and strict properness")
{
  const PortHamiltonianSystem sys = unit_ladder();
  CHECK(transfer_eval(sys, Complex(0.0, 0.0))(0, 0).real() == doctest::Approx(3.0));

  const double far = std::abs(transfer_eval(sys, Complex(1e8, 0.0))(0, 0));
  const double near = std::abs(transfer_eval(sys, Complex(1.0, 0.0))(0, 0));
  CHECK(far <= 1e-6 * near);

  LtiSystem diag;
  diag.A = Vector({{-1.0, -2.0}}).asDiagonal();
  diag.B = Matrix::Ones(2, 1);
  diag.C = Matrix::Ones(1, 2);
  CHECK_THROWS_WITH_AS(transfer_eval(diag, Complex(-1.0, 0.0)), doctest::Contains("PoleHit"),
                       Error);
}

TEST_CASE("markov_parameters: ladder variant, zero dynamics, shift chain")
{
  const auto eta = markov_parameters(c2_ladder(), 4);
  CHECK(eta[0](0, 0) == 0.0);
  CHECK(eta[1](0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(eta[2](0, 0)) < 1e-14);
  CHECK(eta[3](0, 0) == doctest::Approx(-1.0));

  std::mt19937 rng_still(1);
  LtiSystem still;
  still.A = Matrix::Zero(3, 3);
  still.B = testing::random_matrix(rng_still, 3, 1);
  still.C = Matrix::Ones(1, 3);
  const auto eta_still = markov_parameters(still, 5);
  CHECK(eta_still[1](0, 0) == doctest::Approx((still.C * still.B)(0, 0)));
  for (size_t k = 2; k < 5; ++k)
  {
    CHECK(eta_still[k](0, 0) == 0.0);
  }

  // Integrator chain from port e_n to tap e_1: first nonzero Markov
  // parameter at index n.
  const Index n = 5;
  LtiSystem chain;
  chain.A = Matrix::Zero(n, n);
  chain.A.diagonal(1).setOnes();
  chain.B = Matrix::Zero(n, 1);
  chain.B(n - 1, 0) = 1.0;
  chain.C = Matrix::Zero(1, n);
  chain.C(0, 0) = 1.0;
  const auto eta_chain = markov_parameters(chain, n + 2);
  for (Index k = 0; k < n; ++k)
  {
    CHECK(eta_chain[static_cast<size_t>(k)](0, 0) == 0.0);
  }
  CHECK(eta_chain[static_cast<size_t>(n)](0, 0) == doctest::Approx(1.0));
}

TEST_CASE("markov_parameters agree with a large-|s| expansion fit")
{
  const LtiSystem sys = ph_to_lti(c2_ladder());
  const auto eta = markov_parameters(sys, 5);
  // Fit s K(s) = eta_1 + eta_2 / s + ... at five large points.
  Eigen::MatrixXd V(5, 4);
  Vector rhs(5);
  const double base = 250.0;
  for (Index row = 0; row < 5; ++row)
  {
    const double s = base * std::pow(2.0, static_cast<double>(row));
    rhs(row) = s * transfer_eval(sys, Complex(s, 0.0))(0, 0).real();
    for (Index col = 0; col < 4; ++col)
    {
      V(row, col) = std::pow(s, -static_cast<double>(col));
    }
  }
  const Vector fitted = V.colPivHouseholderQr().solve(rhs);
  for (Index k = 0; k < 3; ++k)
  {
    CHECK(std::abs(fitted(k) - eta[static_cast<size_t>(k + 1)](0, 0)) < 1e-4);
  }
}

TEST_CASE("generators: observability and controllability invariants")
{
  const ComplexMatrix S = linalg::jordan_block(Complex(0.0, 0.0), 2);
  ComplexMatrix L_good(1, 2), L_bad(1, 2);
  L_good << 1.0, 0.0;
  L_bad << 0.0, 0.0;
  CHECK_NOTHROW(make_generator_right(S, L_good));
  CHECK_THROWS_WITH_AS(make_generator_right(S, L_bad), doctest::Contains("observable"), Error);
  // The pair ([0 1], upper Jordan at 0) fails observability as well.
  ComplexMatrix L_tail(1, 2);
  L_tail << 0.0, 1.0;
  CHECK_THROWS_AS(make_generator_right(S, L_tail), Error);

  const ComplexMatrix Qc = S.transpose();
  ComplexMatrix Rc_good(2, 1), Rc_bad(2, 1);
  Rc_good << 1.0, 0.0;
  Rc_bad << 0.0, 1.0;
  CHECK_NOTHROW(make_generator_left(Qc, Rc_good));
  CHECK_THROWS_WITH_AS(make_generator_left(Qc, Rc_bad), doctest::Contains("controllable"),
                       Error);
}

TEST_CASE("generator_from_points: diagonal and chained layouts")
{
  const std::vector<Complex> points{Complex(0.5, 0.0), Complex(1.5, 0.0)};
  const std::vector<ComplexVector> tangents(2, ComplexVector::Ones(1));
  const GeneratorRight gen = generator_from_points(points, tangents);
  CHECK(gen.S(0, 0) == Complex(0.5, 0.0));
  CHECK(gen.S(0, 1) == Complex(0.0, 0.0));

  const std::vector<Complex> chain{Complex(0.5, 0.0), Complex(0.5, 0.0)};
  const GeneratorRight gen_chain = generator_from_points(chain, tangents);
  CHECK(gen_chain.S(0, 1) == Complex(1.0, 0.0));
  CHECK(gen_chain.L(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("smib_system: printed port pattern and stability")
{
  const PortHamiltonianSystem sys = smib_system(kSmibDefaultDelta);
  CHECK(sys.states() == 7);
  CHECK(sys.ports() == 3);
  CHECK(sys.B(0, 2) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(sys.B(1, 2) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(sys.B(6, 0) == 1.0);
  CHECK(sys.B(2, 1) == 1.0);
  CHECK(sys.J.norm() == 0.0);

  const PortHamiltonianSystem aligned = smib_system(0.0);
  CHECK(aligned.B(0, 2) == 0.0);
  CHECK(aligned.B(1, 2) == 1.0);

  // A = -R Q is Hurwitz.
  const ComplexVector eig = linalg::spectrum(ph_to_lti(sys).A);
  for (Index i = 0; i < eig.size(); ++i)
  {
    CHECK(eig(i).real() < 0.0);
  }
}

TEST_CASE("descriptor models: regularity, flags, Markov shift")
{
  const LtiSystem lti = ph_to_lti(c2_ladder());
  const DescriptorModel v1 = descriptor_from_lti(lti, 1);
  CHECK(v1.output_derivative);
  const DescriptorModel v2 = descriptor_from_lti(lti, 2);
  CHECK(v2.input_derivative);

  // Both realize K(1/tau): evaluating them at s reproduces the original
  // transfer at 1/s.
  for (Complex s : {Complex(0.7, 0.0), Complex(1.0, 1.0), Complex(2.5, -0.5)})
  {
    const ComplexMatrix swapped = transfer_eval(lti, 1.0 / s);
    CHECK(std::abs(transfer_eval(v1, s)(0, 0) - swapped(0, 0)) < 1e-10);
    CHECK(std::abs(transfer_eval(v2, s)(0, 0) - swapped(0, 0)) < 1e-10);
  }

  const Matrix zero = Matrix::Zero(2, 2);
  CHECK_THROWS_WITH_AS(make_descriptor(zero, zero, Matrix::Zero(2, 1), Matrix::Zero(1, 2)),
                       doctest::Contains("pencil"), Error);
}
