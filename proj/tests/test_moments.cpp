// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "oracles.hpp"
#include "phmm/moments.hpp"

using namespace phmm;

namespace
{

PortHamiltonianSystem unit_ladder()
{
  return ladder_system({1, 1, 1}, {1, 1}, {1, 1});
}

PortHamiltonianSystem c2_ladder()
{
  return ladder_system({1, 1, 1}, {1, 0.5}, {1, 1});
}

GeneratorRight nilpotent_right(Index size)
{
  ComplexMatrix L = ComplexMatrix::Zero(1, size);
  L(0, 0) = 1.0;
  return make_generator_right(linalg::jordan_block(Complex(0.0, 0.0), size), L);
}

GeneratorLeft nilpotent_left(Index size)
{
  ComplexMatrix Rc = ComplexMatrix::Zero(size, 1);
  Rc(0, 0) = 1.0;
  return make_generator_left(
      ComplexMatrix(linalg::jordan_block(Complex(0.0, 0.0), size).transpose()), Rc);
}

}  // namespace

TEST_CASE("moments_finite: ladder golden values")
{
  // eta_0 = 3 R1 = 3 and eta_1 = 2 L1 - 13 R1^2 C1 = -11 at unit values.
  const MomentData unit = moments_finite(unit_ladder(), nilpotent_right(2));
  REQUIRE(unit.moments.values.size() == 2);
  CHECK(std::abs(unit.moments.values[0](0, 0) - 3.0) < 1e-10);
  CHECK(std::abs(unit.moments.values[1](0, 0) - (-11.0)) < 1e-10);
  CHECK(unit.solution.residual < 1e-10);

  const MomentData c2 = moments_finite(c2_ladder(), nilpotent_right(2));
  CHECK(std::abs(c2.moments.values[0](0, 0) - 3.0) < 1e-10);
  CHECK(std::abs(c2.moments.values[1](0, 0) - (-9.0)) < 1e-10);
}

TEST_CASE("moments_finite: single interpolation point is a transfer value")
{
  std::mt19937 rng(23);
  const LtiSystem sys = testing::random_stable_lti(rng, 6);
  ComplexMatrix S(1, 1), L(1, 1);
  S << Complex(0.7, 0.0);
  L << Complex(1.0, 0.0);
  const MomentData data = moments_finite(sys, make_generator_right(S, L));
  CHECK(std::abs(data.moments.values[0](0, 0) - transfer_eval(sys, Complex(0.7, 0.0))(0, 0)) <
        1e-10);
}

TEST_CASE("moments_finite: left data of the ladder variant")
{
  const MomentData data = moments_finite(c2_ladder(), nilpotent_left(2));
  REQUIRE(data.moments.values.size() == 2);
  CHECK(std::abs(data.moments.values[0](0, 0) - 3.0) < 1e-10);
  CHECK(std::abs(data.moments.values[1](0, 0) - (-9.0)) < 1e-10);
  // Upsilon's first row is -r1 C A^{-1} = [3, -1, 2, -1].
  Matrix first_row(1, 4);
  first_row << 3, -1, 2, -1;
  CHECK((data.solution.X.row(0) - first_row.cast<Complex>()).norm() < 1e-10);
}

TEST_CASE("moments_markov: pi variant reproduces leading Markov parameters")
{
  const PortHamiltonianSystem sys = c2_ladder();
  const MomentData data = moments_markov(sys, nilpotent_right(3), MomentKind::markov_pi);
  REQUIRE(data.moments.values.size() == 3);
  CHECK(std::abs(data.moments.values[0](0, 0)) < 1e-12);
  CHECK(std::abs(data.moments.values[1](0, 0) - 1.0) < 1e-10);
  CHECK(std::abs(data.moments.values[2](0, 0)) < 1e-10);

  // Pi = [B, A B, A^2 B] for the Krylov selector tangents.
  const LtiSystem lti = ph_to_lti(sys);
  Matrix expected(4, 3);
  expected.col(0) = lti.B;
  expected.col(1) = lti.A * lti.B;
  expected.col(2) = lti.A * lti.A * lti.B;
  CHECK((data.solution.X - expected.cast<Complex>()).norm() < 1e-10);
}

TEST_CASE("moments_markov: pi_tilde splitting")
{
  const MomentData data = moments_markov(c2_ladder(), nilpotent_right(3),
                                         MomentKind::markov_pi_tilde);
  REQUIRE(data.moments.values.size() == 2);
  CHECK(std::abs(data.moments.values[0](0, 0) - 1.0) < 1e-10);
  CHECK(std::abs(data.moments.values[1](0, 0)) < 1e-12);
}

TEST_CASE("moments_markov: alternating-sign example")
{
  LtiSystem sys;
  sys.A = -Matrix::Identity(3, 3);
  sys.B = Matrix::Zero(3, 1);
  sys.B(0, 0) = 1.0;
  sys.C = sys.B.transpose();
  const MomentData data = moments_markov(sys, nilpotent_right(3), MomentKind::markov_pi);
  CHECK(std::abs(data.moments.values[0](0, 0)) < 1e-12);
  CHECK(std::abs(data.moments.values[1](0, 0) - 1.0) < 1e-10);
  CHECK(std::abs(data.moments.values[2](0, 0) + 1.0) < 1e-10);
}

TEST_CASE("moment_derivative_oracle: ladder Taylor data")
{
  const auto taylor = moment_derivative_oracle(ph_to_lti(unit_ladder()), Complex(0.0, 0.0), 2);
  CHECK(std::abs(taylor[0](0, 0) - 3.0) < 1e-12);
  CHECK(std::abs(taylor[1](0, 0) - (-11.0)) < 1e-10);

  std::mt19937 rng(29);
  const LtiSystem sys = testing::random_stable_lti(rng, 5);
  const auto k0 = moment_derivative_oracle(sys, Complex(0.0, 0.0), 1);
  CHECK(std::abs(k0[0](0, 0) - transfer_eval(sys, Complex(0.0, 0.0))(0, 0)) < 1e-12);
}

TEST_CASE("Jordan equivalence: finite moments equal the derivative oracle")
{
  std::mt19937 rng(31);
  for (int trial = 0; trial < 5; ++trial)
  {
    const Index n = 4 + trial;
    const Index nu = 2 + (trial % 3);
    const LtiSystem sys = testing::random_stable_lti(rng, n);
    const Complex s0(0.3 * trial, 0.0);
    ComplexMatrix L = ComplexMatrix::Zero(1, nu);
    L(0, 0) = 1.0;
    const GeneratorRight gen = make_generator_right(linalg::jordan_block(s0, nu), L);
    const MomentData data = moments_finite(sys, gen);
    const auto taylor = moment_derivative_oracle(sys, s0, nu);
    for (Index k = 0; k < nu; ++k)
    {
      const double scale = 1.0 + std::abs(taylor[static_cast<size_t>(k)](0, 0));
      CHECK(std::abs(data.moments.values[static_cast<size_t>(k)](0, 0) -
                     taylor[static_cast<size_t>(k)](0, 0)) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("Markov equivalence: pi moments equal the direct Markov parameters")
{
  std::mt19937 rng(37);
  for (int trial = 0; trial < 5; ++trial)
  {
    const Index nu = 2 + (trial % 3);
    const LtiSystem sys = testing::random_stable_lti(rng, 6);
    const MomentData data = moments_markov(sys, nilpotent_right(nu + 1), MomentKind::markov_pi);
    const auto eta = markov_parameters(sys, nu + 1);
    for (Index k = 0; k <= nu; ++k)
    {
      CHECK(std::abs(data.moments.values[static_cast<size_t>(k)](0, 0) -
                     eta[static_cast<size_t>(k)](0, 0)) <=
            1e-10 * (1.0 + std::abs(eta[static_cast<size_t>(k)](0, 0))));
    }
  }
}

TEST_CASE("left and right moments agree at distinct real points")
{
  std::mt19937 rng(41);
  for (int trial = 0; trial < 4; ++trial)
  {
    const LtiSystem sys = testing::random_stable_lti(rng, 6);
    const std::vector<double> pts{0.25, 1.0, 2.75};
    ComplexMatrix S = ComplexMatrix::Zero(3, 3);
    ComplexMatrix L = ComplexMatrix::Ones(1, 3);
    ComplexMatrix Rc = ComplexMatrix::Ones(3, 1);
    for (Index i = 0; i < 3; ++i)
    {
      S(i, i) = pts[static_cast<size_t>(i)];
    }
    const MomentData right = moments_finite(sys, make_generator_right(S, L));
    const MomentData left = moments_finite(sys, make_generator_left(S, Rc));
    for (Index i = 0; i < 3; ++i)
    {
      const Complex expected = transfer_eval(sys, S(i, i))(0, 0);
      CHECK(std::abs(right.moments.values[static_cast<size_t>(i)](0, 0) - expected) <
            1e-9 * (1.0 + std::abs(expected)));
      CHECK(std::abs(left.moments.values[static_cast<size_t>(i)](0, 0) - expected) <
            1e-9 * (1.0 + std::abs(expected)));
    }
  }
}

TEST_CASE("basis covariance: S -> T S T^{-1}, L -> L T^{-1} maps Pi to Pi T^{-1}")
{
  std::mt19937 rng(43);
  const LtiSystem sys = testing::random_stable_lti(rng, 5);
  const GeneratorRight gen = nilpotent_right(3);
  const MomentData base = moments_finite(sys, gen);

  const ComplexMatrix T =
      testing::random_matrix(rng, 3, 3).cast<Complex>() + 3.0 * ComplexMatrix::Identity(3, 3);
  const ComplexMatrix Tinv = linalg::solve_linear(T, ComplexMatrix(ComplexMatrix::Identity(3, 3)));
  const GeneratorRight gen_t =
      make_generator_right(ComplexMatrix(T * gen.S * Tinv), ComplexMatrix(gen.L * Tinv));
  const MomentData moved = moments_finite(sys, gen_t);
  CHECK((moved.solution.X - base.solution.X * Tinv).norm() <=
        1e-8 * (1.0 + base.solution.X.norm()));
}

TEST_CASE("left Markov variants encode the same moments")
{
  std::mt19937 rng(47);
  for (int trial = 0; trial < 4; ++trial)
  {
    const LtiSystem sys = testing::random_stable_lti(rng, 6);
    const GeneratorLeft gen = nilpotent_left(3);
    const MomentData plain = moments_markov(sys, gen, MomentKind::markov_upsilon);
    const MomentData hat = moments_markov(sys, gen, MomentKind::markov_upsilon_hat);
    CHECK((plain.moments.stacked() - hat.moments.stacked()).norm() < 1e-10);
  }
}

TEST_CASE("pi and pi_bar variants encode the same moments, including general tau*")
{
  std::mt19937 rng(53);
  for (double tau : {0.0, 0.15, -0.2})
  {
    const LtiSystem sys = testing::random_stable_lti(rng, 6);
    ComplexMatrix L = ComplexMatrix::Zero(1, 3);
    L(0, 0) = 1.0;
    const GeneratorRight gen =
        make_generator_right(linalg::jordan_block(Complex(tau, 0.0), 3), L);
    const MomentData pi = moments_markov(sys, gen, MomentKind::markov_pi);
    const MomentData pi_bar = moments_markov(sys, gen, MomentKind::markov_pi_bar);
    CHECK((pi.moments.stacked() - pi_bar.moments.stacked()).norm() <
          1e-9 * (1.0 + pi.moments.stacked().norm()));
  }
}

TEST_CASE("moments_markov: solvability guard")
{
  LtiSystem sys;
  sys.A = Matrix::Identity(2, 2);  // lambda = 1 meets mu = 1
  sys.B = Matrix::Ones(2, 1);
  sys.C = Matrix::Ones(1, 2);
  ComplexMatrix L = ComplexMatrix::Zero(1, 2);
  L(0, 0) = 1.0;
  const GeneratorRight gen =
      make_generator_right(linalg::jordan_block(Complex(1.0, 0.0), 2), L);
  CHECK_THROWS_WITH_AS(moments_markov(sys, gen, MomentKind::markov_pi),
                       doctest::Contains("SpectrumProductClash"), Error);
}
