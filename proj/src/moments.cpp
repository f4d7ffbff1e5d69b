// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmm/moments.hpp"

namespace phmm
{

namespace
{

using linalg::SylvesterForm;

SylvesterSolution make_solution(SylvesterForm form, Side side, const ComplexMatrix &A,
                                const ComplexMatrix &S, const ComplexMatrix &C)
{
  SylvesterSolution sol;
  sol.form = form;
  sol.side = side;
  sol.X = linalg::solve_sylvester(form, A, S, C);
  sol.residual = linalg::sylvester_residual(form, A, S, C, sol.X).norm();
  return sol;
}

std::vector<ComplexMatrix> split_columns(const ComplexMatrix &block)
{
  std::vector<ComplexMatrix> values;
  values.reserve(static_cast<size_t>(block.cols()));
  for (Index j = 0; j < block.cols(); ++j)
  {
    values.push_back(block.col(j));
  }
  return values;
}

std::vector<ComplexMatrix> split_rows(const ComplexMatrix &block)
{
  std::vector<ComplexMatrix> values;
  values.reserve(static_cast<size_t>(block.rows()));
  for (Index i = 0; i < block.rows(); ++i)
  {
    values.push_back(block.row(i));
  }
  return values;
}

}  // namespace

std::string_view moment_kind_name(MomentKind kind)
{
  switch (kind)
  {
    case MomentKind::finite:
      return "finite";
    case MomentKind::markov_pi:
      return "markov_pi";
    case MomentKind::markov_pi_bar:
      return "markov_pi_bar";
    case MomentKind::markov_pi_tilde:
      return "markov_pi_tilde";
    case MomentKind::markov_upsilon:
      return "markov_upsilon";
    case MomentKind::markov_upsilon_hat:
      return "markov_upsilon_hat";
  }
  return "unknown";
}

ComplexMatrix MomentVector::stacked() const
{
  if (values.empty())
  {
    return ComplexMatrix(0, 0);
  }
  if (side == Side::right)
  {
    ComplexMatrix block(values.front().rows(), static_cast<Index>(values.size()));
    for (size_t j = 0; j < values.size(); ++j)
    {
      block.col(static_cast<Index>(j)) = values[j];
    }
    return block;
  }
  ComplexMatrix block(static_cast<Index>(values.size()), values.front().cols());
  for (size_t i = 0; i < values.size(); ++i)
  {
    block.row(static_cast<Index>(i)) = values[i];
  }
  return block;
}

TildeSplit tilde_split(const GeneratorRight &gen)
{
  const Index total = gen.order();
  require(total >= 2, Errc::invalid_argument, "tilde_split: generator must have order >= 2");
  const Index nu = total - 1;
  const ComplexMatrix &S = gen.S;
  require(S.col(0).cwiseAbs().maxCoeff() == 0.0, Errc::invalid_argument,
          "tilde_split: first column of S must vanish for the [[0,S1],[0,S2]] splitting");
  TildeSplit split;
  split.S1 = S.block(0, 1, 1, nu);
  split.S2 = S.bottomRightCorner(nu, nu);
  split.l1 = gen.L.col(0);
  split.L2 = gen.L.rightCols(nu);
  split.Lrow = split.l1 * split.S1 + split.L2 * split.S2;
  return split;
}

MomentData moments_finite(const LtiSystem &sys, const GeneratorRight &gen)
{
  const ComplexMatrix A = sys.A.cast<Complex>();
  const ComplexMatrix C = sys.B.cast<Complex>() * gen.L;
  MomentData data;
  data.solution = make_solution(SylvesterForm::finite_right, Side::right, A, gen.S, C);
  data.moments.values = split_columns(sys.C.cast<Complex>() * data.solution.X);
  data.moments.side = Side::right;
  data.moments.kind = MomentKind::finite;
  data.moments.points = linalg::spectrum(gen.S);
  return data;
}

MomentData moments_finite(const LtiSystem &sys, const GeneratorLeft &gen)
{
  const ComplexMatrix A = sys.A.cast<Complex>();
  const ComplexMatrix C = gen.Rc * sys.C.cast<Complex>();
  MomentData data;
  data.solution = make_solution(SylvesterForm::finite_left, Side::left, A, gen.Qc, C);
  data.moments.values = split_rows(data.solution.X * sys.B.cast<Complex>());
  data.moments.side = Side::left;
  data.moments.kind = MomentKind::finite;
  data.moments.points = linalg::spectrum(gen.Qc);
  return data;
}

MomentData moments_finite(const PortHamiltonianSystem &sys, const GeneratorRight &gen)
{
  return moments_finite(ph_to_lti(sys), gen);
}

MomentData moments_finite(const PortHamiltonianSystem &sys, const GeneratorLeft &gen)
{
  return moments_finite(ph_to_lti(sys), gen);
}

MomentData moments_markov(const LtiSystem &sys, const GeneratorRight &gen, MomentKind variant)
{
  const ComplexMatrix A = sys.A.cast<Complex>();
  const ComplexMatrix C = sys.C.cast<Complex>();
  const ComplexMatrix BL = sys.B.cast<Complex>() * gen.L;
  MomentData data;
  data.moments.side = Side::right;
  data.moments.kind = variant;
  data.moments.points = linalg::spectrum(gen.S);
  switch (variant)
  {
    case MomentKind::markov_pi:
      data.solution = make_solution(SylvesterForm::markov_right, Side::right, A, gen.S, BL);
      data.moments.values = split_columns(C * data.solution.X * gen.S);
      break;
    case MomentKind::markov_pi_bar:
      data.solution =
          make_solution(SylvesterForm::markov_right_shifted, Side::right, A, gen.S, BL);
      data.moments.values = split_columns(C * data.solution.X);
      break;
    case MomentKind::markov_pi_tilde:
    {
      const TildeSplit split = tilde_split(gen);
      const ComplexMatrix drive = sys.B.cast<Complex>() * split.Lrow;
      data.solution =
          make_solution(SylvesterForm::markov_right, Side::right, A, split.S2, drive);
      data.moments.values = split_columns(C * data.solution.X);
      data.moments.points = linalg::spectrum(split.S2);
      break;
    }
    default:
      fail(Errc::invalid_argument,
           "moments_markov: right-side variants are markov_pi, markov_pi_bar, markov_pi_tilde");
  }
  return data;
}

MomentData moments_markov(const LtiSystem &sys, const GeneratorLeft &gen, MomentKind variant)
{
  const ComplexMatrix A = sys.A.cast<Complex>();
  const ComplexMatrix C = sys.C.cast<Complex>();
  const ComplexMatrix B = sys.B.cast<Complex>();
  MomentData data;
  data.moments.side = Side::left;
  data.moments.kind = variant;
  data.moments.points = linalg::spectrum(gen.Qc);
  switch (variant)
  {
    case MomentKind::markov_upsilon:
      data.solution = make_solution(SylvesterForm::markov_left, Side::left, A, gen.Qc,
                                    ComplexMatrix(gen.Rc * C));
      data.moments.values = split_rows(gen.Qc * data.solution.X * B);
      break;
    case MomentKind::markov_upsilon_hat:
      data.solution = make_solution(SylvesterForm::markov_left_shifted, Side::left, A, gen.Qc,
                                    ComplexMatrix(gen.Rc * C));
      data.moments.values =
          split_rows(gen.Qc * (gen.Qc * data.solution.X + gen.Rc * C) * B);
      break;
    default:
      fail(Errc::invalid_argument,
           "moments_markov: left-side variants are markov_upsilon, markov_upsilon_hat");
  }
  return data;
}

MomentData moments_markov(const PortHamiltonianSystem &sys, const GeneratorRight &gen,
                          MomentKind variant)
{
  return moments_markov(ph_to_lti(sys), gen, variant);
}

MomentData moments_markov(const PortHamiltonianSystem &sys, const GeneratorLeft &gen,
                          MomentKind variant)
{
  return moments_markov(ph_to_lti(sys), gen, variant);
}

template <typename Scalar>
std::vector<ComplexMatrix> moment_derivative_oracle(const LtiSystemT<Scalar> &sys, Complex s0,
                                                    Index count)
{
  require(count >= 1, Errc::invalid_argument, "moment_derivative_oracle: count must be >= 1");
  const Index n = sys.states();
  const ComplexMatrix shifted =
      s0 * ComplexMatrix::Identity(n, n) - sys.A.template cast<Complex>();
  std::vector<ComplexMatrix> taylor;
  taylor.reserve(static_cast<size_t>(count));
  ComplexMatrix resolvent_power;
  try
  {
    resolvent_power = linalg::solve_linear(shifted, ComplexMatrix(sys.B.template cast<Complex>()));
    double sign = 1.0;
    for (Index k = 0; k < count; ++k)
    {
      taylor.push_back(sign * (sys.C.template cast<Complex>() * resolvent_power));
      if (k + 1 < count)
      {
        resolvent_power = linalg::solve_linear(shifted, resolvent_power);
        sign = -sign;
      }
    }
  }
  catch (const Error &err)
  {
    if (err.code() == Errc::singular_matrix)
    {
      fail(Errc::pole_hit, "moment_derivative_oracle: s0 is a pole");
    }
    throw;
  }
  return taylor;
}

template std::vector<ComplexMatrix> moment_derivative_oracle<double>(const LtiSystemT<double> &,
                                                                     Complex, Index);
template std::vector<ComplexMatrix>
moment_derivative_oracle<Complex>(const LtiSystemT<Complex> &, Complex, Index);

}  // namespace phmm
