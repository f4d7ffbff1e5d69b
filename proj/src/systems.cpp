// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmm/systems.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

namespace phmm
{

namespace
{

double max_abs(const Matrix &M)
{
  return M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
}

void check_symmetry(const Matrix &M, bool skew, const char *name)
{
  const Matrix defect = skew ? Matrix(M + M.transpose()) : Matrix(M - M.transpose());
  require(max_abs(defect) <= kEpsStruct * std::max(max_abs(M), 1e-300) || max_abs(M) == 0.0,
          Errc::invariant_violation,
          std::string(name) + (skew ? " is not skew-symmetric" : " is not symmetric"));
}

bool is_psd(const Matrix &M, double tol_scale)
{
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().minCoeff() >= -1.0e-10 * tol_scale;
}

bool is_pd(const Matrix &M, double tol_scale)
{
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().minCoeff() > 1.0e-12 * tol_scale;
}

Index rank_with_threshold(const ComplexMatrix &M, Index nu)
{
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(M);
  qr.setThreshold(static_cast<double>(nu) * 1.0e-12);
  return qr.rank();
}

template <typename Scalar>
ComplexMatrix transfer_impl(const MatrixX<Scalar> &A, const MatrixX<Scalar> &B,
                            const MatrixX<Scalar> &C, Complex s)
{
  const Index n = A.rows();
  ComplexMatrix shifted = s * ComplexMatrix::Identity(n, n) - A.template cast<Complex>();
  ComplexMatrix x;
  try
  {
    x = linalg::solve_linear(shifted, ComplexMatrix(B.template cast<Complex>()));
  }
  catch (const Error &err)
  {
    if (err.code() == Errc::singular_matrix)
    {
      fail(Errc::pole_hit, "transfer_eval: evaluation point is a pole");
    }
    throw;
  }
  return C.template cast<Complex>() * x;
}

}  // namespace

PortHamiltonianSystem make_ph(const Matrix &J, const Matrix &R, const Matrix &Q,
                              const Matrix &B, bool r_psd, bool q_pd, bool symmetrize)
{
  const Index n = J.rows();
  require(J.cols() == n && R.rows() == n && R.cols() == n && Q.rows() == n && Q.cols() == n,
          Errc::dimension_error, "make_ph: J, R, Q must be square of equal size");
  require(B.rows() == n && B.cols() >= 1, Errc::dimension_error,
          "make_ph: B must have n rows and at least one column");

  PortHamiltonianSystem sys;
  sys.J = symmetrize ? Matrix(0.5 * (J - J.transpose())) : J;
  sys.R = symmetrize ? Matrix(0.5 * (R + R.transpose())) : R;
  sys.Q = symmetrize ? Matrix(0.5 * (Q + Q.transpose())) : Q;
  sys.B = B;

  check_symmetry(sys.J, /*skew=*/true, "J");
  check_symmetry(sys.R, /*skew=*/false, "R");
  check_symmetry(sys.Q, /*skew=*/false, "Q");

  if (n > 0)
  {
    Eigen::PartialPivLU<Matrix> lu(sys.Q);
    const double floor = static_cast<double>(n) * std::max(max_abs(sys.Q), 1e-300) * 1.1e-16;
    require(lu.matrixLU().diagonal().cwiseAbs().minCoeff() > floor, Errc::invariant_violation,
            "make_ph: Q is numerically singular");
  }

  if (r_psd)
  {
    require(is_psd(sys.R, 1.0 + max_abs(sys.R)), Errc::invariant_violation,
            "make_ph: r_psd flag set but R has a negative eigenvalue");
    sys.r_psd = true;
  }
  if (q_pd)
  {
    require(is_pd(sys.Q, 1.0 + max_abs(sys.Q)), Errc::invariant_violation,
            "make_ph: q_pd flag set but Q is not positive definite");
    sys.q_pd = true;
  }
  return sys;
}

LtiSystem ph_to_lti(const PortHamiltonianSystem &sys)
{
  LtiSystem lti;
  lti.A = (sys.J - sys.R) * sys.Q;
  lti.B = sys.B;
  lti.C = sys.B.transpose() * sys.Q;
  return lti;
}

DescriptorModel make_descriptor(const Matrix &E, const Matrix &F, const Matrix &G,
                                const Matrix &H, bool input_derivative, bool output_derivative)
{
  const Index nu = E.rows();
  require(E.cols() == nu && F.rows() == nu && F.cols() == nu, Errc::dimension_error,
          "make_descriptor: E and F must be square of equal size");
  require(G.rows() == nu && H.cols() == nu, Errc::dimension_error,
          "make_descriptor: G rows / H cols must match the state dimension");

  // Pencil regularity: tau E - F invertible for some tau, probed at three
  // fixed shifts.
  bool regular = false;
  for (double tau : {0.7390851332151607, 1.6180339887498949, 2.718281828459045})
  {
    Eigen::PartialPivLU<Matrix> lu(tau * E - F);
    const double scale = std::max(max_abs(E) * tau + max_abs(F), 1e-300);
    if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() >
        static_cast<double>(nu) * scale * 1.1e-16)
    {
      regular = true;
      break;
    }
  }
  require(regular || nu == 0, Errc::invariant_violation,
          "make_descriptor: pencil tau E - F is singular at all sampled shifts");

  DescriptorModel model;
  model.E = E;
  model.F = F;
  model.G = G;
  model.H = H;
  model.input_derivative = input_derivative;
  model.output_derivative = output_derivative;
  return model;
}

DescriptorModel descriptor_from_lti(const LtiSystem &sys, int variant)
{
  require(variant == 1 || variant == 2, Errc::invalid_argument,
          "descriptor_from_lti: variant must be 1 (y = C x') or 2 (input u')");
  const Index n = sys.states();
  return make_descriptor(sys.A, Matrix::Identity(n, n), Matrix(-sys.B), sys.C,
                         /*input_derivative=*/variant == 2,
                         /*output_derivative=*/variant == 1);
}

GeneratorRight make_generator_right(const ComplexMatrix &S, const ComplexMatrix &L)
{
  const Index nu = S.rows();
  require(S.cols() == nu, Errc::dimension_error, "generator_right: S must be square");
  require(L.cols() == nu && L.rows() >= 1, Errc::dimension_error,
          "generator_right: L must be m x nu");
  ComplexMatrix obs(L.rows() * nu, nu);
  ComplexMatrix block = L;
  for (Index k = 0; k < nu; ++k)
  {
    obs.middleRows(k * L.rows(), L.rows()) = block;
    block = block * S;
  }
  require(rank_with_threshold(obs, nu) == nu, Errc::invariant_violation,
          "generator_right: pair (L, S) is not observable");
  return GeneratorRight{S, L};
}

GeneratorLeft make_generator_left(const ComplexMatrix &Qc, const ComplexMatrix &Rc)
{
  const Index nu = Qc.rows();
  require(Qc.cols() == nu, Errc::dimension_error, "generator_left: Qc must be square");
  require(Rc.rows() == nu && Rc.cols() >= 1, Errc::dimension_error,
          "generator_left: Rc must be nu x p");
  ComplexMatrix ctrl(nu, Rc.cols() * nu);
  ComplexMatrix block = Rc;
  for (Index k = 0; k < nu; ++k)
  {
    ctrl.middleCols(k * Rc.cols(), Rc.cols()) = block;
    block = Qc * block;
  }
  require(rank_with_threshold(ctrl, nu) == nu, Errc::invariant_violation,
          "generator_left: pair (Qc, Rc) is not controllable");
  return GeneratorLeft{Qc, Rc};
}

GeneratorRight generator_from_points(const std::vector<Complex> &points,
                                     const std::vector<ComplexVector> &tangents)
{
  const Index nu = static_cast<Index>(points.size());
  require(nu >= 1, Errc::invalid_argument, "generator_from_points: no points given");
  require(tangents.size() == points.size(), Errc::dimension_error,
          "generator_from_points: one tangent per point required");
  const Index m = tangents.front().size();
  ComplexMatrix S = ComplexMatrix::Zero(nu, nu);
  ComplexMatrix L = ComplexMatrix::Zero(m, nu);
  for (Index i = 0; i < nu; ++i)
  {
    require(tangents[static_cast<size_t>(i)].size() == m, Errc::dimension_error,
            "generator_from_points: tangents must share their length");
    S(i, i) = points[static_cast<size_t>(i)];
    if (i + 1 < nu && points[static_cast<size_t>(i + 1)] == points[static_cast<size_t>(i)])
    {
      // Jordan chain: the repeated point contributes the next derivative
      // order; its tangent must agree with the chain's.
      require((tangents[static_cast<size_t>(i + 1)] - tangents[static_cast<size_t>(i)]).norm() ==
                  0.0,
              Errc::invalid_argument,
              "generator_from_points: repeated points must share their tangent");
      S(i, i + 1) = 1.0;
    }
    else
    {
      L.col(i) = tangents[static_cast<size_t>(i)];
    }
  }
  // Chains read the tangent on the first column of the block.
  for (Index i = 0; i < nu; ++i)
  {
    const bool chain_start = (i == 0) || S(i - 1, i) == Complex(0.0);
    if (chain_start)
    {
      L.col(i) = tangents[static_cast<size_t>(i)];
    }
    else
    {
      L.col(i).setZero();
    }
  }
  return make_generator_right(S, L);
}

template <typename Scalar>
ComplexMatrix transfer_eval(const LtiSystemT<Scalar> &sys, Complex s)
{
  return transfer_impl<Scalar>(sys.A, sys.B, sys.C, s);
}

template ComplexMatrix transfer_eval<double>(const LtiSystemT<double> &, Complex);
template ComplexMatrix transfer_eval<Complex>(const LtiSystemT<Complex> &, Complex);

ComplexMatrix transfer_eval(const PortHamiltonianSystem &sys, Complex s)
{
  return transfer_eval(ph_to_lti(sys), s);
}

ComplexMatrix transfer_eval(const DescriptorModel &sys, Complex s)
{
  ComplexMatrix shifted = s * sys.E.cast<Complex>() - sys.F.cast<Complex>();
  ComplexMatrix x;
  try
  {
    x = linalg::solve_linear(shifted, ComplexMatrix(sys.G.cast<Complex>()));
  }
  catch (const Error &err)
  {
    if (err.code() == Errc::singular_matrix)
    {
      fail(Errc::pole_hit, "transfer_eval: sE - F singular at the evaluation point");
    }
    throw;
  }
  ComplexMatrix K = sys.H.cast<Complex>() * x;
  if (sys.input_derivative)
  {
    K *= s;
  }
  if (sys.output_derivative)
  {
    K *= s;
  }
  return K;
}

template <typename Scalar>
std::vector<MatrixX<Scalar>> markov_parameters(const LtiSystemT<Scalar> &sys, Index count)
{
  require(count >= 1, Errc::invalid_argument, "markov_parameters: count must be >= 1");
  std::vector<MatrixX<Scalar>> eta;
  eta.reserve(static_cast<size_t>(count));
  eta.push_back(MatrixX<Scalar>::Zero(sys.outputs(), sys.inputs()));
  MatrixX<Scalar> power = sys.B;
  for (Index k = 1; k < count; ++k)
  {
    eta.push_back(sys.C * power);
    power = sys.A * power;
  }
  return eta;
}

template std::vector<Matrix> markov_parameters<double>(const LtiSystemT<double> &, Index);
template std::vector<ComplexMatrix> markov_parameters<Complex>(const LtiSystemT<Complex> &,
                                                               Index);

std::vector<Matrix> markov_parameters(const PortHamiltonianSystem &sys, Index count)
{
  return markov_parameters(ph_to_lti(sys), count);
}

std::vector<Matrix> markov_parameters(const DescriptorModel &sys, Index count)
{
  LtiSystem state_space;
  try
  {
    state_space.A = linalg::solve_linear(sys.E, sys.F);
    state_space.B = linalg::solve_linear(sys.E, sys.G);
  }
  catch (const Error &err)
  {
    if (err.code() == Errc::singular_matrix)
    {
      fail(Errc::singular_e, "markov_parameters: descriptor E is singular");
    }
    throw;
  }
  state_space.C = sys.H;
  const int shift = (sys.input_derivative ? 1 : 0) + (sys.output_derivative ? 1 : 0);
  auto eta = markov_parameters(state_space, count + shift);
  // Multiplying the transfer by s advances the sequence by one term.
  eta.erase(eta.begin(), eta.begin() + shift);
  return eta;
}

PortHamiltonianSystem ladder_system(const std::array<double, 3> &resistances,
                                    const std::array<double, 2> &capacitances,
                                    const std::array<double, 2> &inductances)
{
  for (double value : resistances)
  {
    require(value > 0.0, Errc::non_positive_parameter, "ladder_system: resistance <= 0");
  }
  for (double value : capacitances)
  {
    require(value > 0.0, Errc::non_positive_parameter, "ladder_system: capacitance <= 0");
  }
  for (double value : inductances)
  {
    require(value > 0.0, Errc::non_positive_parameter, "ladder_system: inductance <= 0");
  }
  Matrix J(4, 4);
  J << 0, -1, 0, 0,  //
      1, 0, -1, 0,   //
      0, 1, 0, -1,   //
      0, 0, 1, 0;
  Matrix R = Vector({{0.0, resistances[0], 0.0, resistances[1] + resistances[2]}}).asDiagonal();
  Matrix Q = Vector({{1.0 / capacitances[0], 1.0 / inductances[0], 1.0 / capacitances[1],
                      1.0 / inductances[1]}})
                 .asDiagonal();
  Matrix B = Matrix::Zero(4, 1);
  B(0, 0) = 1.0;
  return make_ph(J, R, Q, B, /*r_psd=*/true, /*q_pd=*/true);
}

PortHamiltonianSystem smib_system(double delta)
{
  // Machine inductances; the (5,5) entry mirrors the printed second
  // q-axis amortisseur value so that Lm stays positive definite.
  Matrix Lm(6, 6);
  Lm << 0.22, 0, 0.01, 0.01, 0, 0,      //
      0, 0.219, 0, 0, 0.009, 0.009,     //
      0.01, 0, 1.825, 1.660, 0, 0,      //
      0.01, 0, 1.660, 1.8313, 0, 0,     //
      0, 0.009, 0, 0, 0.134, 0.009,     //
      0, 0.009, 0, 0, 0.009, 0.134;
  Matrix Q = Matrix::Zero(7, 7);
  Q.topLeftCorner(6, 6) = Lm.inverse();
  Q(6, 6) = 1.0 / 6.0;
  Q = 0.5 * (Q + Q.transpose());

  Matrix R =
      Vector({{0.031, 0.031, 0.0006, 0.0284, 0.00619, 0.023638, 10.0}}).asDiagonal();

  // Port layout as printed: rotor, field winding, and the stator pair
  // rotated by the machine angle delta.
  Matrix B = Matrix::Zero(7, 3);
  B(6, 0) = 1.0;
  B(2, 1) = 1.0;
  B(0, 2) = std::sin(delta);
  B(1, 2) = std::cos(delta);

  const Matrix J = Matrix::Zero(7, 7);
  return make_ph(J, R, Q, B, /*r_psd=*/true, /*q_pd=*/true);
}

}  // namespace phmm
