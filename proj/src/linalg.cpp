// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmm/linalg.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace phmm::linalg
{

namespace
{

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;

template <typename Mat>
Mat solve_lu(const Mat &A, const Mat &B)
{
  require(A.rows() == A.cols(), Errc::dimension_error, "solve_linear: A must be square");
  require(A.rows() == B.rows(), Errc::dimension_error,
          "solve_linear: row counts of A and B differ");
  require(A.allFinite() && B.allFinite(), Errc::invalid_argument,
          "solve_linear: non-finite entries");
  if (A.rows() == 0)
  {
    return Mat(0, B.cols());
  }
  Eigen::PartialPivLU<Mat> lu(A);
  const double pivot_floor =
      static_cast<double>(A.rows()) * A.cwiseAbs().maxCoeff() * kUnitRoundoff;
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  require(min_pivot > pivot_floor, Errc::singular_matrix,
          "solve_linear: pivot " + std::to_string(min_pivot) + " below threshold " +
              std::to_string(pivot_floor));
  return lu.solve(B);
}

// M(i0+p, j0+q) += alpha(p, q) * beta for every block position of a Kronecker
// factor; assembles kron(P, Q) without forming intermediates.
void add_kron(ComplexMatrix &M, const ComplexMatrix &P, const ComplexMatrix &Q, Complex sign)
{
  for (Index i = 0; i < P.rows(); ++i)
  {
    for (Index j = 0; j < P.cols(); ++j)
    {
      if (P(i, j) != Complex(0.0))
      {
        M.block(i * Q.rows(), j * Q.cols(), Q.rows(), Q.cols()) += sign * P(i, j) * Q;
      }
    }
  }
}

bool is_finite_form(SylvesterForm form)
{
  return form == SylvesterForm::finite_right || form == SylvesterForm::finite_left;
}

bool is_right_form(SylvesterForm form)
{
  return form == SylvesterForm::finite_right || form == SylvesterForm::markov_right ||
         form == SylvesterForm::markov_right_shifted;
}

void check_solvable(SylvesterForm form, const ComplexMatrix &A, const ComplexMatrix &S)
{
  if (A.rows() > kEagerSpectrumLimit)
  {
    return;
  }
  const ComplexVector lam = spectrum(A);
  const ComplexVector mu = spectrum(S);
  const double scale =
      1.0 + std::max(lam.size() ? lam.cwiseAbs().maxCoeff() : 0.0,
                     mu.size() ? mu.cwiseAbs().maxCoeff() : 0.0);
  for (Index i = 0; i < lam.size(); ++i)
  {
    for (Index j = 0; j < mu.size(); ++j)
    {
      if (is_finite_form(form))
      {
        require(std::abs(lam(i) - mu(j)) > 1.0e-10 * scale, Errc::spectrum_clash,
                "solve_sylvester: sigma(A) and sigma(S) intersect");
      }
      else
      {
        require(std::abs(lam(i) * mu(j) - 1.0) > 1.0e-10 * scale, Errc::spectrum_product_clash,
                "solve_sylvester: lambda*mu = 1 for some eigenvalue pair");
      }
    }
  }
}

}  // namespace

std::string_view sylvester_form_name(SylvesterForm form)
{
  switch (form)
  {
    case SylvesterForm::finite_right:
      return "finite_right";
    case SylvesterForm::finite_left:
      return "finite_left";
    case SylvesterForm::markov_right:
      return "markov_right";
    case SylvesterForm::markov_right_shifted:
      return "markov_right_shifted";
    case SylvesterForm::markov_left:
      return "markov_left";
    case SylvesterForm::markov_left_shifted:
      return "markov_left_shifted";
  }
  return "unknown";
}

Matrix solve_linear(const Matrix &A, const Matrix &B)
{
  return solve_lu(A, B);
}

ComplexMatrix solve_linear(const ComplexMatrix &A, const ComplexMatrix &B)
{
  return solve_lu(A, B);
}

ComplexVector spectrum(const Matrix &A)
{
  require(A.rows() == A.cols(), Errc::dimension_error, "spectrum: matrix must be square");
  require(A.allFinite(), Errc::invalid_argument, "spectrum: non-finite entries");
  const Index n = A.rows();
  if (n == 0)
  {
    return ComplexVector(0);
  }
  Eigen::RealSchur<Matrix> schur;
  schur.setMaxIterations(100 * n);
  schur.compute(A, /*computeU=*/false);
  require(schur.info() == Eigen::Success, Errc::no_convergence,
          "spectrum: QR iteration did not converge");
  const Matrix &T = schur.matrixT();
  ComplexVector eig(n);
  Index i = 0;
  while (i < n)
  {
    if (i == n - 1 || T(i + 1, i) == 0.0)
    {
      eig(i) = Complex(T(i, i), 0.0);
      ++i;
    }
    else
    {
      // 2x2 block of a real Schur form carries a conjugate pair.
      const double p = 0.5 * (T(i, i) - T(i + 1, i + 1));
      const double z = std::sqrt(std::abs(p * p + T(i + 1, i) * T(i, i + 1)));
      const double re = T(i + 1, i + 1) + p;
      eig(i) = Complex(re, z);
      eig(i + 1) = Complex(re, -z);
      i += 2;
    }
  }
  return eig;
}

ComplexVector spectrum(const ComplexMatrix &A)
{
  require(A.rows() == A.cols(), Errc::dimension_error, "spectrum: matrix must be square");
  require(A.allFinite(), Errc::invalid_argument, "spectrum: non-finite entries");
  if (A.rows() == 0)
  {
    return ComplexVector(0);
  }
  if (is_real(A))
  {
    return spectrum(Matrix(A.real()));
  }
  Eigen::ComplexSchur<ComplexMatrix> schur;
  schur.setMaxIterations(100 * A.rows());
  schur.compute(A, /*computeU=*/false);
  require(schur.info() == Eigen::Success, Errc::no_convergence,
          "spectrum: QR iteration did not converge");
  return schur.matrixT().diagonal();
}

ComplexMatrix solve_sylvester(SylvesterForm form, const ComplexMatrix &A,
                              const ComplexMatrix &S, const ComplexMatrix &C)
{
  require(A.rows() == A.cols() && S.rows() == S.cols(), Errc::dimension_error,
          "solve_sylvester: A and S must be square");
  const Index n = A.rows();
  const Index nu = S.rows();
  if (is_right_form(form))
  {
    require(C.rows() == n && C.cols() == nu, Errc::dimension_error,
            "solve_sylvester: C must be n x nu for a right form");
  }
  else
  {
    require(C.rows() == nu && C.cols() == n, Errc::dimension_error,
            "solve_sylvester: C must be nu x n for a left form");
  }
  check_solvable(form, A, S);

  const Index rows = is_right_form(form) ? n : nu;
  const Index cols = is_right_form(form) ? nu : n;
  ComplexMatrix M = ComplexMatrix::Zero(rows * cols, rows * cols);
  ComplexMatrix rhs;
  const ComplexMatrix In = ComplexMatrix::Identity(n, n);
  const ComplexMatrix Inu = ComplexMatrix::Identity(nu, nu);
  switch (form)
  {
    case SylvesterForm::finite_right:
      // (I ox A - S^T ox I) vec X = -vec C
      add_kron(M, Inu, A, 1.0);
      add_kron(M, S.transpose(), In, -1.0);
      rhs = -C;
      break;
    case SylvesterForm::finite_left:
      // (I ox S - A^T ox I) vec X = vec C
      add_kron(M, In, S, 1.0);
      add_kron(M, A.transpose(), Inu, -1.0);
      rhs = C;
      break;
    case SylvesterForm::markov_right:
    case SylvesterForm::markov_right_shifted:
      // (I - S^T ox A) vec X = vec C  (or vec(C S))
      M.setIdentity();
      add_kron(M, S.transpose(), A, -1.0);
      rhs = (form == SylvesterForm::markov_right) ? C : ComplexMatrix(C * S);
      break;
    case SylvesterForm::markov_left:
    case SylvesterForm::markov_left_shifted:
      // (I - A^T ox S) vec X = vec C  (or vec(C A))
      M.setIdentity();
      add_kron(M, A.transpose(), S, -1.0);
      rhs = (form == SylvesterForm::markov_left) ? C : ComplexMatrix(C * A);
      break;
  }

  ComplexMatrix vec_rhs = rhs;
  vec_rhs.resize(rows * cols, 1);
  ComplexMatrix vec_x;
  try
  {
    vec_x = solve_linear(M, vec_rhs);
  }
  catch (const Error &err)
  {
    if (err.code() == Errc::singular_matrix)
    {
      fail(is_finite_form(form) ? Errc::spectrum_clash : Errc::spectrum_product_clash,
           std::string("solve_sylvester: vectorized system singular (") +
               std::string(sylvester_form_name(form)) + ")");
    }
    throw;
  }
  vec_x.resize(rows, cols);
  return vec_x;
}

ComplexMatrix sylvester_residual(SylvesterForm form, const ComplexMatrix &A,
                                 const ComplexMatrix &S, const ComplexMatrix &C,
                                 const ComplexMatrix &X)
{
  switch (form)
  {
    case SylvesterForm::finite_right:
      return A * X + C - X * S;
    case SylvesterForm::finite_left:
      return S * X - X * A - C;
    case SylvesterForm::markov_right:
      return A * X * S + C - X;
    case SylvesterForm::markov_right_shifted:
      return A * X * S + C * S - X;
    case SylvesterForm::markov_left:
      return S * X * A + C - X;
    case SylvesterForm::markov_left_shifted:
      return S * X * A + C * A - X;
  }
  fail(Errc::invalid_argument, "sylvester_residual: unknown form");
}

bool is_real(const ComplexMatrix &X)
{
  const double scale = 1.0 + (X.size() ? X.cwiseAbs().maxCoeff() : 0.0);
  return X.size() == 0 || X.imag().cwiseAbs().maxCoeff() <= kEpsRealify * scale;
}

Matrix realify(const ComplexMatrix &X)
{
  require(is_real(X), Errc::not_real, "realify: matrix has genuinely complex entries");
  return X.real();
}

ComplexMatrix jordan_block(Complex s0, Index size)
{
  require(size >= 1, Errc::invalid_argument, "jordan_block: size must be positive");
  ComplexMatrix J = ComplexMatrix::Zero(size, size);
  J.diagonal().setConstant(s0);
  J.diagonal(1).setConstant(1.0);
  return J;
}

}  // namespace phmm::linalg
