// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "phmm/errors.hpp"
#include "phmm/types.hpp"

namespace phmm::linalg
{

// Relative residual accepted from a linear or Sylvester solve.
inline constexpr double kEpsSolve = 1.0e-10;

// Imaginary parts below kEpsRealify * scale are dropped by realify().
inline constexpr double kEpsRealify = 1.0e-12;

// Spectra are compared eagerly for solvability when the plant dimension is
// at most this; larger problems rely on pivot failure in the
// vectorized solve.
inline constexpr Index kEagerSpectrumLimit = 50;

// X with A X = B by row-pivoted elimination. Throws Errc::singular_matrix
// when a pivot falls below n * max|A| * u (u = unit roundoff).
Matrix solve_linear(const Matrix &A, const Matrix &B);
ComplexMatrix solve_linear(const ComplexMatrix &A, const ComplexMatrix &B);

// Eigenvalues with multiplicity via Schur reduction (Hessenberg + shifted QR
// sweeps, at most 100 n of them). Conjugate pairs of a real input are exact
// conjugates.
ComplexVector spectrum(const Matrix &A);
ComplexVector spectrum(const ComplexMatrix &A);

// The six Sylvester shapes used for interpolation data. A is the plant
// matrix (n x n), S the generator matrix (nu x nu), C the constant term.
// Right forms solve for X (n x nu), left forms for X (nu x n).
enum class SylvesterForm
{
  finite_right,          // A X + C = X S
  finite_left,           // S X = X A + C
  markov_right,          // A X S + C = X
  markov_right_shifted,  // A X S + C S = X
  markov_left,           // X = S X A + C
  markov_left_shifted,   // X = S X A + C A
};

std::string_view sylvester_form_name(SylvesterForm form);

// Unique X of the given form, by Kronecker vectorization to one dense solve.
// Throws Errc::spectrum_clash (finite forms) or Errc::spectrum_product_clash
// (Markov forms) when the solvability condition fails.
ComplexMatrix solve_sylvester(SylvesterForm form, const ComplexMatrix &A,
                              const ComplexMatrix &S, const ComplexMatrix &C);

// LHS - RHS of the form's defining identity; zero iff X solves it.
ComplexMatrix sylvester_residual(SylvesterForm form, const ComplexMatrix &A,
                                 const ComplexMatrix &S, const ComplexMatrix &C,
                                 const ComplexMatrix &X);

// Drops imaginary parts below kEpsRealify * (1 + max|X|); throws
// Errc::not_real if any entry is genuinely complex.
Matrix realify(const ComplexMatrix &X);

bool is_real(const ComplexMatrix &X);

// Upper Jordan block of the given size at eigenvalue s0.
ComplexMatrix jordan_block(Complex s0, Index size);

}  // namespace phmm::linalg
