// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phmm/reduction.hpp"

namespace phmm
{

// Default verification tolerance; the PHMM_TOL environment variable
// overrides it.
double default_tol();

struct CheckResult
{
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct Report
{
  std::vector<CheckResult> checks;

  bool all_pass() const;
  void add(const std::string &name, double residual, double tolerance,
           const std::string &note = "");
};

// A unified (E, F, G, H) view of a reduced model for certificate checks.
struct Realization
{
  ComplexMatrix E;
  ComplexMatrix F;
  ComplexMatrix G;
  ComplexMatrix H;
  bool input_derivative = false;
  bool output_derivative = false;
};

Realization realization_of(const ComplexLtiSystem &sys);
Realization realization_of(const LtiSystem &sys);
Realization realization_of(const PortHamiltonianSystem &sys);
Realization realization_of(const DescriptorModel &sys);

// Per-point interpolation residuals ||(K - Khat)(s_i) l_i|| (right) or
// ||r_i (K - Khat)(s_i)|| (left); repeated points are checked through the
// derivative oracle, one residual per derivative order.
template <typename OrigSys, typename RedSys>
Report verify_finite_match(const OrigSys &orig, const RedSys &red,
                           const std::vector<Complex> &points,
                           const std::vector<ComplexVector> &tangents, Side side,
                           double tol);

// Entrywise differences of the leading Markov parameters.
template <typename OrigSys, typename RedSys>
Report verify_markov_match(const OrigSys &orig, const RedSys &red, Index count, double tol);

// Checks the matching identities the certificate kind names, plus
// invertibility of P. Throws Errc::kind_mismatch when the certificate kind
// cannot witness the supplied moment data.
Report verify_certificate(const Realization &red, const GeneratorRight &gen,
                          const MomentVector &moments, const MatchCertificate &cert,
                          double tol);
Report verify_certificate(const Realization &red, const GeneratorLeft &gen,
                          const MomentVector &moments, const MatchCertificate &cert,
                          double tol);

// Reduced-family passivity test of the appendix: P symmetric positive
// definite with S* P + P S <= Pi* Q B L + L* B* Q Pi. The left-side analog
// is checked exactly as printed (its right-hand side is skew) and the
// report notes it as such.
struct FamilyDataRight
{
  ComplexMatrix S;
  ComplexMatrix L;
  ComplexMatrix Pi;
  Matrix Q;
  Matrix B;
};

struct FamilyDataLeft
{
  ComplexMatrix Qc;
  ComplexMatrix Rc;
  ComplexMatrix Upsilon;
  Matrix Q;
  Matrix B;
};

Report passivity_check(const FamilyDataRight &data, const Matrix &P, double tol);
Report passivity_check(const FamilyDataLeft &data, const Matrix &P, double tol);

// KYP test for a state-space realization: P > 0, A^T P + P A <= 0, P B = C^T.
Report passivity_check(const LtiSystem &sys, const Matrix &P, double tol);
Report passivity_check(const PortHamiltonianSystem &sys, const Matrix &P, double tol);

// Port-Hamiltonian realization of the family member at gain
// G = P^{-1} Pi* Q B, for any symmetric positive definite P satisfying the
// passivity inequality. With P = Pi* Q Pi this is the structure-preserving
// reduction up to state similarity.
PortHamiltonianSystem ph_from_certificate(const Matrix &S, const Matrix &L, const Matrix &Pi,
                                          const Matrix &Q, const Matrix &B, const Matrix &P);

}  // namespace phmm
