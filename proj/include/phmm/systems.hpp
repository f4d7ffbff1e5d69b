// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "phmm/errors.hpp"
#include "phmm/linalg.hpp"
#include "phmm/types.hpp"

namespace phmm
{

// Relative tolerance for structural symmetry checks (skew J, symmetric R, Q).
inline constexpr double kEpsStruct = 1.0e-10;

// x' = (J - R) Q x + B u,  y = B^T Q x,  Hamiltonian 1/2 x^T Q x.
struct PortHamiltonianSystem
{
  Matrix J;  // interconnection, skew-symmetric
  Matrix R;  // dissipation, symmetric
  Matrix Q;  // energy, symmetric invertible
  Matrix B;  // port matrix, n x m

  bool r_psd = false;  // R positive semidefinite (verified when set)
  bool q_pd = false;   // Q positive definite (verified when set)

  Index states() const { return J.rows(); }
  Index ports() const { return B.cols(); }
};

// Validates the structural invariants; with symmetrize = true the skew /
// symmetric parts are projected out first instead of rejected.
PortHamiltonianSystem make_ph(const Matrix &J, const Matrix &R, const Matrix &Q,
                              const Matrix &B, bool r_psd = false, bool q_pd = false,
                              bool symmetrize = false);

template <typename Scalar>
struct LtiSystemT
{
  MatrixX<Scalar> A;
  MatrixX<Scalar> B;
  MatrixX<Scalar> C;

  Index states() const { return A.rows(); }
  Index inputs() const { return B.cols(); }
  Index outputs() const { return C.rows(); }
};

using LtiSystem = LtiSystemT<double>;
using ComplexLtiSystem = LtiSystemT<Complex>;

// A = (J - R) Q, C = B^T Q.
LtiSystem ph_to_lti(const PortHamiltonianSystem &sys);

// E x' = F x + G u, psi = H x. The flags mark the variants that feed the
// input derivative or read the state derivative instead.
struct DescriptorModel
{
  Matrix E;
  Matrix F;
  Matrix G;
  Matrix H;
  bool input_derivative = false;   // drive with u'(t)
  bool output_derivative = false;  // read psi = H x'

  Index states() const { return E.rows(); }
  Index inputs() const { return G.cols(); }
  Index outputs() const { return H.rows(); }
};

// Checks dimensions and pencil regularity (three sample shifts).
DescriptorModel make_descriptor(const Matrix &E, const Matrix &F, const Matrix &G,
                                const Matrix &H, bool input_derivative = false,
                                bool output_derivative = false);

// The descriptor realizations of K(1/tau): A x' = x - B u with y = C x'
// (variant 1) or A x' = x - B u' with y = C x (variant 2).
DescriptorModel descriptor_from_lti(const LtiSystem &sys, int variant);

// Interpolation data (S, L) with (L, S) observable.
struct GeneratorRight
{
  ComplexMatrix S;  // nu x nu
  ComplexMatrix L;  // m x nu

  Index order() const { return S.rows(); }
};

GeneratorRight make_generator_right(const ComplexMatrix &S, const ComplexMatrix &L);

// Dual interpolation data (Qc, Rc) with (Qc, Rc) controllable.
struct GeneratorLeft
{
  ComplexMatrix Qc;  // nu x nu
  ComplexMatrix Rc;  // nu x p

  Index order() const { return Qc.rows(); }
};

GeneratorLeft make_generator_left(const ComplexMatrix &Qc, const ComplexMatrix &Rc);

// Builds (S, L) from interpolation points and tangent directions; repeated
// adjacent points become Jordan chains and must share their tangent.
GeneratorRight generator_from_points(const std::vector<Complex> &points,
                                     const std::vector<ComplexVector> &tangents);

// Transfer matrix K(s) = C (sI - A)^{-1} B; throws Errc::pole_hit at a pole.
template <typename Scalar>
ComplexMatrix transfer_eval(const LtiSystemT<Scalar> &sys, Complex s);

ComplexMatrix transfer_eval(const PortHamiltonianSystem &sys, Complex s);

// H (sE - F)^{-1} G with the derivative flags applied as multiplication by s.
ComplexMatrix transfer_eval(const DescriptorModel &sys, Complex s);

// [eta_0, ..., eta_{k-1}] with eta_0 = 0 and eta_j = C A^{j-1} B.
template <typename Scalar>
std::vector<MatrixX<Scalar>> markov_parameters(const LtiSystemT<Scalar> &sys, Index count);

std::vector<Matrix> markov_parameters(const PortHamiltonianSystem &sys, Index count);

// Markov parameters of the descriptor transfer (E must be invertible); the
// derivative flags shift the sequence by one.
std::vector<Matrix> markov_parameters(const DescriptorModel &sys, Index count);

// Fourth-order RLC ladder: state [q1, phi1, q2, phi2],
// Q = diag(1/C1, 1/L1, 1/C2, 1/L2), R = diag(0, R1, 0, R2 + R3), B = e1.
PortHamiltonianSystem ladder_system(const std::array<double, 3> &resistances,
                                    const std::array<double, 2> &capacitances,
                                    const std::array<double, 2> &inductances);

// Linearized single-machine-infinite-bus model: 7 states, 3 ports, J = 0,
// Q = blockdiag(Lm^{-1}, 1/6); the rotor angle delta enters the third input
// column as (sin delta, cos delta).
PortHamiltonianSystem smib_system(double delta);

inline constexpr double kSmibDefaultDelta = 0.7853981633974483;  // pi/4

}  // namespace phmm
