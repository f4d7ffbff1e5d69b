// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "phmm/systems.hpp"

namespace phmm
{

enum class Side
{
  right,
  left
};

enum class MomentKind
{
  finite,              // C Pi (right) or Upsilon B (left)
  markov_pi,           // C Pi S with A Pi S + B L = Pi
  markov_pi_bar,       // C PiBar with A PiBar S + B L S = PiBar
  markov_pi_tilde,     // C PiTilde, reduced-size splitting S = [[0, S1], [0, S2]]
  markov_upsilon,      // Qc Upsilon B with Upsilon = Qc Upsilon A + Rc C
  markov_upsilon_hat,  // Qc (Qc UpsilonHat + Rc C) B with UpsilonHat = Qc UpsilonHat A + Rc C A
};

std::string_view moment_kind_name(MomentKind kind);

// A solved interpolation matrix together with the equation it solves.
struct SylvesterSolution
{
  ComplexMatrix X;
  linalg::SylvesterForm form;
  Side side;
  double residual = 0.0;  // Frobenius norm of the defining identity's defect
};

// Moments with their provenance. Right-side values are p x 1 columns, left
// side values 1 x m rows; SISO both collapse to scalars.
struct MomentVector
{
  std::vector<ComplexMatrix> values;
  Side side;
  MomentKind kind;
  ComplexVector points;

  // Values as one horizontal (right) or vertical (left) block.
  ComplexMatrix stacked() const;
};

struct MomentData
{
  MomentVector moments;
  SylvesterSolution solution;
};

// Moments at the eigenvalues of the generator, Definition-style: phi = C Pi
// for the right data, phi = Upsilon B for the left data.
MomentData moments_finite(const LtiSystem &sys, const GeneratorRight &gen);
MomentData moments_finite(const LtiSystem &sys, const GeneratorLeft &gen);
MomentData moments_finite(const PortHamiltonianSystem &sys, const GeneratorRight &gen);
MomentData moments_finite(const PortHamiltonianSystem &sys, const GeneratorLeft &gen);

// Moments of K(1/tau) at sigma(S); with a nilpotent generator these are the
// Markov parameters. The variant selects the Sylvester construction.
MomentData moments_markov(const LtiSystem &sys, const GeneratorRight &gen, MomentKind variant);
MomentData moments_markov(const LtiSystem &sys, const GeneratorLeft &gen, MomentKind variant);
MomentData moments_markov(const PortHamiltonianSystem &sys, const GeneratorRight &gen,
                          MomentKind variant);
MomentData moments_markov(const PortHamiltonianSystem &sys, const GeneratorLeft &gen,
                          MomentKind variant);

// Taylor data [K(s0), K'(s0), K''(s0)/2!, ...] via repeated resolvent solves;
// the normalization that matches C Pi for a Jordan-block generator.
template <typename Scalar>
std::vector<ComplexMatrix> moment_derivative_oracle(const LtiSystemT<Scalar> &sys, Complex s0,
                                                    Index count);

// The tilde splitting S = [[0, S1], [0, S2]], L = [l1, L2] of the
// reduced-size Markov construction. Validated accessors used by the moment
// and certificate code.
struct TildeSplit
{
  ComplexMatrix S1;    // 1 x nu
  ComplexMatrix S2;    // nu x nu
  ComplexMatrix l1;    // m x 1
  ComplexMatrix L2;    // m x nu
  ComplexMatrix Lrow;  // l1 S1 + L2 S2, the drive row of the tilde equation
};

TildeSplit tilde_split(const GeneratorRight &gen);

}  // namespace phmm
