// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "phmm/moments.hpp"

namespace phmm
{

// Which matching-condition set a certificate witnesses.
enum class CertKind
{
  finite_right,     // C_red P = C Pi  and  F P + G L = P S
  finite_left,      // Qc P = P F + Rc H  and  P G = Upsilon B
  markov_pi,        // C Pi S = H P S  and  F P S + G L = P
  markov_pi_bar,    // C PiBar = H P  and  F P S + G L S = P
  markov_pi_tilde,  // C PiTilde = H P  and  F P S2 + G Lrow = P
  markov_left,      // Qc P F + Rc H = P E  and  Qc P G = drive
  markov_left_hat,  // Qc P F + Rc H = P E  and  Qc (Qc P + Rc H) G = drive
};

std::string_view cert_kind_name(CertKind kind);

struct MatchCertificate
{
  ComplexMatrix P;
  CertKind kind;
};

// Family Sigma_G of Theorem-2.2 type: members (S - G L, G, C Pi) share the
// moments at sigma(S) for every admissible gain G.
struct ReducedFamilyRight
{
  GeneratorRight gen;
  ComplexMatrix Cr;  // C Pi, the fixed output row block
  MomentData data;

  // Member at gain G; rejects gains with sigma(S - G L) meeting sigma(S).
  ComplexLtiSystem member(const ComplexMatrix &G) const;
  MatchCertificate member_certificate() const;  // P = I for every member
};

// Family Sigma_H: members (Qc - Rc H, Upsilon B, H).
struct ReducedFamilyLeft
{
  GeneratorLeft gen;
  ComplexMatrix Br;  // Upsilon B, the fixed input column block
  MomentData data;

  ComplexLtiSystem member(const ComplexMatrix &H) const;
  MatchCertificate member_certificate() const;
};

ReducedFamilyRight family_right(const LtiSystem &sys, const GeneratorRight &gen);
ReducedFamilyRight family_right(const PortHamiltonianSystem &sys, const GeneratorRight &gen);
ReducedFamilyLeft family_left(const LtiSystem &sys, const GeneratorLeft &gen);
ReducedFamilyLeft family_left(const PortHamiltonianSystem &sys, const GeneratorLeft &gen);

// The gain singling out the structure-preserving member:
// G = (Pi* Q Pi)^{-1} Pi* Q B (right), H = B* Upsilon* (Upsilon Q^{-1} Upsilon*)^{-1} (left).
ComplexMatrix ph_gain(const PortHamiltonianSystem &sys, const GeneratorRight &gen);
ComplexMatrix ph_gain(const PortHamiltonianSystem &sys, const GeneratorLeft &gen);

// A reduced port-Hamiltonian model bundled with the data that justifies it.
struct PhReduction
{
  PortHamiltonianSystem model;
  MatchCertificate cert;
  MomentData data;
};

// Structure-preserving reduction at finite interpolation points:
// Jr = Pi* Q J Q Pi, Rr = Pi* Q R Q Pi, Qr = (Pi* Q Pi)^{-1}, Br = Pi* Q B
// on the right; the congruence by Upsilon with the Q^{-1} Gram on the left.
PhReduction reduce_ph_finite(const PortHamiltonianSystem &sys, const GeneratorRight &gen);
PhReduction reduce_ph_finite(const PortHamiltonianSystem &sys, const GeneratorLeft &gen);

// Markov-parameter (tau* = 0) and general K(1/tau) matching with structure
// preservation. Right variants use the Pi / PiBar / PiTilde congruences; the
// upsilon variant follows the UpsilonHat construction of the worked ladder
// example, with the port column normalized so the leading parameter matches.
PhReduction reduce_ph_markov(const PortHamiltonianSystem &sys, const GeneratorRight &gen,
                             MomentKind variant);
PhReduction reduce_ph_markov(const PortHamiltonianSystem &sys, const GeneratorLeft &gen,
                             MomentKind variant);

struct DescriptorReduction
{
  DescriptorModel model;
  MatchCertificate cert;
  MomentData data;
};

// The four descriptor families E = Qc - Rc H, F = I with
// G in {-Upsilon B, -Qc Upsilon B, -(Qc UpsHat + Rc C) B, -Qc (Qc UpsHat + Rc C) B}
// and the corresponding derivative flags. H is the free parameter.
DescriptorReduction reduce_descriptor_markov(const LtiSystem &sys, const GeneratorLeft &gen,
                                             int variant, const Matrix &H_free);

// The companion-form family with E = I, H = e1^T whose last state row and
// trailing input entry are free; matches the first nu Markov parameters.
DescriptorReduction markov_companion_model(const LtiSystem &sys, Index nu,
                                           const Vector &last_row, double g_free);

// Krylov interpolation basis V = [(s_i I - A)^{-1} B l_i ...] with the
// pairwise (Re, Im) realifier for conjugate columns.
struct KrylovBasis
{
  ComplexMatrix V;
  ComplexMatrix M;  // realifier, V M real
  Matrix Vhat;      // V M
};

KrylovBasis krylov_basis(const LtiSystem &sys, const std::vector<Complex> &points,
                         const std::vector<ComplexVector> &tangents);
KrylovBasis krylov_basis(const PortHamiltonianSystem &sys, const std::vector<Complex> &points,
                         const std::vector<ComplexVector> &tangents);

// V = [B, A B, ..., A^{nu-1} B] for single-input systems.
KrylovBasis markov_krylov_basis(const LtiSystem &sys, Index nu);
KrylovBasis markov_krylov_basis(const PortHamiltonianSystem &sys, Index nu);

// Tangential-interpolation reduction through the projector pair
// What = Q Vhat (Vhat* Q Vhat)^{-1}: Jr = What* J What, Rr = What* R What,
// Qr = (Vhat* Q Vhat)^{-1}, Br = What* B.
PhReduction reduce_ph_krylov(const PortHamiltonianSystem &sys,
                             const std::vector<Complex> &points,
                             const std::vector<ComplexVector> &tangents);

// Mirror images -lambda_i of the nu poles with largest residue magnitude;
// conjugate pairs stay together. Falls back to smallest |Re| ordering for
// defective state matrices (reported through the warning flag).
struct MirrorPoints
{
  std::vector<Complex> points;
  bool defective_fallback = false;
};

MirrorPoints mirror_points(const LtiSystem &sys, Index nu);
MirrorPoints mirror_points(const PortHamiltonianSystem &sys, Index nu);

// Least-squares change of basis T with X ~ Y T; equivalence holds when the
// residual is small relative to X and T is invertible.
struct BasisEquivalence
{
  ComplexMatrix T;
  double residual = 0.0;
  bool equivalent = false;
};

BasisEquivalence basis_equivalence(const ComplexMatrix &X, const ComplexMatrix &Y);

}  // namespace phmm
