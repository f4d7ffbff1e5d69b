// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <variant>

#include "phmm/moments.hpp"
#include "phmm/reduction.hpp"
#include "phmm/simulation.hpp"
#include "phmm/verification.hpp"

namespace phmm::io
{

// A named, typed system document. Matrices are arrays of rows; scalars are
// numbers or [re, im] pairs; generator matrices accept the
// {"jordan": {"eig": [re, im], "size": k}} shorthand.
struct SystemDocument
{
  std::string name;
  std::variant<PortHamiltonianSystem, LtiSystem, ComplexLtiSystem, DescriptorModel,
               GeneratorRight, GeneratorLeft>
      value;
};

SystemDocument parse_document(const std::string &text);
SystemDocument read_document(const std::string &path);

// Canonical serialization: fixed key order, 17 significant digits, '\n'
// line endings. parse(write(x)) reproduces x; write is idempotent on its
// own output.
std::string write_document(const SystemDocument &doc);

// Atomic file write (temp + rename).
void write_file(const std::string &path, const std::string &content);
std::string read_file(const std::string &path);

// Bare matrix files (array of rows), used for gains and tangents.
ComplexMatrix parse_matrix(const std::string &text);
ComplexMatrix read_matrix(const std::string &path);
std::string write_matrix(const ComplexMatrix &M);

std::string write_moments(const MomentVector &moments);

std::string write_report(const Report &report);

// Certificate files carry the witness P, its kind, the generator, and the
// moment variant needed to rebuild the matching data.
struct CertificateDocument
{
  MatchCertificate cert;
  MomentKind variant;
  std::variant<GeneratorRight, GeneratorLeft> generator;
};

std::string write_certificate(const CertificateDocument &doc);
CertificateDocument parse_certificate(const std::string &text);
CertificateDocument read_certificate(const std::string &path);

// CSV trajectory export: t, x1..xn, y1..yp, pred1..predp.
std::string trajectory_csv(const SimResult &result);

// CSV Bode data: omega, then |K| in dB and phase in degrees per channel.
template <typename Sys>
std::string bode_csv(const Sys &sys, double wmin, double wmax, Index count);

std::string format_double(double value);

}  // namespace phmm::io
