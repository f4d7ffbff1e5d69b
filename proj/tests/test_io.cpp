// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "oracles.hpp"
#include "phmm/io.hpp"

using namespace phmm;

TEST_CASE("document round-trip: ladder fixture")
{
  const PortHamiltonianSystem ladder = ladder_system({1, 1, 1}, {1, 1}, {1, 1});
  io::SystemDocument doc;
  doc.name = "ladder";
  doc.value = ladder;
  const std::string text = io::write_document(doc);

  const io::SystemDocument parsed = io::parse_document(text);
  REQUIRE(std::holds_alternative<PortHamiltonianSystem>(parsed.value));
  const auto &sys = std::get<PortHamiltonianSystem>(parsed.value);
  CHECK((sys.J - ladder.J).norm() == 0.0);
  CHECK((sys.R - ladder.R).norm() == 0.0);
  CHECK((sys.Q - ladder.Q).norm() == 0.0);
  CHECK((sys.B - ladder.B).norm() == 0.0);
  CHECK(sys.r_psd == ladder.r_psd);
  CHECK(sys.q_pd == ladder.q_pd);

  // Canonical form is a fixed point of write(parse(.)).
  CHECK(io::write_document(parsed) == text);
}

TEST_CASE("document round-trip: random systems and generators")
{
  std::mt19937 rng(127);
  for (int trial = 0; trial < 5; ++trial)
  {
    io::SystemDocument doc;
    doc.name = "sys" + std::to_string(trial);
    if (trial % 2 == 0)
    {
      doc.value = testing::random_ph(rng, 4);
    }
    else
    {
      doc.value = testing::random_stable_lti(rng, 4, 2, 2);
    }
    const std::string text = io::write_document(doc);
    const io::SystemDocument parsed = io::parse_document(text);
    CHECK(io::write_document(parsed) == text);
  }
}

TEST_CASE("parse rejects invalid documents")
{
  CHECK_THROWS_WITH_AS(io::parse_document("not json"), doctest::Contains("SchemaError"), Error);
  CHECK_THROWS_WITH_AS(io::parse_document(R"({"kind": "warp", "matrices": {}})"),
                       doctest::Contains("SchemaError"), Error);
  CHECK_THROWS_WITH_AS(
      io::parse_document(R"({"kind": "ph", "matrices": {"J": [[0]], "R": [[1]]}})"),
      doctest::Contains("SchemaError"), Error);
  // Invariants are part of parsing: an unobservable pair is rejected.
  CHECK_THROWS_WITH_AS(io::parse_document(R"({"kind": "generator_right",
    "matrices": {"S": [[0, 1], [0, 0]], "L": [[0, 0]]}})"),
                       doctest::Contains("observable"), Error);
}

TEST_CASE("complex entries and the jordan shorthand")
{
  const io::SystemDocument doc = io::parse_document(R"({
    "kind": "generator_right",
    "matrices": {"S": [[[0.0, 1.0], 0], [0, [0.0, -1.0]]], "L": [[1, 1]]}
  })");
  const auto &gen = std::get<GeneratorRight>(doc.value);
  CHECK(gen.S(0, 0) == Complex(0.0, 1.0));
  CHECK(gen.S(1, 1) == Complex(0.0, -1.0));

  const io::SystemDocument jordan_doc = io::parse_document(R"({
    "kind": "generator_right",
    "matrices": {"S": {"jordan": {"eig": [0.5, 0.0], "size": 3}}, "L": [[1, 0, 0]]}
  })");
  const auto &jordan_gen = std::get<GeneratorRight>(jordan_doc.value);
  CHECK(jordan_gen.S(0, 1) == Complex(1.0, 0.0));
  CHECK(jordan_gen.S(2, 2) == Complex(0.5, 0.0));

  // The left-generator shorthand transposes the block so that e1 drives it.
  const io::SystemDocument left_doc = io::parse_document(R"({
    "kind": "generator_left",
    "matrices": {"Q": {"jordan": {"eig": [0.0, 0.0], "size": 2}}, "R": [[1], [0]]}
  })");
  const auto &left_gen = std::get<GeneratorLeft>(left_doc.value);
  CHECK(left_gen.Qc(1, 0) == Complex(1.0, 0.0));
  CHECK(left_gen.Qc(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("matrix files, moments, reports, certificates")
{
  const ComplexMatrix M = io::parse_matrix("[[1, 2.5], [[0.0, 1.0], -3]]");
  CHECK(M(0, 1) == Complex(2.5, 0.0));
  CHECK(M(1, 0) == Complex(0.0, 1.0));
  const ComplexMatrix back = io::parse_matrix(io::write_matrix(M));
  CHECK((back - M).norm() == 0.0);

  const PortHamiltonianSystem sys = ladder_system({1, 1, 1}, {1, 0.5}, {1, 1});
  ComplexMatrix L = ComplexMatrix::Zero(1, 2);
  L(0, 0) = 1.0;
  const GeneratorRight gen =
      make_generator_right(linalg::jordan_block(Complex(0.0, 0.0), 2), L);
  const MomentData data = moments_finite(sys, gen);
  const std::string moments_json = io::write_moments(data.moments);
  CHECK(moments_json.find("\"finite\"") != std::string::npos);
  CHECK(moments_json.find("3") != std::string::npos);

  Report report;
  report.add("alpha", 1e-12, 1e-8);
  report.add("beta", 1.0, 1e-8, "expected large");
  const std::string report_json = io::write_report(report);
  CHECK(report_json.find("\"all_pass\": false") != std::string::npos);

  const PhReduction reduction = reduce_ph_finite(sys, gen);
  io::CertificateDocument cert{reduction.cert, reduction.data.moments.kind, gen};
  const std::string cert_json = io::write_certificate(cert);
  const io::CertificateDocument parsed = io::parse_certificate(cert_json);
  CHECK(parsed.cert.kind == reduction.cert.kind);
  CHECK(parsed.variant == MomentKind::finite);
  CHECK((parsed.cert.P - reduction.cert.P).norm() == 0.0);
  REQUIRE(std::holds_alternative<GeneratorRight>(parsed.generator));
  CHECK((std::get<GeneratorRight>(parsed.generator).S - gen.S).norm() == 0.0);
}

TEST_CASE("trajectory and bode CSV layout")
{
  SimResult result;
  result.t = Vector::LinSpaced(3, 0.0, 1.0);
  result.x = Matrix::Zero(2, 3);
  result.y = Matrix::Ones(1, 3);
  result.y_pred = Matrix::Ones(1, 3);
  const std::string csv = io::trajectory_csv(result);
  CHECK(csv.rfind("t,x1,x2,y1,pred1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  const PortHamiltonianSystem sys = ladder_system({1, 1, 1}, {1, 1}, {1, 1});
  const std::string bode = io::bode_csv(sys, 0.1, 10.0, 5);
  CHECK(bode.rfind("omega,mag_db_1_1,phase_deg_1_1\n", 0) == 0);
  CHECK(std::count(bode.begin(), bode.end(), '\n') == 6);
  // |K(0.1 i)| in dB at the first sample.
  const double mag = 20.0 * std::log10(std::abs(transfer_eval(sys, Complex(0.0, 0.1))(0, 0)));
  CHECK(bode.find(io::format_double(mag)) != std::string::npos);
}

TEST_CASE("atomic file write and read-back")
{
  const std::string path = "phmm_io_test.json";
  io::write_file(path, "{\"a\": 1}\n");
  CHECK(io::read_file(path) == "{\"a\": 1}\n");
  std::remove(path.c_str());
}
