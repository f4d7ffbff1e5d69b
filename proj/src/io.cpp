// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace phmm::io
{

namespace
{

using nlohmann::json;

std::string fmt(double value)
{
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string fmt_entry(Complex value)
{
  if (value.imag() == 0.0)
  {
    return fmt(value.real());
  }
  return "[" + fmt(value.real()) + ", " + fmt(value.imag()) + "]";
}

std::string fmt_matrix(const ComplexMatrix &M, const std::string &indent)
{
  std::string out = "[";
  for (Index i = 0; i < M.rows(); ++i)
  {
    out += (i == 0 ? "" : ",") + std::string("\n") + indent + "  [";
    for (Index j = 0; j < M.cols(); ++j)
    {
      out += (j == 0 ? "" : ", ") + fmt_entry(M(i, j));
    }
    out += "]";
  }
  out += "\n" + indent + "]";
  return out;
}

Complex parse_entry(const json &node)
{
  if (node.is_number())
  {
    return Complex(node.get<double>(), 0.0);
  }
  if (node.is_array() && node.size() == 2 && node[0].is_number() && node[1].is_number())
  {
    return Complex(node[0].get<double>(), node[1].get<double>());
  }
  fail(Errc::schema_error, "matrix entry must be a number or an [re, im] pair");
}

ComplexMatrix parse_matrix_node(const json &node, bool lower_jordan)
{
  if (node.is_object() && node.contains("jordan"))
  {
    const json &spec = node.at("jordan");
    require(spec.contains("eig") && spec.contains("size"), Errc::schema_error,
            "jordan shorthand needs 'eig' and 'size'");
    const Complex eig = parse_entry(spec.at("eig"));
    const Index size = spec.at("size").get<Index>();
    const ComplexMatrix block = linalg::jordan_block(eig, size);
    return lower_jordan ? ComplexMatrix(block.transpose()) : block;
  }
  require(node.is_array() && !node.empty(), Errc::schema_error,
          "matrix must be a non-empty array of rows");
  const Index rows = static_cast<Index>(node.size());
  Index cols = -1;
  ComplexMatrix M;
  for (Index i = 0; i < rows; ++i)
  {
    const json &row = node[static_cast<size_t>(i)];
    require(row.is_array(), Errc::schema_error, "matrix rows must be arrays");
    if (cols < 0)
    {
      cols = static_cast<Index>(row.size());
      M.resize(rows, cols);
    }
    require(static_cast<Index>(row.size()) == cols, Errc::dimension_error,
            "matrix rows must have equal length");
    for (Index j = 0; j < cols; ++j)
    {
      M(i, j) = parse_entry(row[static_cast<size_t>(j)]);
    }
  }
  return M;
}

ComplexMatrix need_matrix(const json &doc, const char *key, bool lower_jordan = false)
{
  const json &matrices = doc.at("matrices");
  require(matrices.contains(key), Errc::schema_error,
          std::string("missing matrix '") + key + "'");
  return parse_matrix_node(matrices.at(key), lower_jordan);
}

Matrix need_real_matrix(const json &doc, const char *key)
{
  const ComplexMatrix M = need_matrix(doc, key);
  require(linalg::is_real(M), Errc::schema_error,
          std::string("matrix '") + key + "' must be real");
  return M.real();
}

bool flag_of(const json &doc, const char *key)
{
  if (doc.contains("flags") && doc.at("flags").contains(key))
  {
    return doc.at("flags").at(key).get<bool>();
  }
  return false;
}

std::string quote(const std::string &s)
{
  std::string out = "\"";
  for (char c : s)
  {
    if (c == '"' || c == '\\')
    {
      out += '\\';
    }
    out += c;
  }
  return out + "\"";
}

struct NamedMatrix
{
  const char *key;
  ComplexMatrix value;
};

std::string emit_document(const std::string &kind, const std::string &name,
                          const std::vector<NamedMatrix> &matrices,
                          const std::vector<std::pair<const char *, bool>> &flags)
{
  std::string out = "{\n";
  out += "  \"kind\": " + quote(kind) + ",\n";
  out += "  \"name\": " + quote(name) + ",\n";
  out += "  \"matrices\": {\n";
  for (size_t i = 0; i < matrices.size(); ++i)
  {
    out += "    " + quote(matrices[i].key) + ": " + fmt_matrix(matrices[i].value, "    ");
    out += (i + 1 < matrices.size()) ? ",\n" : "\n";
  }
  out += "  }";
  if (!flags.empty())
  {
    out += ",\n  \"flags\": {";
    for (size_t i = 0; i < flags.size(); ++i)
    {
      out += (i == 0 ? "" : ", ") + quote(flags[i].first) + ": " +
             (flags[i].second ? "true" : "false");
    }
    out += "}";
  }
  out += "\n}\n";
  return out;
}

}  // namespace

std::string format_double(double value)
{
  return fmt(value);
}

SystemDocument parse_document(const std::string &text)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::exception &err)
  {
    fail(Errc::schema_error, std::string("invalid JSON: ") + err.what());
  }
  require(doc.is_object() && doc.contains("kind"), Errc::schema_error,
          "document must be an object with a 'kind'");
  require(doc.contains("matrices") && doc.at("matrices").is_object(), Errc::schema_error,
          "document must carry a 'matrices' object");

  SystemDocument result;
  result.name = doc.value("name", std::string{});
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "ph")
  {
    result.value = make_ph(need_real_matrix(doc, "J"), need_real_matrix(doc, "R"),
                           need_real_matrix(doc, "Q"), need_real_matrix(doc, "B"),
                           flag_of(doc, "r_psd"), flag_of(doc, "q_pd"),
                           flag_of(doc, "symmetrize"));
  }
  else if (kind == "lti")
  {
    const ComplexMatrix A = need_matrix(doc, "A");
    const ComplexMatrix B = need_matrix(doc, "B");
    const ComplexMatrix C = need_matrix(doc, "C");
    require(A.rows() == A.cols() && B.rows() == A.rows() && C.cols() == A.rows(),
            Errc::dimension_error, "lti: inconsistent dimensions");
    if (linalg::is_real(A) && linalg::is_real(B) && linalg::is_real(C))
    {
      result.value = LtiSystem{A.real(), B.real(), C.real()};
    }
    else
    {
      result.value = ComplexLtiSystem{A, B, C};
    }
  }
  else if (kind == "descriptor")
  {
    result.value = make_descriptor(need_real_matrix(doc, "E"), need_real_matrix(doc, "F"),
                                   need_real_matrix(doc, "G"), need_real_matrix(doc, "H"),
                                   flag_of(doc, "input_derivative"),
                                   flag_of(doc, "output_derivative"));
  }
  else if (kind == "generator_right")
  {
    result.value = make_generator_right(need_matrix(doc, "S"), need_matrix(doc, "L"));
  }
  else if (kind == "generator_left")
  {
    result.value = make_generator_left(need_matrix(doc, "Q", /*lower_jordan=*/true),
                                       need_matrix(doc, "R"));
  }
  else
  {
    fail(Errc::schema_error, "unknown kind '" + kind + "'");
  }
  return result;
}

SystemDocument read_document(const std::string &path)
{
  return parse_document(read_file(path));
}

std::string write_document(const SystemDocument &doc)
{
  struct Visitor
  {
    const std::string &name;

    std::string operator()(const PortHamiltonianSystem &sys) const
    {
      return emit_document("ph", name,
                           {{"B", sys.B.cast<Complex>()},
                            {"J", sys.J.cast<Complex>()},
                            {"Q", sys.Q.cast<Complex>()},
                            {"R", sys.R.cast<Complex>()}},
                           {{"q_pd", sys.q_pd}, {"r_psd", sys.r_psd}});
    }
    std::string operator()(const LtiSystem &sys) const
    {
      return emit_document("lti", name,
                           {{"A", sys.A.cast<Complex>()},
                            {"B", sys.B.cast<Complex>()},
                            {"C", sys.C.cast<Complex>()}},
                           {});
    }
    std::string operator()(const ComplexLtiSystem &sys) const
    {
      return emit_document("lti", name, {{"A", sys.A}, {"B", sys.B}, {"C", sys.C}}, {});
    }
    std::string operator()(const DescriptorModel &sys) const
    {
      return emit_document("descriptor", name,
                           {{"E", sys.E.cast<Complex>()},
                            {"F", sys.F.cast<Complex>()},
                            {"G", sys.G.cast<Complex>()},
                            {"H", sys.H.cast<Complex>()}},
                           {{"input_derivative", sys.input_derivative},
                            {"output_derivative", sys.output_derivative}});
    }
    std::string operator()(const GeneratorRight &gen) const
    {
      return emit_document("generator_right", name, {{"L", gen.L}, {"S", gen.S}}, {});
    }
    std::string operator()(const GeneratorLeft &gen) const
    {
      return emit_document("generator_left", name, {{"Q", gen.Qc}, {"R", gen.Rc}}, {});
    }
  };
  return std::visit(Visitor{doc.name}, doc.value);
}

void write_file(const std::string &path, const std::string &content)
{
  const std::string temp = path + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    require(out.good(), Errc::io_error, "cannot open " + temp + " for writing");
    out << content;
    require(out.good(), Errc::io_error, "write to " + temp + " failed");
  }
  require(std::rename(temp.c_str(), path.c_str()) == 0, Errc::io_error,
          "cannot rename " + temp + " to " + path);
}

std::string read_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io_error, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ComplexMatrix parse_matrix(const std::string &text)
{
  json node;
  try
  {
    node = json::parse(text);
  }
  catch (const json::exception &err)
  {
    fail(Errc::schema_error, std::string("invalid JSON: ") + err.what());
  }
  return parse_matrix_node(node, /*lower_jordan=*/false);
}

ComplexMatrix read_matrix(const std::string &path)
{
  return parse_matrix(read_file(path));
}

std::string write_matrix(const ComplexMatrix &M)
{
  return fmt_matrix(M, "") + "\n";
}

std::string write_moments(const MomentVector &moments)
{
  std::string out = "{\n";
  out += "  \"kind\": " + quote(std::string(moment_kind_name(moments.kind))) + ",\n";
  out += "  \"side\": " + quote(moments.side == Side::right ? "right" : "left") + ",\n";
  out += "  \"points\": [";
  for (Index i = 0; i < moments.points.size(); ++i)
  {
    out += (i == 0 ? "" : ", ") + std::string("[") + fmt(moments.points(i).real()) + ", " +
           fmt(moments.points(i).imag()) + "]";
  }
  out += "],\n  \"values\": [";
  for (size_t k = 0; k < moments.values.size(); ++k)
  {
    out += (k == 0 ? "" : ",") + std::string("\n    ") +
           fmt_matrix(moments.values[k], "    ");
  }
  out += "\n  ]\n}\n";
  return out;
}

std::string write_report(const Report &report)
{
  std::string out = "{\n  \"checks\": [";
  for (size_t i = 0; i < report.checks.size(); ++i)
  {
    const CheckResult &check = report.checks[i];
    out += (i == 0 ? "" : ",");
    out += "\n    {\"name\": " + quote(check.name) + ", \"residual\": " + fmt(check.residual) +
           ", \"tolerance\": " + fmt(check.tolerance) +
           ", \"pass\": " + (check.pass ? "true" : "false");
    if (!check.note.empty())
    {
      out += ", \"note\": " + quote(check.note);
    }
    out += "}";
  }
  out += "\n  ],\n  \"all_pass\": " + std::string(report.all_pass() ? "true" : "false") +
         "\n}\n";
  return out;
}

std::string write_certificate(const CertificateDocument &doc)
{
  std::string out = "{\n";
  out += "  \"kind\": " + quote(std::string(cert_kind_name(doc.cert.kind))) + ",\n";
  out += "  \"variant\": " + quote(std::string(moment_kind_name(doc.variant))) + ",\n";
  out += "  \"P\": " + fmt_matrix(doc.cert.P, "  ") + ",\n";
  SystemDocument gen_doc;
  gen_doc.name = "generator";
  if (std::holds_alternative<GeneratorRight>(doc.generator))
  {
    gen_doc.value = std::get<GeneratorRight>(doc.generator);
  }
  else
  {
    gen_doc.value = std::get<GeneratorLeft>(doc.generator);
  }
  std::string gen_text = write_document(gen_doc);
  if (!gen_text.empty() && gen_text.back() == '\n')
  {
    gen_text.pop_back();
  }
  out += "  \"generator\": " + gen_text + "\n}\n";
  return out;
}

CertificateDocument parse_certificate(const std::string &text)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::exception &err)
  {
    fail(Errc::schema_error, std::string("invalid JSON: ") + err.what());
  }
  require(doc.contains("kind") && doc.contains("P") && doc.contains("generator") &&
              doc.contains("variant"),
          Errc::schema_error, "certificate needs 'kind', 'variant', 'P' and 'generator'");

  CertificateDocument result;
  const std::string kind = doc.at("kind").get<std::string>();
  bool found = false;
  for (CertKind candidate :
       {CertKind::finite_right, CertKind::finite_left, CertKind::markov_pi,
        CertKind::markov_pi_bar, CertKind::markov_pi_tilde, CertKind::markov_left,
        CertKind::markov_left_hat})
  {
    if (cert_kind_name(candidate) == kind)
    {
      result.cert.kind = candidate;
      found = true;
    }
  }
  require(found, Errc::schema_error, "unknown certificate kind '" + kind + "'");

  const std::string variant = doc.at("variant").get<std::string>();
  found = false;
  for (MomentKind candidate :
       {MomentKind::finite, MomentKind::markov_pi, MomentKind::markov_pi_bar,
        MomentKind::markov_pi_tilde, MomentKind::markov_upsilon,
        MomentKind::markov_upsilon_hat})
  {
    if (moment_kind_name(candidate) == variant)
    {
      result.variant = candidate;
      found = true;
    }
  }
  require(found, Errc::schema_error, "unknown moment variant '" + variant + "'");

  result.cert.P = parse_matrix_node(doc.at("P"), false);
  const SystemDocument gen_doc = parse_document(doc.at("generator").dump());
  if (std::holds_alternative<GeneratorRight>(gen_doc.value))
  {
    result.generator = std::get<GeneratorRight>(gen_doc.value);
  }
  else if (std::holds_alternative<GeneratorLeft>(gen_doc.value))
  {
    result.generator = std::get<GeneratorLeft>(gen_doc.value);
  }
  else
  {
    fail(Errc::schema_error, "certificate generator must be a generator document");
  }
  return result;
}

CertificateDocument read_certificate(const std::string &path)
{
  return parse_certificate(read_file(path));
}

std::string trajectory_csv(const SimResult &result)
{
  std::string out = "t";
  for (Index i = 0; i < result.x.rows(); ++i)
  {
    out += ",x" + std::to_string(i + 1);
  }
  for (Index i = 0; i < result.y.rows(); ++i)
  {
    out += ",y" + std::to_string(i + 1);
  }
  for (Index i = 0; i < result.y_pred.rows(); ++i)
  {
    out += ",pred" + std::to_string(i + 1);
  }
  out += "\n";
  for (Index k = 0; k < result.t.size(); ++k)
  {
    out += fmt(result.t(k));
    for (Index i = 0; i < result.x.rows(); ++i)
    {
      out += "," + fmt(result.x(i, k));
    }
    for (Index i = 0; i < result.y.rows(); ++i)
    {
      out += "," + fmt(result.y(i, k));
    }
    for (Index i = 0; i < result.y_pred.rows(); ++i)
    {
      out += "," + fmt(result.y_pred(i, k));
    }
    out += "\n";
  }
  return out;
}

template <typename Sys>
std::string bode_csv(const Sys &sys, double wmin, double wmax, Index count)
{
  require(wmin > 0.0 && wmax > wmin && count >= 2, Errc::invalid_argument,
          "bode: need 0 < wmin < wmax and at least two points");
  const ComplexMatrix probe = transfer_eval(sys, Complex(0.0, wmin));
  std::string out = "omega";
  for (Index i = 0; i < probe.rows(); ++i)
  {
    for (Index j = 0; j < probe.cols(); ++j)
    {
      const std::string channel = std::to_string(i + 1) + "_" + std::to_string(j + 1);
      out += ",mag_db_" + channel + ",phase_deg_" + channel;
    }
  }
  out += "\n";
  const double ratio = std::log(wmax / wmin) / static_cast<double>(count - 1);
  for (Index k = 0; k < count; ++k)
  {
    const double omega = wmin * std::exp(ratio * static_cast<double>(k));
    const ComplexMatrix K = transfer_eval(sys, Complex(0.0, omega));
    out += fmt(omega);
    for (Index i = 0; i < K.rows(); ++i)
    {
      for (Index j = 0; j < K.cols(); ++j)
      {
        out += "," + fmt(20.0 * std::log10(std::abs(K(i, j))));
        out += "," + fmt(std::arg(K(i, j)) * 180.0 / M_PI);
      }
    }
    out += "\n";
  }
  return out;
}

template std::string bode_csv(const LtiSystem &, double, double, Index);
template std::string bode_csv(const ComplexLtiSystem &, double, double, Index);
template std::string bode_csv(const PortHamiltonianSystem &, double, double, Index);
template std::string bode_csv(const DescriptorModel &, double, double, Index);

}  // namespace phmm::io
