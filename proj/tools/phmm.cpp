// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phmm/io.hpp"

namespace
{

using namespace phmm;

[[noreturn]] void die(const std::string &code, const std::string &message)
{
  std::cerr << "{\"error\": \"" << code << "\", \"message\": \"" << message << "\"}\n";
  std::exit(1);
}

Complex parse_point(const std::string &token)
{
  // "a" or "a+bi" / "a-bi".
  size_t split = std::string::npos;
  for (size_t k = 1; k < token.size(); ++k)
  {
    if ((token[k] == '+' || token[k] == '-') && token[k - 1] != 'e' && token[k - 1] != 'E')
    {
      split = k;
    }
  }
  if (!token.empty() && (token.back() == 'i' || token.back() == 'j'))
  {
    require(split != std::string::npos, Errc::invalid_argument,
            "complex point must look like a+bi");
    const double re = std::stod(token.substr(0, split));
    const double im = std::stod(token.substr(split, token.size() - split - 1));
    return Complex(re, im);
  }
  return Complex(std::stod(token), 0.0);
}

std::vector<Complex> parse_points(const std::vector<std::string> &tokens)
{
  std::vector<Complex> points;
  points.reserve(tokens.size());
  for (const std::string &token : tokens)
  {
    points.push_back(parse_point(token));
  }
  return points;
}

template <typename T>
T expect(const io::SystemDocument &doc, const char *what)
{
  require(std::holds_alternative<T>(doc.value), Errc::schema_error,
          std::string("document '") + doc.name + "' is not a " + what);
  return std::get<T>(doc.value);
}

LtiSystem as_lti(const io::SystemDocument &doc)
{
  if (std::holds_alternative<PortHamiltonianSystem>(doc.value))
  {
    return ph_to_lti(std::get<PortHamiltonianSystem>(doc.value));
  }
  return expect<LtiSystem>(doc, "state-space system");
}

MomentKind parse_variant(const std::string &name)
{
  for (MomentKind kind : {MomentKind::finite, MomentKind::markov_pi, MomentKind::markov_pi_bar,
                          MomentKind::markov_pi_tilde, MomentKind::markov_upsilon,
                          MomentKind::markov_upsilon_hat})
  {
    if (moment_kind_name(kind) == name)
    {
      return kind;
    }
  }
  fail(Errc::invalid_argument, "unknown moment variant '" + name + "'");
}

std::vector<ComplexVector> tangents_for(const std::optional<std::string> &path, Index m,
                                        size_t count)
{
  std::vector<ComplexVector> tangents;
  if (path)
  {
    const ComplexMatrix T = io::read_matrix(*path);  // one tangent per column
    require(static_cast<size_t>(T.cols()) == count, Errc::dimension_error,
            "tangent file must carry one column per interpolation point");
    for (Index j = 0; j < T.cols(); ++j)
    {
      tangents.push_back(T.col(j));
    }
  }
  else
  {
    require(m == 1, Errc::invalid_argument, "--tangents is required for multi-input systems");
    tangents.assign(count, ComplexVector::Ones(1));
  }
  return tangents;
}

struct MomentsArgs
{
  std::string system;
  std::string generator;
  std::string side = "right";
  std::string variant = "finite";
};

int run_moments(const MomentsArgs &args)
{
  const io::SystemDocument sys_doc = io::read_document(args.system);
  const io::SystemDocument gen_doc = io::read_document(args.generator);
  const LtiSystem sys = as_lti(sys_doc);
  const MomentKind variant = parse_variant(args.variant);

  MomentData data;
  if (args.side == "right")
  {
    const auto gen = expect<GeneratorRight>(gen_doc, "right generator");
    data = (variant == MomentKind::finite) ? moments_finite(sys, gen)
                                           : moments_markov(sys, gen, variant);
  }
  else if (args.side == "left")
  {
    const auto gen = expect<GeneratorLeft>(gen_doc, "left generator");
    data = (variant == MomentKind::finite) ? moments_finite(sys, gen)
                                           : moments_markov(sys, gen, variant);
  }
  else
  {
    fail(Errc::invalid_argument, "--side must be right or left");
  }
  std::cout << io::write_moments(data.moments);
  return 0;
}

struct ReduceArgs
{
  std::string system;
  std::optional<std::string> generator;
  std::string method;
  std::string variant;
  std::optional<std::string> gain;
  std::vector<std::string> points;
  std::optional<std::string> tangents;
  int descriptor_variant = 1;
  std::string out;
};

int run_reduce(const ReduceArgs &args)
{
  const io::SystemDocument sys_doc = io::read_document(args.system);

  io::SystemDocument out_doc;
  out_doc.name = sys_doc.name + "_reduced";
  std::optional<io::CertificateDocument> cert_doc;

  if (args.method == "ph-finite" || args.method == "ph-markov" || args.method == "sigma-g" ||
      args.method == "sigma-h")
  {
    require(args.generator.has_value(), Errc::invalid_argument,
            "--generator is required for this method");
    const io::SystemDocument gen_doc = io::read_document(*args.generator);
    const bool right = std::holds_alternative<GeneratorRight>(gen_doc.value);
    const bool left = std::holds_alternative<GeneratorLeft>(gen_doc.value);
    require(right || left, Errc::schema_error, "--generator must be a generator document");

    if (args.method == "sigma-g" || args.method == "sigma-h")
    {
      const LtiSystem sys = as_lti(sys_doc);
      ComplexMatrix gain;
      if (args.gain)
      {
        gain = io::read_matrix(*args.gain);
      }
      else
      {
        const auto ph = expect<PortHamiltonianSystem>(sys_doc, "port-Hamiltonian system");
        gain = right ? ph_gain(ph, std::get<GeneratorRight>(gen_doc.value))
                     : ph_gain(ph, std::get<GeneratorLeft>(gen_doc.value));
      }
      if (args.method == "sigma-g")
      {
        require(right, Errc::invalid_argument, "sigma-g needs a right generator");
        const auto gen = std::get<GeneratorRight>(gen_doc.value);
        const ReducedFamilyRight family = family_right(sys, gen);
        out_doc.value = family.member(gain);
        cert_doc = io::CertificateDocument{family.member_certificate(), MomentKind::finite, gen};
      }
      else
      {
        require(left, Errc::invalid_argument, "sigma-h needs a left generator");
        const auto gen = std::get<GeneratorLeft>(gen_doc.value);
        const ReducedFamilyLeft family = family_left(sys, gen);
        out_doc.value = family.member(gain);
        cert_doc = io::CertificateDocument{family.member_certificate(), MomentKind::finite, gen};
      }
    }
    else
    {
      const auto ph = expect<PortHamiltonianSystem>(sys_doc, "port-Hamiltonian system");
      PhReduction reduction;
      if (args.method == "ph-finite")
      {
        reduction = right ? reduce_ph_finite(ph, std::get<GeneratorRight>(gen_doc.value))
                          : reduce_ph_finite(ph, std::get<GeneratorLeft>(gen_doc.value));
      }
      else
      {
        const MomentKind variant =
            parse_variant(args.variant.empty() ? (right ? "markov_pi" : "markov_upsilon_hat")
                                               : args.variant);
        reduction = right ? reduce_ph_markov(ph, std::get<GeneratorRight>(gen_doc.value), variant)
                          : reduce_ph_markov(ph, std::get<GeneratorLeft>(gen_doc.value), variant);
      }
      out_doc.value = reduction.model;
      if (right)
      {
        cert_doc = io::CertificateDocument{reduction.cert, reduction.data.moments.kind,
                                           std::get<GeneratorRight>(gen_doc.value)};
      }
      else
      {
        cert_doc = io::CertificateDocument{reduction.cert, reduction.data.moments.kind,
                                           std::get<GeneratorLeft>(gen_doc.value)};
      }
    }
  }
  else if (args.method == "descriptor")
  {
    require(args.generator.has_value(), Errc::invalid_argument,
            "--generator is required for descriptor reduction");
    const io::SystemDocument gen_doc = io::read_document(*args.generator);
    const auto gen = expect<GeneratorLeft>(gen_doc, "left generator");
    const LtiSystem sys = as_lti(sys_doc);
    Matrix H = Matrix::Zero(sys.outputs(), gen.order());
    if (args.gain)
    {
      H = linalg::realify(io::read_matrix(*args.gain));
    }
    const DescriptorReduction reduction =
        reduce_descriptor_markov(sys, gen, args.descriptor_variant, H);
    out_doc.value = reduction.model;
    cert_doc = io::CertificateDocument{reduction.cert, reduction.data.moments.kind, gen};
  }
  else if (args.method == "ph-krylov")
  {
    const auto ph = expect<PortHamiltonianSystem>(sys_doc, "port-Hamiltonian system");
    require(!args.points.empty(), Errc::invalid_argument, "--points is required for ph-krylov");
    const std::vector<Complex> points = parse_points(args.points);
    const auto tangents = tangents_for(args.tangents, ph.ports(), points.size());
    const PhReduction reduction = reduce_ph_krylov(ph, points, tangents);
    out_doc.value = reduction.model;
    cert_doc = io::CertificateDocument{reduction.cert, MomentKind::finite,
                                       generator_from_points(points, tangents)};
  }
  else
  {
    fail(Errc::invalid_argument, "unknown method '" + args.method + "'");
  }

  io::write_file(args.out, io::write_document(out_doc));
  if (cert_doc)
  {
    io::write_file(args.out + ".cert.json", io::write_certificate(*cert_doc));
  }
  return 0;
}

struct VerifyArgs
{
  std::string original;
  std::string reduced;
  std::string mode;
  std::vector<std::string> points;
  std::optional<std::string> tangents;
  std::string side = "right";
  Index count = 3;
  std::optional<std::string> certificate;
  std::optional<std::string> storage;
};

template <typename Red>
Report verify_finite_dispatch(const io::SystemDocument &orig_doc, const Red &red,
                              const std::vector<Complex> &points,
                              const std::vector<ComplexVector> &tangents, Side side, double tol)
{
  const LtiSystem orig = as_lti(orig_doc);
  return verify_finite_match(orig, red, points, tangents, side, tol);
}

int run_verify(const VerifyArgs &args)
{
  const double tol = default_tol();
  const io::SystemDocument orig_doc = io::read_document(args.original);
  const io::SystemDocument red_doc = io::read_document(args.reduced);
  Report report;

  auto with_reduced = [&](auto &&fn) {
    if (std::holds_alternative<PortHamiltonianSystem>(red_doc.value))
    {
      fn(ph_to_lti(std::get<PortHamiltonianSystem>(red_doc.value)));
    }
    else if (std::holds_alternative<LtiSystem>(red_doc.value))
    {
      fn(std::get<LtiSystem>(red_doc.value));
    }
    else if (std::holds_alternative<ComplexLtiSystem>(red_doc.value))
    {
      fn(std::get<ComplexLtiSystem>(red_doc.value));
    }
    else if (std::holds_alternative<DescriptorModel>(red_doc.value))
    {
      fn(std::get<DescriptorModel>(red_doc.value));
    }
    else
    {
      fail(Errc::schema_error, "--reduced must be a system document");
    }
  };

  if (args.mode == "finite")
  {
    require(!args.points.empty(), Errc::invalid_argument, "--points required for finite mode");
    const std::vector<Complex> points = parse_points(args.points);
    const LtiSystem orig = as_lti(orig_doc);
    const auto tangents =
        tangents_for(args.tangents, args.side == "right" ? orig.inputs() : orig.outputs(),
                     points.size());
    const Side side = args.side == "left" ? Side::left : Side::right;
    with_reduced([&](const auto &red) {
      report = verify_finite_match(orig, red, points, tangents, side, tol);
    });
  }
  else if (args.mode == "markov")
  {
    const LtiSystem orig = as_lti(orig_doc);
    with_reduced([&](const auto &red) {
      if constexpr (std::is_same_v<std::decay_t<decltype(red)>, ComplexLtiSystem>)
      {
        fail(Errc::invalid_argument, "markov mode expects a real reduced model");
      }
      else
      {
        report = verify_markov_match(orig, red, args.count, tol);
      }
    });
  }
  else if (args.mode == "certificate")
  {
    require(args.certificate.has_value(), Errc::invalid_argument,
            "--certificate required for certificate mode");
    const io::CertificateDocument cert = io::read_certificate(*args.certificate);
    const LtiSystem orig = as_lti(orig_doc);
    Realization red;
    with_reduced([&](const auto &model) { red = realization_of(model); });
    if (std::holds_alternative<GeneratorRight>(cert.generator))
    {
      const auto &gen = std::get<GeneratorRight>(cert.generator);
      const MomentData data = cert.variant == MomentKind::finite
                                  ? moments_finite(orig, gen)
                                  : moments_markov(orig, gen, cert.variant);
      report = verify_certificate(red, gen, data.moments, cert.cert, tol);
    }
    else
    {
      const auto &gen = std::get<GeneratorLeft>(cert.generator);
      const MomentData data = cert.variant == MomentKind::finite
                                  ? moments_finite(orig, gen)
                                  : moments_markov(orig, gen, cert.variant);
      report = verify_certificate(red, gen, data.moments, cert.cert, tol);
    }
  }
  else if (args.mode == "passivity")
  {
    // The reduced (or original) system is checked through the KYP test.
    Matrix P;
    if (args.storage)
    {
      P = linalg::realify(io::read_matrix(*args.storage));
    }
    else
    {
      require(std::holds_alternative<PortHamiltonianSystem>(red_doc.value),
              Errc::invalid_argument,
              "--storage is required unless the reduced system is port-Hamiltonian");
      P = std::get<PortHamiltonianSystem>(red_doc.value).Q;
    }
    if (std::holds_alternative<PortHamiltonianSystem>(red_doc.value))
    {
      report = passivity_check(std::get<PortHamiltonianSystem>(red_doc.value), P, tol);
    }
    else
    {
      report = passivity_check(expect<LtiSystem>(red_doc, "state-space system"), P, tol);
    }
  }
  else
  {
    fail(Errc::invalid_argument, "unknown verify mode '" + args.mode + "'");
  }

  std::cout << io::write_report(report);
  return report.all_pass() ? 0 : 1;
}

struct SimulateArgs
{
  std::string system;
  std::string generator;
  std::string side = "right";
  std::string variant = "finite";
  std::string input = "impulse";
  std::vector<double> w0;
  double horizon = 10.0;
  double dt = 1.0e-3;
  std::string out;
};

int run_simulate(const SimulateArgs &args)
{
  const io::SystemDocument sys_doc = io::read_document(args.system);
  const io::SystemDocument gen_doc = io::read_document(args.generator);
  SimResult result;
  if (args.side == "right")
  {
    const auto gen = expect<GeneratorRight>(gen_doc, "right generator");
    Vector w0 = Vector::Zero(gen.order());
    if (!args.w0.empty())
    {
      require(static_cast<Index>(args.w0.size()) == gen.order(), Errc::dimension_error,
              "--w0 must have nu entries");
      for (Index i = 0; i < gen.order(); ++i)
      {
        w0(i) = args.w0[static_cast<size_t>(i)];
      }
    }
    else
    {
      w0(gen.order() - 1) = 1.0;
    }
    if (std::holds_alternative<DescriptorModel>(sys_doc.value))
    {
      result = simulate_right(std::get<DescriptorModel>(sys_doc.value), gen, w0, args.horizon,
                              args.dt);
    }
    else
    {
      result = simulate_right(as_lti(sys_doc), gen, w0, args.horizon, args.dt);
    }
  }
  else
  {
    const auto gen = expect<GeneratorLeft>(gen_doc, "left generator");
    const InputKind input = args.input == "step" ? InputKind::step : InputKind::impulse;
    const LeftSimPath path =
        args.variant == "markov" ? LeftSimPath::markov : LeftSimPath::finite;
    result = simulate_left(as_lti(sys_doc), gen, input, path, args.horizon, args.dt);
  }
  io::write_file(args.out, io::trajectory_csv(result));
  std::cout << "{\"tail_residual\": " << io::format_double(result.tail_residual)
            << ", \"transient_bound_ok\": " << (result.transient_bound_ok ? "true" : "false")
            << "}\n";
  return 0;
}

struct BodeArgs
{
  std::string system;
  double wmin = 1.0e-2;
  double wmax = 1.0e2;
  Index points = 200;
  std::string out;
};

int run_bode(const BodeArgs &args)
{
  const io::SystemDocument sys_doc = io::read_document(args.system);
  std::string csv;
  if (std::holds_alternative<PortHamiltonianSystem>(sys_doc.value))
  {
    csv = io::bode_csv(std::get<PortHamiltonianSystem>(sys_doc.value), args.wmin, args.wmax,
                       args.points);
  }
  else if (std::holds_alternative<LtiSystem>(sys_doc.value))
  {
    csv = io::bode_csv(std::get<LtiSystem>(sys_doc.value), args.wmin, args.wmax, args.points);
  }
  else if (std::holds_alternative<ComplexLtiSystem>(sys_doc.value))
  {
    csv = io::bode_csv(std::get<ComplexLtiSystem>(sys_doc.value), args.wmin, args.wmax,
                       args.points);
  }
  else if (std::holds_alternative<DescriptorModel>(sys_doc.value))
  {
    csv =
        io::bode_csv(std::get<DescriptorModel>(sys_doc.value), args.wmin, args.wmax, args.points);
  }
  else
  {
    fail(Errc::schema_error, "bode: --system must be a system document");
  }
  io::write_file(args.out, csv);
  return 0;
}

struct ExampleArgs
{
  std::string which;
  std::vector<double> params;
  std::vector<double> q;
  double delta = kSmibDefaultDelta;
  std::string out;
};

int run_example(const ExampleArgs &args)
{
  io::SystemDocument doc;
  if (args.which == "ladder")
  {
    std::array<double, 3> r{1.0, 1.0, 1.0};
    std::array<double, 2> c{1.0, 1.0};
    std::array<double, 2> l{1.0, 1.0};
    if (!args.params.empty())
    {
      require(args.params.size() == 7, Errc::invalid_argument,
              "--params expects r1,r2,r3,c1,c2,l1,l2");
      r = {args.params[0], args.params[1], args.params[2]};
      c = {args.params[3], args.params[4]};
      l = {args.params[5], args.params[6]};
    }
    PortHamiltonianSystem sys = ladder_system(r, c, l);
    if (!args.q.empty())
    {
      require(args.q.size() == 4, Errc::invalid_argument, "--q expects four diagonal entries");
      Vector qdiag(4);
      for (Index i = 0; i < 4; ++i)
      {
        qdiag(i) = args.q[static_cast<size_t>(i)];
      }
      sys = make_ph(sys.J, sys.R, Matrix(qdiag.asDiagonal()), sys.B, sys.r_psd, sys.q_pd);
    }
    doc.name = "ladder";
    doc.value = sys;
  }
  else if (args.which == "smib")
  {
    doc.name = "smib";
    doc.value = smib_system(args.delta);
  }
  else
  {
    fail(Errc::invalid_argument, "unknown example '" + args.which + "'");
  }
  io::write_file(args.out, io::write_document(doc));
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Time-domain moment matching for port-Hamiltonian systems"};
  app.require_subcommand(1);

  MomentsArgs moments_args;
  CLI::App *moments_cmd = app.add_subcommand("moments", "Compute a moment vector");
  moments_cmd->add_option("--system", moments_args.system)->required();
  moments_cmd->add_option("--generator", moments_args.generator)->required();
  moments_cmd->add_option("--side", moments_args.side);
  moments_cmd->add_option("--variant", moments_args.variant);

  ReduceArgs reduce_args;
  CLI::App *reduce_cmd = app.add_subcommand("reduce", "Build a reduced-order model");
  reduce_cmd->add_option("--system", reduce_args.system)->required();
  reduce_cmd->add_option("--generator", reduce_args.generator);
  reduce_cmd->add_option("--method", reduce_args.method)->required();
  reduce_cmd->add_option("--variant", reduce_args.variant);
  reduce_cmd->add_option("--gain", reduce_args.gain);
  reduce_cmd->add_option("--points", reduce_args.points)->delimiter(',');
  reduce_cmd->add_option("--tangents", reduce_args.tangents);
  reduce_cmd->add_option("--descriptor-variant", reduce_args.descriptor_variant);
  reduce_cmd->add_option("--out", reduce_args.out)->required();

  VerifyArgs verify_args;
  CLI::App *verify_cmd = app.add_subcommand("verify", "Check a matching or passivity claim");
  verify_cmd->add_option("--original", verify_args.original)->required();
  verify_cmd->add_option("--reduced", verify_args.reduced)->required();
  verify_cmd->add_option("--mode", verify_args.mode)->required();
  verify_cmd->add_option("--points", verify_args.points)->delimiter(',');
  verify_cmd->add_option("--tangents", verify_args.tangents);
  verify_cmd->add_option("--side", verify_args.side);
  verify_cmd->add_option("--count", verify_args.count);
  verify_cmd->add_option("--certificate", verify_args.certificate);
  verify_cmd->add_option("--storage", verify_args.storage);

  SimulateArgs sim_args;
  CLI::App *sim_cmd = app.add_subcommand("simulate", "Integrate a signal-generator interconnection");
  sim_cmd->add_option("--system", sim_args.system)->required();
  sim_cmd->add_option("--generator", sim_args.generator)->required();
  sim_cmd->add_option("--side", sim_args.side);
  sim_cmd->add_option("--variant", sim_args.variant);
  sim_cmd->add_option("--input", sim_args.input);
  sim_cmd->add_option("--w0", sim_args.w0)->delimiter(',');
  sim_cmd->add_option("--horizon", sim_args.horizon);
  sim_cmd->add_option("--dt", sim_args.dt);
  sim_cmd->add_option("--out", sim_args.out)->required();

  BodeArgs bode_args;
  CLI::App *bode_cmd = app.add_subcommand("bode", "Frequency-response CSV");
  bode_cmd->add_option("--system", bode_args.system)->required();
  bode_cmd->add_option("--wmin", bode_args.wmin);
  bode_cmd->add_option("--wmax", bode_args.wmax);
  bode_cmd->add_option("--points", bode_args.points);
  bode_cmd->add_option("--out", bode_args.out)->required();

  ExampleArgs example_args;
  CLI::App *example_cmd = app.add_subcommand("example", "Write a shipped example system");
  example_cmd->add_option("which", example_args.which)->required();
  example_cmd->add_option("--params", example_args.params)->delimiter(',');
  example_cmd->add_option("--q", example_args.q)->delimiter(',');
  example_cmd->add_option("--delta", example_args.delta);
  example_cmd->add_option("--out", example_args.out)->required();

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*moments_cmd)
    {
      return run_moments(moments_args);
    }
    if (*reduce_cmd)
    {
      return run_reduce(reduce_args);
    }
    if (*verify_cmd)
    {
      return run_verify(verify_args);
    }
    if (*sim_cmd)
    {
      return run_simulate(sim_args);
    }
    if (*bode_cmd)
    {
      return run_bode(bode_args);
    }
    if (*example_cmd)
    {
      return run_example(example_args);
    }
  }
  catch (const Error &err)
  {
    die(std::string(errc_name(err.code())), err.what());
  }
  catch (const std::exception &err)
  {
    die("internal", err.what());
  }
  return 1;
}
