// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmm/verification.hpp"

#include <cmath>
#include <cstdlib>
#include <map>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace phmm
{

namespace
{

bool invertible(const ComplexMatrix &P)
{
  if (P.rows() != P.cols() || P.rows() == 0)
  {
    return P.rows() == P.cols();
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(P);
  const double floor = static_cast<double>(P.rows()) *
                       std::max(P.cwiseAbs().maxCoeff(), 1e-300) * 1.1e-16;
  return lu.matrixLU().diagonal().cwiseAbs().minCoeff() > floor;
}

double sym_defect(const Matrix &P)
{
  return P.size() ? (P - P.transpose()).cwiseAbs().maxCoeff() : 0.0;
}

double min_eigenvalue(const Matrix &M)
{
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()));
  return M.size() ? es.eigenvalues().minCoeff() : 0.0;
}

double max_eigenvalue(const Matrix &M)
{
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()));
  return M.size() ? es.eigenvalues().maxCoeff() : 0.0;
}

// eta_k(s) via the derivative oracle for any of the system flavors.
template <typename Sys>
std::vector<ComplexMatrix> taylor_data(const Sys &sys, Complex s0, Index count);

template <>
std::vector<ComplexMatrix> taylor_data(const LtiSystem &sys, Complex s0, Index count)
{
  return moment_derivative_oracle(sys, s0, count);
}

template <>
std::vector<ComplexMatrix> taylor_data(const ComplexLtiSystem &sys, Complex s0, Index count)
{
  return moment_derivative_oracle(sys, s0, count);
}

template <>
std::vector<ComplexMatrix> taylor_data(const PortHamiltonianSystem &sys, Complex s0,
                                       Index count)
{
  return moment_derivative_oracle(ph_to_lti(sys), s0, count);
}

template <>
std::vector<ComplexMatrix> taylor_data(const DescriptorModel &sys, Complex s0, Index count)
{
  // Derivatives of the descriptor transfer through its state-space
  // equivalent; the flags multiply by s, handled by the product rule on
  // s * K0(s): d^k(sK0)/k! = s * K0^(k)/k! + K0^(k-1)/(k-1)!.
  LtiSystem state_space;
  try
  {
    state_space.A = linalg::solve_linear(sys.E, sys.F);
    state_space.B = linalg::solve_linear(sys.E, sys.G);
  }
  catch (const Error &err)
  {
    if (err.code() == Errc::singular_matrix)
    {
      fail(Errc::singular_e, "verify: descriptor E is singular");
    }
    throw;
  }
  state_space.C = sys.H;
  const int shift = (sys.input_derivative ? 1 : 0) + (sys.output_derivative ? 1 : 0);
  std::vector<ComplexMatrix> base = moment_derivative_oracle(state_space, s0, count);
  for (int round = 0; round < shift; ++round)
  {
    std::vector<ComplexMatrix> lifted(base.size());
    for (size_t k = 0; k < base.size(); ++k)
    {
      // The oracle stores signed Taylor terms t_k = (-1)^k K^(k)/k!;
      // for sK: t_k(sK) = s t_k(K) - t_{k-1}(K).
      lifted[k] = s0 * base[k];
      if (k > 0)
      {
        lifted[k] -= base[k - 1];
      }
    }
    base = std::move(lifted);
  }
  return base;
}

struct PointGroup
{
  Complex point;
  std::vector<ComplexVector> tangents;
};

std::vector<PointGroup> group_points(const std::vector<Complex> &points,
                                     const std::vector<ComplexVector> &tangents)
{
  std::vector<PointGroup> groups;
  for (size_t i = 0; i < points.size(); ++i)
  {
    if (!groups.empty() && groups.back().point == points[i])
    {
      groups.back().tangents.push_back(tangents[i]);
    }
    else
    {
      groups.push_back(PointGroup{points[i], {tangents[i]}});
    }
  }
  return groups;
}

std::string complex_label(Complex s)
{
  std::string label = std::to_string(s.real());
  if (s.imag() != 0.0)
  {
    label += (s.imag() > 0 ? "+" : "") + std::to_string(s.imag()) + "i";
  }
  return label;
}

}  // namespace

double default_tol()
{
  if (const char *env = std::getenv("PHMM_TOL"))
  {
    char *end = nullptr;
    const double value = std::strtod(env, &end);
    require(end != env && value > 0.0, Errc::invalid_argument,
            "PHMM_TOL must be a positive number");
    return value;
  }
  return 1.0e-8;
}

bool Report::all_pass() const
{
  for (const CheckResult &check : checks)
  {
    if (!check.pass)
    {
      return false;
    }
  }
  return true;
}

void Report::add(const std::string &name, double residual, double tolerance,
                 const std::string &note)
{
  checks.push_back(CheckResult{name, residual, tolerance, residual <= tolerance, note});
}

Realization realization_of(const ComplexLtiSystem &sys)
{
  const Index n = sys.states();
  return Realization{ComplexMatrix::Identity(n, n), sys.A, sys.B, sys.C, false, false};
}

Realization realization_of(const LtiSystem &sys)
{
  const Index n = sys.states();
  return Realization{ComplexMatrix::Identity(n, n), sys.A.cast<Complex>(),
                     sys.B.cast<Complex>(), sys.C.cast<Complex>(), false, false};
}

Realization realization_of(const PortHamiltonianSystem &sys)
{
  return realization_of(ph_to_lti(sys));
}

Realization realization_of(const DescriptorModel &sys)
{
  return Realization{sys.E.cast<Complex>(), sys.F.cast<Complex>(), sys.G.cast<Complex>(),
                     sys.H.cast<Complex>(), sys.input_derivative, sys.output_derivative};
}

template <typename OrigSys, typename RedSys>
Report verify_finite_match(const OrigSys &orig, const RedSys &red,
                           const std::vector<Complex> &points,
                           const std::vector<ComplexVector> &tangents, Side side, double tol)
{
  require(points.size() == tangents.size(), Errc::dimension_error,
          "verify_finite_match: one tangent per point required");
  Report report;
  for (const PointGroup &group : group_points(points, tangents))
  {
    const Index orders = static_cast<Index>(group.tangents.size());
    const auto orig_taylor = taylor_data(orig, group.point, orders);
    const auto red_taylor = taylor_data(red, group.point, orders);
    for (Index k = 0; k < orders; ++k)
    {
      const ComplexMatrix diff =
          orig_taylor[static_cast<size_t>(k)] - red_taylor[static_cast<size_t>(k)];
      const ComplexVector &l = group.tangents[static_cast<size_t>(k)];
      double residual = 0.0;
      if (side == Side::right)
      {
        residual = (diff * l).norm();
      }
      else
      {
        residual = (l.transpose() * diff).norm();
      }
      std::string name = "finite_match s=" + complex_label(group.point);
      if (orders > 1)
      {
        name += " order " + std::to_string(k);
      }
      report.add(name, residual, tol);
    }
  }
  return report;
}

template <typename OrigSys, typename RedSys>
Report verify_markov_match(const OrigSys &orig, const RedSys &red, Index count, double tol)
{
  const auto eta_orig = markov_parameters(orig, count);
  const auto eta_red = markov_parameters(red, count);
  Report report;
  for (Index k = 0; k < count; ++k)
  {
    const double residual =
        (eta_orig[static_cast<size_t>(k)] - eta_red[static_cast<size_t>(k)])
            .cwiseAbs()
            .maxCoeff();
    report.add("markov eta_" + std::to_string(k), residual, tol);
  }
  return report;
}

namespace
{

void add_invertibility(Report &report, const ComplexMatrix &P)
{
  report.add("certificate P invertible", invertible(P) ? 0.0 : 1.0, 0.5);
}

double scaled(double tol, std::initializer_list<double> norms)
{
  double scale = 1.0;
  for (double v : norms)
  {
    scale = std::max(scale, v);
  }
  return tol * scale;
}

}  // namespace

Report verify_certificate(const Realization &red, const GeneratorRight &gen,
                          const MomentVector &moments, const MatchCertificate &cert,
                          double tol)
{
  require(moments.side == Side::right, Errc::kind_mismatch,
          "verify_certificate: right-side certificate needs right-side moments");
  const ComplexMatrix &P = cert.P;
  const ComplexMatrix data = moments.stacked();
  Report report;
  switch (cert.kind)
  {
    case CertKind::finite_right:
    {
      require(moments.kind == MomentKind::finite, Errc::kind_mismatch,
              "verify_certificate: finite_right certificate needs finite moments");
      const ComplexMatrix sylv = red.F * P + red.G * gen.L - P * gen.S;
      const ComplexMatrix match = red.H * P - data;
      report.add("F P + G L = P S", sylv.norm(),
                 scaled(tol, {P.norm(), red.F.norm(), gen.S.norm()}));
      report.add("C_red P = C Pi", match.norm(), scaled(tol, {data.norm()}));
      break;
    }
    case CertKind::markov_pi:
    {
      require(moments.kind == MomentKind::markov_pi, Errc::kind_mismatch,
              "verify_certificate: markov_pi certificate needs markov_pi moments");
      const ComplexMatrix sylv = red.F * P * gen.S + red.G * gen.L - P;
      const ComplexMatrix match = red.H * P * gen.S - data;
      report.add("F P S + G L = P", sylv.norm(),
                 scaled(tol, {P.norm(), red.F.norm(), gen.S.norm()}));
      report.add("H P S = C Pi S", match.norm(), scaled(tol, {data.norm()}));
      break;
    }
    case CertKind::markov_pi_bar:
    {
      require(moments.kind == MomentKind::markov_pi_bar, Errc::kind_mismatch,
              "verify_certificate: markov_pi_bar certificate needs markov_pi_bar moments");
      const ComplexMatrix sylv = red.F * P * gen.S + red.G * gen.L * gen.S - P;
      const ComplexMatrix match = red.H * P - data;
      report.add("F P S + G L S = P", sylv.norm(),
                 scaled(tol, {P.norm(), red.F.norm(), gen.S.norm()}));
      report.add("H P = C PiBar", match.norm(), scaled(tol, {data.norm()}));
      break;
    }
    case CertKind::markov_pi_tilde:
    {
      require(moments.kind == MomentKind::markov_pi_tilde, Errc::kind_mismatch,
              "verify_certificate: markov_pi_tilde certificate needs markov_pi_tilde moments");
      const TildeSplit split = tilde_split(gen);
      const ComplexMatrix sylv = red.F * P * split.S2 + red.G * split.Lrow - P;
      const ComplexMatrix match = red.H * P - data;
      report.add("F P S2 + G (l1 S1 + L2 S2) = P", sylv.norm(),
                 scaled(tol, {P.norm(), red.F.norm(), split.S2.norm()}));
      report.add("H P = C PiTilde", match.norm(), scaled(tol, {data.norm()}));
      break;
    }
    default:
      fail(Errc::kind_mismatch,
           "verify_certificate: certificate kind does not take a right generator");
  }
  add_invertibility(report, P);
  return report;
}

Report verify_certificate(const Realization &red, const GeneratorLeft &gen,
                          const MomentVector &moments, const MatchCertificate &cert,
                          double tol)
{
  require(moments.side == Side::left, Errc::kind_mismatch,
          "verify_certificate: left-side certificate needs left-side moments");
  const ComplexMatrix &P = cert.P;
  ComplexMatrix drive = moments.stacked();
  // A derivative flag advances the matching data by one multiplication
  // with the generator matrix.
  if (red.input_derivative || red.output_derivative)
  {
    drive = gen.Qc * drive;
  }
  Report report;
  switch (cert.kind)
  {
    case CertKind::finite_left:
    {
      require(moments.kind == MomentKind::finite, Errc::kind_mismatch,
              "verify_certificate: finite_left certificate needs finite moments");
      const ComplexMatrix sylv = gen.Qc * P - P * red.F - gen.Rc * red.H;
      const ComplexMatrix match = P * red.G - drive;
      report.add("Qc P = P F + Rc H", sylv.norm(),
                 scaled(tol, {P.norm(), red.F.norm(), gen.Qc.norm()}));
      report.add("P G = Upsilon B", match.norm(), scaled(tol, {drive.norm()}));
      break;
    }
    case CertKind::markov_left:
    {
      require(moments.kind == MomentKind::markov_upsilon ||
                  moments.kind == MomentKind::markov_upsilon_hat,
              Errc::kind_mismatch,
              "verify_certificate: markov_left certificate needs left Markov moments");
      const ComplexMatrix sylv = gen.Qc * P * red.F + gen.Rc * red.H - P * red.E;
      const ComplexMatrix match = gen.Qc * P * red.G - drive;
      report.add("Qc P F + Rc H = P E", sylv.norm(),
                 scaled(tol, {P.norm(), red.F.norm(), red.E.norm(), gen.Qc.norm()}));
      report.add("Qc P G = moment drive", match.norm(), scaled(tol, {drive.norm()}));
      break;
    }
    case CertKind::markov_left_hat:
    {
      require(moments.kind == MomentKind::markov_upsilon_hat, Errc::kind_mismatch,
              "verify_certificate: markov_left_hat certificate needs UpsilonHat moments");
      const ComplexMatrix sylv = gen.Qc * P * red.F + gen.Rc * red.H - P * red.E;
      const ComplexMatrix match = gen.Qc * (gen.Qc * P + gen.Rc * red.H) * red.G - drive;
      report.add("Qc P F + Rc H = P E", sylv.norm(),
                 scaled(tol, {P.norm(), red.F.norm(), red.E.norm(), gen.Qc.norm()}));
      report.add("Qc (Qc P + Rc H) G = moment drive", match.norm(),
                 scaled(tol, {drive.norm()}));
      break;
    }
    default:
      fail(Errc::kind_mismatch,
           "verify_certificate: certificate kind does not take a left generator");
  }
  add_invertibility(report, P);
  return report;
}

Report passivity_check(const FamilyDataRight &data, const Matrix &P, double tol)
{
  Report report;
  const double scale = 1.0 + P.cwiseAbs().maxCoeff();
  report.add("P symmetric", sym_defect(P), kEpsStruct * scale);
  report.add("P positive definite", std::max(0.0, -min_eigenvalue(P) + 0.0), tol * scale,
             min_eigenvalue(P) > 0 ? "" : "min eigenvalue <= 0");
  // S* P + P S <= Pi* Q B L + L* B* Q Pi, checked on the symmetrized defect.
  const ComplexMatrix Pc = P.cast<Complex>();
  const ComplexMatrix lhs = data.S.adjoint() * Pc + Pc * data.S;
  const ComplexMatrix rhs = data.Pi.adjoint() * data.Q.cast<Complex>() *
                                data.B.cast<Complex>() * data.L +
                            data.L.adjoint() * data.B.transpose().cast<Complex>() *
                                data.Q.cast<Complex>() * data.Pi;
  const ComplexMatrix defect = rhs - lhs;
  require(linalg::is_real(defect), Errc::not_real,
          "passivity_check: inequality defect is not real");
  const double min_eig = min_eigenvalue(defect.real());
  report.add("S* P + P S <= Pi* Q B L + L* B* Q Pi", std::max(0.0, -min_eig),
             tol * (1.0 + rhs.norm()));
  return report;
}

Report passivity_check(const FamilyDataLeft &data, const Matrix &P, double tol)
{
  Report report;
  const double scale = 1.0 + P.cwiseAbs().maxCoeff();
  report.add("P symmetric", sym_defect(P), kEpsStruct * scale);
  report.add("P positive definite", std::max(0.0, -min_eigenvalue(P)), tol * scale,
             min_eigenvalue(P) > 0 ? "" : "min eigenvalue <= 0");
  const ComplexMatrix Pc = P.cast<Complex>();
  const ComplexMatrix lhs = Pc * data.Qc.adjoint() + data.Qc * Pc;
  const ComplexMatrix UB = data.Upsilon * data.B.cast<Complex>();
  const ComplexMatrix rhs = data.Rc * UB.adjoint() - UB * data.Rc.adjoint();
  const ComplexMatrix defect = rhs - lhs;
  require(linalg::is_real(ComplexMatrix(defect + defect.adjoint())), Errc::not_real,
          "passivity_check: inequality defect is not hermitian-compatible");
  const double min_eig = min_eigenvalue(Matrix(0.5 * (defect + defect.adjoint()).real()));
  report.add("P Qc* + Qc P <= Rc B* Ups* - Ups B Rc*", std::max(0.0, -min_eig),
             tol * (1.0 + rhs.norm()), "as-printed inequality (skew right-hand side)");
  return report;
}

Report passivity_check(const LtiSystem &sys, const Matrix &P, double tol)
{
  Report report;
  const double scale = 1.0 + P.cwiseAbs().maxCoeff();
  report.add("P symmetric", sym_defect(P), kEpsStruct * scale);
  report.add("P positive definite", std::max(0.0, -min_eigenvalue(P)), tol * scale);
  const Matrix lyap = sys.A.transpose() * P + P * sys.A;
  report.add("A^T P + P A <= 0", std::max(0.0, max_eigenvalue(lyap)),
             tol * (1.0 + lyap.norm()));
  const Matrix port = P * sys.B - sys.C.transpose();
  report.add("P B = C^T", port.norm(), tol * (1.0 + sys.C.norm()));
  return report;
}

Report passivity_check(const PortHamiltonianSystem &sys, const Matrix &P, double tol)
{
  return passivity_check(ph_to_lti(sys), P, tol);
}

PortHamiltonianSystem ph_from_certificate(const Matrix &S, const Matrix &L, const Matrix &Pi,
                                          const Matrix &Q, const Matrix &B, const Matrix &P)
{
  const Index nu = S.rows();
  require(P.rows() == nu && P.cols() == nu, Errc::dimension_error,
          "ph_from_certificate: P must match the generator order");
  require(sym_defect(P) <= kEpsStruct * (1.0 + P.cwiseAbs().maxCoeff()),
          Errc::certificate_invalid, "ph_from_certificate: P is not symmetric");
  require(min_eigenvalue(P) > 0.0, Errc::certificate_invalid,
          "ph_from_certificate: P is not positive definite");

  FamilyDataRight data{S.cast<Complex>(), L.cast<Complex>(), Pi.cast<Complex>(), Q, B};
  const Report feasibility = passivity_check(data, P, default_tol());
  require(feasibility.all_pass(), Errc::certificate_invalid,
          "ph_from_certificate: P does not satisfy the passivity inequality");

  Matrix Pinv;
  try
  {
    Pinv = linalg::solve_linear(P, Matrix(Matrix::Identity(nu, nu)));
  }
  catch (const Error &err)
  {
    if (err.code() == Errc::singular_matrix)
    {
      fail(Errc::certificate_invalid, "ph_from_certificate: P is singular");
    }
    throw;
  }
  const Matrix G = Pinv * Pi.transpose() * Q * B;
  const Matrix M = (S - G * L) * Pinv;
  return make_ph(Matrix(0.5 * (M - M.transpose())), Matrix(-0.5 * (M + M.transpose())), P, G);
}

// Explicit instantiations for the system flavors crossed in practice.
template Report verify_finite_match(const LtiSystem &, const LtiSystem &,
                                    const std::vector<Complex> &,
                                    const std::vector<ComplexVector> &, Side, double);
template Report verify_finite_match(const LtiSystem &, const ComplexLtiSystem &,
                                    const std::vector<Complex> &,
                                    const std::vector<ComplexVector> &, Side, double);
template Report verify_finite_match(const PortHamiltonianSystem &, const PortHamiltonianSystem &,
                                    const std::vector<Complex> &,
                                    const std::vector<ComplexVector> &, Side, double);
template Report verify_finite_match(const PortHamiltonianSystem &, const ComplexLtiSystem &,
                                    const std::vector<Complex> &,
                                    const std::vector<ComplexVector> &, Side, double);
template Report verify_finite_match(const PortHamiltonianSystem &, const LtiSystem &,
                                    const std::vector<Complex> &,
                                    const std::vector<ComplexVector> &, Side, double);
template Report verify_finite_match(const LtiSystem &, const DescriptorModel &,
                                    const std::vector<Complex> &,
                                    const std::vector<ComplexVector> &, Side, double);
template Report verify_finite_match(const PortHamiltonianSystem &, const DescriptorModel &,
                                    const std::vector<Complex> &,
                                    const std::vector<ComplexVector> &, Side, double);

template Report verify_markov_match(const LtiSystem &, const LtiSystem &, Index, double);
template Report verify_markov_match(const PortHamiltonianSystem &, const PortHamiltonianSystem &,
                                    Index, double);
template Report verify_markov_match(const PortHamiltonianSystem &, const LtiSystem &, Index,
                                    double);
template Report verify_markov_match(const LtiSystem &, const PortHamiltonianSystem &, Index,
                                    double);
template Report verify_markov_match(const LtiSystem &, const DescriptorModel &, Index, double);
template Report verify_markov_match(const PortHamiltonianSystem &, const DescriptorModel &,
                                    Index, double);

}  // namespace phmm
