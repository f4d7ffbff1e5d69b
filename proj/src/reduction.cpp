// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmm/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace phmm
{

namespace
{

using linalg::SylvesterForm;

Matrix sym_part(const Matrix &M)
{
  return 0.5 * (M + M.transpose());
}

Matrix skew_part(const Matrix &M)
{
  return 0.5 * (M - M.transpose());
}

Matrix invert(const Matrix &M, Errc code, const char *what)
{
  try
  {
    return linalg::solve_linear(M, Matrix(Matrix::Identity(M.rows(), M.cols())));
  }
  catch (const Error &err)
  {
    if (err.code() == Errc::singular_matrix)
    {
      fail(code, what);
    }
    throw;
  }
}

void check_spectra_disjoint(const ComplexMatrix &A, const ComplexMatrix &S, const char *what)
{
  const ComplexVector lam = linalg::spectrum(A);
  const ComplexVector mu = linalg::spectrum(S);
  const double scale = 1.0 + std::max(lam.size() ? lam.cwiseAbs().maxCoeff() : 0.0,
                                      mu.size() ? mu.cwiseAbs().maxCoeff() : 0.0);
  for (Index i = 0; i < lam.size(); ++i)
  {
    for (Index j = 0; j < mu.size(); ++j)
    {
      require(std::abs(lam(i) - mu(j)) > 1.0e-10 * scale, Errc::spectrum_clash, what);
    }
  }
}

void check_product_away_from_one(const ComplexMatrix &A, const ComplexMatrix &S,
                                 const char *what)
{
  const ComplexVector lam = linalg::spectrum(A);
  const ComplexVector mu = linalg::spectrum(S);
  const double scale = 1.0 + std::max(lam.size() ? lam.cwiseAbs().maxCoeff() : 0.0,
                                      mu.size() ? mu.cwiseAbs().maxCoeff() : 0.0);
  for (Index i = 0; i < lam.size(); ++i)
  {
    for (Index j = 0; j < mu.size(); ++j)
    {
      require(std::abs(lam(i) * mu(j) - 1.0) > 1.0e-10 * scale, Errc::spectrum_product_clash,
              what);
    }
  }
}

Matrix real_interpolation_matrix(const SylvesterSolution &solution, const char *what)
{
  require(linalg::is_real(solution.X), Errc::not_real,
          std::string(what) +
              ": interpolation matrix is complex; use a real generator realization");
  return solution.X.real();
}

Index basis_rank(const Matrix &V)
{
  Eigen::ColPivHouseholderQR<Matrix> qr(V);
  qr.setThreshold(static_cast<double>(std::max<Index>(V.cols(), 1)) * 1.0e-12);
  return qr.rank();
}

}  // namespace

std::string_view cert_kind_name(CertKind kind)
{
  switch (kind)
  {
    case CertKind::finite_right:
      return "finite_right";
    case CertKind::finite_left:
      return "finite_left";
    case CertKind::markov_pi:
      return "markov_pi";
    case CertKind::markov_pi_bar:
      return "markov_pi_bar";
    case CertKind::markov_pi_tilde:
      return "markov_pi_tilde";
    case CertKind::markov_left:
      return "markov_left";
    case CertKind::markov_left_hat:
      return "markov_left_hat";
  }
  return "unknown";
}

ComplexLtiSystem ReducedFamilyRight::member(const ComplexMatrix &G) const
{
  const Index nu = gen.order();
  require(G.rows() == nu && G.cols() == gen.L.rows(), Errc::dimension_error,
          "family member: gain G must be nu x m");
  ComplexLtiSystem red;
  red.A = gen.S - G * gen.L;
  check_spectra_disjoint(red.A, gen.S,
                         "family member: sigma(S - G L) intersects sigma(S)");
  red.B = G;
  red.C = Cr;
  return red;
}

MatchCertificate ReducedFamilyRight::member_certificate() const
{
  return MatchCertificate{ComplexMatrix::Identity(gen.order(), gen.order()),
                          CertKind::finite_right};
}

ComplexLtiSystem ReducedFamilyLeft::member(const ComplexMatrix &H) const
{
  const Index nu = gen.order();
  require(H.cols() == nu && H.rows() == gen.Rc.cols(), Errc::dimension_error,
          "family member: gain H must be p x nu");
  ComplexLtiSystem red;
  red.A = gen.Qc - gen.Rc * H;
  check_spectra_disjoint(red.A, gen.Qc,
                         "family member: sigma(Qc - Rc H) intersects sigma(Qc)");
  red.B = Br;
  red.C = H;
  return red;
}

MatchCertificate ReducedFamilyLeft::member_certificate() const
{
  return MatchCertificate{ComplexMatrix::Identity(gen.order(), gen.order()),
                          CertKind::finite_left};
}

ReducedFamilyRight family_right(const LtiSystem &sys, const GeneratorRight &gen)
{
  ReducedFamilyRight family;
  family.gen = gen;
  family.data = moments_finite(sys, gen);
  family.Cr = family.data.moments.stacked();
  return family;
}

ReducedFamilyRight family_right(const PortHamiltonianSystem &sys, const GeneratorRight &gen)
{
  return family_right(ph_to_lti(sys), gen);
}

ReducedFamilyLeft family_left(const LtiSystem &sys, const GeneratorLeft &gen)
{
  ReducedFamilyLeft family;
  family.gen = gen;
  family.data = moments_finite(sys, gen);
  family.Br = family.data.moments.stacked();
  return family;
}

ReducedFamilyLeft family_left(const PortHamiltonianSystem &sys, const GeneratorLeft &gen)
{
  return family_left(ph_to_lti(sys), gen);
}

ComplexMatrix ph_gain(const PortHamiltonianSystem &sys, const GeneratorRight &gen)
{
  const MomentData data = moments_finite(sys, gen);
  const Matrix Pi = real_interpolation_matrix(data.solution, "ph_gain");
  const Matrix gram = Pi.transpose() * sys.Q * Pi;
  const Matrix gain = invert(gram, Errc::singular_gram, "ph_gain: Pi^T Q Pi is singular") *
                      (Pi.transpose() * sys.Q * sys.B);
  return gain.cast<Complex>();
}

ComplexMatrix ph_gain(const PortHamiltonianSystem &sys, const GeneratorLeft &gen)
{
  const MomentData data = moments_finite(sys, gen);
  const Matrix Ups = real_interpolation_matrix(data.solution, "ph_gain");
  const Matrix Qinv = invert(sys.Q, Errc::singular_gram, "ph_gain: Q is singular");
  const Matrix gram = Ups * Qinv * Ups.transpose();
  const Matrix gain =
      (sys.B.transpose() * Ups.transpose()) *
      invert(gram, Errc::singular_gram, "ph_gain: Upsilon Q^{-1} Upsilon^T is singular");
  return gain.cast<Complex>();
}

namespace
{

PortHamiltonianSystem congruence_model_right(const PortHamiltonianSystem &sys, const Matrix &Pi,
                                             Matrix *gram_out)
{
  const Matrix QPi = sys.Q * Pi;
  const Matrix gram = Pi.transpose() * QPi;
  const Matrix Qr =
      invert(gram, Errc::singular_gram, "reduce_ph: Pi^T Q Pi is singular");
  PortHamiltonianSystem red = make_ph(skew_part(QPi.transpose() * sys.J * QPi),
                                      sym_part(QPi.transpose() * sys.R * QPi), sym_part(Qr),
                                      Matrix(QPi.transpose() * sys.B), sys.r_psd, sys.q_pd);
  if (gram_out != nullptr)
  {
    *gram_out = gram;
  }
  return red;
}

}  // namespace

PhReduction reduce_ph_finite(const PortHamiltonianSystem &sys, const GeneratorRight &gen)
{
  PhReduction result;
  result.data = moments_finite(sys, gen);
  const Matrix Pi = real_interpolation_matrix(result.data.solution, "reduce_ph_finite");
  Matrix gram;
  result.model = congruence_model_right(sys, Pi, &gram);
  check_spectra_disjoint(((result.model.J - result.model.R) * result.model.Q).cast<Complex>(),
                         gen.S,
                         "reduce_ph_finite: reduced spectrum meets the interpolation points");
  result.cert = MatchCertificate{gram.cast<Complex>(), CertKind::finite_right};
  return result;
}

PhReduction reduce_ph_finite(const PortHamiltonianSystem &sys, const GeneratorLeft &gen)
{
  PhReduction result;
  result.data = moments_finite(sys, gen);
  const Matrix Ups = real_interpolation_matrix(result.data.solution, "reduce_ph_finite");
  const Matrix Qinv = invert(sys.Q, Errc::singular_gram, "reduce_ph_finite: Q is singular");
  const Matrix gram = Ups * Qinv * Ups.transpose();
  const Matrix Qr =
      invert(gram, Errc::singular_gram, "reduce_ph_finite: Upsilon Q^{-1} Upsilon^T singular");
  result.model = make_ph(skew_part(Ups * sys.J * Ups.transpose()),
                         sym_part(Ups * sys.R * Ups.transpose()), sym_part(Qr),
                         Matrix(Ups * sys.B), sys.r_psd, sys.q_pd);
  check_spectra_disjoint(((result.model.J - result.model.R) * result.model.Q).cast<Complex>(),
                         gen.Qc,
                         "reduce_ph_finite: reduced spectrum meets the interpolation points");
  result.cert = MatchCertificate{
      ComplexMatrix::Identity(gen.order(), gen.order()), CertKind::finite_left};
  return result;
}

PhReduction reduce_ph_markov(const PortHamiltonianSystem &sys, const GeneratorRight &gen,
                             MomentKind variant)
{
  require(variant == MomentKind::markov_pi || variant == MomentKind::markov_pi_bar ||
              variant == MomentKind::markov_pi_tilde,
          Errc::invalid_argument,
          "reduce_ph_markov: right-side variants are markov_pi, markov_pi_bar, markov_pi_tilde");
  PhReduction result;
  result.data = moments_markov(sys, gen, variant);
  const Matrix Pi = real_interpolation_matrix(result.data.solution, "reduce_ph_markov");
  Matrix gram;
  result.model = congruence_model_right(sys, Pi, &gram);
  const ComplexMatrix Sv =
      variant == MomentKind::markov_pi_tilde ? tilde_split(gen).S2 : gen.S;
  check_product_away_from_one(
      ((result.model.J - result.model.R) * result.model.Q).cast<Complex>(), Sv,
      "reduce_ph_markov: lambda * mu = 1 between reduced spectrum and generator");
  CertKind kind = CertKind::markov_pi;
  if (variant == MomentKind::markov_pi_bar)
  {
    kind = CertKind::markov_pi_bar;
  }
  else if (variant == MomentKind::markov_pi_tilde)
  {
    kind = CertKind::markov_pi_tilde;
  }
  result.cert = MatchCertificate{gram.cast<Complex>(), kind};
  return result;
}

PhReduction reduce_ph_markov(const PortHamiltonianSystem &sys, const GeneratorLeft &gen,
                             MomentKind variant)
{
  require(variant == MomentKind::markov_upsilon_hat || variant == MomentKind::markov_upsilon,
          Errc::invalid_argument,
          "reduce_ph_markov: left-side variant is the UpsilonHat construction");
  require(sys.ports() == 1, Errc::invalid_argument,
          "reduce_ph_markov: the left Markov construction is single-input");

  PhReduction result;
  result.data = moments_markov(sys, gen, MomentKind::markov_upsilon_hat);
  const Matrix UpsHat = real_interpolation_matrix(result.data.solution, "reduce_ph_markov");
  const Matrix Qinv = invert(sys.Q, Errc::singular_gram, "reduce_ph_markov: Q is singular");
  const Matrix gram = UpsHat * Qinv * UpsHat.transpose();
  const Matrix Qr = invert(gram, Errc::singular_gram,
                           "reduce_ph_markov: UpsilonHat Q^{-1} UpsilonHat^T singular");

  // Port column normalized so the leading Markov parameter carries over;
  // this is the scaling the worked example resolves through its
  // matching-condition solve.
  const Matrix B0 = UpsHat * sys.B;
  const double lead_original = (sys.B.transpose() * sys.Q * sys.B)(0, 0);
  const double lead_base = (B0.transpose() * sym_part(Qr) * B0)(0, 0);
  require(lead_original > 0.0 && lead_base > 0.0, Errc::singular_gram,
          "reduce_ph_markov: leading Markov parameter is not positive");
  const Matrix Br = std::sqrt(lead_original / lead_base) * B0;

  result.model = make_ph(skew_part(UpsHat * sys.J * UpsHat.transpose()),
                         sym_part(UpsHat * sys.R * UpsHat.transpose()), sym_part(Qr), Br,
                         sys.r_psd, sys.q_pd);

  // Certificate: solve the first matching condition for P, then insist the
  // second one holds for the normalized port column.
  const ComplexMatrix F = ((result.model.J - result.model.R) * result.model.Q).cast<Complex>();
  const ComplexMatrix H = (result.model.B.transpose() * result.model.Q).cast<Complex>();
  const ComplexMatrix P = linalg::solve_sylvester(SylvesterForm::markov_left, F, gen.Qc,
                                                  ComplexMatrix(gen.Rc * H));
  const ComplexMatrix drive = result.data.moments.stacked();
  const ComplexMatrix defect =
      gen.Qc * (gen.Qc * P + gen.Rc * H) * Br.cast<Complex>() - drive;
  const double scale = 1.0 + drive.norm();
  require(defect.norm() <= 1.0e-8 * scale, Errc::certificate_invalid,
          "reduce_ph_markov: normalized UpsilonHat model fails the matching condition; "
          "the construction pins only the leading parameter beyond order two");
  result.cert = MatchCertificate{P, CertKind::markov_left_hat};
  return result;
}

DescriptorReduction reduce_descriptor_markov(const LtiSystem &sys, const GeneratorLeft &gen,
                                             int variant, const Matrix &H_free)
{
  require(variant >= 1 && variant <= 4, Errc::invalid_argument,
          "reduce_descriptor_markov: variant must be 1..4");
  const Index nu = gen.order();
  require(H_free.rows() == sys.outputs() && H_free.cols() == nu, Errc::dimension_error,
          "reduce_descriptor_markov: H must be p x nu");
  require(linalg::is_real(gen.Qc) && linalg::is_real(gen.Rc), Errc::not_real,
          "reduce_descriptor_markov: generator must be real");
  const Matrix Qc = gen.Qc.real();
  const Matrix Rc = gen.Rc.real();

  const Matrix E = Qc - Rc * H_free;
  {
    Eigen::PartialPivLU<Matrix> lu(E);
    const double floor =
        static_cast<double>(nu) * std::max(E.cwiseAbs().maxCoeff(), 1e-300) * 1.1e-16;
    require(nu == 0 || lu.matrixLU().diagonal().cwiseAbs().minCoeff() > floor, Errc::singular_e,
            "reduce_descriptor_markov: E = Qc - Rc H is singular for this H");
  }

  DescriptorReduction result;
  const bool hat = (variant >= 3);
  result.data = moments_markov(
      sys, gen, hat ? MomentKind::markov_upsilon_hat : MomentKind::markov_upsilon);
  const Matrix Ups = real_interpolation_matrix(result.data.solution, "reduce_descriptor_markov");

  Matrix G;
  bool in_der = false;
  bool out_der = false;
  switch (variant)
  {
    case 1:
      G = -Ups * sys.B;
      break;
    case 2:
      G = -Qc * Ups * sys.B;
      out_der = true;
      break;
    case 3:
      G = -(Qc * Ups + Rc * sys.C) * sys.B;
      break;
    case 4:
      G = -Qc * (Qc * Ups + Rc * sys.C) * sys.B;
      in_der = true;
      break;
  }
  result.model =
      make_descriptor(E, Matrix(Matrix::Identity(nu, nu)), G, H_free, in_der, out_der);
  result.cert =
      MatchCertificate{ComplexMatrix(-ComplexMatrix::Identity(nu, nu)), CertKind::markov_left};
  return result;
}

DescriptorReduction markov_companion_model(const LtiSystem &sys, Index nu,
                                           const Vector &last_row, double g_free)
{
  require(nu >= 1, Errc::invalid_argument, "markov_companion_model: nu must be >= 1");
  require(sys.inputs() == 1 && sys.outputs() == 1, Errc::invalid_argument,
          "markov_companion_model: single-input single-output only");
  require(last_row.size() == nu, Errc::dimension_error,
          "markov_companion_model: last row must have nu entries");

  // Lower-shift nilpotent pair; the moments are the leading Markov data.
  Matrix Qc = Matrix::Zero(nu, nu);
  Qc.diagonal(-1).setOnes();
  Matrix Rc = Matrix::Zero(nu, 1);
  Rc(0, 0) = 1.0;
  const GeneratorLeft gen = make_generator_left(Qc.cast<Complex>(), Rc.cast<Complex>());

  DescriptorReduction result;
  result.data = moments_markov(sys, gen, MomentKind::markov_upsilon);
  const ComplexMatrix drive = result.data.moments.stacked();

  Matrix F = Matrix::Zero(nu, nu);
  F.topRightCorner(nu - 1, nu - 1).setIdentity();
  F.row(nu - 1) = last_row.transpose();
  Matrix G(nu, 1);
  for (Index i = 0; i + 1 < nu; ++i)
  {
    G(i, 0) = drive(i + 1, 0).real();
  }
  G(nu - 1, 0) = g_free;
  Matrix H = Matrix::Zero(1, nu);
  H(0, 0) = 1.0;

  result.model = make_descriptor(Matrix(Matrix::Identity(nu, nu)), F, G, H);
  result.cert =
      MatchCertificate{ComplexMatrix::Identity(nu, nu), CertKind::markov_left};
  return result;
}

namespace
{

KrylovBasis finish_basis(ComplexMatrix V, ComplexMatrix M, const char *what)
{
  KrylovBasis basis;
  basis.V = std::move(V);
  basis.M = std::move(M);
  const ComplexMatrix VM = basis.V * basis.M;
  require(linalg::is_real(VM), Errc::not_real,
          std::string(what) + ": realified basis still complex (conjugate pairing broken)");
  basis.Vhat = VM.real();
  require(basis_rank(basis.Vhat) == basis.Vhat.cols(), Errc::rank_deficient_basis,
          std::string(what) + ": basis is rank deficient");
  return basis;
}

}  // namespace

KrylovBasis krylov_basis(const LtiSystem &sys, const std::vector<Complex> &points,
                         const std::vector<ComplexVector> &tangents)
{
  const Index nu = static_cast<Index>(points.size());
  require(nu >= 1, Errc::invalid_argument, "krylov_basis: no points");
  require(tangents.size() == points.size(), Errc::dimension_error,
          "krylov_basis: one tangent per point required");
  const Index n = sys.states();
  const ComplexMatrix A = sys.A.cast<Complex>();
  const ComplexMatrix B = sys.B.cast<Complex>();

  ComplexMatrix V(n, nu);
  for (Index i = 0; i < nu; ++i)
  {
    const Complex s = points[static_cast<size_t>(i)];
    const ComplexMatrix shifted = s * ComplexMatrix::Identity(n, n) - A;
    ComplexMatrix rhs;
    if (i > 0 && s == points[static_cast<size_t>(i - 1)])
    {
      require((tangents[static_cast<size_t>(i)] - tangents[static_cast<size_t>(i - 1)]).norm() ==
                  0.0,
              Errc::invalid_argument, "krylov_basis: repeated points must share their tangent");
      rhs = V.col(i - 1);
    }
    else
    {
      require(tangents[static_cast<size_t>(i)].size() == sys.inputs(), Errc::dimension_error,
              "krylov_basis: tangent length must equal the input count");
      rhs = B * tangents[static_cast<size_t>(i)];
    }
    try
    {
      V.col(i) = linalg::solve_linear(shifted, rhs);
    }
    catch (const Error &err)
    {
      if (err.code() == Errc::singular_matrix)
      {
        fail(Errc::pole_hit, "krylov_basis: interpolation point is a pole");
      }
      throw;
    }
  }

  // Realifier: identity on real columns, the (Re, Im) map on adjacent
  // conjugate columns.
  ComplexMatrix M = ComplexMatrix::Zero(nu, nu);
  const Complex half(0.5, 0.0);
  const Complex half_i(0.0, 0.5);
  Index i = 0;
  while (i < nu)
  {
    const Complex s = points[static_cast<size_t>(i)];
    if (std::imag(s) == 0.0)
    {
      M(i, i) = 1.0;
      ++i;
      continue;
    }
    require(i + 1 < nu && points[static_cast<size_t>(i + 1)] == std::conj(s),
            Errc::invalid_argument,
            "krylov_basis: complex points must come in adjacent conjugate pairs");
    M(i, i) = half;
    M(i + 1, i) = half;
    M(i, i + 1) = -half_i;
    M(i + 1, i + 1) = half_i;
    i += 2;
  }
  return finish_basis(std::move(V), std::move(M), "krylov_basis");
}

KrylovBasis krylov_basis(const PortHamiltonianSystem &sys, const std::vector<Complex> &points,
                         const std::vector<ComplexVector> &tangents)
{
  return krylov_basis(ph_to_lti(sys), points, tangents);
}

KrylovBasis markov_krylov_basis(const LtiSystem &sys, Index nu)
{
  require(nu >= 1, Errc::invalid_argument, "markov_krylov_basis: nu must be >= 1");
  require(sys.inputs() == 1, Errc::invalid_argument,
          "markov_krylov_basis: single-input systems only");
  ComplexMatrix V(sys.states(), nu);
  Matrix col = sys.B;
  for (Index k = 0; k < nu; ++k)
  {
    V.col(k) = col.cast<Complex>();
    col = sys.A * col;
  }
  return finish_basis(std::move(V), ComplexMatrix(ComplexMatrix::Identity(nu, nu)),
                      "markov_krylov_basis");
}

KrylovBasis markov_krylov_basis(const PortHamiltonianSystem &sys, Index nu)
{
  return markov_krylov_basis(ph_to_lti(sys), nu);
}

PhReduction reduce_ph_krylov(const PortHamiltonianSystem &sys,
                             const std::vector<Complex> &points,
                             const std::vector<ComplexVector> &tangents)
{
  const KrylovBasis basis = krylov_basis(sys, points, tangents);
  const Matrix &Vhat = basis.Vhat;
  const Matrix gram = Vhat.transpose() * sys.Q * Vhat;
  const Matrix gram_inv =
      invert(gram, Errc::singular_gram, "reduce_ph_krylov: V^T Q V singular");
  const Matrix What = sys.Q * Vhat * gram_inv;

  // Projected quadruple: the reduced energy matrix is the Gram V^T Q V, so
  // that the state matrix is W^T A V and the output B^T Q V.
  PhReduction result;
  result.model = make_ph(skew_part(What.transpose() * sys.J * What),
                         sym_part(What.transpose() * sys.R * What), sym_part(gram),
                         Matrix(What.transpose() * sys.B), sys.r_psd, sys.q_pd);

  const GeneratorRight gen = generator_from_points(points, tangents);
  result.data = moments_finite(sys, gen);

  // The matching certificate is the solution of the reduced-side Sylvester
  // equation F P + G L = P S; the moment identity C_red P = C Pi is what
  // verification checks against it.
  const ComplexMatrix F = ((result.model.J - result.model.R) * result.model.Q).cast<Complex>();
  const ComplexMatrix G = result.model.B.cast<Complex>();
  const ComplexMatrix P = linalg::solve_sylvester(SylvesterForm::finite_right, F, gen.S,
                                                  ComplexMatrix(G * gen.L));
  result.cert = MatchCertificate{P, CertKind::finite_right};
  return result;
}

MirrorPoints mirror_points(const LtiSystem &sys, Index nu)
{
  const Index n = sys.states();
  require(nu >= 1 && nu <= n, Errc::invalid_argument,
          "mirror_points: need 1 <= nu <= state dimension");

  Eigen::ComplexEigenSolver<ComplexMatrix> es(sys.A.cast<Complex>());
  require(es.info() == Eigen::Success, Errc::no_convergence,
          "mirror_points: eigendecomposition failed");
  ComplexVector lam = es.eigenvalues();

  MirrorPoints result;
  Vector magnitude(n);
  const ComplexMatrix &V = es.eigenvectors();
  Eigen::JacobiSVD<ComplexMatrix> svd(V);
  const double cond_floor = svd.singularValues()(0) * 1.0e-10;
  if (svd.singularValues().minCoeff() <= cond_floor)
  {
    // Defective state matrix: no residue data, fall back to slowest poles.
    result.defective_fallback = true;
    for (Index i = 0; i < n; ++i)
    {
      magnitude(i) = -std::abs(lam(i).real());
    }
  }
  else
  {
    const ComplexMatrix W = V.inverse();
    for (Index i = 0; i < n; ++i)
    {
      const ComplexMatrix Cv = sys.C.cast<Complex>() * V.col(i);
      const ComplexMatrix wB = W.row(i) * sys.B.cast<Complex>();
      magnitude(i) = Cv.norm() * wB.norm();
    }
  }

  // Sort keys quantized against the tie tolerance so that the ordering is
  // strict-weak: |residue| descending, then |Im| ascending, |pole|
  // ascending, and a final deterministic tiebreak.
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const double mag_scale = 1.0 + magnitude.cwiseAbs().maxCoeff();
  auto quantize = [&](double value) { return std::llround(value / (1.0e-9 * mag_scale)); };
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const auto key = [&](Index i) {
      return std::make_tuple(-quantize(magnitude(i)), quantize(std::abs(lam(i).imag())),
                             quantize(std::abs(lam(i))), lam(i).real(), -lam(i).imag());
    };
    return key(a) < key(b);
  });

  // Select slots with conjugate closure.
  std::vector<bool> taken(static_cast<size_t>(n), false);
  auto conjugate_index = [&](Index i) -> Index {
    for (Index j = 0; j < n; ++j)
    {
      if (j != i && !taken[static_cast<size_t>(j)] &&
          std::abs(lam(j) - std::conj(lam(i))) <= 1.0e-9 * (1.0 + std::abs(lam(i))))
      {
        return j;
      }
    }
    return -1;
  };
  std::vector<Complex> selected;
  for (Index k = 0; k < n && static_cast<Index>(selected.size()) < nu; ++k)
  {
    const Index i = order[static_cast<size_t>(k)];
    if (taken[static_cast<size_t>(i)])
    {
      continue;
    }
    const bool complex_pole = std::abs(lam(i).imag()) > 1.0e-12 * (1.0 + std::abs(lam(i)));
    if (!complex_pole)
    {
      taken[static_cast<size_t>(i)] = true;
      selected.push_back(lam(i));
      continue;
    }
    if (static_cast<Index>(selected.size()) + 2 > nu)
    {
      continue;  // one slot left: a pair does not fit, look for a real pole
    }
    const Index j = conjugate_index(i);
    require(j >= 0, Errc::invalid_argument, "mirror_points: unmatched complex pole");
    taken[static_cast<size_t>(i)] = true;
    taken[static_cast<size_t>(j)] = true;
    // Mirrored pair ordered with positive imaginary part first.
    const Complex first = lam(i).imag() < 0 ? lam(i) : std::conj(lam(i));
    selected.push_back(first);
    selected.push_back(std::conj(first));
  }
  require(static_cast<Index>(selected.size()) == nu, Errc::invalid_argument,
          "mirror_points: cannot select nu poles with closed conjugate pairs");

  result.points.reserve(selected.size());
  for (const Complex &pole : selected)
  {
    result.points.push_back(-pole);
  }
  return result;
}

MirrorPoints mirror_points(const PortHamiltonianSystem &sys, Index nu)
{
  return mirror_points(ph_to_lti(sys), nu);
}

BasisEquivalence basis_equivalence(const ComplexMatrix &X, const ComplexMatrix &Y)
{
  require(X.rows() == Y.rows() && X.cols() == Y.cols(), Errc::dimension_error,
          "basis_equivalence: shapes must agree");
  const Index nu = X.cols();
  auto rank_of = [&](const ComplexMatrix &M) {
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(M);
    qr.setThreshold(static_cast<double>(std::max<Index>(nu, 1)) * 1.0e-12);
    return qr.rank();
  };
  require(rank_of(X) == nu && rank_of(Y) == nu, Errc::rank_deficient_basis,
          "basis_equivalence: inputs must have full column rank");

  BasisEquivalence result;
  result.T = Y.colPivHouseholderQr().solve(X);
  result.residual = (X - Y * result.T).norm();

  bool invertible = false;
  if (result.T.rows() == result.T.cols())
  {
    Eigen::PartialPivLU<ComplexMatrix> lu(result.T);
    const double floor = static_cast<double>(nu) *
                         std::max(result.T.cwiseAbs().maxCoeff(), 1e-300) * 1.1e-16;
    invertible = lu.matrixLU().diagonal().cwiseAbs().minCoeff() > floor;
  }
  result.equivalent = invertible && result.residual <= 1.0e-8 * std::max(X.norm(), 1e-300);
  return result;
}

}  // namespace phmm
