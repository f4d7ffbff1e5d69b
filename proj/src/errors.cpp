// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmm/errors.hpp"

namespace phmm
{

std::string_view errc_name(Errc code)
{
  switch (code)
  {
    case Errc::singular_matrix:
      return "SingularMatrix";
    case Errc::no_convergence:
      return "NoConvergence";
    case Errc::spectrum_clash:
      return "SpectrumClash";
    case Errc::spectrum_product_clash:
      return "SpectrumProductClash";
    case Errc::singular_gram:
      return "SingularGram";
    case Errc::singular_e:
      return "SingularE";
    case Errc::rank_deficient_basis:
      return "RankDeficientBasis";
    case Errc::pole_hit:
      return "PoleHit";
    case Errc::non_positive_parameter:
      return "NonPositiveParameter";
    case Errc::invariant_violation:
      return "InvariantError";
    case Errc::dimension_error:
      return "DimensionError";
    case Errc::schema_error:
      return "SchemaError";
    case Errc::kind_mismatch:
      return "KindMismatch";
    case Errc::certificate_invalid:
      return "CertificateInvalid";
    case Errc::unstable_plant:
      return "UnstablePlant";
    case Errc::degenerate_step:
      return "DegenerateStep";
    case Errc::flags_missing:
      return "FlagsMissing";
    case Errc::not_real:
      return "NotReal";
    case Errc::invalid_argument:
      return "InvalidArgument";
    case Errc::io_error:
      return "IoError";
  }
  return "UnknownError";
}

}  // namespace phmm
