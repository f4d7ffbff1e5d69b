// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phmm
{

enum class Errc
{
  singular_matrix,
  no_convergence,
  spectrum_clash,
  spectrum_product_clash,
  singular_gram,
  singular_e,
  rank_deficient_basis,
  pole_hit,
  non_positive_parameter,
  invariant_violation,
  dimension_error,
  schema_error,
  kind_mismatch,
  certificate_invalid,
  unstable_plant,
  degenerate_step,
  flags_missing,
  not_real,
  invalid_argument,
  io_error,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error
{
public:
  Error(Errc code, const std::string &message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code)
  {
  }

  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string &message)
{
  throw Error(code, message);
}

inline void require(bool condition, Errc code, const std::string &message)
{
  if (!condition)
  {
    throw Error(code, message);
  }
}

}  // namespace phmm
