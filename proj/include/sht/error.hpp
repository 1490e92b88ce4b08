#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sht {

enum class Errc {
  asymmetric_matrix,
  negative_distance,
  zero_off_diagonal,
  empty_space,
  invalid_argument,
  delta_too_large,
  lambda_nonpositive,
  mixed_grids,
  p_invalid,
  r_invalid,
  k_negative,
  exponent_order,
  norm_estimate_failed,
  zero_function,
  case_mismatch,
  decay_unbounded,
  overflow,
  no_convergence,
  atom_not_mean_zero,
  io_error,
  parse_error,
};

std::string_view to_string(Errc code);

/// Every failure raised by the toolkit carries one of the `Errc` codes so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sht
