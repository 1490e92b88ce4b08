#include "sht/error.hpp"

namespace sht {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::asymmetric_matrix: return "AsymmetricMatrix";
    case Errc::negative_distance: return "NegativeDistance";
    case Errc::zero_off_diagonal: return "ZeroOffDiagonal";
    case Errc::empty_space: return "EmptySpace";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::delta_too_large: return "DeltaTooLarge";
    case Errc::lambda_nonpositive: return "LambdaNonpositive";
    case Errc::mixed_grids: return "MixedGrids";
    case Errc::p_invalid: return "PInvalid";
    case Errc::r_invalid: return "RInvalid";
    case Errc::k_negative: return "KNegative";
    case Errc::exponent_order: return "ExponentOrder";
    case Errc::norm_estimate_failed: return "NormEstimateFailed";
    case Errc::zero_function: return "ZeroFunction";
    case Errc::case_mismatch: return "CaseMismatch";
    case Errc::decay_unbounded: return "DecayUnbounded";
    case Errc::overflow: return "Overflow";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::atom_not_mean_zero: return "AtomNotMeanZero";
    case Errc::io_error: return "IoError";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace sht
