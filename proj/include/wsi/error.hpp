#pragma once

#include <stdexcept>
#include <string>

namespace wsi {

enum class ErrorKind {
  range_violation,
  dimension_mismatch,
  empty_cone,
  outside_cone,
  nondifferentiable_point,
  nonintegrable,
  not_applicable,
  assumption_violation,
  branch_mismatch,
  quadrature_failure,
  not_equal_weights,
  gamma_dependence,
  empty_parts,
  zero_gradient,
  bump_exits_cone,
  resolution_insufficient,
  invalid_argument,
  size_exceeded,
  binning_mismatch,
  map_leaves_cone,
  normalization_failure,
  parse_error,
  unknown_key,
  invalid_family,
  io_error,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::range_violation: return "range_violation";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::empty_cone: return "empty_cone";
    case ErrorKind::outside_cone: return "outside_cone";
    case ErrorKind::nondifferentiable_point: return "nondifferentiable_point";
    case ErrorKind::nonintegrable: return "nonintegrable";
    case ErrorKind::not_applicable: return "not_applicable";
    case ErrorKind::assumption_violation: return "assumption_violation";
    case ErrorKind::branch_mismatch: return "branch_mismatch";
    case ErrorKind::quadrature_failure: return "quadrature_failure";
    case ErrorKind::not_equal_weights: return "not_equal_weights";
    case ErrorKind::gamma_dependence: return "gamma_dependence";
    case ErrorKind::empty_parts: return "empty_parts";
    case ErrorKind::zero_gradient: return "zero_gradient";
    case ErrorKind::bump_exits_cone: return "bump_exits_cone";
    case ErrorKind::resolution_insufficient: return "resolution_insufficient";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::size_exceeded: return "size_exceeded";
    case ErrorKind::binning_mismatch: return "binning_mismatch";
    case ErrorKind::map_leaves_cone: return "map_leaves_cone";
    case ErrorKind::normalization_failure: return "normalization_failure";
    case ErrorKind::parse_error: return "parse_error";
    case ErrorKind::unknown_key: return "unknown_key";
    case ErrorKind::invalid_family: return "invalid_family";
    case ErrorKind::io_error: return "io_error";
  }
  return "unknown";
}

/// Every failure in the library is reported through this type; `kind()`
/// is the stable part, `what()` carries "kind: detail".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind),
        detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace wsi
