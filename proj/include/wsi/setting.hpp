#pragma once

#include "cone.hpp"
#include "conditions.hpp"
#include "exponents.hpp"
#include "weight.hpp"

namespace wsi {

/// A cone, a weight pair and the exponents they determine.
struct WeightedSetting {
  ConvexCone cone;
  HomogeneousWeight omega;
  HomogeneousWeight sigma;
  ExponentSet exps;

  int n() const { return cone.dimension(); }
};

/// Exponents are validated from p and the weight degrees.
inline WeightedSetting make_setting(ConvexCone cone, HomogeneousWeight omega, HomogeneousWeight sigma, double p) {
  ExponentSet e = validate_exponents(cone.dimension(), p, omega.degree(), sigma.degree());
  return {std::move(cone), std::move(omega), std::move(sigma), e};
}

/// No range checks: q from the balance relation even when the ranges fail.
inline WeightedSetting make_raw_setting(ConvexCone cone, HomogeneousWeight omega, HomogeneousWeight sigma, double p) {
  ExponentSet e = derive_exponents(cone.dimension(), p, omega.degree(), sigma.degree());
  return {std::move(cone), std::move(omega), std::move(sigma), e};
}

/// The constant of whichever structural condition applies: C0 when n_a > n, C1 when n_a = n.
struct ConditionConstant {
  Condition condition = Condition::C0;
  double value = 0.0;
};

}  // namespace wsi
