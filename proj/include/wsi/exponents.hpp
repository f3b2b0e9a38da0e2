#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "error.hpp"

namespace wsi {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// (n, p, tau, alpha) together with the derived q, n_a and p'.
/// n_a and p_conj are +inf in the limiting cases alpha = p + tau and p = 1.
struct ExponentSet {
  int n = 0;
  double p = 1.0;
  double tau = 0.0;
  double alpha = 0.0;
  double q = 0.0;
  double n_a = 0.0;
  double p_conj = kInf;

  bool n_a_infinite() const { return std::isinf(n_a); }
  bool p_is_one() const { return p == 1.0; }
  /// n_a = n, selecting the second branch of the conditions and constants.
  bool critical() const { return !n_a_infinite() && std::abs(n_a - n) <= 1e-9 * n; }

  double inv_p() const { return 1.0 / p; }
  double inv_q() const { return 1.0 / q; }
  double inv_p_conj() const { return p_is_one() ? 0.0 : 1.0 - 1.0 / p; }
  double inv_n_a() const { return n_a_infinite() ? 0.0 : 1.0 / n_a; }
  /// n_a / (n_a - n), which tends to 1 as n_a -> inf.
  double c0_power() const { return n_a_infinite() ? 1.0 : n_a / (n_a - n); }
  /// (tau + n)/q - ((alpha + n)/p - 1); zero up to rounding.
  double balance_residual() const { return (tau + n) / q - ((alpha + n) / p - 1.0); }
};

/// Derives q, n_a, p' from the balance relation without range checks. Used by
/// the necessity probes, which deliberately step outside the admissible range.
inline ExponentSet derive_exponents(int n, double p, double tau, double alpha) {
  ExponentSet e;
  e.n = n;
  e.p = p;
  e.tau = tau;
  e.alpha = alpha;
  double denom = alpha + n - p;
  if (!(denom > 0.0)) throw Error(ErrorKind::range_violation, "p < alpha + n");
  e.q = p * (tau + n) / denom;
  double gap = tau - alpha + p;
  if (std::abs(gap) <= 1e-12 * std::max(1.0, std::abs(alpha) + std::abs(tau) + p)) {
    e.n_a = kInf;
    e.q = p;
  } else {
    e.n_a = p * (tau + n) / gap;
  }
  e.p_conj = p == 1.0 ? kInf : p / (p - 1.0);
  return e;
}

/// Same as derive_exponents but with an explicit q, bypassing the balance
/// relation. 1/n_a = 1/p - 1/q.
inline ExponentSet exponents_with_q(int n, double p, double tau, double alpha, double q) {
  ExponentSet e;
  e.n = n;
  e.p = p;
  e.tau = tau;
  e.alpha = alpha;
  e.q = q;
  double inv = 1.0 / p - 1.0 / q;
  e.n_a = inv == 0.0 ? kInf : 1.0 / inv;
  e.p_conj = p == 1.0 ? kInf : p / (p - 1.0);
  return e;
}

inline ExponentSet validate_exponents(int n, double p, double tau, double alpha) {
  auto fail = [](const std::string& rel) { throw Error(ErrorKind::range_violation, rel); };
  if (n < 2) fail("n >= 2");
  if (!std::isfinite(p) || !std::isfinite(tau) || !std::isfinite(alpha)) fail("finite parameters");
  if (!(p >= 1.0)) fail("1 <= p");
  if (!(tau + n > 0.0)) fail("tau + n > 0");
  if (!(alpha + n > 0.0)) fail("alpha + n > 0");
  if (!(p < alpha + n)) fail("p < alpha + n");
  double slack = 1e-12 * std::max(1.0, std::abs(alpha) + std::abs(tau) + p);
  if (!(alpha <= tau + p + slack)) fail("alpha + n <= tau + p + n");
  if (!(alpha >= (1.0 - p / n) * tau - slack)) fail("alpha >= (1 - p/n) tau");
  ExponentSet e = derive_exponents(n, p, tau, alpha);
  if (!e.n_a_infinite() && e.n_a < n) e.n_a = n;  // rounding on the n_a = n edge
  return e;
}

inline std::string describe(const ExponentSet& e) {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << e.n << " p=" << e.p << " tau=" << e.tau << " alpha=" << e.alpha << " q=" << e.q
     << " n_a=";
  if (e.n_a_infinite())
    os << "inf";
  else
    os << e.n_a;
  return os.str();
}

}  // namespace wsi
