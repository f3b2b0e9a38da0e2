#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cone.hpp"
#include "error.hpp"
#include "exponents.hpp"
#include "pattern_search.hpp"
#include "random.hpp"
#include "vec.hpp"
#include "weight.hpp"

namespace wsi {

enum class Condition { C0, C1 };
enum class Verdict { holds_with_constant, refuted, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds_with_constant: return "holds_with_constant";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ConditionReport {
  Condition condition = Condition::C0;
  double constant_estimate = 0.0;  // refined sup; +inf when refuted by a pair with RHS <= 0
  double sampled_sup = 0.0;        // sup over the sampled set alone
  Point witness_x, witness_y;
  long samples_used = 0;
  long gradient_positivity_violations = 0;
  long refuting_pairs = 0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::pair<long, double>> checkpoints;  // (samples, sampled sup)
  std::string note;
};

struct ConditionOptions {
  int refine_iterations = 40;
  double refine_step = 0.05;
  double stability = 1e-3;
  double tolerance = 1e-9;
};

struct C0Sides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Both sides of the C-0 inequality at (x, y). The p = 1 and n_a = inf forms
/// are hardwired: 1/p' = 0 and the outer exponent n_a/(n_a - n) = 1.
inline C0Sides c0_sides(const HomogeneousWeight& omega, const HomogeneousWeight& sigma, const ExponentSet& e, std::span<const double> x,
                        std::span<const double> y) {
  if (e.critical() || (!e.n_a_infinite() && e.n_a < e.n))
    throw Error(ErrorKind::not_applicable, "C-0 needs n_a > n");
  double wx = weight_eval(omega, x), wy = weight_eval(omega, y);
  double sx = weight_eval(sigma, x), sy = weight_eval(sigma, y);
  double lg = e.inv_p() * std::log(sy / sx) + e.inv_q() * std::log(wx / wy);
  C0Sides s;
  s.lhs = std::exp(e.c0_power() * lg);
  Point gw = e.p_is_one() ? Point(x.size(), 0.0) : weight_grad(omega, x);
  Point gs = weight_grad(sigma, x);
  double a = e.inv_p_conj() / wx, b = e.inv_p() / sx;
  for (std::size_t i = 0; i < x.size(); ++i) s.rhs += (a * gw[i] + b * gs[i]) * y[i];
  return s;
}

/// LHS / RHS of C-0 at (x, y); +inf when RHS <= 0 (the pair refutes C-0).
inline double c0_ratio(const HomogeneousWeight& omega, const HomogeneousWeight& sigma, const ExponentSet& e, std::span<const double> x,
                       std::span<const double> y) {
  auto s = c0_sides(omega, sigma, e, x, y);
  if (!(s.rhs > 0.0)) return std::numeric_limits<double>::infinity();
  return s.lhs / s.rhs;
}

namespace detail {

inline bool stabilized(const std::vector<std::pair<long, double>>& cps, double tol) {
  if (cps.size() < 3) return false;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  std::size_t m = cps.size();
  return rel(cps[m - 2].second, cps[m - 1].second) <= tol && rel(cps[m - 3].second, cps[m - 2].second) <= tol;
}

inline bool is_checkpoint(long i, long total) { return i == total / 4 || i == total / 2 || i == total; }

}  // namespace detail

inline ConditionReport estimate_best_c0(const HomogeneousWeight& omega, const HomogeneousWeight& sigma, const ExponentSet& e,
                                        const ConvexCone& cone, long sample_count, std::uint64_t seed, const ConditionOptions& opt = {}) {
  if (e.critical() || (!e.n_a_infinite() && e.n_a < e.n))
    throw Error(ErrorKind::not_applicable, "C-0 needs n_a > n");
  if (sample_count < 4) throw Error(ErrorKind::invalid_argument, "need at least 4 samples");
  ConditionReport r;
  r.condition = Condition::C0;
  ConeSphereSampler sampler(cone, seed);
  double best = -1.0;
  for (long i = 1; i <= sample_count; ++i) {
    Point x = sampler.next(), y = sampler.next();
    double v = c0_ratio(omega, sigma, e, x, y);
    if (std::isinf(v)) {
      if (r.refuting_pairs++ == 0) {
        r.witness_x = x;
        r.witness_y = y;
      }
    } else if (v > best && r.refuting_pairs == 0) {
      best = v;
      r.witness_x = x;
      r.witness_y = y;
    }
    if (detail::is_checkpoint(i, sample_count)) r.checkpoints.emplace_back(i, r.refuting_pairs ? std::numeric_limits<double>::infinity() : best);
  }
  r.samples_used = sample_count;
  if (r.refuting_pairs > 0) {
    r.sampled_sup = r.constant_estimate = std::numeric_limits<double>::infinity();
    r.verdict = Verdict::refuted;
    r.note = std::to_string(r.refuting_pairs) + " sampled pairs with non-positive right side";
    return r;
  }
  r.sampled_sup = best;
  int n = cone.dimension();
  auto objective = [&](const std::vector<double>& z) {
    Point x(z.begin(), z.begin() + n), y(z.begin() + n, z.end());
    double lx = norm(x), ly = norm(y);
    if (!(lx > 0.0) || !(ly > 0.0)) return -std::numeric_limits<double>::infinity();
    x = scaled(x, 1.0 / lx);
    y = scaled(y, 1.0 / ly);
    if (!cone.contains(x) || !cone.contains(y)) return -std::numeric_limits<double>::infinity();
    try {
      return c0_ratio(omega, sigma, e, x, y);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  std::vector<double> z0 = r.witness_x;
  z0.insert(z0.end(), r.witness_y.begin(), r.witness_y.end());
  PatternSearchOptions po;
  po.initial_step = opt.refine_step;
  po.max_iterations = opt.refine_iterations;
  auto ps = maximize_pattern(objective, z0, po);
  if (std::isinf(ps.value) && ps.value > 0) {
    r.constant_estimate = ps.value;
    r.verdict = Verdict::refuted;
    r.note = "refinement reached a pair with non-positive right side";
    return r;
  }
  r.constant_estimate = best;
  if (ps.value > best) {
    r.constant_estimate = ps.value;
    r.witness_x = normalized(std::span<const double>(ps.x.data(), n));
    r.witness_y = normalized(std::span<const double>(ps.x.data() + n, n));
  }
  r.verdict = detail::stabilized(r.checkpoints, opt.stability) ? Verdict::holds_with_constant : Verdict::inconclusive;
  return r;
}

/// ω^{1/q} / σ^{1/p}, 0-homogeneous when n_a = n.
inline double c1_quotient(const HomogeneousWeight& omega, const HomogeneousWeight& sigma, const ExponentSet& e, std::span<const double> x) {
  return std::exp(e.inv_q() * std::log(weight_eval(omega, x)) - e.inv_p() * std::log(weight_eval(sigma, x)));
}

inline ConditionReport check_c1(const HomogeneousWeight& omega, const HomogeneousWeight& sigma, const ExponentSet& e, const ConvexCone& cone,
                                long sample_count, std::uint64_t seed, const ConditionOptions& opt = {}) {
  if (!e.critical()) throw Error(ErrorKind::not_applicable, "C-1 needs n_a = n");
  if (sample_count < 4) throw Error(ErrorKind::invalid_argument, "need at least 4 samples");
  ConditionReport r;
  r.condition = Condition::C1;
  ConeSphereSampler sampler(cone, seed);
  constexpr int kDecades = 6;
  // sup of the quotient over samples at boundary distance >= 10^{-k}
  std::vector<double> decade(kDecades + 1, 0.0);
  auto note_decade = [&](const Point& x, double v) {
    double d = cone.boundary_distance(x);
    for (int k = 0; k <= kDecades; ++k)
      if (d >= std::pow(10.0, -k)) decade[k] = std::max(decade[k], v);
  };
  double best = -1.0;
  for (long i = 1; i <= sample_count; ++i) {
    Point x = sampler.next(), y = sampler.next();
    double v = c1_quotient(omega, sigma, e, x);
    note_decade(x, v);
    if (v > best) {
      best = v;
      r.witness_x = x;
    }
    Point gw = e.p_is_one() ? Point(x.size(), 0.0) : weight_grad(omega, x);
    Point gs = weight_grad(sigma, x);
    double wx = omega.value(x), sx = sigma.value(x);
    double g = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) g += (e.inv_p_conj() * gw[j] / wx + e.inv_p() * gs[j] / sx) * y[j];
    if (g < -opt.tolerance) {
      if (r.gradient_positivity_violations++ == 0) r.witness_y = y;
    }
    if (detail::is_checkpoint(i, sample_count)) r.checkpoints.emplace_back(i, best);
  }
  // Planar cones: deterministic probes approaching both boundary rays.
  if (cone.dimension() == 2 && cone.arc() && !cone.arc()->full()) {
    const Arc& a = *cone.arc();
    for (int k = 1; k <= 12; ++k) {
      double t = std::pow(10.0, -k) * a.span();
      for (double th : {a.lo + t, a.hi - t}) {
        Point x{std::cos(th), std::sin(th)};
        if (!cone.contains(x)) continue;
        try {
          note_decade(x, c1_quotient(omega, sigma, e, x));
        } catch (const Error&) {
        }
      }
    }
  }
  r.samples_used = sample_count;
  r.sampled_sup = best;
  if (r.witness_y.empty()) r.witness_y = r.witness_x;
  auto objective = [&](const std::vector<double>& z) {
    double l = norm(z);
    if (!(l > 0.0)) return -std::numeric_limits<double>::infinity();
    Point x = scaled(z, 1.0 / l);
    if (!cone.contains(x)) return -std::numeric_limits<double>::infinity();
    try {
      return c1_quotient(omega, sigma, e, x);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  PatternSearchOptions po;
  po.initial_step = opt.refine_step;
  po.max_iterations = opt.refine_iterations;
  auto ps = maximize_pattern(objective, r.witness_x, po);
  r.constant_estimate = std::max(best, ps.value);
  if (ps.value > best) r.witness_x = normalized(ps.x);
  bool diverging = decade[kDecades] > 2.0 * decade[kDecades - 1] && decade[kDecades - 1] > 2.0 * decade[kDecades - 2];
  if (diverging) {
    r.verdict = Verdict::refuted;
    r.constant_estimate = std::numeric_limits<double>::infinity();
    r.note = "quotient grows without bound towards the boundary";
  } else if (r.gradient_positivity_violations > 0) {
    r.verdict = Verdict::refuted;
    r.note = std::to_string(r.gradient_positivity_violations) + " sampled pairs violate gradient positivity";
  } else {
    r.verdict = detail::stabilized(r.checkpoints, opt.stability) ? Verdict::holds_with_constant : Verdict::inconclusive;
  }
  return r;
}

/// Closed-form C-0 constant for monomial weights x^tau_vec, x^alpha_vec.
inline double monomial_c0(const std::vector<double>& tau_vec, const std::vector<double>& alpha_vec, double p, int n) {
  if (static_cast<int>(tau_vec.size()) != n || static_cast<int>(alpha_vec.size()) != n)
    throw Error(ErrorKind::dimension_mismatch, "exponent vectors must have length n");
  double tau = 0.0, alpha = 0.0;
  for (int i = 0; i < n; ++i) {
    if (alpha_vec[i] < 0.0) throw Error(ErrorKind::assumption_violation, "alpha_i >= 0 at index " + std::to_string(i));
    tau += tau_vec[i];
    alpha += alpha_vec[i];
  }
  ExponentSet e;
  try {
    e = validate_exponents(n, p, tau, alpha);
  } catch (const Error& err) {
    throw Error(ErrorKind::assumption_violation, err.detail());
  }
  if (e.critical() || (!e.n_a_infinite() && !(e.n_a > n))) throw Error(ErrorKind::assumption_violation, "n_a > n");
  double tol = 1e-12;
  double log_prod = 0.0;
  for (int i = 0; i < n; ++i) {
    std::string idx = " at index " + std::to_string(i);
    double g = tau_vec[i] * e.inv_p_conj() + alpha_vec[i] * e.inv_p();
    double b = alpha_vec[i] * e.inv_p() - tau_vec[i] * e.inv_q();
    if (g < -tol) throw Error(ErrorKind::assumption_violation, "gamma_i >= 0" + idx);
    if (b < -tol) throw Error(ErrorKind::assumption_violation, "beta_i >= 0" + idx);
    if (std::abs(g) <= tol) {
      if (std::abs(tau_vec[i]) > tol || std::abs(alpha_vec[i]) > tol)
        throw Error(ErrorKind::assumption_violation, "gamma_i = 0 forces tau_i = alpha_i = 0" + idx);
      continue;
    }
    if (b > tol) log_prod += b * std::log(b / g);
  }
  if (e.n_a_infinite()) return std::exp(log_prod);
  double k = e.n_a / (e.n_a - n);
  return k * std::exp(k * log_prod);
}

struct ConcavityReport {
  bool holds = false;
  double c0 = 0.0;  // n_a / (n_a - n), valid when holds
  long midpoint_violations = 0;
  long gradient_violations = 0;
  long samples_used = 0;
  Point witness_x, witness_y;
};

/// Sufficient test for C-0: F = ω^δ σ^γ midpoint concave and ∇ω(x)·y >= 0.
inline ConcavityReport concavity_sufficient(const HomogeneousWeight& omega, const HomogeneousWeight& sigma, const ExponentSet& e,
                                            const ConvexCone& cone, long sample_count, std::uint64_t seed, double tolerance = 1e-9) {
  if (e.n_a_infinite() || e.critical() || e.n_a < e.n) throw Error(ErrorKind::not_applicable, "needs finite n_a > n");
  double k = e.n_a / (e.n_a - e.n);
  double delta = -e.inv_q() * k, gamma = e.inv_p() * k;
  auto F = [&](const Point& x) { return std::pow(weight_eval(omega, x), delta) * std::pow(weight_eval(sigma, x), gamma); };
  ConcavityReport r;
  r.c0 = k;
  ConeSphereSampler sampler(cone, seed);
  for (long i = 0; i < sample_count; ++i) {
    Point x = sampler.next(), y = sampler.next();
    double rx = std::exp(sampler.rng().uniform(std::log(0.5), std::log(2.0)));
    double ry = std::exp(sampler.rng().uniform(std::log(0.5), std::log(2.0)));
    double s = std::max(rx, ry);
    Point a = scaled(x, rx / s), b = scaled(y, ry / s);
    Point m = scaled(add(a, b), 0.5);
    if (F(m) < 0.5 * (F(a) + F(b)) - tolerance) {
      if (r.midpoint_violations++ == 0 && r.gradient_violations == 0) {
        r.witness_x = a;
        r.witness_y = b;
      }
    }
    if (dot(weight_grad(omega, x), y) < -tolerance) {
      if (r.gradient_violations++ == 0 && r.midpoint_violations == 0) {
        r.witness_x = x;
        r.witness_y = y;
      }
    }
  }
  r.samples_used = sample_count;
  r.holds = r.midpoint_violations == 0 && r.gradient_violations == 0;
  return r;
}

/// Lower bound 1/(n_a - n) on any C-0 constant when tau <= alpha.
inline double rigidity_floor(const ExponentSet& e) {
  if (e.n_a_infinite() || e.critical() || e.n_a < e.n) throw Error(ErrorKind::not_applicable, "needs finite n_a > n");
  return 1.0 / (e.n_a - e.n);
}

/// True unless tau <= alpha and the estimate sits below the floor by more than tol.
inline bool consistent_with_floor(double estimate, const ExponentSet& e, double tol = 1e-3) {
  if (e.tau > e.alpha || e.n_a_infinite() || e.critical()) return true;
  return estimate >= rigidity_floor(e) - tol;
}

}  // namespace wsi
