#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "conditions.hpp"
#include "densities.hpp"
#include "pattern_search.hpp"
#include "quadrature.hpp"
#include "setting.hpp"

namespace wsi {

struct ConstantResult {
  double k0 = 0.0;
  std::string v_star;          // best density found, or the closed form used
  std::vector<double> params;  // optimizer coordinates of v_star
  double quadrature_error = 0.0;
  std::string formula_branch;
  std::vector<double> trace;  // best value after each density evaluation
  std::vector<std::pair<std::string, double>> family_best;
};

enum class DensityFamily { gaussian_bump, talenti, uniform_cap };

inline const char* to_string(DensityFamily f) {
  switch (f) {
    case DensityFamily::gaussian_bump: return "gaussian_bump";
    case DensityFamily::talenti: return "talenti";
    case DensityFamily::uniform_cap: return "uniform_cap";
  }
  return "?";
}

struct K0SearchOptions {
  std::vector<DensityFamily> families{DensityFamily::talenti, DensityFamily::gaussian_bump, DensityFamily::uniform_cap};
  int budget = 200;  // density evaluations per family
  DensityOptions density;
};

/// max{C0 (1 - n/n_a), 1/n_a}; reduces to C0 when n_a = inf.
inline double c0_tilde(const ExponentSet& e, double c0) {
  if (e.n_a_infinite()) return c0;
  return std::max(c0 * (1.0 - e.n / e.n_a), 1.0 / e.n_a);
}

/// Checks the condition against n_a and returns the clause label.
inline Branch checked_branch(const ExponentSet& e, const ConditionConstant& c) {
  if (e.critical()) {
    if (c.condition != Condition::C1) throw Error(ErrorKind::branch_mismatch, "n_a = n needs the C-1 constant");
    return Branch::second;
  }
  if (c.condition != Condition::C0) throw Error(ErrorKind::branch_mismatch, "n_a > n needs the C-0 constant");
  if (!(c.value > 0.0) || !std::isfinite(c.value)) throw Error(ErrorKind::invalid_argument, "condition constant must be positive and finite");
  return Branch::first;
}

/// Factor in front of the density ratio: C~0 q (1/p' + 1/q) or (C1/n) q (1/p' + 1/q).
inline double k0_prefactor(const ExponentSet& e, const ConditionConstant& c) {
  double tail = e.q * (e.inv_p_conj() + e.inv_q());
  return checked_branch(e, c) == Branch::second ? c.value / e.n * tail : c0_tilde(e, c.value) * tail;
}

inline ConstantResult k0_general(const WeightedSetting& s, const ConditionConstant& c, const K0SearchOptions& opt = {}) {
  const ExponentSet& e = s.exps;
  if (e.p_is_one()) throw Error(ErrorKind::not_applicable, "p = 1 uses the closed form constant");
  Branch b = checked_branch(e, c);
  double pre = k0_prefactor(e, c);
  int n = s.n();
  const Point& axis = s.cone.axis();
  ConstantResult out;
  out.formula_branch = b == Branch::first ? "density bound, fractional dimension n_a > n" : "density bound, n_a = n";
  out.k0 = std::numeric_limits<double>::infinity();
  double best_err = 0.0;
  auto ratio_of = [&](const TestDensity& v) -> std::pair<double, double> {
    try {
      auto m = density_moments(v, s, b, opt.density);
      double r = density_ratio(m, e, b);
      if (!std::isfinite(r) || !(r > 0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
      return {r, m.error};
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::invalid_argument) throw;
      return {std::numeric_limits<double>::infinity(), 0.0};
    }
  };
  for (DensityFamily f : opt.families) {
    if (f != DensityFamily::talenti && n != 2 && n != 3) continue;
    std::function<TestDensity(const std::vector<double>&)> make;
    std::vector<double> z0;
    PatternSearchOptions po;
    po.max_evaluations = opt.budget;
    po.max_iterations = std::numeric_limits<int>::max();
    po.min_step = 1e-6;
    switch (f) {
      case DensityFamily::talenti:
        make = [&](const std::vector<double>& z) -> TestDensity { return TalentiDensity{1.0, std::exp(z[1]), z[0], {}}; };
        z0 = {0.0, std::log(e.tau + n)};
        po.steps = {0.25, 0.25};
        break;
      case DensityFamily::gaussian_bump:
        make = [&](const std::vector<double>& z) -> TestDensity { return GaussianBump{scaled(axis, z[0]), 1.0}; };
        z0 = {2.0};
        po.steps = {0.5};
        break;
      case DensityFamily::uniform_cap:
        make = [&](const std::vector<double>& z) -> TestDensity { return UniformCap{scaled(axis, z[0]), 1.0}; };
        z0 = {0.5};
        po.steps = {0.25};
        break;
    }
    if (axis.empty()) continue;
    double fam_best = std::numeric_limits<double>::infinity();
    auto ps = minimize_pattern(
        [&](const std::vector<double>& z) {
          auto [r, err] = ratio_of(make(z));
          double k = pre * r;
          if (k < out.k0) {
            out.k0 = k;
            out.v_star = describe(make(z));
            out.params = z;
            best_err = err;
          }
          fam_best = std::min(fam_best, k);
          out.trace.push_back(out.k0);
          return r;
        },
        z0, po);
    out.family_best.emplace_back(to_string(f), fam_best);
  }
  if (!std::isfinite(out.k0)) throw Error(ErrorKind::quadrature_failure, "no test density produced a finite ratio");
  out.quadrature_error = best_err * out.k0;
  return out;
}

/// Closed form for p = 1 from ball integrals.
inline ConstantResult k0_p1(const WeightedSetting& s, const ConditionConstant& c, const QuadratureOptions& q = {}) {
  const ExponentSet& e = s.exps;
  if (!e.p_is_one()) throw Error(ErrorKind::not_applicable, "closed form needs p = 1");
  Branch b = checked_branch(e, c);
  ConstantResult out;
  auto bw = cone_ball_integral(s.cone, s.omega, q);
  if (b == Branch::first) {
    auto bs = cone_ball_integral(s.cone, s.sigma, q);
    double expo = 1.0 - e.inv_n_a();
    out.k0 = c0_tilde(e, c.value) * std::pow(bw.value, expo) / bs.value;
    out.quadrature_error = out.k0 * (expo * bw.error / bw.value + bs.error / bs.value);
    out.formula_branch = "ball ratio, fractional dimension n_a > n";
  } else {
    double expo = 1.0 - 1.0 / e.n;
    auto bp = cone_ball_integral(s.cone, HomogeneousWeight::power(s.omega, expo), q);
    out.k0 = c.value / e.n * std::pow(bw.value, expo) / bp.value;
    out.quadrature_error = out.k0 * (expo * bw.error / bw.value + bp.error / bp.value);
    out.formula_branch = "ball ratio, n_a = n";
  }
  out.v_star = "indicator of the unit ball in the cone";
  out.trace = {out.k0};
  return out;
}

namespace detail {

inline double sharp_equal_at(const WeightedSetting& s, double gamma, double& err) {
  const ExponentSet& e = s.exps;
  int n = s.n();
  double pc = e.p_conj, k = (n + e.alpha - e.p) / e.p, th = 1.0 - e.inv_n_a();
  auto radial = [&](double power, double extra) {
    return integrate_half_line([&](double r) { return std::pow(gamma + std::pow(r, pc), -power) * std::pow(r, extra + e.alpha + n - 1); });
  };
  auto a = radial(e.q * k, pc), b = radial(e.q * k, 0.0), c = radial(e.q * k * th, 0.0);
  auto sw = sphere_integral(s.cone, [&](const Point& y) { return s.sigma.value(y); });
  double na = e.n_a;
  double pre = e.p * (na - 1.0) / (na * (na - e.p));
  double S = sw.value;
  err = a.error / a.value + b.error / b.value + c.error / c.value + sw.error / S;
  return pre * std::pow(a.value * S, e.inv_p_conj()) * std::pow(b.value * S, e.inv_q()) / (c.value * S);
}

}  // namespace detail

/// Sharp constant for equal weights. p = 1: (1/n_a) |σ(B cap E)|^{-1/n_a}; p > 1: the
/// Talenti profile quotient, evaluated at gamma and 4 gamma.
inline ConstantResult k0_sharp_equal(const HomogeneousWeight& sigma, const ExponentSet& e, const ConvexCone& cone, double gamma = 1.0) {
  if (std::abs(e.tau - e.alpha) > 1e-12 * std::max(1.0, std::abs(e.alpha)) || std::abs(sigma.degree() - e.alpha) > 1e-12 * std::max(1.0, std::abs(e.alpha)))
    throw Error(ErrorKind::not_equal_weights, "sharp constant needs tau = alpha = deg sigma");
  if (e.alpha < 0.0) throw Error(ErrorKind::assumption_violation, "alpha >= 0");
  WeightedSetting s{cone, sigma, sigma, e};
  ConstantResult out;
  if (e.p_is_one()) {
    auto bs = cone_ball_integral(cone, sigma);
    out.k0 = e.inv_n_a() * std::pow(bs.value, -e.inv_n_a());
    out.quadrature_error = out.k0 * e.inv_n_a() * bs.error / bs.value;
    out.formula_branch = "sharp equal weights, p = 1";
    out.v_star = "indicator of the unit ball in the cone";
    return out;
  }
  double e1 = 0, e2 = 0;
  double k1 = detail::sharp_equal_at(s, gamma, e1), k2 = detail::sharp_equal_at(s, 4.0 * gamma, e2);
  if (std::abs(k1 - k2) > 1e-3 * std::abs(k1))
    throw Error(ErrorKind::gamma_dependence, "profile quotient differs between gamma and 4 gamma: " + std::to_string(k1) + " vs " + std::to_string(k2));
  out.k0 = k1;
  out.params = {gamma, k2};
  out.quadrature_error = std::max(std::abs(k1 - k2), k1 * e1);
  out.formula_branch = "sharp equal weights, Talenti profile";
  out.v_star = "talenti gamma=" + std::to_string(gamma);
  return out;
}

/// Overload that first checks ω is a constant multiple of σ on sampled directions.
inline ConstantResult k0_sharp_equal(const HomogeneousWeight& omega, const HomogeneousWeight& sigma, const ExponentSet& e, const ConvexCone& cone,
                                     double gamma = 1.0) {
  auto pts = sample_cone_sphere(cone, 64, 99);
  double r0 = omega.value(pts[0]) / sigma.value(pts[0]);
  for (const auto& x : pts)
    if (std::abs(omega.value(x) / sigma.value(x) - r0) > 1e-10 * r0) throw Error(ErrorKind::not_equal_weights, "omega is not a multiple of sigma");
  if (std::abs(r0 - 1.0) > 1e-12) throw Error(ErrorKind::not_equal_weights, "omega must equal sigma");
  return k0_sharp_equal(sigma, e, cone, gamma);
}

struct CknParameters {
  double r = 0.0;
  double d = 0.0;
  double tau = 0.0;
  double alpha = 0.0;
  ExponentSet exps;
};

/// Maps the radial-weight exponents (p, beta, gamma) to (tau, alpha, q = r) through
/// T(x) = |x|^{d-1} x, with d the smallest half-integer making tau/p' + alpha/p > 0.
inline CknParameters ckn_parameters(int n, double p, double beta, double gamma) {
  if (n < 2 || !(p >= 1.0)) throw Error(ErrorKind::range_violation, "n >= 2 and p >= 1");
  double bg = beta - gamma;
  if (bg < -1e-14 || bg > 1.0 + 1e-14) throw Error(ErrorKind::assumption_violation, "0 <= beta - gamma <= 1");
  double inv_r = 1.0 / p + (beta - 1.0) / n - gamma / n;
  if (!(inv_r > 0.0)) throw Error(ErrorKind::assumption_violation, "r > 0");
  if (!(inv_r + gamma / n > 0.0)) throw Error(ErrorKind::assumption_violation, "1/r + gamma/n > 0");
  CknParameters c;
  c.r = 1.0 / inv_r;
  double ipc = p == 1.0 ? 0.0 : 1.0 - 1.0 / p;
  double den = n - 1.0 + beta + gamma * c.r * ipc;
  if (!(den > 0.0)) throw Error(ErrorKind::assumption_violation, "n - 1 + beta + gamma r / p' > 0");
  double need = std::max(1.0, (n - 1.0) / den);
  c.d = std::floor(need * 2.0) / 2.0 + 0.5;
  c.tau = n * (c.d - 1.0) + gamma * c.r * c.d;
  c.alpha = (n - p) * (c.d - 1.0) + beta * p * c.d;
  c.exps = validate_exponents(n, p, c.tau, c.alpha);
  if (std::abs(c.exps.q - c.r) > 1e-9 * c.r) throw Error(ErrorKind::assumption_violation, "mapped q differs from r");
  return c;
}

/// M^{1/p'} max K_i for M disjoint cones.
inline double additive_k0(const std::vector<std::pair<ConvexCone, double>>& parts, double p) {
  if (parts.empty()) throw Error(ErrorKind::empty_parts, "need at least one part");
  double mx = 0.0;
  for (const auto& pr : parts) mx = std::max(mx, pr.second);
  double ipc = p == 1.0 ? 0.0 : 1.0 - 1.0 / p;
  return std::pow(static_cast<double>(parts.size()), ipc) * mx;
}

inline WeightedSetting heisenberg_setting(double p) {
  return make_setting(ConvexCone::halfspaces({{0.0, 1.0}}), HomogeneousWeight::constant(1.0), HomogeneousWeight::monomial({0.0, p / 2}), p);
}

/// 5 pi^{5/4} / (2^{13/4} Gamma(3/4)^2)
inline double heisenberg_p1_closed_form() {
  double g = std::tgamma(0.75);
  return 5.0 * std::pow(std::numbers::pi, 1.25) / (std::pow(2.0, 3.25) * g * g);
}

/// 3^{3/4} / (4 sqrt(pi)), the optimal constant claimed in the literature.
inline double pansu_constant() { return std::pow(3.0, 0.75) / (4.0 * std::sqrt(std::numbers::pi)); }

inline ConstantResult heisenberg_constant(double p, const K0SearchOptions& opt = {}) {
  if (!(p >= 1.0) || !(p < 4.0)) throw Error(ErrorKind::range_violation, "1 <= p < 4");
  WeightedSetting s = heisenberg_setting(p);
  ConditionConstant c{Condition::C0, monomial_c0({0.0, 0.0}, {0.0, p / 2}, p, 2)};
  if (p == 1.0) {
    ConstantResult out;
    out.k0 = heisenberg_p1_closed_form();
    out.formula_branch = "closed form, p = 1";
    out.v_star = "indicator of the unit half disk";
    out.quadrature_error = 1e-15 * out.k0;
    return out;
  }
  return k0_general(s, c, opt);
}

}  // namespace wsi
