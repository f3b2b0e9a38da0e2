#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "densities.hpp"
#include "grid_function.hpp"
#include "pattern_search.hpp"
#include "quadrature.hpp"
#include "setting.hpp"

namespace wsi {

inline double sobolev_quotient(const GridFunction& u, const HomogeneousWeight& omega, const HomogeneousWeight& sigma, const ExponentSet& e) {
  double den = weighted_grad_lp_norm(u, sigma, e.p);
  if (!(den > 0.0)) throw Error(ErrorKind::zero_gradient, "test function has zero weighted gradient");
  return weighted_lq_norm(u, omega, e.q) / den;
}

inline double sobolev_quotient(const GridFunction& u, const WeightedSetting& s) { return sobolev_quotient(u, s.omega, s.sigma, s.exps); }

/// ∫|∇u|²σ / ∫u²ω on the grid.
inline double rayleigh_quotient(const GridFunction& u, const HomogeneousWeight& omega, const HomogeneousWeight& sigma) {
  double num = weighted_grad_lp_norm(u, sigma, 2.0), den = weighted_lq_norm(u, omega, 2.0);
  if (!(den > 0.0)) throw Error(ErrorKind::invalid_argument, "trial function vanishes");
  return num * num / (den * den);
}

namespace detail {

/// C^∞ step: 0 for x <= 0, 1 for x >= 1.
inline double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

inline double smooth_step_deriv(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  double da = a / (x * x), db = -b / ((1.0 - x) * (1.0 - x));
  return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

/// exp(-1/(1-|y|²)) on the unit ball.
inline double unit_bump(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

/// Cubic ramp from 1 at t <= -1/2 to 0 at t >= 1/2.
inline double cap_profile(double t) {
  if (t <= -0.5) return 1.0;
  if (t >= 0.5) return 0.0;
  double s = 0.5 - t;
  return s * s * (3.0 - 2.0 * s);
}

inline std::vector<int> cube_res(int n, int res) { return std::vector<int>(n, res); }

inline int grid_for(int n, int grid2, int grid3) {
  if (n == 2) return grid2;
  if (n == 3) return grid3;
  throw Error(ErrorKind::not_applicable, "grid verification supports n = 2, 3");
}

struct Fit {
  double slope = 0.0, error = 0.0;
};

/// Least squares slope of y against x over the last half of the points.
inline Fit tail_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size(), start = n / 2, m = n - start;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = start; i < n; ++i) mx += x[i], my += y[i];
  mx /= m, my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = start; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  Fit f;
  f.slope = sxy / sxx;
  if (m > 2) {
    double rss = 0.0;
    for (std::size_t i = start; i < n; ++i) {
      double r = y[i] - my - f.slope * (x[i] - mx);
      rss += r * r;
    }
    f.error = std::sqrt(rss / (m - 2) / sxx);
  }
  return f;
}

inline void check_parameter_list(const std::vector<double>& v, const char* what) {
  if (v.size() < 4) throw Error(ErrorKind::invalid_argument, std::string("need at least 4 ") + what + " for a slope fit");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw Error(ErrorKind::invalid_argument, std::string(what) + " must be strictly increasing");
}

}  // namespace detail

/// Quotient of a radial profile f with derivative df, by 1D quadrature in r
/// times sphere integrals of ω and σ.
template <class F, class DF>
double radial_quotient(const WeightedSetting& s, F&& f, DF&& df, const QuadratureOptions& opt = {}) {
  const ExponentSet& e = s.exps;
  int n = s.n();
  auto so = sphere_integral(s.cone, [&](const Point& y) { return s.omega.value(y); }, opt);
  auto ss = sphere_integral(s.cone, [&](const Point& y) { return s.sigma.value(y); }, opt);
  auto a = integrate_half_line([&](double r) { return std::pow(std::abs(f(r)), e.q) * std::pow(r, e.tau + n - 1); });
  auto b = integrate_half_line([&](double r) { return std::pow(std::abs(df(r)), e.p) * std::pow(r, e.alpha + n - 1); });
  return std::pow(so.value * a.value, e.inv_q()) / std::pow(ss.value * b.value, e.inv_p());
}

enum class QuotientFamily { talenti, gaussian_bump, smoothed_cap };

inline const char* to_string(QuotientFamily f) {
  switch (f) {
    case QuotientFamily::talenti: return "talenti";
    case QuotientFamily::gaussian_bump: return "gaussian_bump";
    case QuotientFamily::smoothed_cap: return "smoothed_cap";
  }
  return "?";
}

struct QuotientOptions {
  int grid2 = 256;
  int grid3 = 96;
  int budget = 40;
  double min_smoothing_cells = 3.0;
  QuadratureOptions quad;
};

struct QuotientSearchResult {
  QuotientFamily family = QuotientFamily::talenti;
  double quotient = 0.0;
  std::vector<double> params;
  std::string description;
  int evaluations = 0;
  std::vector<double> trace;
};

/// Talenti profile (γ + r^{p'})^{-m}, origin centred. The quotient has a closed form.
inline double talenti_quotient(const WeightedSetting& s, double gamma, double m, const QuadratureOptions& opt = {}) {
  const ExponentSet& e = s.exps;
  if (e.p_is_one()) throw Error(ErrorKind::not_applicable, "talenti profiles need p > 1");
  int n = s.n();
  double pc = e.p_conj;
  auto so = sphere_integral(s.cone, [&](const Point& y) { return s.omega.value(y); }, opt);
  auto ss = sphere_integral(s.cone, [&](const Point& y) { return s.sigma.value(y); }, opt);
  double a = detail::talenti_radial(gamma, pc, e.q * m, e.tau + n - 1);
  double b = std::pow(m * pc, e.p) * detail::talenti_radial(gamma, pc, e.p * (m + 1), e.p * (pc - 1) + e.alpha + n - 1);
  return std::pow(so.value * a, e.inv_q()) / std::pow(ss.value * b, e.inv_p());
}

/// Smoothed indicator of B(center, radius) with a ramp of width `smoothing`.
inline GridFunction smoothed_cap(const ConvexCone& cone, const Point& center, double radius, double smoothing, int res) {
  int n = cone.dimension();
  double L = radius + smoothing;
  Point lo = center, hi = center;
  for (int i = 0; i < n; ++i) lo[i] -= L * 1.02, hi[i] += L * 1.02;
  return GridFunction::sample(cone, lo, hi, detail::cube_res(n, res),
                              [&](const Point& x) { return detail::cap_profile((distance(x, center) - radius) / smoothing); });
}

/// exp(-|x - c|²/(2w²)) on the box c ± 7w.
inline GridFunction gaussian_bump(const ConvexCone& cone, const Point& center, double width, int res) {
  int n = cone.dimension();
  Point lo = center, hi = center;
  for (int i = 0; i < n; ++i) lo[i] -= 7 * width, hi[i] += 7 * width;
  double w2 = 2 * width * width;
  return GridFunction::sample(cone, lo, hi, detail::cube_res(n, res), [&](const Point& x) {
    double d = distance(x, center);
    return std::exp(-d * d / w2);
  });
}

/// v((x - c)/r) for the compact bump v = exp(-1/(1-|y|²)).
inline GridFunction compact_bump(const ConvexCone& cone, const Point& center, double radius, int res) {
  int n = cone.dimension();
  Point lo = center, hi = center;
  for (int i = 0; i < n; ++i) lo[i] -= radius, hi[i] += radius;
  return GridFunction::sample(cone, lo, hi, detail::cube_res(n, res), [&](const Point& x) {
    double d = distance(x, center) / radius;
    return detail::unit_bump(d * d);
  });
}

/// Pattern search for the largest quotient within one family. The result is a
/// lower bound for the best constant.
inline QuotientSearchResult maximize_quotient(const WeightedSetting& s, QuotientFamily fam, const QuotientOptions& opt = {}) {
  int n = s.n();
  const Point& axis = s.cone.axis();
  QuotientSearchResult out;
  out.family = fam;
  PatternSearchOptions po;
  po.max_evaluations = opt.budget;
  po.max_iterations = std::numeric_limits<int>::max();
  po.min_step = 1e-4;
  std::vector<double> z0;
  std::function<double(const std::vector<double>&)> f;
  std::function<std::string(const std::vector<double>&)> desc;
  auto guarded = [](auto&& g) {
    return [g](const std::vector<double>& z) {
      try {
        return g(z);
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::zero_gradient || err.kind() == ErrorKind::outside_cone) return -std::numeric_limits<double>::infinity();
        throw;
      }
    };
  };
  switch (fam) {
    case QuotientFamily::talenti: {
      if (s.exps.p_is_one()) throw Error(ErrorKind::not_applicable, "talenti profiles need p > 1");
      double m0 = (n + s.exps.alpha - s.exps.p) / s.exps.p;
      z0 = {0.0, std::log(m0)};
      po.steps = {0.5, 0.1};
      f = guarded([&](const std::vector<double>& z) { return talenti_quotient(s, std::exp(z[0]), std::exp(z[1]), opt.quad); });
      desc = [](const std::vector<double>& z) {
        std::ostringstream os;
        os.precision(8);
        os << "talenti gamma=" << std::exp(z[0]) << " decay=" << std::exp(z[1]);
        return os.str();
      };
      break;
    }
    case QuotientFamily::gaussian_bump: {
      int res = detail::grid_for(n, opt.grid2, opt.grid3);
      z0 = {2.0};
      po.steps = {0.5};
      f = guarded([&, res](const std::vector<double>& z) {
        if (z[0] < 0.0) return -std::numeric_limits<double>::infinity();
        return sobolev_quotient(gaussian_bump(s.cone, scaled(axis, z[0]), 1.0, res), s);
      });
      desc = [&](const std::vector<double>& z) {
        std::ostringstream os;
        os.precision(8);
        os << "gaussian_bump center=" << z[0] << "*axis width=1";
        return os.str();
      };
      break;
    }
    case QuotientFamily::smoothed_cap: {
      int res = detail::grid_for(n, opt.grid2, opt.grid3);
      double smin = opt.min_smoothing_cells * 2.04 / res / (1.0 - 2.04 * opt.min_smoothing_cells / res);
      z0 = {0.0, std::max(0.1, smin)};
      po.steps = {0.25, 0.04};
      f = guarded([&, res, smin](const std::vector<double>& z) {
        if (z[0] < 0.0 || z[1] < smin || z[1] > 1.0) return -std::numeric_limits<double>::infinity();
        return sobolev_quotient(smoothed_cap(s.cone, scaled(axis, z[0]), 1.0, z[1], res), s);
      });
      desc = [&](const std::vector<double>& z) {
        std::ostringstream os;
        os.precision(8);
        os << "smoothed_cap center=" << z[0] << "*axis radius=1 smoothing=" << z[1];
        return os.str();
      };
      break;
    }
  }
  auto r = maximize_pattern(f, z0, po);
  out.quotient = r.value;
  out.params = r.x;
  out.description = desc(r.x);
  out.evaluations = r.evaluations;
  out.trace = r.trace;
  return out;
}

struct ProbeResult {
  std::vector<double> parameters;
  std::vector<double> quotients;
  double slope = 0.0;
  double slope_error = 0.0;
  double predicted = 0.0;
  // log probe only
  double left_exponent = std::numeric_limits<double>::quiet_NaN();
  double right_exponent = std::numeric_limits<double>::quiet_NaN();
  double predicted_left = std::numeric_limits<double>::quiet_NaN();
  double predicted_right = std::numeric_limits<double>::quiet_NaN();
  bool unbounded = false;
};

struct ProbeOptions {
  int grid2 = 128;
  int grid3 = 48;
};

/// Quotient of a fixed bump translated to δ y0. The slope of log Q against log δ
/// tends to τ/q - α/p, so a positive slope means no inequality can hold.
inline ProbeResult necessity_probe_shift(const HomogeneousWeight& omega, const HomogeneousWeight& sigma, const ExponentSet& e,
                                         const ConvexCone& cone, const Point& y0, const std::vector<double>& deltas,
                                         const ProbeOptions& opt = {}) {
  detail::check_parameter_list(deltas, "deltas");
  if (!(deltas.front() > 0.0)) throw Error(ErrorKind::invalid_argument, "deltas must be positive");
  int n = cone.dimension();
  if (static_cast<int>(y0.size()) != n) throw Error(ErrorKind::dimension_mismatch, "direction length");
  Point dir = normalized(y0);
  if (!cone.contains(dir)) throw Error(ErrorKind::outside_cone, "direction not in the cone");
  if (!(cone.boundary_distance(scaled(dir, deltas.front())) > 1.0))
    throw Error(ErrorKind::bump_exits_cone, "unit ball around the first shifted centre leaves the cone");
  int res = detail::grid_for(n, opt.grid2, opt.grid3);
  ProbeResult out;
  out.parameters = deltas;
  out.predicted = e.tau / e.q - e.alpha / e.p;
  std::vector<double> lx, ly;
  for (double d : deltas) {
    double qv = sobolev_quotient(compact_bump(cone, scaled(dir, d), 1.0, res), omega, sigma, e);
    out.quotients.push_back(qv);
    lx.push_back(std::log(d));
    ly.push_back(std::log(qv));
  }
  auto fit = detail::tail_slope(lx, ly);
  out.slope = fit.slope;
  out.slope_error = fit.error;
  return out;
}

/// Radial test functions |x|^{-β} log|x| φ(|x|/ε) h(|x|), β = (τ+n)/q. Returns
/// the growth exponents of both sides in log(1/ε); the sphere factors are constants
/// and are left out of the reported quotients.
inline ProbeResult necessity_probe_log(const ExponentSet& e, const ConvexCone& cone, const std::vector<double>& epsilons) {
  if (epsilons.size() < 4) throw Error(ErrorKind::invalid_argument, "need at least 4 epsilons for a slope fit");
  for (double eps : epsilons)
    if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorKind::invalid_argument, "epsilons must lie in (0, 1/2)");
  std::vector<double> sorted = epsilons;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (!(sorted[i] < sorted[i - 1])) throw Error(ErrorKind::invalid_argument, "epsilons must be distinct");
  (void)cone;
  int n = e.n;
  double beta = (e.tau + n) / e.q;
  double c = (-beta - 1.0) * e.p + e.alpha + n;
  ProbeResult out;
  out.predicted_left = 1.0 + 1.0 / e.q;
  out.predicted_right = 1.0 + 1.0 / e.p;
  out.predicted = out.predicted_left - out.predicted_right;
  std::vector<double> lx, yl, yr;
  for (double eps : sorted) {
    if (eps < std::numeric_limits<double>::min() * 4)
      throw Error(ErrorKind::resolution_insufficient, "epsilon below the representable range of the radial grid");
    double le = std::log(eps);
    // t = log r; φ(r/ε) switches on over [log ε, log 2ε], h(r) switches off over [0, log 2].
    auto phi = [&](double t) { return detail::smooth_step(std::exp(t - le) - 1.0); };
    auto dphi = [&](double t) { return std::exp(t - le) * detail::smooth_step_deriv(std::exp(t - le) - 1.0); };
    auto h = [&](double t) { return 1.0 - detail::smooth_step(std::exp(t) - 1.0); };
    auto dh = [&](double t) { return -std::exp(t) * detail::smooth_step_deriv(std::exp(t) - 1.0); };
    auto left = [&](double t) { return std::pow(std::abs(t * phi(t) * h(t)), e.q) * std::exp((e.tau + n - beta * e.q) * t); };
    auto right = [&](double t) {
      double g = (1.0 - beta * t) * phi(t) * h(t) + t * dphi(t) * h(t) + t * phi(t) * dh(t);
      return std::pow(std::abs(g), e.p) * std::exp(c * t);
    };
    double l2 = std::log(2.0);
    std::vector<double> cuts = {le, le + l2, 0.0, l2};
    double L = 0.0, R = 0.0, err = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      auto a = integrate_smooth(left, cuts[k], cuts[k + 1], 1e-12);
      auto b = integrate_smooth(right, cuts[k], cuts[k + 1], 1e-12);
      L += a.value, R += b.value;
      err = std::max({err, a.error / std::max(a.value, 1e-300), b.error / std::max(b.value, 1e-300)});
    }
    if (!(err < 1e-6) || !std::isfinite(L) || !std::isfinite(R))
      throw Error(ErrorKind::resolution_insufficient, "radial quadrature did not resolve the ring");
    double Ln = std::pow(L, 1.0 / e.q), Rn = std::pow(R, 1.0 / e.p);
    out.parameters.push_back(eps);
    out.quotients.push_back(Ln / Rn);
    lx.push_back(std::log(-le));
    yl.push_back(std::log(Ln));
    yr.push_back(std::log(Rn));
  }
  out.left_exponent = detail::tail_slope(lx, yl).slope;
  out.right_exponent = detail::tail_slope(lx, yr).slope;
  std::vector<double> yq;
  for (double v : out.quotients) yq.push_back(std::log(v));
  auto fit = detail::tail_slope(lx, yq);
  out.slope = fit.slope;
  out.slope_error = fit.error;
  out.unbounded = out.slope > 0.02;
  return out;
}

struct SpectralGapResult {
  double bound = 0.0;
  double best_ratio = 0.0;
  Point best_point;
  double best_width = 0.0;
  int bumps_used = 0;
};

/// Lower bound (1/(4 C0²)) sup_v (∫v ω^{-1/2} σ^{1/2})² / (∫v|y|² ∫v) over compact
/// bumps centred at the given points; bumps that would leave the cone are skipped.
inline SpectralGapResult spectral_gap_bound(const HomogeneousWeight& omega, const HomogeneousWeight& sigma, double c0, const ExponentSet& e,
                                            const ConvexCone& cone, const std::vector<Point>& centers, const std::vector<double>& widths,
                                            int res = 96) {
  if (std::abs(e.alpha - (e.tau + 2.0)) > 1e-12) throw Error(ErrorKind::assumption_violation, "alpha = tau + 2");
  if (!(c0 > 0.0)) throw Error(ErrorKind::invalid_argument, "C0 > 0");
  SpectralGapResult out;
  for (const auto& y0 : centers) {
    for (double w : widths) {
      if (!(cone.boundary_distance(y0) > w)) continue;
      auto v = compact_bump(cone, y0, w, res);
      double a = 0.0, m2 = 0.0, m0 = 0.0;
      Point x;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v.active(i) || v.value(i) == 0.0) continue;
        v.center(i, x);
        double val = v.value(i);
        a += val * std::sqrt(sigma.value(x) / omega.value(x));
        m2 += val * dot(x, x);
        m0 += val;
      }
      if (!(m0 > 0.0)) continue;
      ++out.bumps_used;
      double r = a * a / (m2 * m0);
      if (r > out.best_ratio) {
        out.best_ratio = r;
        out.best_point = y0;
        out.best_width = w;
      }
    }
  }
  if (out.bumps_used == 0) throw Error(ErrorKind::bump_exits_cone, "no bump fits inside the cone");
  out.bound = out.best_ratio / (4.0 * c0 * c0);
  return out;
}

}  // namespace wsi
