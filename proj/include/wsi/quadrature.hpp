#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "cone.hpp"
#include "error.hpp"
#include "random.hpp"
#include "vec.hpp"
#include "weight.hpp"

namespace wsi {

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;  // absolute; a standard error for Monte Carlo
  std::string method;
};

struct QuadratureOptions {
  double tolerance = 1e-11;
  long mc_samples = 1L << 17;
  std::uint64_t seed = 20240601;
  int polyhedral_resolution = 600;
};

inline double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

namespace detail {

inline double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

/// Tanh-sinh on [lo, hi]; f receives (distance to lo, distance to hi), both
/// accurate near their own endpoint. Non-finite samples (which only occur at
/// rounding distance from a singular endpoint) are dropped.
template <class F>
IntegralEstimate tanh_sinh_endpoints(F&& f, double lo, double hi, double tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
  double len = hi - lo;
  auto g = [&](double x, double xc) {
    double dlo, dhi;
    if (xc < 0) {
      dlo = -xc;
      dhi = len - dlo;
    } else if (xc > 0) {
      dhi = xc;
      dlo = len - dhi;
    } else {
      dlo = x - lo;
      dhi = hi - x;
    }
    return finite_or_zero(f(dlo, dhi));
  };
  double err = 0.0, l1 = 0.0;
  try {
    double v = ts.integrate(g, lo, hi, tol, &err, &l1);
    return {v, err, "tanh_sinh"};
  } catch (const std::exception& e) {
    throw Error(ErrorKind::quadrature_failure, e.what());
  }
}

// cos/sin with multiples of pi/2 snapped to exact zeros
inline double snap(double v) { return std::abs(v) < 1e-15 ? 0.0 : v; }

/// Unit vector at angle lo + dlo (or hi - dhi), built from the nearer endpoint.
inline std::pair<double, double> angle_dir(double lo, double hi, double dlo, double dhi) {
  if (dlo <= dhi) {
    double c = std::cos(dlo), s = std::sin(dlo);
    double cl = snap(std::cos(lo)), sl = snap(std::sin(lo));
    return {cl * c - sl * s, sl * c + cl * s};
  }
  double c = std::cos(dhi), s = std::sin(dhi);
  double ch = snap(std::cos(hi)), sh = snap(std::sin(hi));
  return {ch * c + sh * s, sh * c - ch * s};
}

inline Point cross3(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline Point any_orthogonal(const Point& a) {
  Point t = std::abs(a[0]) < 0.9 ? Point{1, 0, 0} : Point{0, 1, 0};
  return normalized(cross3(a, t));
}

/// Spherical frame on S^2: x = cos(th) a + sin(th) (cos(ph) u + sin(ph) v),
/// th in (0, th_max), ph in arc.
struct SphereFrame {
  Point a, u, v;
  double th_max = std::numbers::pi;
  Arc arc;
};

inline std::optional<SphereFrame> frame_for(const ConvexCone& cone) {
  const auto& N = cone.normals();
  auto is_orth = [](const Point& x, const Point& y) { return std::abs(dot(x, y)) < 1e-13; };
  auto arc_in_plane = [](const Point& u, const Point& v, const std::vector<Point>& ns) -> std::optional<Arc> {
    if (ns.empty()) return Arc{0.0, 2.0 * std::numbers::pi};
    std::vector<Point> proj;
    for (const auto& nv : ns) proj.push_back({dot(nv, u), dot(nv, v)});
    try {
      const auto& a = ConvexCone::halfspaces(proj).arc();
      return a;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  SphereFrame fr;
  if (N.empty()) {
    fr.a = {0, 0, 1};
    fr.u = {1, 0, 0};
    fr.v = {0, 1, 0};
    return fr;
  }
  // One normal orthogonal to all the others: it becomes the polar axis.
  for (std::size_t k = 0; k < N.size(); ++k) {
    bool ok = true;
    std::vector<Point> rest;
    for (std::size_t j = 0; j < N.size(); ++j) {
      if (j == k) continue;
      if (!is_orth(N[j], N[k])) ok = false;
      rest.push_back(N[j]);
    }
    if (!ok) continue;
    fr.a = N[k];
    fr.u = any_orthogonal(fr.a);
    fr.v = cross3(fr.a, fr.u);
    fr.th_max = std::numbers::pi / 2;
    auto arc = arc_in_plane(fr.u, fr.v, rest);
    if (!arc) throw Error(ErrorKind::empty_cone, "cone has empty interior");
    fr.arc = *arc;
    return fr;
  }
  // All normals orthogonal to a common axis: a wedge around that axis.
  for (std::size_t j = 1; j < N.size(); ++j) {
    Point c = cross3(N[0], N[j]);
    if (norm(c) < 1e-12) continue;
    Point a = normalized(c);
    bool ok = true;
    for (const auto& nv : N)
      if (!is_orth(nv, a)) ok = false;
    if (!ok) return std::nullopt;
    fr.a = a;
    fr.u = any_orthogonal(a);
    fr.v = cross3(a, fr.u);
    auto arc = arc_in_plane(fr.u, fr.v, N);
    if (!arc) throw Error(ErrorKind::empty_cone, "cone has empty interior");
    fr.arc = *arc;
    return fr;
  }
  return std::nullopt;
}

}  // namespace detail

/// Integral of f over S^{n-1} cut by the cone.
template <class F>
IntegralEstimate sphere_integral(const ConvexCone& cone, F&& f, const QuadratureOptions& opt = {}) {
  int n = cone.dimension();
  if (n == 1) {
    double s = 0.0;
    for (double x : {1.0, -1.0}) {
      Point p{x};
      if (cone.contains(p)) s += f(p);
    }
    return {s, 0.0, "points"};
  }
  if (n == 2) {
    if (!cone.arc()) throw Error(ErrorKind::empty_cone, "cone has empty interior");
    Arc a = *cone.arc();
    Point x(2);
    return detail::tanh_sinh_endpoints(
        [&](double dlo, double dhi) {
          auto [c, s] = detail::angle_dir(a.lo, a.hi, dlo, dhi);
          x[0] = c;
          x[1] = s;
          return f(x);
        },
        a.lo, a.hi, opt.tolerance);
  }
  if (n == 3) {
    auto fr = detail::frame_for(cone);
    if (fr) {
      Point x(3);
      double err_sum = 0.0;
      auto outer = detail::tanh_sinh_endpoints(
          [&](double tlo, double thi) {
            // sin and cos of th, taken from whichever end is closer
            double st, ct;
            if (tlo <= thi) {
              st = std::sin(tlo);
              ct = std::cos(tlo);
            } else if (fr->th_max < 3.0) {
              st = std::cos(thi);
              ct = std::sin(thi);
            } else {
              st = std::sin(thi);
              ct = -std::cos(thi);
            }
            auto inner = detail::tanh_sinh_endpoints(
                [&](double dlo, double dhi) {
                  auto [c, s] = detail::angle_dir(fr->arc.lo, fr->arc.hi, dlo, dhi);
                  for (int i = 0; i < 3; ++i) x[i] = ct * fr->a[i] + st * (c * fr->u[i] + s * fr->v[i]);
                  return f(x);
                },
                fr->arc.lo, fr->arc.hi, opt.tolerance);
            err_sum += inner.error * st;
            return inner.value * st;
          },
          0.0, fr->th_max, opt.tolerance);
      outer.error += err_sum / 1e3;
      outer.method = "tanh_sinh_product";
      return outer;
    }
    // General polyhedral cone: midpoint rule in (z, phi) with a membership
    // indicator; error from the difference of two resolutions.
    auto rule = [&](int m) {
      double s = 0.0;
      double dz = 2.0 / m, dp = 2.0 * std::numbers::pi / (2 * m);
      Point x(3);
      for (int i = 0; i < m; ++i) {
        double z = -1.0 + (i + 0.5) * dz;
        double r = std::sqrt(1.0 - z * z);
        for (int j = 0; j < 2 * m; ++j) {
          double ph = (j + 0.5) * dp;
          x = {r * std::cos(ph), r * std::sin(ph), z};
          if (cone.contains(x)) s += detail::finite_or_zero(f(x));
        }
      }
      return s * dz * dp;
    };
    double coarse = rule(opt.polyhedral_resolution / 2);
    double fine = rule(opt.polyhedral_resolution);
    return {fine, std::abs(fine - coarse), "midpoint_indicator"};
  }
  // n > 3: Monte Carlo stratified over the 2^n coordinate orthants.
  Rng rng(opt.seed);
  long strata = 1L << n;
  long per = std::max(4L, opt.mc_samples / strata);
  double w = sphere_area(n) / static_cast<double>(strata);
  double total = 0.0, var = 0.0;
  Point x(n);
  for (long s = 0; s < strata; ++s) {
    double m1 = 0.0, m2 = 0.0;
    for (long k = 0; k < per; ++k) {
      double l = 0.0;
      for (int i = 0; i < n; ++i) {
        x[i] = rng.normal();
        l += x[i] * x[i];
      }
      l = std::sqrt(l);
      for (int i = 0; i < n; ++i) x[i] = ((s >> i) & 1 ? -1.0 : 1.0) * std::abs(x[i]) / l;
      double v = cone.contains(x) ? detail::finite_or_zero(f(x)) : 0.0;
      m1 += v;
      m2 += v * v;
    }
    m1 /= per;
    m2 /= per;
    total += w * m1;
    var += w * w * std::max(0.0, m2 - m1 * m1) / static_cast<double>(per - 1);
  }
  return {total, std::sqrt(var), "stratified_monte_carlo"};
}

/// Integral of w over B cap E through the homogeneity reduction
/// (1/(deg + n)) * integral over S cap E.
inline IntegralEstimate cone_ball_integral(const ConvexCone& cone, const HomogeneousWeight& w, const QuadratureOptions& opt = {}) {
  double k = w.degree() + cone.dimension();
  if (!(k > 0.0)) throw Error(ErrorKind::nonintegrable, "degree + n must be positive, got " + std::to_string(k));
  auto s = sphere_integral(cone, [&](const Point& x) { return w.value(x); }, opt);
  return {s.value / k, s.error / k, s.method};
}

/// Integral over (a, b); either end may be singular.
template <class F>
IntegralEstimate integrate_interval(F&& f, double a, double b, double tol = 1e-11) {
  return detail::tanh_sinh_endpoints([&](double dlo, double dhi) { return dlo <= dhi ? f(a + dlo) : f(b - dhi); }, a, b, tol);
}

/// Smooth integrand over (a, b) with Gauss-Kronrod; cheaper than tanh-sinh.
template <class F>
IntegralEstimate integrate_smooth(F&& f, double a, double b, double tol = 1e-12) {
  double err = 0.0;
  try {
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, tol, &err);
    return {v, err, "gauss_kronrod"};
  } catch (const std::exception& e) {
    throw Error(ErrorKind::quadrature_failure, e.what());
  }
}

/// Integral over (0, inf).
template <class F>
IntegralEstimate integrate_half_line(F&& f, double tol = 1e-11) {
  thread_local boost::math::quadrature::exp_sinh<double> es;
  double err = 0.0, l1 = 0.0;
  try {
    double v = es.integrate([&](double t) { return detail::finite_or_zero(f(t)); }, 0.0, std::numeric_limits<double>::infinity(), tol, &err, &l1);
    return {v, err, "exp_sinh"};
  } catch (const std::exception& e) {
    throw Error(ErrorKind::quadrature_failure, e.what());
  }
}

}  // namespace wsi
