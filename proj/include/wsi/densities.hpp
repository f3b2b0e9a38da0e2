#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "quadrature.hpp"
#include "setting.hpp"
#include "vec.hpp"

namespace wsi {

/// exp(-|y - center|^2 / (2 width^2)) restricted to E.
struct GaussianBump {
  Point center;
  double width = 1.0;
};

/// (gamma + |y - shift|^{p'})^{-decay} * sigma^{1-tilt} * omega^{tilt}.
/// With decay = q(n + alpha - p)/p, tilt = 0 and omega = sigma this is u_gamma^q sigma.
/// An empty shift means the origin.
struct TalentiDensity {
  double gamma = 1.0;
  double decay = 0.0;
  double tilt = 0.0;
  Point shift;
};

/// Indicator of B(center, radius) cap E.
struct UniformCap {
  Point center;
  double radius = 1.0;
};

using TestDensity = std::variant<GaussianBump, TalentiDensity, UniformCap>;

inline std::string describe(const TestDensity& v) {
  std::ostringstream os;
  os.precision(10);
  auto pt = [&](const Point& x) {
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
  };
  if (auto g = std::get_if<GaussianBump>(&v)) {
    os << "gaussian_bump center=";
    pt(g->center);
    os << " width=" << g->width;
  } else if (auto t = std::get_if<TalentiDensity>(&v)) {
    os << "talenti gamma=" << t->gamma << " decay=" << t->decay << " tilt=" << t->tilt;
    if (!t->shift.empty()) {
      os << " shift=";
      pt(t->shift);
    }
  } else if (auto c = std::get_if<UniformCap>(&v)) {
    os << "uniform_cap center=";
    pt(c->center);
    os << " radius=" << c->radius;
  }
  return os.str();
}

/// Which clause of the constant formula: v^{1-1/n_a} h with h = ω^{-1/q} σ^{1/p},
/// or v^{1-1/n} with h = 1.
enum class Branch { first, second };

inline Branch branch_of(const ExponentSet& e) { return e.critical() ? Branch::second : Branch::first; }

/// Moments of an unnormalized density: mass = ∫v, moment = ∫v|y|^{p'}, core = ∫v^θ h.
struct DensityMoments {
  double mass = 0.0;
  double moment = 0.0;
  double core = 0.0;
  double error = 0.0;  // relative, rough
};

struct DensityOptions {
  int grid2 = 256;
  int grid3 = 48;
  QuadratureOptions quad;
};

namespace detail {

inline double exponent_theta(const ExponentSet& e, Branch b) { return b == Branch::second ? 1.0 - 1.0 / e.n : 1.0 - e.inv_n_a(); }

inline double h_value(const WeightedSetting& s, Branch b, const Point& y) {
  if (b == Branch::second) return 1.0;
  return std::exp(-s.exps.inv_q() * std::log(s.omega.value(y)) + s.exps.inv_p() * std::log(s.sigma.value(y)));
}

inline double h_degree(const ExponentSet& e, Branch b) { return b == Branch::second ? 0.0 : -e.tau / e.q + e.alpha / e.p; }

/// ∫_0^∞ (g + r^{pc})^{-m} r^k dr; NaN when divergent.
inline double talenti_radial(double g, double pc, double m, double k) {
  double a = (k + 1.0) / pc;
  if (!(k > -1.0) || !(m > a)) return std::nan("");
  return std::exp(std::log(1.0 / pc) + (a - m) * std::log(g) + std::lgamma(a) + std::lgamma(m - a) - std::lgamma(m));
}

/// Midpoint rule over the cells of [lo, hi] whose centres lie in the cone.
template <class F>
void for_each_cell(const ConvexCone& cone, const Point& lo, const Point& hi, int res, F&& f) {
  int n = cone.dimension();
  if (n != 2 && n != 3) throw Error(ErrorKind::invalid_argument, "grid quadrature supports n = 2, 3");
  std::array<double, 3> h{};
  double vol = 1.0;
  for (int i = 0; i < n; ++i) {
    h[i] = (hi[i] - lo[i]) / res;
    vol *= h[i];
  }
  Point y(n);
  int r3 = n == 3 ? res : 1;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j)
      for (int k = 0; k < r3; ++k) {
        y[0] = lo[0] + (i + 0.5) * h[0];
        y[1] = lo[1] + (j + 0.5) * h[1];
        if (n == 3) y[2] = lo[2] + (k + 0.5) * h[2];
        if (cone.contains(y)) f(y, vol);
      }
}

inline DensityMoments grid_moments(const WeightedSetting& s, Branch b, const Point& lo, const Point& hi, int res,
                                   const std::function<double(const Point&)>& v) {
  double pc = s.exps.p_conj, th = exponent_theta(s.exps, b);
  DensityMoments m;
  for_each_cell(s.cone, lo, hi, res, [&](const Point& y, double vol) {
    double val = v(y);
    if (!(val > 0.0)) return;
    double r = norm(y);
    m.mass += val * vol;
    m.moment += val * std::pow(r, pc) * vol;
    m.core += std::pow(val, th) * h_value(s, b, y) * vol;
  });
  return m;
}

}  // namespace detail

/// Moments of v for the given branch. Origin-centred Talenti densities separate
/// into closed-form radial integrals times sphere quadratures; the others use a
/// cone-masked midpoint grid (n = 2, 3).
inline DensityMoments density_moments(const TestDensity& v, const WeightedSetting& s, Branch b, const DensityOptions& opt = {}) {
  const ExponentSet& e = s.exps;
  if (e.p_is_one()) throw Error(ErrorKind::not_applicable, "density moments need p > 1");
  int n = s.n();
  double pc = e.p_conj, th = detail::exponent_theta(e, b);
  int res = n == 2 ? opt.grid2 : opt.grid3;
  if (auto t = std::get_if<TalentiDensity>(&v)) {
    double dW = (1.0 - t->tilt) * e.alpha + t->tilt * e.tau;
    auto W = [&](const Point& y) { return std::pow(s.sigma.value(y), 1.0 - t->tilt) * std::pow(s.omega.value(y), t->tilt); };
    if (t->shift.empty() || norm(t->shift) == 0.0) {
      auto sw = sphere_integral(s.cone, W, opt.quad);
      auto sh = sphere_integral(s.cone, [&](const Point& y) { return std::pow(W(y), th) * detail::h_value(s, b, y); }, opt.quad);
      DensityMoments m;
      m.mass = sw.value * detail::talenti_radial(t->gamma, pc, t->decay, dW + n - 1);
      m.moment = sw.value * detail::talenti_radial(t->gamma, pc, t->decay, dW + n - 1 + pc);
      m.core = sh.value * detail::talenti_radial(t->gamma, pc, th * t->decay, th * dW + detail::h_degree(e, b) + n - 1);
      m.error = sw.error / std::abs(sw.value) + sh.error / std::abs(sh.value);
      return m;
    }
    // Shifted profile: truncate where the moment tail is below 1e-6.
    double tail = t->decay * pc - dW - n - pc;
    if (!(tail > 0.0)) throw Error(ErrorKind::nonintegrable, "talenti decay too slow");
    double L = (std::pow(t->gamma, 1.0 / pc) + norm(t->shift)) * std::pow(1e6, 1.0 / tail);
    L = std::min(L, 1e3);
    Point lo(n, -L), hi(n, L);
    return detail::grid_moments(s, b, lo, hi, res, [&](const Point& y) {
      return std::pow(t->gamma + std::pow(distance(y, t->shift), pc), -t->decay) * W(y);
    });
  }
  if (auto g = std::get_if<GaussianBump>(&v)) {
    Point lo = g->center, hi = g->center;
    for (int i = 0; i < n; ++i) lo[i] -= 7 * g->width, hi[i] += 7 * g->width;
    double w2 = 2 * g->width * g->width;
    return detail::grid_moments(s, b, lo, hi, res, [&](const Point& y) {
      double d = distance(y, g->center);
      return std::exp(-d * d / w2);
    });
  }
  const auto& c = std::get<UniformCap>(v);
  Point lo = c.center, hi = c.center;
  for (int i = 0; i < n; ++i) lo[i] -= c.radius, hi[i] += c.radius;
  return detail::grid_moments(s, b, lo, hi, res, [&](const Point& y) { return distance(y, c.center) < c.radius ? 1.0 : 0.0; });
}

/// (∫v|y|^{p'})^{1/p'} / ∫v^θ h for v rescaled to unit mass.
inline double density_ratio(const DensityMoments& m, const ExponentSet& e, Branch b) {
  double th = detail::exponent_theta(e, b);
  return std::pow(m.moment / m.mass, e.inv_p_conj()) / (m.core / std::pow(m.mass, th));
}

}  // namespace wsi
