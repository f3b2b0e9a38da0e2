// Runs every acceptance criterion once and prints one PASS/FAIL line each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "wsi/conditions.hpp"
#include "wsi/constants.hpp"
#include "wsi/report.hpp"
#include "wsi/transport.hpp"
#include "wsi/verifier.hpp"

using namespace wsi;
constexpr double kPi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

const auto kOne = HomogeneousWeight::constant(1);
const auto kPlane = ConvexCone::full_space(2);
const auto kUpper = ConvexCone::planar_sector(0, kPi);
const auto kQuadrant = ConvexCone::positive_orthant(2);

void monomial_floor(Outcome& o) {
  Rng rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    int n = 2 + static_cast<int>(rng.index(3));
    std::vector<double> a(n);
    double deg = 0.0;
    for (auto& v : a) deg += (v = rng.uniform(0.05, 2.0));
    double p = rng.uniform(1.0, std::min(deg + n, 6.0) - 1e-3);
    auto e = validate_exponents(n, p, deg, deg);
    // equal degrees: the fractional dimension is n + tau
    double n_a = n + deg;
    if (std::abs(e.n_a - n_a) > 1e-9 * n_a) o.require(false, "fractional dimension of an equal-degree pair");
    worst = std::max(worst, std::abs(monomial_c0(a, a, p, n) - 1.0 / (n_a - n)));
  }
  o.detail << "max |C0 - 1/(n_a-n)| = " << worst << " over 50 cases";
  o.require(worst <= 1e-12, "exactness 1e-12");
}

void equal_monomial_estimate(Outcome& o) {
  auto w = parse_weight("mono(1,1)");
  auto e = validate_exponents(2, 2, 2, 2);
  auto r = estimate_best_c0(w, w, e, kQuadrant, 100000, 7);
  double gap = distance(normalized(r.witness_x), normalized(r.witness_y));
  o.detail << "C0 = " << r.constant_estimate << " from " << r.samples_used << " pairs, witness gap " << gap;
  o.require(std::abs(r.constant_estimate - 0.5) <= 1e-3, "0.5 +- 1e-3");
  o.require(r.samples_used >= 100000, ">= 1e5 pairs");
  o.require(gap < 1e-2, "witness y ~ x");
}

void heisenberg(Outcome& o) {
  double k = heisenberg_constant(1).k0;
  // independent closed form 5 pi^{5/4} / (2^{13/4} Gamma(3/4)^2)
  double oracle = 5 * std::pow(kPi, 1.25) / (std::pow(2.0, 3.25) * std::pow(std::tgamma(0.75), 2));
  double pansu = std::pow(3.0, 0.75) / (4 * std::sqrt(kPi));
  o.detail << "C1 = " << k << " (closed form " << oracle << "), Pansu " << pansu;
  o.require(std::abs(k - 1.46389) <= 1e-4, "1.46389 +- 1e-4");
  o.require(std::abs(k - oracle) <= 1e-9, "closed form");
  o.require(k > 0.32152 && pansu > 0.32151 && pansu < 0.32153, "exceeds Pansu");
}

void classical_sandwich(Outcome& o) {
  auto s = make_setting(kPlane, kOne, kOne, 1);
  double k0 = k0_p1(s, {Condition::C1, 1.0}).k0;
  auto r = maximize_quotient(s, QuotientFamily::smoothed_cap);
  o.detail << "K0 = " << k0 << ", best cap quotient " << r.quotient;
  o.require(std::abs(k0 - 0.28209) <= 1e-3, "0.28209 +- 1e-3");
  o.require(r.quotient >= 0.276 && r.quotient <= k0, "0.276 <= quotient <= K0");
}

void half_plane_moment(Outcome& o) {
  auto x2 = parse_weight("mono(0,1)");
  auto s = make_setting(kUpper, x2, x2, 1);
  double k0 = k0_p1(s, {Condition::C0, monomial_c0({0, 1}, {0, 1}, 1, 2)}).k0;
  // polar midpoint rule for the moment of the half disk
  const int nr = 2000, nt = 2000;
  double moment = 0.0;
  for (int i = 0; i < nr; ++i) {
    double r = (i + 0.5) / nr;
    for (int j = 0; j < nt; ++j) moment += r * r * std::sin(kPi * (j + 0.5) / nt);
  }
  moment *= (1.0 / nr) * (kPi / nt);
  double oracle = std::pow(moment, -1.0 / 3) / 3;
  o.detail << "K0 = " << k0 << ", polar moment " << moment << ", oracle " << oracle;
  o.require(std::abs(moment - 2.0 / 3) < 1e-5, "moment 2/3");
  o.require(std::abs(k0 - oracle) <= 1e-3 && std::abs(k0 - 0.38157) <= 1e-3, "0.38157 +- 1e-3");
}

void critical_quadrant(Outcome& o) {
  auto e = validate_exponents(2, 1, 1, 0.5);
  auto r = check_c1(parse_weight("sum(1)"), parse_weight("radial(0.5)"), e, kQuadrant, 100000, 5);
  o.detail << "C1 = " << r.constant_estimate << " (2^{1/4} = " << std::pow(2.0, 0.25) << "), violations " << r.gradient_positivity_violations;
  o.require(e.critical(), "n_a = n");
  o.require(std::abs(r.constant_estimate - std::pow(2.0, 0.25)) <= 1e-6, "2^{1/4} +- 1e-6");
  o.require(r.gradient_positivity_violations == 0 && r.samples_used >= 100000, "no violations over 1e5 samples");
}

void shift_probe(Outcome& o) {
  auto e = derive_exponents(2, 1, 1, 0);
  auto r = necessity_probe_shift(parse_weight("radial(1)"), kOne, e, kPlane, {1, 0}, {2, 4, 8, 16, 32, 64});
  o.detail << "violating slope " << r.slope;
  o.require(std::abs(r.slope - 1.0 / 3) <= 0.05 / 3, "1/3 +- 5%");
  Rng rng(91);
  int done = 0;
  double worst = -1e300;
  while (done < 10) {
    double p = rng.uniform(1, 2), tau = rng.uniform(-1, 2), alpha = rng.uniform(-1, 3);
    ExponentSet ev;
    try {
      ev = validate_exponents(2, p, tau, alpha);
    } catch (const Error&) {
      continue;
    }
    ++done;
    auto pr = necessity_probe_shift(HomogeneousWeight::radial_power(tau), HomogeneousWeight::radial_power(alpha), ev, kUpper, {0.6, 0.8},
                                    {2, 4, 8, 16, 32, 64});
    worst = std::max(worst, pr.slope);
  }
  o.detail << ", largest admissible slope " << worst;
  o.require(worst <= 0.02, "admissible slopes <= 0.02");
}

struct SweepScenario {
  WeightedSetting s;
  double k0;
};

void soundness_sweep(Outcome& o) {
  std::vector<SweepScenario> sc;
  {
    auto s = make_setting(kPlane, kOne, kOne, 1);
    sc.push_back({s, k0_p1(s, {Condition::C1, 1.0}).k0});
  }
  {
    auto x2 = parse_weight("mono(0,1)");
    auto s = make_setting(kUpper, x2, x2, 1);
    sc.push_back({s, k0_p1(s, {Condition::C0, monomial_c0({0, 1}, {0, 1}, 1, 2)}).k0});
  }
  {
    auto s = make_setting(kUpper, kOne, parse_weight("mono(0,1)"), 2);
    sc.push_back({s, k0_general(s, {Condition::C0, monomial_c0({0, 0}, {0, 1}, 2, 2)}).k0});
  }
  {
    auto w = parse_weight("mono(1,1)");
    auto s = make_setting(kQuadrant, w, w, 2);
    sc.push_back({s, k0_general(s, {Condition::C0, monomial_c0({1, 1}, {1, 1}, 2, 2)}).k0});
  }
  {
    auto s = make_setting(kQuadrant, parse_weight("sum(1)"), parse_weight("radial(0.5)"), 1);
    auto c1 = check_c1(s.omega, s.sigma, s.exps, kQuadrant, 20000, 3);
    sc.push_back({s, k0_p1(s, {Condition::C1, c1.constant_estimate}).k0});
  }
  Rng rng(8080);
  double worst = 0.0;
  int count = 0;
  for (const auto& c : sc) {
    const Point& axis = c.s.cone.axis();
    for (int k = 0; k < 20; ++k) {
      double rho = rng.uniform(0.0, 2.5), w = rng.uniform(0.2, 1.5);
      Point center = scaled(axis, rho);
      center[0] += rng.uniform(-0.3, 0.3);
      if (!c.s.cone.contains(center)) center = scaled(axis, rho + 0.5);
      GridFunction u;
      switch (k % 3) {
        case 0: u = gaussian_bump(c.s.cone, center, w, 128); break;
        case 1: u = smoothed_cap(c.s.cone, center, w, rng.uniform(0.05, 0.5) * w, 128); break;
        default: u = compact_bump(c.s.cone, center, w, 128); break;
      }
      double qv = sobolev_quotient(u, c.s);
      worst = std::max(worst, qv / c.k0);
      ++count;
    }
  }
  o.detail << count << " test functions over " << sc.size() << " scenarios, max quotient/K0 = " << worst;
  o.require(count == 100 && worst <= 1.01, "quotient <= 1.01 K0");
}

void ckn(Outcome& o) {
  Rng rng(55);
  int done = 0;
  double worst = 0.0;
  while (done < 100) {
    int n = 2 + static_cast<int>(rng.index(4));
    double p = rng.uniform(1, 4), gamma = rng.uniform(-1.5, 1.5), beta = gamma + rng.uniform(0, 1);
    // admissibility of the radial-weight parameters, checked independently
    double inv_r = 1 / p + (beta - 1 - gamma) / n;
    if (!(inv_r > 0) || !(inv_r + gamma / n > 0) || !(n - p + p * gamma > 0)) continue;
    CknParameters c;
    try {
      c = ckn_parameters(n, p, beta, gamma);
    } catch (const Error& e) {
      o.require(false, std::string("admissible case rejected: ") + e.what());
      ++done;
      continue;
    }
    ++done;
    try {
      validate_exponents(n, p, c.tau, c.alpha);
    } catch (const Error& e) {
      o.require(false, std::string("mapped exponents invalid: ") + e.what());
    }
    double bal = (c.tau + n) / c.r - ((c.alpha + n) / p - 1);
    worst = std::max(worst, std::abs(bal));
    double pc = p == 1 ? 0.0 : 1 - 1 / p;
    o.require(c.tau * pc + c.alpha / p > 0, "tau/p' + alpha/p > 0");
    o.require(std::abs(1 / c.r - inv_r) < 1e-12, "r from the radial exponents");
  }
  auto w = ckn_parameters(3, 2, 0, -0.5);
  o.detail << "100 cases, max balance residual " << worst << "; worked case r=" << w.r << " tau=" << w.tau << " alpha=" << w.alpha << " d=" << w.d;
  o.require(worst <= 1e-12, "balance 1e-12");
  o.require(std::abs(w.r - 3) < 1e-12 && std::abs(w.tau) < 1e-12 && std::abs(w.alpha - 1) < 1e-12 && w.d == 2.0, "worked case");
}

DiscreteMeasure line_atoms(int n, double scale, Rng& rng) {
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) pts.push_back({scale * (k + 0.5) / n});
  for (int k = n - 1; k > 0; --k) std::swap(pts[k], pts[rng.index(k + 1)]);
  return uniform_measure(pts);
}

void transport(Outcome& o) {
  Rng rng(6);
  auto mu = line_atoms(64, 1.0, rng), nu = line_atoms(64, 2.0, rng);
  auto perm = solve_discrete_ot(mu, nu).permutation(64);
  std::vector<std::size_t> a(64), b(64);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  std::sort(a.begin(), a.end(), [&](auto x, auto y) { return mu.points[x][0] < mu.points[y][0]; });
  std::sort(b.begin(), b.end(), [&](auto x, auto y) { return nu.points[x][0] < nu.points[y][0]; });
  int mismatched = 0;
  for (int k = 0; k < 64; ++k) mismatched += perm[a[k]] != b[k];
  o.require(mismatched == 0, "quantile coupling");

  auto u = GridFunction::sample(ConvexCone::full_space(1), {0}, {1}, {1024}, [](const Point&) { return 1.0; });
  auto src = measure_from_grid(u, kOne, 2);
  std::vector<Point> ys;
  for (int k = 0; k < 1024; ++k) ys.push_back({2 * std::sqrt((k + 0.5) / 1024)});
  auto tgt = uniform_measure(ys);
  auto img = barycentric_map(solve_discrete_ot(src, tgt), src, tgt);
  double ma = monge_ampere_residual(src, img, [](const Point& y) { return y[0] / 2; }, Binning{{0}, {2}, {16}});
  o.require(ma < 0.03, "Monge-Ampere residual < 0.03");

  auto w = parse_weight("mono(1,2)");
  auto e = validate_exponents(2, 1.5, 3, 3);
  ConditionConstant c{Condition::C0, monomial_c0({1, 2}, {1, 2}, 1.5, 2)};
  auto pts = sample_cone_sphere(kQuadrant, 2000, 1);
  Rng rr(2);
  for (auto& x : pts) x = scaled(x, std::exp(rr.uniform(std::log(0.3), std::log(3.0))));
  double worst = -1e300;
  for (double lam : {1.0, 0.5, 2.0}) {
    auto r = pointwise_divergence_check(w, w, e, c, QuadraticPotential{lam, {}}, pts, kQuadrant);
    worst = std::max(worst, r.max_violation);
  }
  o.require(worst <= 1e-9, "no violations on the equal-weight scenario");

  auto plane_pts = sample_cone_sphere(kPlane, 5000, 5);
  Rng rp(6);
  for (auto& x : plane_pts) x = scaled(x, std::exp(rp.uniform(std::log(0.3), std::log(3.0))));
  auto neg = pointwise_divergence_check(parse_weight("radial(1)"), kOne, derive_exponents(2, 1, 1, 0), {Condition::C0, 1.0},
                                        QuadraticPotential{1.0, {1.0, 0.0}}, plane_pts, kPlane);
  o.require(neg.max_violation > 0.0, "negative control violates");
  o.detail << "1D mismatches " << mismatched << ", MA residual " << ma << ", max violation " << worst << ", negative control "
           << neg.max_violation;
}

void spectral(Outcome& o) {
  auto om = parse_weight("mono(1,1)"), sg = parse_weight("mono(2,2)");
  auto e = validate_exponents(2, 2, 2, 4);
  double c0 = 1.0 / 3;
  std::vector<Point> centers{{0.5, 0.5}, {1, 1}, {1.5, 1.5}, {0.5, 1.5}};
  double bound = spectral_gap_bound(om, sg, c0, e, kQuadrant, centers, {0.4, 0.1, 0.05, 0.02}).bound;
  Rng rng(33);
  double least = 1e300;
  for (int k = 0; k < 50; ++k) {
    double a = rng.normal(), b = rng.normal(), c = rng.normal();
    auto u = GridFunction::sample(kQuadrant, {0, 0}, {2, 2}, {96, 96}, [&](const Point& x) {
      double base = std::sin(kPi * x[0] / 2) * std::sin(kPi * x[1] / 2);
      return base * (a + b * std::sin(kPi * x[0]) + c * std::cos(kPi * x[1]));
    });
    least = std::min(least, rayleigh_quotient(u, om, sg));
  }
  o.detail << "bound " << bound << " (9/8 = 1.125), least Rayleigh quotient " << least;
  o.require(std::abs(bound - 9.0 / 8) <= 0.03 * 9 / 8, "9/8 +- 3%");
  o.require(bound <= least, "bound <= Rayleigh quotients");
}

void invariants(Outcome& o) {
  std::vector<std::pair<HomogeneousWeight, ConvexCone>> fams{
      {HomogeneousWeight::constant(2), ConvexCone::full_space(3)},        {parse_weight("mono(1.5,-0.3,2)"), ConvexCone::positive_orthant(3)},
      {parse_weight("radial(-1.2)"), ConvexCone::full_space(3)},           {parse_weight("sum(2.5)"), ConvexCone::positive_orthant(3)},
      {parse_weight("ml(0.8)"), ConvexCone::positive_orthant(3)},          {parse_weight("sum(1) * mono(0.5,0.5,0)^2"), ConvexCone::positive_orthant(3)},
      {parse_weight("(ml(1) * radial(-0.5))^1.7"), ConvexCone::positive_orthant(3)},
  };
  Rng rng(12);
  double euler = 0.0;
  for (const auto& [w, cone] : fams) {
    auto pts = sample_cone_sphere(cone, 10000, 3);
    for (auto x : pts) euler = std::max(euler, std::abs(euler_residual(w, scaled(x, std::exp(rng.uniform(-3, 3))))));
  }
  o.require(euler < 1e-10, "Euler residual");

  double scale = 0.0;
  auto w1 = parse_weight("mono(1,0.5)"), w2 = parse_weight("mono(0.5,2)");
  auto e = validate_exponents(2, 2, w1.degree(), w2.degree());
  auto pts = sample_cone_sphere(kQuadrant, 2000, 9);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    double r = c0_ratio(w1, w2, e, pts[i], pts[i + 1]);
    if (!std::isfinite(r)) continue;
    double l = std::exp(rng.uniform(-4, 4)), m = std::exp(rng.uniform(-4, 4));
    scale = std::max(scale, std::abs(c0_ratio(w1, w2, e, scaled(pts[i], l), scaled(pts[i + 1], m)) / r - 1));
  }
  o.require(scale < 1e-10, "c0_ratio scale invariance");

  auto x2 = parse_weight("mono(0,1)");
  auto es = validate_exponents(2, 1.5, 1, 1);
  double base = k0_sharp_equal(x2, es, kUpper, 1.0).k0, gam = 0.0;
  for (double g : {0.01, 0.3, 7.0, 150.0}) gam = std::max(gam, std::abs(k0_sharp_equal(x2, es, kUpper, g).k0 / base - 1));
  o.require(gam < 1e-3, "gamma independence");

  auto s = parse_config("name = det\ncone = orthant(1,1)\nomega = mono(1,1)\nsigma = mono(1,1)\np = 2\n"
                        "tasks = validate, check_c0, k0, sharp, verify, necessity, transport\n[numeric]\nsamples = 5000\ngrid = 64\nbudget = 15\n");
  auto dump = [](const Report& r) {
    std::string all = report_text(r) + values_csv(r);
    for (const auto& t : r.tasks)
      for (const auto& tb : t.tables) all += table_csv(tb);
    return all;
  };
  bool same = dump(run_scenario(s)) == dump(run_scenario(s));
  o.require(same, "byte-identical reports");
  o.detail << "Euler " << euler << ", scale " << scale << ", gamma " << gam << ", reports " << (same ? "identical" : "differ");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"equal-exponent monomial C0 equals 1/(n_a - n)", monomial_floor},
      {"sampled C0 for x1 x2 on the quadrant", equal_monomial_estimate},
      {"Heisenberg constant at p = 1 against Pansu", heisenberg},
      {"classical isoperimetric sandwich", classical_sandwich},
      {"half-plane moment constant", half_plane_moment},
      {"critical quadrant C1 constant", critical_quadrant},
      {"translation probe slopes", shift_probe},
      {"quotient soundness sweep", soundness_sweep},
      {"CKN exponent mapping", ckn},
      {"optimal transport mechanism", transport},
      {"spectral gap bound", spectral},
      {"invariant suites", invariants},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str(), sec);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
