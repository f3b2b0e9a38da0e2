#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "wsi/conditions.hpp"
#include "wsi/transport.hpp"

using namespace wsi;
constexpr double kPi = std::numbers::pi;

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::io_error;
}

namespace {

DiscreteMeasure line_atoms(int n, double scale, Rng* shuffle = nullptr) {
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) pts.push_back({scale * (k + 0.5) / n});
  if (shuffle)
    for (int k = n - 1; k > 0; --k) std::swap(pts[k], pts[shuffle->index(k + 1)]);
  return uniform_measure(pts);
}

DiscreteMeasure random_cloud(int n, int dim, Rng& rng, bool uniform) {
  DiscreteMeasure m;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    Point x(dim);
    for (auto& c : x) c = rng.uniform(0, 1);
    m.points.push_back(x);
    m.masses.push_back(uniform ? 1.0 : rng.uniform(0.1, 1));
    total += m.masses.back();
  }
  for (auto& w : m.masses) w /= total;
  return m;
}

double perm_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, const std::vector<std::size_t>& perm) {
  double c = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) c += a.masses[i] * std::pow(distance(a.points[i], b.points[perm[i]]), 2);
  return c;
}

}  // namespace

TEST(DiscreteOt, OneDimensionalRescalingMatchesQuantiles) {
  Rng rng(2);
  auto mu = line_atoms(64, 1.0, &rng), nu = line_atoms(64, 2.0, &rng);
  auto plan = solve_discrete_ot(mu, nu);
  auto perm = plan.permutation(64);
  ASSERT_EQ(perm.size(), 64u);
  // CDF-inverse oracle: the k-th smallest source atom goes to the k-th smallest target atom.
  std::vector<std::size_t> a(64), b(64);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  std::sort(a.begin(), a.end(), [&](auto x, auto y) { return mu.points[x][0] < mu.points[y][0]; });
  std::sort(b.begin(), b.end(), [&](auto x, auto y) { return nu.points[x][0] < nu.points[y][0]; });
  for (int k = 0; k < 64; ++k) {
    EXPECT_EQ(perm[a[k]], b[k]);
    EXPECT_LT(std::abs(nu.points[perm[a[k]]][0] - 2 * mu.points[a[k]][0]), 1.0 / 64);
  }
}

TEST(DiscreteOt, IdentityAndTranslation) {
  Rng rng(3);
  auto mu = random_cloud(20, 2, rng, false);
  auto same = solve_discrete_ot(mu, mu);
  EXPECT_NEAR(same.cost, 0.0, 1e-15);
  EXPECT_LT(same.marginal_error(mu, mu), 1e-12);

  std::vector<Point> sq, shifted;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      sq.push_back({i / 3.0, j / 3.0});
      shifted.push_back({i / 3.0 + 0.4, j / 3.0 + 0.25});
    }
  std::reverse(shifted.begin(), shifted.end());
  auto a = uniform_measure(sq), b = uniform_measure(shifted);
  auto plan = solve_discrete_ot(a, b);
  auto perm = plan.permutation(16);
  ASSERT_EQ(perm.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(perm[i], 15 - i);
  EXPECT_NEAR(plan.cost, 0.4 * 0.4 + 0.25 * 0.25, 1e-12);
  EXPECT_EQ(cyclical_monotonicity_violations(plan, a, b, 2000, 1), 0);
}

TEST(DiscreteOt, BruteForceOnSmallUniformClouds) {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    auto a = random_cloud(6, 2, rng, true), b = random_cloud(6, 2, rng, true);
    auto plan = solve_discrete_ot(a, b);
    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do best = std::min(best, perm_cost(a, b, perm));
    while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(plan.cost, best, 1e-12);
  }
}

TEST(DiscreteOt, MarginalsAndMonotonicityOnRandomInstances) {
  Rng rng(6);
  for (int rep = 0; rep < 10; ++rep) {
    int m = 5 + static_cast<int>(rng.index(40)), n = 5 + static_cast<int>(rng.index(40));
    auto a = random_cloud(m, 2 + rep % 2, rng, false), b = random_cloud(n, 2 + rep % 2, rng, false);
    auto plan = solve_discrete_ot(a, b);
    EXPECT_LT(plan.marginal_error(a, b), 1e-10);
    for (const auto& e : plan.entries) EXPECT_GT(e.mass, 0.0);
    EXPECT_EQ(cyclical_monotonicity_violations(plan, a, b, 5000, rep), 0);
  }
}

TEST(DiscreteOt, Errors) {
  Rng rng(7);
  auto big = random_cloud(2001, 2, rng, true), small = random_cloud(3, 2, rng, true);
  EXPECT_EQ(kind_of([&] { solve_discrete_ot(big, small); }), ErrorKind::size_exceeded);
  EXPECT_EQ(kind_of([&] { solve_discrete_ot(small, random_cloud(3, 3, rng, true)); }), ErrorKind::dimension_mismatch);
  auto bad = small;
  bad.masses[0] *= 2;
  EXPECT_EQ(kind_of([&] { solve_discrete_ot(bad, small); }), ErrorKind::normalization_failure);
}

TEST(DiscreteMeasureText, RoundTrip) {
  Rng rng(8);
  auto m = random_cloud(7, 3, rng, false);
  auto back = DiscreteMeasure::from_text(m.to_text());
  ASSERT_EQ(back.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(back.points[i], m.points[i]);
    EXPECT_EQ(back.masses[i], m.masses[i]);
  }
  EXPECT_EQ(kind_of([] { DiscreteMeasure::from_text("0.1 0.2 zero\n"); }), ErrorKind::parse_error);
  EXPECT_EQ(kind_of([] { DiscreteMeasure::from_text("0.5\n"); }), ErrorKind::parse_error);
  EXPECT_EQ(kind_of([] { DiscreteMeasure::from_text("0 0.5\n1 0.4\n"); }), ErrorKind::normalization_failure);
}

namespace {

// μ uniform on [0,1] from grid cells, ν = (y/2) dy on [0,2] with atoms y_k = 2 sqrt(t_k),
// t_k at the quantile midpoints or drawn at random.
double linear_density_residual(int atoms, Rng* rng = nullptr) {
  auto u = GridFunction::sample(ConvexCone::full_space(1), {0}, {1}, {atoms}, [](const Point&) { return 1.0; });
  auto mu = measure_from_grid(u, HomogeneousWeight::constant(1), 2);
  std::vector<Point> ys;
  for (int k = 0; k < atoms; ++k) ys.push_back({2 * std::sqrt(rng ? rng->uniform() : (k + 0.5) / atoms)});
  auto nu = uniform_measure(ys);
  auto plan = solve_discrete_ot(mu, nu);
  auto img = barycentric_map(plan, mu, nu);
  if (!rng) {
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(img[i][0], 2 * std::sqrt(mu.points[i][0]), 2.0 / std::sqrt(atoms));
  }
  return monge_ampere_residual(mu, img, [](const Point& y) { return y[0] / 2; }, Binning{{0}, {2}, {16}});
}

}  // namespace

TEST(MongeAmpere, LinearDensityOracle) {
  double r64 = linear_density_residual(64), r256 = linear_density_residual(256), r1024 = linear_density_residual(1024);
  EXPECT_LT(r64, 2 / std::sqrt(64.0));
  EXPECT_LE(r256, r64);
  EXPECT_LE(r1024, r256);
  EXPECT_LT(r1024, 0.03);
  Rng rng(12);
  double prev = 1.0;
  for (int atoms : {64, 256, 1024}) {
    double r = linear_density_residual(atoms, &rng);
    EXPECT_LT(r, 2 / std::sqrt(atoms));
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(MongeAmpere, IdentityAndNegativeControl) {
  auto u = GridFunction::sample(ConvexCone::full_space(2), {-1, -1}, {1, 1}, {32, 32}, [](const Point& x) { return std::exp(-dot(x, x)); });
  auto w = HomogeneousWeight::constant(1);
  auto mu = measure_from_grid(u, w, 2);
  Binning b{{-1, -1}, {1, 1}, {8, 8}};
  EXPECT_EQ(monge_ampere_residual(mu, mu.points, mu, b), 0.0);
  auto gauss = [](const Point& y) { return std::exp(-2 * dot(y, y)); };
  EXPECT_LT(monge_ampere_residual(u, w, 2, gauss, [](const Point& x) { return x; }, b), 0.01);
  double bad = monge_ampere_residual(u, w, 2, gauss, [](const Point& x) { return Point{x[0] * 0.3, x[1]}; }, b);
  EXPECT_GT(bad, 0.1);
  EXPECT_EQ(kind_of([&] { monge_ampere_residual(u, w, 2, gauss, [](const Point& x) { return scaled(x, 3); }, b); }), ErrorKind::binning_mismatch);
  EXPECT_EQ(kind_of([&] { monge_ampere_residual(mu, mu.points, mu, Binning{{0}, {1}, {4}}); }), ErrorKind::binning_mismatch);
}

namespace {

std::vector<Point> cone_points(const ConvexCone& cone, int count, std::uint64_t seed) {
  auto dirs = sample_cone_sphere(cone, count, seed);
  Rng rng(seed + 1);
  for (auto& d : dirs) d = scaled(d, std::exp(rng.uniform(std::log(0.3), std::log(3.0))));
  return dirs;
}

}  // namespace

TEST(PointwiseDivergence, IdentityIsEqualityForEqualWeights) {
  auto quadrant = ConvexCone::positive_orthant(2);
  auto w = parse_weight("mono(1,2)");
  auto e = validate_exponents(2, 1.5, 3, 3);
  double c0 = monomial_c0({1, 2}, {1, 2}, 1.5, 2);
  auto pts = cone_points(quadrant, 2000, 1);
  auto id = pointwise_divergence_check(w, w, e, {Condition::C0, c0}, QuadraticPotential{1.0, {}}, pts, quadrant);
  EXPECT_LE(std::abs(id.max_violation), 1e-9);
  EXPECT_GT(id.max_relative_violation, -1e-12);
  for (double lam : {0.5, 2.0}) {
    auto r = pointwise_divergence_check(w, w, e, {Condition::C0, c0}, QuadraticPotential{lam, {}}, pts, quadrant);
    EXPECT_LE(r.max_violation, 1e-9);
    EXPECT_FALSE(r.violating_point.has_value());
  }
}

TEST(PointwiseDivergence, CertifiedPairsWithShiftsAndPowers) {
  auto quadrant = ConvexCone::positive_orthant(2);
  struct Case {
    const char* om;
    const char* sg;
    std::vector<double> t, a;
    double p;
  };
  std::vector<Case> cases{{"mono(1,0)", "mono(1,1)", {1, 0}, {1, 1}, 1.5}, {"const(1)", "mono(0,1)", {0, 0}, {0, 1}, 2},
                          {"mono(1,1)", "mono(2,2)", {1, 1}, {2, 2}, 2}, {"mono(0.5,0)", "mono(0.5,0)", {0.5, 0}, {0.5, 0}, 1}};
  Rng rng(9);
  for (const auto& c : cases) {
    auto om = parse_weight(c.om), sg = parse_weight(c.sg);
    auto e = make_setting(quadrant, om, sg, c.p).exps;
    double c0 = monomial_c0(c.t, c.a, c.p, 2);
    auto pts = cone_points(quadrant, 10000, rng.index(1000));
    std::vector<Potential> phis{QuadraticPotential{0.7, {0.3, 0.0}}, QuadraticPotential{1.3, {0.2, 0.5}}, PowerPotential{1.0, 1.5},
                                PowerPotential{2.0, 3.0}};
    for (const auto& phi : phis) {
      auto r = pointwise_divergence_check(om, sg, e, {Condition::C0, c0}, phi, pts, quadrant);
      EXPECT_LE(r.max_violation, 1e-9) << c.om << " " << c.sg;
      EXPECT_EQ(r.points_checked, 10000);
    }
  }
}

TEST(PointwiseDivergence, CriticalBranch) {
  auto quadrant = ConvexCone::positive_orthant(2);
  auto om = parse_weight("sum(1)"), sg = parse_weight("radial(0.5)");
  auto e = validate_exponents(2, 1, 1, 0.5);
  auto pts = cone_points(quadrant, 5000, 4);
  for (const Potential& phi : {Potential{QuadraticPotential{1.0, {}}}, Potential{QuadraticPotential{0.5, {0.1, 0.4}}}, Potential{PowerPotential{1.0, 2.5}}}) {
    auto r = pointwise_divergence_check(om, sg, e, {Condition::C1, std::pow(2.0, 0.25)}, phi, pts, quadrant);
    EXPECT_LE(r.max_violation, 1e-9);
  }
}

TEST(PointwiseDivergence, NegativeControlAndErrors) {
  auto plane = ConvexCone::full_space(2);
  auto e = derive_exponents(2, 1, 1, 0);
  auto pts = cone_points(plane, 5000, 5);
  auto r = pointwise_divergence_check(parse_weight("radial(1)"), HomogeneousWeight::constant(1), e, {Condition::C0, 1.0},
                                      QuadraticPotential{1.0, {1.0, 0.0}}, pts, plane);
  EXPECT_GT(r.max_violation, 0.0);
  ASSERT_TRUE(r.violating_point.has_value());
  auto quadrant = ConvexCone::positive_orthant(2);
  auto x2 = parse_weight("mono(0,1)");
  auto eq = validate_exponents(2, 1, 1, 1);
  EXPECT_EQ(kind_of([&] {
              pointwise_divergence_check(x2, x2, eq, {Condition::C0, 1.0}, QuadraticPotential{1.0, {-5, 0}}, cone_points(quadrant, 50, 6), quadrant);
            }),
            ErrorKind::map_leaves_cone);
}

TEST(IntegratedChain, ClassicalTalentiAgainstGaussian) {
  auto plane = ConvexCone::full_space(2);
  auto one = HomogeneousWeight::constant(1);
  auto s = make_setting(plane, one, one, 1.5);
  auto u = GridFunction::sample(plane, {-8, -8}, {8, 8}, {256, 256}, [](const Point& x) { return 1.0 / (1.0 + std::pow(norm(x), 3)); });
  u = normalize_lq(u, one, s.exps.q);
  ASSERT_TRUE(s.exps.critical());
  auto r = integrated_chain_check(u, GaussianBump{{0.5, 0.0}, 0.7}, s, {Condition::C1, 1.0});
  EXPECT_TRUE(r.holds);
  EXPECT_LT(r.lhs, r.rhs);
  EXPECT_EQ(kind_of([&] { integrated_chain_check(u.scaled_by(2), GaussianBump{{0, 0}, 1}, s, {Condition::C1, 1.0}); }),
            ErrorKind::normalization_failure);
}

TEST(IntegratedChain, SharpEqualWeightsIsTight) {
  auto upper = ConvexCone::planar_sector(0, kPi);
  auto x2 = parse_weight("mono(0,1)");
  auto s = make_setting(upper, x2, x2, 1.5);
  ASSERT_NEAR(s.exps.q, 3.0, 1e-12);
  auto u = GridFunction::sample(upper, {-8, 0}, {8, 8}, {256, 128}, [](const Point& x) { return 1.0 / (1.0 + std::pow(norm(x), 3)); });
  u = normalize_lq(u, x2, s.exps.q);
  double c0 = monomial_c0({0, 1}, {0, 1}, 1.5, 2);
  auto r = integrated_chain_check(u, TalentiDensity{1.0, 3.0, 0.0, {}}, s, {Condition::C0, c0});
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.lhs / r.rhs, 1.0, 0.05);
}
