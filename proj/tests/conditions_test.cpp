#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wsi/conditions.hpp"

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

const auto kQuadrant = ConvexCone::positive_orthant(2);
const auto kUpper = ConvexCone::planar_sector(0, kPi);

}  // namespace

TEST(C0Ratio, EqualMonomialAtDiagonal) {
  auto w = parse_weight("mono(1,1)");
  auto e = validate_exponents(2, 2, 2, 2);
  auto s = c0_sides(w, w, e, Point{1, 1}, Point{1, 1});
  EXPECT_DOUBLE_EQ(s.lhs, 1.0);
  EXPECT_DOUBLE_EQ(s.rhs, 2.0);
  EXPECT_DOUBLE_EQ(c0_ratio(w, w, e, Point{1, 1}, Point{1, 1}), 0.5);
}

TEST(C0Ratio, NonPositiveRightSideIsInfinite) {
  auto w = parse_weight("radial(1)");
  auto e = validate_exponents(2, 2, 1, 1);
  EXPECT_TRUE(std::isinf(c0_ratio(w, w, e, Point{1, 0}, Point{-1, 0.1})));
}

TEST(C0Ratio, Errors) {
  auto one = HomogeneousWeight::constant(1);
  EXPECT_EQ(kind_of([&] { c0_ratio(one, one, validate_exponents(2, 1, 0, 0), Point{1, 1}, Point{1, 1}); }), ErrorKind::not_applicable);
  auto m = parse_weight("mono(1,1)");
  EXPECT_EQ(kind_of([&] { c0_ratio(m, m, validate_exponents(2, 2, 2, 2), Point{-1, 1}, Point{1, 1}); }), ErrorKind::outside_cone);
}

struct Pair {
  HomogeneousWeight omega, sigma;
  ConvexCone cone;
  double p;
};

std::vector<Pair> admissible_pairs() {
  return {
      {parse_weight("mono(1,1)"), parse_weight("mono(1,1)"), kQuadrant, 2.0},
      {parse_weight("mono(0.5,1)"), parse_weight("mono(1,1.2)"), kQuadrant, 1.7},
      {HomogeneousWeight::constant(1), parse_weight("mono(0,0.5)"), kUpper, 1.0},
      {parse_weight("sum(1)"), parse_weight("mono(0.5,0.5)"), kQuadrant, 2.0},
      {parse_weight("sum(1)"), parse_weight("mono(1,1,0)^0.5 * radial(0.5)"), ConvexCone::positive_orthant(3), 2.5},
      {parse_weight("mono(1,1)"), parse_weight("mono(2,2)"), kQuadrant, 2.0},
  };
}

TEST(C0Ratio, DiagonalIdentityAndScaleInvariance) {
  Rng rng(4);
  for (const auto& c : admissible_pairs()) {
    auto e = validate_exponents(c.cone.dimension(), c.p, c.omega.degree(), c.sigma.degree());
    double diag = 1.0 / (e.tau * e.inv_p_conj() + e.alpha * e.inv_p());
    auto pts = sample_cone_sphere(c.cone, 200, 21);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      EXPECT_NEAR(c0_ratio(c.omega, c.sigma, e, pts[i], pts[i]) / diag, 1.0, 1e-10);
      double r = c0_ratio(c.omega, c.sigma, e, pts[i], pts[i + 1]);
      if (std::isinf(r)) continue;
      double l = std::exp(rng.uniform(-4, 4)), m = std::exp(rng.uniform(-4, 4));
      EXPECT_NEAR(c0_ratio(c.omega, c.sigma, e, scaled(pts[i], l), scaled(pts[i + 1], m)) / r, 1.0, 1e-10);
    }
  }
}

TEST(EstimateBestC0, EqualMonomialsHitTheFloor) {
  auto w = parse_weight("mono(1,1)");
  auto e = validate_exponents(2, 2, 2, 2);
  auto r = estimate_best_c0(w, w, e, kQuadrant, 40000, 1);
  EXPECT_NEAR(r.constant_estimate, 0.5, 1e-3);
  EXPECT_EQ(r.verdict, Verdict::holds_with_constant);
  EXPECT_LT(distance(r.witness_x, r.witness_y), 1e-2);
  EXPECT_NEAR(rigidity_floor(e), 0.5, 1e-15);
  EXPECT_TRUE(consistent_with_floor(r.constant_estimate, e));
}

TEST(EstimateBestC0, HalfPowerMonomialAtPEqualsOne) {
  auto e = validate_exponents(2, 1, 0, 0.5);
  EXPECT_DOUBLE_EQ(e.n_a, 4.0);
  auto r = estimate_best_c0(HomogeneousWeight::constant(1), parse_weight("mono(0,0.5)"), e, kUpper, 20000, 2);
  EXPECT_NEAR(r.constant_estimate, 2.0, 1e-2);
  EXPECT_NEAR(monomial_c0({0, 0}, {0, 0.5}, 1, 2), 2.0, 1e-12);
  EXPECT_GE(r.constant_estimate, rigidity_floor(e));
}

TEST(EstimateBestC0, SumAgainstGeometricMeanHoldsInThePlane) {
  for (double p : {1.0, 1.5, 2.5}) {
    auto e = validate_exponents(2, p, 1, 1);
    auto r = estimate_best_c0(parse_weight("sum(1)"), parse_weight("mono(0.5,0.5)"), e, kQuadrant, 20000, 3);
    EXPECT_NE(r.verdict, Verdict::refuted) << p;
    EXPECT_TRUE(std::isfinite(r.constant_estimate));
  }
}

TEST(EstimateBestC0, RefutedWhenRightSideChangesSign) {
  auto w = parse_weight("radial(1)");
  auto e = validate_exponents(2, 2, 1, 1);
  auto r = estimate_best_c0(w, w, e, ConvexCone::full_space(2), 1000, 5);
  EXPECT_EQ(r.verdict, Verdict::refuted);
  EXPECT_GT(r.refuting_pairs, 0);
  EXPECT_LE(dot(r.witness_x, r.witness_y), 0.0);
}

TEST(EstimateBestC0, SampledSupIsMonotoneInSamples) {
  auto c = admissible_pairs()[1];
  auto e = validate_exponents(2, c.p, c.omega.degree(), c.sigma.degree());
  auto r = estimate_best_c0(c.omega, c.sigma, e, c.cone, 4000, 9);
  ASSERT_EQ(r.checkpoints.size(), 3u);
  for (std::size_t i = 1; i < r.checkpoints.size(); ++i) EXPECT_GE(r.checkpoints[i].second, r.checkpoints[i - 1].second);
  double prev = 0.0;
  for (long n : {40L, 400L, 4000L}) {
    double s = estimate_best_c0(c.omega, c.sigma, e, c.cone, n, 9).checkpoints.back().second;
    EXPECT_GE(s, prev);
    prev = s;
  }
  EXPECT_GE(r.constant_estimate, r.sampled_sup);
  EXPECT_NEAR(norm(r.witness_x), 1.0, 1e-12);
  EXPECT_NEAR(norm(r.witness_y), 1.0, 1e-12);
}

TEST(MonomialC0, Examples) {
  EXPECT_NEAR(monomial_c0({0, 0}, {1, 1}, 2, 2), 1.0, 1e-14);
  EXPECT_NEAR(monomial_c0({1, 1}, {1, 1}, 2, 2), 0.5, 1e-14);
  EXPECT_NEAR(monomial_c0({1, 1}, {2, 2}, 2, 2), 1.0 / 3.0, 1e-14);  // n_a = inf: beta = 1/2, gamma = 3/2
  EXPECT_EQ(kind_of([] { monomial_c0({0, 0}, {0, -1}, 2, 2); }), ErrorKind::assumption_violation);
  EXPECT_EQ(kind_of([] { monomial_c0({0, 0}, {0, 0}, 1, 2); }), ErrorKind::assumption_violation);
  try {
    monomial_c0({-1, 1}, {0, 1}, 2, 2);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::assumption_violation);
    EXPECT_NE(err.detail().find("index 0"), std::string::npos);
  }
}

TEST(MonomialC0, EqualExponentsGiveTheFloor) {
  Rng rng(31);
  for (int k = 0; k < 50; ++k) {
    int n = 2 + static_cast<int>(rng.index(3));
    std::vector<double> a(n);
    double alpha = 0;
    for (auto& v : a) alpha += (v = rng.uniform(0.05, 1.5));
    double p = rng.uniform(1.0, std::min(alpha + n, 6.0) - 1e-3);
    auto e = validate_exponents(n, p, alpha, alpha);
    double c = monomial_c0(a, a, p, n);
    EXPECT_NEAR(c, 1.0 / (e.n_a - n), 1e-12 / (e.n_a - n));
  }
}

TEST(MonomialC0, AgreesWithSampling) {
  Rng rng(77);
  for (int k = 0; k < 20; ++k) {
    int n = 2;
    std::vector<double> a(n), t(n);
    double alpha = 0, tau = 0;
    for (int i = 0; i < n; ++i) {
      alpha += (a[i] = rng.uniform(0.2, 2.0));
      tau += (t[i] = a[i] * rng.uniform(0.0, 1.0));
    }
    double p = rng.uniform(1.0, std::min(alpha + n, tau + 1.0 + 2.0));
    if (!(p < alpha + n) || alpha > tau + p) {
      --k;
      continue;
    }
    auto e = validate_exponents(n, p, tau, alpha);
    double closed = monomial_c0(t, a, p, n);
    auto r = estimate_best_c0(HomogeneousWeight::monomial(t), HomogeneousWeight::monomial(a), e, kQuadrant, 20000, 100 + k);
    EXPECT_NEAR(r.constant_estimate, closed, 1e-2 * closed) << describe(e);
  }
}

TEST(CheckC1, ConstantWeights) {
  auto one = HomogeneousWeight::constant(1);
  auto r = check_c1(one, one, validate_exponents(2, 1, 0, 0), ConvexCone::full_space(2), 2000, 1);
  EXPECT_NEAR(r.constant_estimate, 1.0, 1e-14);
  EXPECT_EQ(r.gradient_positivity_violations, 0);
  EXPECT_EQ(r.verdict, Verdict::holds_with_constant);
}

TEST(CheckC1, SumPowerAgainstRadialPower) {
  auto e = validate_exponents(2, 1, 1, 0.5);
  ASSERT_TRUE(e.critical());
  auto r = check_c1(parse_weight("sum(1)"), parse_weight("radial(0.5)"), e, kQuadrant, 20000, 2);
  EXPECT_NEAR(r.constant_estimate, std::pow(2.0, 0.25), 1e-6);
  EXPECT_EQ(r.gradient_positivity_violations, 0);
  EXPECT_EQ(r.verdict, Verdict::holds_with_constant);
  // 0-homogeneity at the witness
  double v = c1_quotient(parse_weight("sum(1)"), parse_weight("radial(0.5)"), e, r.witness_x);
  EXPECT_NEAR(c1_quotient(parse_weight("sum(1)"), parse_weight("radial(0.5)"), e, scaled(r.witness_x, 7.5)), v, 1e-13);
}

TEST(CheckC1, UnboundedQuotientIsRefuted) {
  auto e = validate_exponents(2, 1, 0, 0);
  auto r = check_c1(parse_weight("mono(1,-1)"), HomogeneousWeight::constant(1), e, kQuadrant, 5000, 3);
  EXPECT_EQ(r.verdict, Verdict::refuted);
}

TEST(CheckC1, NotApplicable) {
  auto w = parse_weight("mono(1,1)");
  EXPECT_EQ(kind_of([&] { check_c1(w, w, validate_exponents(2, 2, 2, 2), kQuadrant, 10, 1); }), ErrorKind::not_applicable);
}

TEST(Concavity, MarcusLopesWithConstantLeftWeight) {
  for (double a : {0.3, 0.9}) {
    int n = 3;
    double p = 1.5;
    auto e = validate_exponents(n, p, 0, a);
    auto r = concavity_sufficient(HomogeneousWeight::constant(1), HomogeneousWeight::marcus_lopes(a), e,
                                  ConvexCone::positive_orthant(n), 3000, 5);
    EXPECT_TRUE(r.holds);
    EXPECT_NEAR(r.c0, p / a, 1e-12);
  }
}

TEST(Concavity, EqualMonomialsPassAndRadialCubeFails) {
  auto w = parse_weight("mono(1,1)");
  EXPECT_TRUE(concavity_sufficient(w, w, validate_exponents(2, 2, 2, 2), kQuadrant, 3000, 6).holds);
  auto r3 = parse_weight("radial(3)");
  auto bad = concavity_sufficient(r3, r3, validate_exponents(2, 2, 3, 3), ConvexCone::full_space(2), 3000, 6);
  EXPECT_FALSE(bad.holds);
  EXPECT_GT(bad.midpoint_violations, 0);
}

TEST(Concavity, CertifiedConstantBoundsTheSampledSup) {
  auto e = validate_exponents(2, 1.5, 0, 0.6);
  auto sigma = HomogeneousWeight::marcus_lopes(0.6);
  auto one = HomogeneousWeight::constant(1);
  auto cert = concavity_sufficient(one, sigma, e, kQuadrant, 2000, 1);
  ASSERT_TRUE(cert.holds);
  auto est = estimate_best_c0(one, sigma, e, kQuadrant, 20000, 2);
  EXPECT_LE(est.constant_estimate, cert.c0 * (1 + 1e-9));
}

TEST(Rigidity, FloorAndErrors) {
  EXPECT_NEAR(rigidity_floor(validate_exponents(2, 2, 2, 2)), 0.5, 1e-15);
  EXPECT_EQ(kind_of([] { rigidity_floor(validate_exponents(2, 2, 2, 4)); }), ErrorKind::not_applicable);
  EXPECT_EQ(kind_of([] { rigidity_floor(validate_exponents(3, 2, 0, 0)); }), ErrorKind::not_applicable);
  EXPECT_FALSE(consistent_with_floor(0.4, validate_exponents(2, 2, 2, 2)));
}
