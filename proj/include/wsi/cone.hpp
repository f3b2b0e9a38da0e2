#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "random.hpp"
#include "vec.hpp"

namespace wsi {

/// Angular interval (lo, hi) on the circle, hi - lo in (0, 2 pi].
struct Arc {
  double lo = 0.0;
  double hi = 2.0 * std::numbers::pi;
  double span() const { return hi - lo; }
  bool full() const { return span() >= 2.0 * std::numbers::pi - 1e-15; }
};

/// Open convex cone. Every shape is stored as a list of unit inward normals,
/// E = {x : n_i . x > 0 for all i}; the shape tag is kept for printing and for
/// picking quadrature coordinates.
class ConvexCone {
 public:
  enum class Shape { full_space, orthant_product, halfspace_intersection, planar_sector };

  static ConvexCone full_space(int n) {
    if (n < 1) throw Error(ErrorKind::dimension_mismatch, "dimension must be positive");
    ConvexCone c;
    c.n_ = n;
    c.shape_ = Shape::full_space;
    c.finish();
    return c;
  }

  /// Coordinates with mask[i] set are forced positive.
  static ConvexCone orthant(std::vector<bool> mask) {
    if (mask.empty()) throw Error(ErrorKind::dimension_mismatch, "empty orthant mask");
    ConvexCone c;
    c.n_ = static_cast<int>(mask.size());
    c.shape_ = Shape::orthant_product;
    c.mask_ = std::move(mask);
    for (int i = 0; i < c.n_; ++i) {
      if (!c.mask_[i]) continue;
      Point e(c.n_, 0.0);
      e[i] = 1.0;
      c.normals_.push_back(e);
    }
    c.finish();
    return c;
  }

  static ConvexCone positive_orthant(int n) { return orthant(std::vector<bool>(n, true)); }

  static ConvexCone halfspaces(std::vector<Point> normals) {
    if (normals.empty()) throw Error(ErrorKind::dimension_mismatch, "no normals given");
    ConvexCone c;
    c.n_ = static_cast<int>(normals[0].size());
    c.shape_ = Shape::halfspace_intersection;
    for (auto& v : normals) {
      if (static_cast<int>(v.size()) != c.n_) throw Error(ErrorKind::dimension_mismatch, "normals of different lengths");
      double l = norm(v);
      if (!(l > 0.0) || !std::isfinite(l)) throw Error(ErrorKind::empty_cone, "zero normal");
      c.normals_.push_back(scaled(v, 1.0 / l));
    }
    c.finish();
    return c;
  }

  /// {r (cos t, sin t) : a < t < b}, 0 < b - a <= pi.
  static ConvexCone planar_sector(double a, double b) {
    if (!(b > a) || b - a > std::numbers::pi + 1e-12)
      throw Error(ErrorKind::empty_cone, "sector span must lie in (0, pi]");
    ConvexCone c;
    c.n_ = 2;
    c.shape_ = Shape::planar_sector;
    c.sector_ = {a, b};
    c.normals_.push_back({-std::sin(a), std::cos(a)});
    c.normals_.push_back({std::sin(b), -std::cos(b)});
    c.finish();
    return c;
  }

  int dimension() const { return n_; }
  Shape shape() const { return shape_; }
  const std::vector<Point>& normals() const { return normals_; }
  const std::vector<bool>& mask() const { return mask_; }

  /// Distance from x to the complement of E (+inf for the whole space).
  double boundary_distance(std::span<const double> x) const {
    check_dim(x);
    double d = kInfinity;
    for (const auto& nv : normals_) d = std::min(d, dot(nv, x));
    return d;
  }

  bool contains(std::span<const double> x) const {
    check_dim(x);
    for (double v : x)
      if (!std::isfinite(v)) return false;
    if (normals_.empty()) return true;
    return boundary_distance(x) > 1e-9 * norm(x);
  }

  /// For n = 2 the cone is an angular interval; nullopt for other dimensions.
  const std::optional<Arc>& arc() const { return arc_; }

  /// A unit vector well inside the cone.
  const Point& axis() const { return axis_; }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (shape_) {
      case Shape::full_space: os << "full(" << n_ << ")"; break;
      case Shape::orthant_product:
        os << "orthant(";
        for (int i = 0; i < n_; ++i) os << (i ? "," : "") << (mask_[i] ? 1 : 0);
        os << ")";
        break;
      case Shape::halfspace_intersection:
        os << "halfspace(";
        for (std::size_t k = 0; k < normals_.size(); ++k) {
          if (k) os << ";";
          for (int i = 0; i < n_; ++i) os << (i ? "," : "") << normals_[k][i];
        }
        os << ")";
        break;
      case Shape::planar_sector: os << "sector(" << sector_.first << "," << sector_.second << ")"; break;
    }
    return os.str();
  }

  bool operator==(const ConvexCone& o) const { return to_string() == o.to_string(); }

 private:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  void check_dim(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_)
      throw Error(ErrorKind::dimension_mismatch,
                  "point of length " + std::to_string(x.size()) + " for cone of dimension " + std::to_string(n_));
  }

  void finish() {
    if (n_ == 2) arc_ = compute_arc();
    if (n_ == 2) {
      if (!arc_) return;
      double m = 0.5 * (arc_->lo + arc_->hi);
      axis_ = {std::cos(m), std::sin(m)};
      return;
    }
    Point s(n_, 0.0);
    for (const auto& nv : normals_) s = add(s, nv);
    if (norm(s) > 0.0 && contains(normalized(s))) {
      axis_ = normalized(s);
    } else {
      axis_.assign(n_, 0.0);
      axis_[n_ - 1] = 1.0;
      if (!contains(axis_)) axis_.clear();
    }
  }

  // Each normal admits an open half circle; two arcs of length <= pi meet in
  // a single arc, so the intersection can be folded one normal at a time.
  std::optional<Arc> compute_arc() const {
    constexpr double pi = std::numbers::pi;
    if (normals_.empty()) return Arc{0.0, 2.0 * pi};
    double c0 = std::atan2(normals_[0][1], normals_[0][0]);
    double lo = c0 - pi / 2, hi = c0 + pi / 2;
    for (std::size_t i = 1; i < normals_.size(); ++i) {
      double m = 0.5 * (lo + hi);
      double c = std::atan2(normals_[i][1], normals_[i][0]);
      c += 2.0 * pi * std::round((m - c) / (2.0 * pi));
      lo = std::max(lo, c - pi / 2);
      hi = std::min(hi, c + pi / 2);
      if (hi - lo <= 1e-12) return std::nullopt;
    }
    return Arc{lo, hi};
  }

  int n_ = 0;
  Shape shape_ = Shape::full_space;
  std::vector<bool> mask_;
  std::vector<Point> normals_;
  std::pair<double, double> sector_{0.0, 0.0};
  std::optional<Arc> arc_;
  Point axis_;
};

inline bool cone_contains(const ConvexCone& cone, std::span<const double> x) { return cone.contains(x); }

/// Streaming uniform sampler on S^{n-1} cut by the cone.
class ConeSphereSampler {
 public:
  ConeSphereSampler(const ConvexCone& cone, std::uint64_t seed, long max_attempts = 100000)
      : cone_(cone), rng_(seed), max_attempts_(max_attempts) {
    if (cone.dimension() == 2 && !cone.arc()) throw Error(ErrorKind::empty_cone, "normals admit no direction");
  }

  Point next() {
    int n = cone_.dimension();
    if (n == 2) {
      const Arc& a = *cone_.arc();
      for (long t = 0; t < max_attempts_; ++t) {
        double th = a.lo + a.span() * rng_.uniform();
        Point x{std::cos(th), std::sin(th)};
        if (cone_.contains(x)) return x;
      }
      throw Error(ErrorKind::empty_cone, "no accepted direction on the arc");
    }
    for (long t = 0; t < max_attempts_; ++t) {
      Point x(n);
      for (double& v : x) v = rng_.normal();
      double l = norm(x);
      if (!(l > 0.0)) continue;
      for (double& v : x) v /= l;
      if (cone_.shape() == ConvexCone::Shape::orthant_product)
        for (int i = 0; i < n; ++i)
          if (cone_.mask()[i]) x[i] = std::abs(x[i]);
      if (cone_.contains(x)) return x;
    }
    throw Error(ErrorKind::empty_cone, "rejection bound exceeded while sampling the sphere");
  }

  Rng& rng() { return rng_; }

 private:
  const ConvexCone& cone_;
  Rng rng_;
  long max_attempts_;
};

inline std::vector<Point> sample_cone_sphere(const ConvexCone& cone, int count, std::uint64_t seed) {
  if (count <= 0) throw Error(ErrorKind::invalid_argument, "count must be positive");
  ConeSphereSampler s(cone, seed);
  std::vector<Point> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(s.next());
  return out;
}

namespace detail {

/// number, pi, k*pi, pi/m or k*pi/m
inline double cone_number(std::string tok, const std::string& text) {
  auto bad = [&]() { return Error(ErrorKind::parse_error, "cone '" + text + "': bad number '" + tok + "'"); };
  tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
  auto num = [&](const std::string& t) {
    try {
      std::size_t used = 0;
      double v = std::stod(t, &used);
      if (used != t.size()) throw bad();
      return v;
    } catch (const std::logic_error&) {
      throw bad();
    }
  };
  auto at = tok.find("pi");
  if (at == std::string::npos) return num(tok);
  double v = std::numbers::pi;
  std::string pre = tok.substr(0, at), post = tok.substr(at + 2);
  if (pre == "-")
    v = -v;
  else if (!pre.empty()) {
    if (pre.back() != '*') throw bad();
    v *= num(pre.substr(0, pre.size() - 1));
  }
  if (!post.empty()) {
    if (post.front() != '/') throw bad();
    v /= num(post.substr(1));
  }
  return v;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

/// Inverse of ConvexCone::to_string: full(n), orthant(1,0,1), halfspace(a,b;c,d), sector(a,b).
inline ConvexCone parse_cone(const std::string& text) {
  auto open = text.find('('), close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw Error(ErrorKind::parse_error, "cone '" + text + "': expected name(arguments)");
  std::string name = text.substr(0, open), args = text.substr(open + 1, close - open - 1);
  name.erase(std::remove_if(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); }), name.end());
  if (text.find_first_not_of(" \t", close + 1) != std::string::npos) throw Error(ErrorKind::parse_error, "cone '" + text + "': trailing text");
  auto nums = [&](const std::string& a) {
    std::vector<double> v;
    for (const auto& t : detail::split_on(a, ',')) v.push_back(detail::cone_number(t, text));
    return v;
  };
  if (name == "full") {
    auto v = nums(args);
    if (v.size() != 1 || v[0] != std::floor(v[0]) || v[0] < 1) throw Error(ErrorKind::parse_error, "cone '" + text + "': full(n) needs n >= 1");
    return ConvexCone::full_space(static_cast<int>(v[0]));
  }
  if (name == "orthant") {
    std::vector<bool> mask;
    for (double b : nums(args)) {
      if (b != 0.0 && b != 1.0) throw Error(ErrorKind::parse_error, "cone '" + text + "': orthant mask entries are 0 or 1");
      mask.push_back(b == 1.0);
    }
    return ConvexCone::orthant(mask);
  }
  if (name == "halfspace") {
    std::vector<Point> normals;
    for (const auto& part : detail::split_on(args, ';')) normals.push_back(nums(part));
    return ConvexCone::halfspaces(normals);
  }
  if (name == "sector") {
    auto v = nums(args);
    if (v.size() != 2) throw Error(ErrorKind::parse_error, "cone '" + text + "': sector(a,b) needs two angles");
    return ConvexCone::planar_sector(v[0], v[1]);
  }
  throw Error(ErrorKind::parse_error, "cone '" + text + "': unknown cone '" + name + "'");
}

}  // namespace wsi
