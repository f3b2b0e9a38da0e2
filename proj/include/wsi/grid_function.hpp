#pragma once

#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cone.hpp"
#include "error.hpp"
#include "vec.hpp"
#include "weight.hpp"

namespace wsi {

/// Cell-centred samples on an axis-aligned box. Cells whose centre is outside
/// the cone are masked and hold NaN. Storage is row-major (last axis fastest).
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Point lo, Point hi, std::vector<int> res) : lo_(std::move(lo)), hi_(std::move(hi)), res_(std::move(res)) {
    if (lo_.size() != hi_.size() || lo_.size() != res_.size() || lo_.empty())
      throw Error(ErrorKind::dimension_mismatch, "box and resolution lengths differ");
    std::size_t total = 1;
    for (std::size_t i = 0; i < res_.size(); ++i) {
      if (res_[i] < 1 || !(hi_[i] > lo_[i])) throw Error(ErrorKind::invalid_argument, "empty box or resolution");
      total *= static_cast<std::size_t>(res_[i]);
    }
    values_.assign(total, std::numeric_limits<double>::quiet_NaN());
    active_.assign(total, 0);
  }

  /// Samples f at the centres of cells inside the cone.
  template <class F>
  static GridFunction sample(const ConvexCone& cone, Point lo, Point hi, std::vector<int> res, F&& f) {
    GridFunction g(std::move(lo), std::move(hi), std::move(res));
    if (cone.dimension() != g.dimension()) throw Error(ErrorKind::dimension_mismatch, "cone and box dimension differ");
    Point x(g.dimension());
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.center(i, x);
      if (!cone.contains(x)) continue;
      g.active_[i] = 1;
      g.values_[i] = f(x);
    }
    return g;
  }

  int dimension() const { return static_cast<int>(res_.size()); }
  std::size_t size() const { return values_.size(); }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  const std::vector<int>& resolution() const { return res_; }
  double spacing(int axis) const { return (hi_[axis] - lo_[axis]) / res_[axis]; }
  double cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < dimension(); ++i) v *= spacing(i);
    return v;
  }
  bool active(std::size_t i) const { return active_[i] != 0; }
  double value(std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  void set(std::size_t i, double v) {
    values_[i] = v;
    active_[i] = std::isnan(v) ? 0 : 1;
  }

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int k = dimension() - 1; k > axis; --k) s *= static_cast<std::size_t>(res_[k]);
    return s;
  }
  int coord(std::size_t i, int axis) const { return static_cast<int>((i / stride(axis)) % static_cast<std::size_t>(res_[axis])); }

  void center(std::size_t i, Point& x) const {
    x.resize(res_.size());
    for (int k = dimension() - 1; k >= 0; --k) {
      int c = static_cast<int>(i % static_cast<std::size_t>(res_[k]));
      i /= static_cast<std::size_t>(res_[k]);
      x[k] = lo_[k] + (c + 0.5) * spacing(k);
    }
  }
  Point center(std::size_t i) const {
    Point x;
    center(i, x);
    return x;
  }

  /// Central differences, one-sided where a neighbour is masked or off the box.
  Point gradient(std::size_t i) const {
    int n = dimension();
    Point g(n, 0.0);
    for (int k = 0; k < n; ++k) {
      int c = coord(i, k);
      std::size_t s = stride(k);
      bool up = c + 1 < res_[k] && active_[i + s];
      bool down = c > 0 && active_[i - s];
      double h = spacing(k);
      if (up && down)
        g[k] = (values_[i + s] - values_[i - s]) / (2 * h);
      else if (up)
        g[k] = (values_[i + s] - values_[i]) / h;
      else if (down)
        g[k] = (values_[i] - values_[i - s]) / h;
    }
    return g;
  }

  /// True if some cell on the outermost ring carries more than tol * max|u|.
  bool touches_boundary(double tol = 1e-6) const {
    double mx = 0.0, ring = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!active_[i]) continue;
      double a = std::abs(values_[i]);
      mx = std::max(mx, a);
      for (int k = 0; k < dimension(); ++k) {
        int c = coord(i, k);
        if (c == 0 || c == res_[k] - 1) ring = std::max(ring, a);
      }
    }
    return ring > tol * mx;
  }

  GridFunction scaled_by(double c) const {
    GridFunction g = *this;
    for (auto& v : g.values_)
      if (!std::isnan(v)) v *= c;
    return g;
  }

  void write(std::ostream& os) const {
    os << "gridfunction " << dimension();
    os.precision(17);
    for (int k = 0; k < dimension(); ++k) os << ' ' << lo_[k] << ' ' << hi_[k];
    for (int r : res_) os << ' ' << r;
    os << '\n';
    for (std::size_t i = 0; i < size(); ++i) {
      if (active_[i])
        os << values_[i] << '\n';
      else
        os << "masked\n";
    }
  }

  static GridFunction read(std::istream& is) {
    std::string tag;
    int n = 0;
    if (!(is >> tag >> n) || tag != "gridfunction" || n < 1) throw Error(ErrorKind::parse_error, "expected 'gridfunction <dim>' header");
    Point lo(n), hi(n);
    std::vector<int> res(n);
    for (int k = 0; k < n; ++k)
      if (!(is >> lo[k] >> hi[k])) throw Error(ErrorKind::parse_error, "bad box bounds");
    for (int k = 0; k < n; ++k)
      if (!(is >> res[k])) throw Error(ErrorKind::parse_error, "bad resolution");
    GridFunction g(lo, hi, res);
    std::string tok;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(is >> tok)) throw Error(ErrorKind::parse_error, "expected " + std::to_string(g.size()) + " values, got " + std::to_string(i));
      if (tok == "masked") continue;
      try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        g.set(i, v);
      } catch (const std::exception&) {
        throw Error(ErrorKind::parse_error, "bad value '" + tok + "' at cell " + std::to_string(i));
      }
    }
    return g;
  }

  std::string to_text() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }
  static GridFunction from_text(const std::string& s) {
    std::istringstream is(s);
    return read(is);
  }

 private:
  Point lo_, hi_;
  std::vector<int> res_;
  std::vector<double> values_;
  std::vector<char> active_;
};

/// (∑ |u|^q ω vol)^{1/q} over active cells.
inline double weighted_lq_norm(const GridFunction& u, const HomogeneousWeight& omega, double q) {
  if (!(q > 0.0)) throw Error(ErrorKind::invalid_argument, "q > 0");
  double s = 0.0, vol = u.cell_volume();
  Point x;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!u.active(i) || u.value(i) == 0.0) continue;
    u.center(i, x);
    s += std::pow(std::abs(u.value(i)), q) * omega.value(x);
  }
  return std::pow(s * vol, 1.0 / q);
}

/// (∑ |∇u|^p σ vol)^{1/p} with finite-difference gradients.
inline double weighted_grad_lp_norm(const GridFunction& u, const HomogeneousWeight& sigma, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::invalid_argument, "p >= 1");
  double s = 0.0, vol = u.cell_volume();
  Point x;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!u.active(i)) continue;
    double g = norm(u.gradient(i));
    if (g == 0.0) continue;
    u.center(i, x);
    s += std::pow(g, p) * sigma.value(x);
  }
  return std::pow(s * vol, 1.0 / p);
}

}  // namespace wsi
