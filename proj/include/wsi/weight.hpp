#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cone.hpp"
#include "error.hpp"
#include "vec.hpp"

namespace wsi {

/// Positively homogeneous weight built from a small closed grammar:
///   const(c)  mono(e1,...,en)  radial(t)  sum(t)  ml(t)   combined with  *  ^r  ( )
/// where ml(t) = (x1...xn / (x1+...+xn))^{t/(n-1)}.
class HomogeneousWeight {
 public:
  enum class Family { constant, monomial, radial_power, sum_power, marcus_lopes, product, power };

  HomogeneousWeight() : HomogeneousWeight(constant(1.0)) {}

  static HomogeneousWeight constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::invalid_family, "constant weight must be positive");
    return make(Family::constant, c, {}, {});
  }
  static HomogeneousWeight monomial(std::vector<double> e) {
    if (e.empty()) throw Error(ErrorKind::invalid_family, "monomial needs exponents");
    return make(Family::monomial, 0.0, std::move(e), {});
  }
  static HomogeneousWeight radial_power(double t) { return make(Family::radial_power, t, {}, {}); }
  static HomogeneousWeight sum_power(double t) { return make(Family::sum_power, t, {}, {}); }
  static HomogeneousWeight marcus_lopes(double t) { return make(Family::marcus_lopes, t, {}, {}); }
  static HomogeneousWeight product(std::vector<HomogeneousWeight> parts) {
    if (parts.empty()) throw Error(ErrorKind::invalid_family, "empty product");
    if (parts.size() == 1) return parts[0];
    return make(Family::product, 0.0, {}, std::move(parts));
  }
  static HomogeneousWeight power(HomogeneousWeight w, double r) { return make(Family::power, r, {}, {std::move(w)}); }

  Family family() const { return node_->family; }
  double degree() const { return node_->degree; }
  bool is_constant() const { return all_constant(); }

  /// Raw evaluation: no membership checks, NaN outside the natural domain.
  double value(std::span<const double> x) const { return eval(*node_, x); }

  /// Raw analytic gradient.
  Point gradient(std::span<const double> x) const {
    Point g(x.size(), 0.0);
    grad(*node_, x, value(x), g);
    return g;
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    print(*node_, os, false);
    return os.str();
  }

  bool operator==(const HomogeneousWeight& o) const { return to_string() == o.to_string(); }

  /// Exponents a with w = c x^a, when the weight is a product of monomials and constants.
  std::optional<std::vector<double>> monomial_exponents(int n) const {
    const Node& nd = *node_;
    switch (nd.family) {
      case Family::constant: return std::vector<double>(n, 0.0);
      case Family::monomial:
        if (static_cast<int>(nd.exps.size()) != n) return std::nullopt;
        return nd.exps;
      case Family::radial_power:
      case Family::sum_power:
      case Family::marcus_lopes:
        if (nd.param == 0.0) return std::vector<double>(n, 0.0);
        return std::nullopt;
      case Family::product: {
        std::vector<double> a(n, 0.0);
        for (const auto& k : nd.kids) {
          auto b = k.monomial_exponents(n);
          if (!b) return std::nullopt;
          for (int i = 0; i < n; ++i) a[i] += (*b)[i];
        }
        return a;
      }
      case Family::power: {
        auto b = nd.kids[0].monomial_exponents(n);
        if (!b) return std::nullopt;
        for (double& v : *b) v *= nd.param;
        return b;
      }
    }
    return std::nullopt;
  }

 private:
  struct Node {
    Family family;
    double param;  // constant value, exponent t, or power r
    std::vector<double> exps;
    std::vector<HomogeneousWeight> kids;
    double degree = 0.0;
  };

  static HomogeneousWeight make(Family f, double param, std::vector<double> exps, std::vector<HomogeneousWeight> kids) {
    if (!std::isfinite(param)) throw Error(ErrorKind::invalid_family, "non-finite weight parameter");
    auto nd = std::make_shared<Node>(Node{f, param, std::move(exps), std::move(kids), 0.0});
    switch (f) {
      case Family::constant: nd->degree = 0.0; break;
      case Family::monomial:
        for (double e : nd->exps) nd->degree += e;
        break;
      case Family::radial_power:
      case Family::sum_power:
      case Family::marcus_lopes: nd->degree = param; break;
      case Family::product:
        for (const auto& k : nd->kids) nd->degree += k.degree();
        break;
      case Family::power: nd->degree = param * nd->kids[0].degree(); break;
    }
    HomogeneousWeight w(nd);
    return w;
  }

  explicit HomogeneousWeight(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  bool all_constant() const {
    if (node_->family == Family::constant) return true;
    if (node_->family == Family::product || node_->family == Family::power) {
      for (const auto& k : node_->kids)
        if (!k.all_constant()) return false;
      return true;
    }
    if (node_->family == Family::monomial) {
      for (double e : node_->exps)
        if (e != 0.0) return false;
      return true;
    }
    return node_->param == 0.0;
  }

  static double sum_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }

  static double eval(const Node& nd, std::span<const double> x) {
    switch (nd.family) {
      case Family::constant: return nd.param;
      case Family::monomial: {
        if (nd.exps.size() != x.size()) throw Error(ErrorKind::dimension_mismatch, "monomial exponent count differs from point length");
        double v = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i)
          if (nd.exps[i] != 0.0) v *= std::pow(x[i], nd.exps[i]);
        return v;
      }
      case Family::radial_power: return nd.param == 0.0 ? 1.0 : std::pow(norm(x), nd.param);
      case Family::sum_power: {
        double s = sum_of(x);
        return nd.param == 0.0 ? 1.0 : (s > 0.0 ? std::pow(s, nd.param) : std::nan(""));
      }
      case Family::marcus_lopes: {
        double n1 = static_cast<double>(x.size()) - 1.0;
        double lg = -std::log(sum_of(x));
        for (double v : x) lg += std::log(v);
        return std::exp(nd.param / n1 * lg);
      }
      case Family::product: {
        double v = 1.0;
        for (const auto& k : nd.kids) v *= k.value(x);
        return v;
      }
      case Family::power: return std::pow(nd.kids[0].value(x), nd.param);
    }
    return std::nan("");
  }

  static void grad(const Node& nd, std::span<const double> x, double w, Point& g) {
    std::size_t n = x.size();
    switch (nd.family) {
      case Family::constant: std::fill(g.begin(), g.end(), 0.0); return;
      case Family::monomial:
        for (std::size_t i = 0; i < n; ++i) {
          double e = nd.exps[i];
          if (e == 0.0) {
            g[i] = 0.0;
            continue;
          }
          double v = e * std::pow(x[i], e - 1.0);
          for (std::size_t j = 0; j < n; ++j)
            if (j != i && nd.exps[j] != 0.0) v *= std::pow(x[j], nd.exps[j]);
          g[i] = v;
        }
        return;
      case Family::radial_power: {
        double r = norm(x);
        double c = nd.param == 0.0 ? 0.0 : nd.param * std::pow(r, nd.param - 2.0);
        for (std::size_t i = 0; i < n; ++i) g[i] = c * x[i];
        return;
      }
      case Family::sum_power: {
        double c = nd.param == 0.0 ? 0.0 : nd.param * std::pow(sum_of(x), nd.param - 1.0);
        std::fill(g.begin(), g.end(), c);
        return;
      }
      case Family::marcus_lopes: {
        double k = nd.param / (static_cast<double>(n) - 1.0);
        double s = sum_of(x);
        for (std::size_t i = 0; i < n; ++i) g[i] = w * k * (1.0 / x[i] - 1.0 / s);
        return;
      }
      case Family::product: {
        // d(prod w_k) = sum_k dw_k prod_{j != k} w_j, written without dividing by w_k.
        std::vector<double> vals;
        for (const auto& kd : nd.kids) vals.push_back(kd.value(x));
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t k = 0; k < nd.kids.size(); ++k) {
          double others = 1.0;
          for (std::size_t j = 0; j < nd.kids.size(); ++j)
            if (j != k) others *= vals[j];
          Point gk(n, 0.0);
          grad(*nd.kids[k].node_, x, vals[k], gk);
          for (std::size_t i = 0; i < n; ++i) g[i] += others * gk[i];
        }
        return;
      }
      case Family::power: {
        double b = nd.kids[0].value(x);
        Point gb(n, 0.0);
        grad(*nd.kids[0].node_, x, b, gb);
        double c = nd.param * std::pow(b, nd.param - 1.0);
        for (std::size_t i = 0; i < n; ++i) g[i] = c * gb[i];
        return;
      }
    }
  }

  static void print(const Node& nd, std::ostream& os, bool as_factor) {
    switch (nd.family) {
      case Family::constant: os << "const(" << nd.param << ")"; return;
      case Family::monomial:
        os << "mono(";
        for (std::size_t i = 0; i < nd.exps.size(); ++i) os << (i ? "," : "") << nd.exps[i];
        os << ")";
        return;
      case Family::radial_power: os << "radial(" << nd.param << ")"; return;
      case Family::sum_power: os << "sum(" << nd.param << ")"; return;
      case Family::marcus_lopes: os << "ml(" << nd.param << ")"; return;
      case Family::product:
        if (as_factor) os << "(";
        for (std::size_t k = 0; k < nd.kids.size(); ++k) {
          if (k) os << " * ";
          print(*nd.kids[k].node_, os, true);
        }
        if (as_factor) os << ")";
        return;
      case Family::power: {
        bool wrap = nd.kids[0].family() == Family::product || nd.kids[0].family() == Family::power;
        if (wrap) os << "(";
        print(*nd.kids[0].node_, os, false);
        if (wrap) os << ")";
        os << "^" << nd.param;
        return;
      }
    }
  }

  std::shared_ptr<const Node> node_;
};

/// Checked evaluation: the value must be finite and positive.
inline double weight_eval(const HomogeneousWeight& w, std::span<const double> x) {
  double v = w.value(x);
  if (!std::isfinite(v) || !(v > 0.0)) throw Error(ErrorKind::outside_cone, "weight " + w.to_string() + " is not positive and finite here");
  return v;
}

inline double weight_eval(const HomogeneousWeight& w, const ConvexCone& cone, std::span<const double> x) {
  if (!cone.contains(x)) throw Error(ErrorKind::outside_cone, "point is not inside the cone");
  return weight_eval(w, x);
}

inline Point weight_grad(const HomogeneousWeight& w, std::span<const double> x) {
  weight_eval(w, x);
  Point g = w.gradient(x);
  for (double v : g)
    if (!std::isfinite(v)) throw Error(ErrorKind::nondifferentiable_point, "gradient of " + w.to_string() + " is not finite here");
  return g;
}

inline Point weight_grad(const HomogeneousWeight& w, const ConvexCone& cone, std::span<const double> x) {
  if (!cone.contains(x)) throw Error(ErrorKind::outside_cone, "point is not inside the cone");
  return weight_grad(w, x);
}

/// (grad w(x) . x - deg w(x)) / w(x); zero by Euler's identity.
inline double euler_residual(const HomogeneousWeight& w, std::span<const double> x) {
  double v = weight_eval(w, x);
  Point g = weight_grad(w, x);
  return (dot(g, x) - w.degree() * v) / v;
}

namespace detail {

class WeightParser {
 public:
  explicit WeightParser(std::string_view s) : s_(s) {}

  HomogeneousWeight parse() {
    HomogeneousWeight w = product();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return w;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const {
    throw Error(ErrorKind::parse_error, "weight '" + std::string(s_) + "' at column " + std::to_string(i_ + 1) + ": " + m);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  double number() {
    skip();
    std::size_t start = i_;
    if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
    while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.' || s_[i_] == 'e' || s_[i_] == 'E' ||
                              ((s_[i_] == '-' || s_[i_] == '+') && (s_[i_ - 1] == 'e' || s_[i_ - 1] == 'E'))))
      ++i_;
    std::string tok(s_.substr(start, i_ - start));
    // a/b fractions are convenient for exponents like 1/2
    if (i_ < s_.size() && s_[i_] == '/') {
      ++i_;
      double den = number();
      return to_double(tok) / den;
    }
    return to_double(tok);
  }
  double to_double(const std::string& tok) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) fail("bad number '" + tok + "'");
      return v;
    } catch (const std::invalid_argument&) {
      fail("expected a number");
    } catch (const std::out_of_range&) {
      fail("number out of range");
    }
  }
  HomogeneousWeight product() {
    std::vector<HomogeneousWeight> parts{factor()};
    while (eat('*')) parts.push_back(factor());
    return HomogeneousWeight::product(std::move(parts));
  }
  HomogeneousWeight factor() {
    HomogeneousWeight w = primary();
    while (eat('^')) w = HomogeneousWeight::power(w, number());
    return w;
  }
  HomogeneousWeight primary() {
    skip();
    if (eat('(')) {
      HomogeneousWeight w = product();
      expect(')');
      return w;
    }
    std::size_t start = i_;
    while (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) ++i_;
    std::string name(s_.substr(start, i_ - start));
    if (name.empty()) fail("expected a weight family");
    expect('(');
    std::vector<double> args{number()};
    while (eat(',')) args.push_back(number());
    expect(')');
    auto one = [&]() {
      if (args.size() != 1) fail(name + " takes one argument");
      return args[0];
    };
    if (name == "const") return HomogeneousWeight::constant(one());
    if (name == "mono") return HomogeneousWeight::monomial(args);
    if (name == "radial") return HomogeneousWeight::radial_power(one());
    if (name == "sum") return HomogeneousWeight::sum_power(one());
    if (name == "ml") return HomogeneousWeight::marcus_lopes(one());
    throw Error(ErrorKind::invalid_family, "unknown weight family '" + name + "'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline HomogeneousWeight parse_weight(std::string_view text) { return detail::WeightParser(text).parse(); }

}  // namespace wsi
