#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cone.hpp"
#include "error.hpp"
#include "exponents.hpp"
#include "weight.hpp"

namespace wsi {

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> t{"validate", "check_c0", "check_c1", "k0",       "sharp",     "verify",
                                          "necessity", "spectral_gap", "ckn", "heisenberg", "transport"};
  return t;
}

struct NumericKnobs {
  std::uint64_t seed = 1;
  long samples = 20000;
  int grid = 128;
  int budget = 40;

  bool operator==(const NumericKnobs&) const = default;
};

struct CknKnobs {
  double beta = 0.0;
  double gamma = 0.0;

  bool operator==(const CknKnobs&) const = default;
};

/// A fully parsed scenario. q is always derived from the balance condition.
struct Scenario {
  std::string name = "scenario";
  ConvexCone cone = ConvexCone::full_space(2);
  HomogeneousWeight omega;
  HomogeneousWeight sigma;
  double p = 1.0;
  std::vector<std::string> tasks;
  NumericKnobs numeric;
  std::optional<CknKnobs> ckn;

  int n() const { return cone.dimension(); }
  double tau() const { return omega.degree(); }
  double alpha() const { return sigma.degree(); }
  ExponentSet raw_exponents() const { return derive_exponents(n(), p, tau(), alpha()); }
  bool has_task(const std::string& t) const { return std::find(tasks.begin(), tasks.end(), t) != tasks.end(); }

  bool operator==(const Scenario& o) const {
    return name == o.name && cone == o.cone && omega == o.omega && sigma == o.sigma && p == o.p && tasks == o.tasks && numeric == o.numeric &&
           ckn == o.ckn;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] inline void config_fail(ErrorKind k, int line, const std::string& m) {
  throw Error(k, "line " + std::to_string(line) + ": " + m);
}

inline double config_number(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    config_fail(ErrorKind::parse_error, line, key + " expects a number, got '" + v + "'");
  }
}

inline long config_integer(const std::string& v, int line, const std::string& key, long lo) {
  double d = config_number(v, line, key);
  if (d != std::floor(d) || d < lo || d > 9.0e15) config_fail(ErrorKind::parse_error, line, key + " expects an integer >= " + std::to_string(lo));
  return static_cast<long>(d);
}

}  // namespace detail

/// Key-value grammar with optional [numeric] and [ckn] sections; '#' starts a comment.
inline Scenario parse_config(const std::string& text) {
  Scenario s;
  std::istringstream is(text);
  std::string raw, section;
  int line = 0;
  std::map<std::string, int> seen;
  std::optional<std::string> cone_text, omega_text, sigma_text;
  int cone_line = 0, omega_line = 0, sigma_line = 0;
  std::optional<std::pair<double, int>> tau, alpha, dimension;
  bool have_p = false;
  CknKnobs ckn;
  bool ckn_beta = false, ckn_gamma = false;
  while (std::getline(is, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string l = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']') detail::config_fail(ErrorKind::parse_error, line, "unterminated section header");
      section = detail::trim(l.substr(1, l.size() - 2));
      if (section != "numeric" && section != "ckn") detail::config_fail(ErrorKind::unknown_key, line, "unknown section [" + section + "]");
      continue;
    }
    auto eq = l.find('=');
    if (eq == std::string::npos) detail::config_fail(ErrorKind::parse_error, line, "expected key = value");
    std::string key = detail::trim(l.substr(0, eq)), val = detail::trim(l.substr(eq + 1));
    if (key.empty()) detail::config_fail(ErrorKind::parse_error, line, "missing key");
    std::string full = section.empty() ? key : section + "." + key;
    if (seen.count(full)) detail::config_fail(ErrorKind::parse_error, line, "duplicate key '" + full + "' (first on line " + std::to_string(seen[full]) + ")");
    seen[full] = line;
    if (section.empty()) {
      if (key == "name") {
        if (val.empty() || val.find_first_of(" \t/\\") != std::string::npos)
          detail::config_fail(ErrorKind::parse_error, line, "name must be a non-empty word without spaces or slashes");
        s.name = val;
      } else if (key == "cone") {
        cone_text = val, cone_line = line;
      } else if (key == "omega") {
        omega_text = val, omega_line = line;
      } else if (key == "sigma") {
        sigma_text = val, sigma_line = line;
      } else if (key == "p") {
        s.p = detail::config_number(val, line, key);
        have_p = true;
      } else if (key == "tau") {
        tau = {detail::config_number(val, line, key), line};
      } else if (key == "alpha") {
        alpha = {detail::config_number(val, line, key), line};
      } else if (key == "dimension") {
        dimension = {static_cast<double>(detail::config_integer(val, line, key, 1)), line};
      } else if (key == "tasks") {
        std::string v = val;
        if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
        std::stringstream ts(v);
        std::string t;
        while (std::getline(ts, t, ',')) {
          t = detail::trim(t);
          if (t.empty()) continue;
          if (std::find(known_tasks().begin(), known_tasks().end(), t) == known_tasks().end())
            detail::config_fail(ErrorKind::parse_error, line, "unknown task '" + t + "'");
          if (!s.has_task(t)) s.tasks.push_back(t);
        }
      } else if (key == "q") {
        detail::config_fail(ErrorKind::unknown_key, line, "q is derived from n, p, tau and alpha and cannot be set");
      } else {
        detail::config_fail(ErrorKind::unknown_key, line, "unknown key '" + key + "'");
      }
    } else if (section == "numeric") {
      if (key == "seed")
        s.numeric.seed = static_cast<std::uint64_t>(detail::config_integer(val, line, key, 0));
      else if (key == "samples")
        s.numeric.samples = detail::config_integer(val, line, key, 1);
      else if (key == "grid")
        s.numeric.grid = static_cast<int>(detail::config_integer(val, line, key, 8));
      else if (key == "budget")
        s.numeric.budget = static_cast<int>(detail::config_integer(val, line, key, 1));
      else
        detail::config_fail(ErrorKind::unknown_key, line, "unknown key '" + full + "'");
    } else {
      if (key == "beta")
        ckn.beta = detail::config_number(val, line, key), ckn_beta = true;
      else if (key == "gamma")
        ckn.gamma = detail::config_number(val, line, key), ckn_gamma = true;
      else
        detail::config_fail(ErrorKind::unknown_key, line, "unknown key '" + full + "'");
    }
  }
  if (!cone_text) detail::config_fail(ErrorKind::parse_error, line, "missing required key 'cone'");
  if (!omega_text) detail::config_fail(ErrorKind::parse_error, line, "missing required key 'omega'");
  if (!sigma_text) detail::config_fail(ErrorKind::parse_error, line, "missing required key 'sigma'");
  if (!have_p) detail::config_fail(ErrorKind::parse_error, line, "missing required key 'p'");
  auto rethrow = [](int ln, auto&& f) {
    try {
      return f();
    } catch (const Error& e) {
      detail::config_fail(e.kind(), ln, e.detail());
    }
  };
  s.cone = rethrow(cone_line, [&] { return parse_cone(*cone_text); });
  s.omega = rethrow(omega_line, [&] { return parse_weight(*omega_text); });
  s.sigma = rethrow(sigma_line, [&] { return parse_weight(*sigma_text); });
  if (dimension && static_cast<int>(dimension->first) != s.n())
    detail::config_fail(ErrorKind::dimension_mismatch, dimension->second, "dimension does not match the cone " + s.cone.to_string());
  const Point& axis = s.cone.axis();
  if (axis.empty()) detail::config_fail(ErrorKind::empty_cone, cone_line, "cone has empty interior");
  for (auto [w, ln, nm] : {std::tuple{&s.omega, omega_line, "omega"}, std::tuple{&s.sigma, sigma_line, "sigma"}}) {
    rethrow(ln, [&] {
      double v = w->value(axis);
      if (!std::isfinite(v) || !(v > 0.0)) throw Error(ErrorKind::outside_cone, std::string(nm) + " is not positive inside the cone");
      return v;
    });
  }
  if (tau && std::abs(tau->first - s.tau()) > 1e-12)
    detail::config_fail(ErrorKind::parse_error, tau->second, "tau = " + detail::fmt_number(tau->first) + " but omega has degree " + detail::fmt_number(s.tau()));
  if (alpha && std::abs(alpha->first - s.alpha()) > 1e-12)
    detail::config_fail(ErrorKind::parse_error, alpha->second,
                        "alpha = " + detail::fmt_number(alpha->first) + " but sigma has degree " + detail::fmt_number(s.alpha()));
  if (!(s.p >= 1.0)) detail::config_fail(ErrorKind::range_violation, seen["p"], "p must be at least 1");
  if (ckn_beta != ckn_gamma) detail::config_fail(ErrorKind::parse_error, line, "[ckn] needs both beta and gamma");
  if (ckn_beta) s.ckn = ckn;
  if (s.has_task("ckn") && !s.ckn) detail::config_fail(ErrorKind::parse_error, line, "task ckn needs a [ckn] section");
  return s;
}

/// Canonical text form; parse_config(emit_config(s)) == s.
inline std::string emit_config(const Scenario& s) {
  std::ostringstream os;
  os << "name = " << s.name << "\n";
  os << "cone = " << s.cone.to_string() << "\n";
  os << "dimension = " << s.n() << "\n";
  os << "omega = " << s.omega.to_string() << "\n";
  os << "sigma = " << s.sigma.to_string() << "\n";
  os << "p = " << detail::fmt_number(s.p) << "\n";
  os << "tau = " << detail::fmt_number(s.tau()) << "\n";
  os << "alpha = " << detail::fmt_number(s.alpha()) << "\n";
  os << "tasks = ";
  for (std::size_t i = 0; i < s.tasks.size(); ++i) os << (i ? ", " : "") << s.tasks[i];
  os << "\n\n[numeric]\n";
  os << "seed = " << s.numeric.seed << "\n";
  os << "samples = " << s.numeric.samples << "\n";
  os << "grid = " << s.numeric.grid << "\n";
  os << "budget = " << s.numeric.budget << "\n";
  if (s.ckn) {
    os << "\n[ckn]\n";
    os << "beta = " << detail::fmt_number(s.ckn->beta) << "\n";
    os << "gamma = " << detail::fmt_number(s.ckn->gamma) << "\n";
  }
  return os.str();
}

}  // namespace wsi
