#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "constants.hpp"
#include "densities.hpp"
#include "grid_function.hpp"
#include "random.hpp"

namespace wsi {

/// Atoms with positive masses summing to one.
struct DiscreteMeasure {
  std::vector<Point> points;
  std::vector<double> masses;

  std::size_t size() const { return points.size(); }
  int dimension() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }

  void validate(const ConvexCone* cone = nullptr) const {
    if (points.size() != masses.size()) throw Error(ErrorKind::dimension_mismatch, "points and masses differ in length");
    if (points.empty()) throw Error(ErrorKind::invalid_argument, "empty measure");
    double total = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (static_cast<int>(points[i].size()) != dimension()) throw Error(ErrorKind::dimension_mismatch, "atoms of different dimension");
      if (!(masses[i] > 0.0)) throw Error(ErrorKind::invalid_argument, "masses must be positive");
      if (cone && !cone->contains(points[i])) throw Error(ErrorKind::outside_cone, "atom " + std::to_string(i) + " outside the cone");
      total += masses[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::normalization_failure, "masses sum to " + std::to_string(total));
  }

  /// One "x1 ... xn mass" line per atom.
  void write(std::ostream& os) const {
    os.precision(17);
    for (std::size_t i = 0; i < size(); ++i) {
      for (double c : points[i]) os << c << ' ';
      os << masses[i] << '\n';
    }
  }

  static DiscreteMeasure read(std::istream& is) {
    DiscreteMeasure m;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
      std::istringstream ls(line);
      std::vector<double> row;
      std::string tok;
      while (ls >> tok) {
        try {
          std::size_t used = 0;
          row.push_back(std::stod(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw Error(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": bad number '" + tok + "'");
        }
      }
      if (row.size() < 2) throw Error(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": need coordinates and a mass");
      m.masses.push_back(row.back());
      row.pop_back();
      m.points.push_back(row);
    }
    m.validate();
    return m;
  }

  std::string to_text() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }
  static DiscreteMeasure from_text(const std::string& s) {
    std::istringstream is(s);
    return read(is);
  }
};

inline DiscreteMeasure uniform_measure(std::vector<Point> pts) {
  DiscreteMeasure m;
  m.masses.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
  m.points = std::move(pts);
  return m;
}

/// Atoms at the active cells of u with masses |u|^q ω, normalized.
inline DiscreteMeasure measure_from_grid(const GridFunction& u, const HomogeneousWeight& omega, double q) {
  DiscreteMeasure m;
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!u.active(i) || u.value(i) == 0.0) continue;
    Point x = u.center(i);
    double w = std::pow(std::abs(u.value(i)), q) * omega.value(x);
    if (!(w > 0.0)) continue;
    m.points.push_back(std::move(x));
    m.masses.push_back(w);
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw Error(ErrorKind::normalization_failure, "measure has no mass");
  for (double& w : m.masses) w /= total;
  return m;
}

struct TransportPlan {
  struct Entry {
    std::size_t i, j;
    double mass;
  };
  std::vector<Entry> entries;
  double cost = 0.0;

  /// Largest deviation of the row and column sums from the marginals.
  double marginal_error(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
    std::vector<double> r(mu.size(), 0.0), c(nu.size(), 0.0);
    for (const auto& e : entries) r[e.i] += e.mass, c[e.j] += e.mass;
    double err = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) err = std::max(err, std::abs(r[i] - mu.masses[i]));
    for (std::size_t j = 0; j < c.size(); ++j) err = std::max(err, std::abs(c[j] - nu.masses[j]));
    return err;
  }

  /// target[i] if the plan sends atom i wholly to one atom of equal mass, else empty.
  std::vector<std::size_t> permutation(std::size_t n) const {
    if (entries.size() != n) return {};
    std::vector<std::size_t> out(n, n);
    for (const auto& e : entries) {
      if (e.i >= n || out[e.i] != n) return {};
      out[e.i] = e.j;
    }
    return out;
  }
};

namespace detail {

inline double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

inline TransportPlan monotone_plan(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<std::size_t> a(mu.size()), b(nu.size());
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  std::stable_sort(a.begin(), a.end(), [&](auto x, auto y) { return mu.points[x][0] < mu.points[y][0]; });
  std::stable_sort(b.begin(), b.end(), [&](auto x, auto y) { return nu.points[x][0] < nu.points[y][0]; });
  TransportPlan plan;
  std::size_t i = 0, j = 0;
  double ri = mu.masses[a[0]], rj = nu.masses[b[0]];
  while (i < a.size() && j < b.size()) {
    double m = std::min(ri, rj);
    if (m > 0.0) {
      plan.entries.push_back({a[i], b[j], m});
      plan.cost += m * sq_dist(mu.points[a[i]], nu.points[b[j]]);
    }
    ri -= m, rj -= m;
    bool last_i = i + 1 == a.size(), last_j = j + 1 == b.size();
    if (last_i && last_j) break;
    if ((ri <= rj && !last_i) || last_j) {
      ++i;
      ri += mu.masses[a[i]];
    } else {
      ++j;
      rj += nu.masses[b[j]];
    }
  }
  return plan;
}

/// Transportation simplex on a spanning tree of basic cells.
class TransportSimplex {
 public:
  TransportSimplex(const DiscreteMeasure& mu, const DiscreteMeasure& nu) : m_(mu.size()), n_(nu.size()), mu_(mu), nu_(nu) {
    cost_.resize(m_ * n_);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) cost_[i * n_ + j] = sq_dist(mu.points[i], nu.points[j]);
  }

  TransportPlan solve() {
    northwest_corner();
    std::size_t cap = 50 * (m_ + n_) * (m_ + n_) + 1000;
    for (std::size_t it = 0;; ++it) {
      if (it > cap) throw Error(ErrorKind::size_exceeded, "transport simplex iteration limit");
      potentials();
      auto [ei, ej] = entering();
      if (ei == m_) break;
      pivot(ei, ej);
    }
    TransportPlan plan;
    for (const auto& b : basis_) {
      if (b.flow <= 0.0) continue;
      plan.entries.push_back({b.i, b.j, b.flow});
      plan.cost += b.flow * cost_[b.i * n_ + b.j];
    }
    std::sort(plan.entries.begin(), plan.entries.end(), [](const auto& x, const auto& y) { return x.i != y.i ? x.i < y.i : x.j < y.j; });
    return plan;
  }

 private:
  struct Basic {
    std::size_t i, j;
    double flow;
  };

  void northwest_corner() {
    std::vector<double> s = mu_.masses, d = nu_.masses;
    std::size_t i = 0, j = 0;
    while (true) {
      double x = std::min(s[i], d[j]);
      basis_.push_back({i, j, x});
      s[i] -= x, d[j] -= x;
      if (i + 1 == m_ && j + 1 == n_) break;
      if ((s[i] <= d[j] && i + 1 < m_) || j + 1 == n_)
        ++i;
      else
        ++j;
    }
  }

  // Node k < m is row k, node m + j is column j.
  void build_adjacency() {
    adj_.assign(m_ + n_, {});
    for (std::size_t b = 0; b < basis_.size(); ++b) {
      adj_[basis_[b].i].push_back(b);
      adj_[m_ + basis_[b].j].push_back(b);
    }
  }

  void potentials() {
    build_adjacency();
    u_.assign(m_, 0.0);
    v_.assign(n_, 0.0);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      std::size_t k = stack.back();
      stack.pop_back();
      for (std::size_t b : adj_[k]) {
        const auto& e = basis_[b];
        std::size_t other = k < m_ ? m_ + e.j : e.i;
        if (seen[other]) continue;
        seen[other] = 1;
        if (k < m_)
          v_[e.j] = cost_[e.i * n_ + e.j] - u_[e.i];
        else
          u_[e.i] = cost_[e.i * n_ + e.j] - v_[e.j];
        stack.push_back(other);
      }
    }
  }

  std::pair<std::size_t, std::size_t> entering() {
    double best = -1e-12 * (1.0 + max_cost());
    std::size_t bi = m_, bj = n_;
    std::size_t total = m_ * n_, block = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(static_cast<double>(total))));
    std::size_t scanned = 0;
    while (scanned < total) {
      for (std::size_t k = 0; k < block && scanned < total; ++k, ++scanned) {
        std::size_t idx = cursor_;
        cursor_ = (cursor_ + 1) % total;
        std::size_t i = idx / n_, j = idx % n_;
        double r = cost_[idx] - u_[i] - v_[j];
        if (r < best) best = r, bi = i, bj = j;
      }
      if (bi != m_) break;
    }
    return {bi, bj};
  }

  double max_cost() {
    if (max_cost_ < 0.0) max_cost_ = *std::max_element(cost_.begin(), cost_.end());
    return max_cost_;
  }

  void pivot(std::size_t ei, std::size_t ej) {
    // Path in the tree from column ej to row ei.
    std::vector<std::size_t> parent_edge(m_ + n_, basis_.size());
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> queue{m_ + ej};
    seen[m_ + ej] = 1;
    for (std::size_t h = 0; h < queue.size() && !seen[ei]; ++h) {
      std::size_t k = queue[h];
      for (std::size_t b : adj_[k]) {
        std::size_t other = k < m_ ? m_ + basis_[b].j : basis_[b].i;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_edge[other] = b;
        queue.push_back(other);
      }
    }
    std::vector<std::size_t> path;  // edges from row ei back to column ej
    for (std::size_t k = ei; k != m_ + ej;) {
      std::size_t b = parent_edge[k];
      path.push_back(b);
      k = k < m_ ? m_ + basis_[b].j : basis_[b].i;
    }
    // Signs alternate -, +, - ... starting at the edge touching row ei.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = basis_.size();
    for (std::size_t t = 0; t < path.size(); t += 2)
      if (basis_[path[t]].flow < theta) theta = basis_[path[t]].flow, leave = path[t];
    theta = std::max(theta, 0.0);
    for (std::size_t t = 0; t < path.size(); ++t) basis_[path[t]].flow += t % 2 == 0 ? -theta : theta;
    basis_[leave] = {ei, ej, theta};
  }

  std::size_t m_, n_;
  const DiscreteMeasure& mu_;
  const DiscreteMeasure& nu_;
  std::vector<double> cost_;
  std::vector<Basic> basis_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<double> u_, v_;
  std::size_t cursor_ = 0;
  double max_cost_ = -1.0;
};

}  // namespace detail

/// Exact optimal plan for the quadratic cost. One-dimensional inputs use the
/// monotone rearrangement.
inline TransportPlan solve_discrete_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t max_atoms = 2000) {
  if (mu.size() > max_atoms || nu.size() > max_atoms)
    throw Error(ErrorKind::size_exceeded, "at most " + std::to_string(max_atoms) + " atoms per measure");
  mu.validate();
  nu.validate();
  if (mu.dimension() != nu.dimension()) throw Error(ErrorKind::dimension_mismatch, "measures live in different dimensions");
  if (mu.dimension() == 1) return detail::monotone_plan(mu, nu);
  return detail::TransportSimplex(mu, nu).solve();
}

/// Number of sampled support cycles (length 2 and 3) that a cheaper relabelling beats.
inline int cyclical_monotonicity_violations(const TransportPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu, int samples,
                                            std::uint64_t seed, double tol = 1e-10) {
  const auto& e = plan.entries;
  if (e.size() < 2) return 0;
  Rng rng(seed);
  int bad = 0;
  for (int s = 0; s < samples; ++s) {
    int len = 2 + static_cast<int>(rng.index(2));
    std::vector<std::size_t> k(len);
    for (auto& v : k) v = rng.index(e.size());
    double base = 0.0, shifted = 0.0;
    for (int t = 0; t < len; ++t) {
      base += detail::sq_dist(mu.points[e[k[t]].i], nu.points[e[k[t]].j]);
      shifted += detail::sq_dist(mu.points[e[k[t]].i], nu.points[e[k[(t + 1) % len]].j]);
    }
    if (shifted < base - tol * (1.0 + base)) ++bad;
  }
  return bad;
}

/// T(x_i) = Σ_j π_ij y_j / μ_i; exact for permutation plans, an average otherwise.
inline std::vector<Point> barycentric_map(const TransportPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  int n = nu.dimension();
  std::vector<Point> out(mu.size(), Point(n, 0.0));
  for (const auto& e : plan.entries)
    for (int k = 0; k < n; ++k) out[e.i][k] += e.mass * nu.points[e.j][k];
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (int k = 0; k < n; ++k) out[i][k] /= mu.masses[i];
  return out;
}

/// Axis-aligned histogram cells.
struct Binning {
  Point lo, hi;
  std::vector<int> bins;

  int dimension() const { return static_cast<int>(bins.size()); }
  std::size_t count() const {
    std::size_t c = 1;
    for (int b : bins) c *= static_cast<std::size_t>(b);
    return c;
  }
  /// Cell index or count() when x is outside.
  std::size_t locate(const Point& x) const {
    std::size_t idx = 0;
    for (int k = 0; k < dimension(); ++k) {
      double t = (x[k] - lo[k]) / (hi[k] - lo[k]);
      if (t < 0.0 || t > 1.0) return count();
      int c = std::min(bins[k] - 1, static_cast<int>(t * bins[k]));
      idx = idx * static_cast<std::size_t>(bins[k]) + static_cast<std::size_t>(c);
    }
    return idx;
  }
};

namespace detail {

inline std::vector<double> histogram(const std::vector<Point>& pts, const std::vector<double>& masses, const Binning& b) {
  std::vector<double> h(b.count(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (static_cast<int>(pts[i].size()) != b.dimension()) throw Error(ErrorKind::binning_mismatch, "atom dimension differs from binning");
    std::size_t c = b.locate(pts[i]);
    if (c == b.count()) throw Error(ErrorKind::binning_mismatch, "atom outside the binning box");
    h[c] += masses[i];
  }
  return h;
}

inline void check_binning(const Binning& b) {
  if (b.lo.size() != b.bins.size() || b.hi.size() != b.bins.size() || b.bins.empty())
    throw Error(ErrorKind::binning_mismatch, "binning box and bin counts differ in length");
  for (int k = 0; k < b.dimension(); ++k)
    if (b.bins[k] < 1 || !(b.hi[k] > b.lo[k])) throw Error(ErrorKind::binning_mismatch, "empty binning box");
}

/// Mass fraction of a density in each bin, by a midpoint rule with `sub` points per bin and axis.
inline std::vector<double> density_histogram(const std::function<double(const Point&)>& v_density, const Binning& b, int sub) {
  int n = b.dimension();
  std::vector<int> fine(n);
  for (int k = 0; k < n; ++k) fine[k] = b.bins[k] * sub;
  auto g = GridFunction::sample(ConvexCone::full_space(n), b.lo, b.hi, fine, v_density);
  std::vector<double> c(b.count(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double w = g.value(i);
    if (!(w > 0.0)) continue;
    c[b.locate(g.center(i))] += w;
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::normalization_failure, "target density has no mass in the binning box");
  for (double& w : c) w /= total;
  return c;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& c) {
  double tv = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) tv += std::abs(a[k] - c[k]);
  return 0.5 * tv;
}

}  // namespace detail

/// Total variation between the push-forward of μ by `mapped` (image of each atom)
/// and ν, both histogrammed on the same cells.
inline double monge_ampere_residual(const DiscreteMeasure& mu, const std::vector<Point>& mapped, const DiscreteMeasure& nu, const Binning& b) {
  detail::check_binning(b);
  if (mapped.size() != mu.size()) throw Error(ErrorKind::dimension_mismatch, "one image per atom");
  return detail::total_variation(detail::histogram(mapped, mu.masses, b), detail::histogram(nu.points, nu.masses, b));
}

/// Residual against a target density ν = v dy instead of atoms.
inline double monge_ampere_residual(const DiscreteMeasure& mu, const std::vector<Point>& mapped, const std::function<double(const Point&)>& v_density,
                                    const Binning& b, int sub = 8) {
  detail::check_binning(b);
  if (mapped.size() != mu.size()) throw Error(ErrorKind::dimension_mismatch, "one image per atom");
  return detail::total_variation(detail::histogram(mapped, mu.masses, b), detail::density_histogram(v_density, b, sub));
}

/// Residual with μ = |u|^q ω from a grid function and an explicit map.
inline double monge_ampere_residual(const GridFunction& u, const HomogeneousWeight& omega, double q, const std::function<double(const Point&)>& v_density,
                                    const std::function<Point(const Point&)>& map, const Binning& b, int sub = 8) {
  detail::check_binning(b);
  if (u.dimension() != b.dimension()) throw Error(ErrorKind::binning_mismatch, "grid and binning dimension differ");
  auto mu = measure_from_grid(u, omega, q);
  std::vector<Point> img;
  img.reserve(mu.size());
  for (const auto& x : mu.points) img.push_back(map(x));
  return monge_ampere_residual(mu, img, v_density, b, sub);
}

/// φ = λ|x|²/2 + b·x.
struct QuadraticPotential {
  double lambda = 1.0;
  Point shift;
};

/// φ = λ|x|^k / k with k > 1.
struct PowerPotential {
  double lambda = 1.0;
  double k = 2.0;
};

using Potential = std::variant<QuadraticPotential, PowerPotential>;

struct PotentialDerivatives {
  Point grad;
  double det = 0.0;
  double laplacian = 0.0;
};

inline PotentialDerivatives potential_derivatives(const Potential& phi, const Point& x) {
  int n = static_cast<int>(x.size());
  PotentialDerivatives d;
  if (auto qp = std::get_if<QuadraticPotential>(&phi)) {
    d.grad = scaled(x, qp->lambda);
    if (!qp->shift.empty()) d.grad = add(d.grad, qp->shift);
    d.det = std::pow(qp->lambda, n);
    d.laplacian = n * qp->lambda;
    return d;
  }
  const auto& pp = std::get<PowerPotential>(phi);
  double r = norm(x), rk = pp.lambda * std::pow(r, pp.k - 2.0);
  d.grad = scaled(x, rk);
  // eigenvalues: λ r^{k-2} (n-1 times) and λ (k-1) r^{k-2}
  d.det = std::pow(rk, n) * (pp.k - 1.0);
  d.laplacian = rk * (n - 1 + pp.k - 1.0);
  return d;
}

struct DivergenceCheck {
  double max_violation = -std::numeric_limits<double>::infinity();
  double max_relative_violation = -std::numeric_limits<double>::infinity();
  std::optional<Point> violating_point;
  int points_checked = 0;
};

/// Both sides of the pointwise divergence inequality for an analytic convex potential:
/// ω^{1-1/n_a} ω(∇φ)^{-1/q} σ(∇φ)^{1/p} det^{1/n_a} ≤ C̃0 div(ω^{1/p'} σ^{1/p} ∇φ),
/// or ω^{1-1/n_a} det^{1/n_a} ≤ (C1/n_a) div(...) in the critical case.
inline DivergenceCheck pointwise_divergence_check(const HomogeneousWeight& omega, const HomogeneousWeight& sigma, const ExponentSet& e,
                                                  const ConditionConstant& c, const Potential& phi, const std::vector<Point>& points,
                                                  const ConvexCone& cone) {
  Branch b = checked_branch(e, c);
  double k = b == Branch::second ? c.value / e.n_a : c0_tilde(e, c.value);
  DivergenceCheck out;
  for (const auto& x : points) {
    auto d = potential_derivatives(phi, x);
    if (!cone.contains(d.grad)) throw Error(ErrorKind::map_leaves_cone, "gradient of the potential leaves the cone");
    double w = weight_eval(omega, x), s = weight_eval(sigma, x);
    Point gw = weight_grad(omega, x), gs = weight_grad(sigma, x);
    double W = std::pow(w, e.inv_p_conj()) * std::pow(s, e.inv_p());
    double grad_dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) grad_dot += (e.inv_p_conj() * gw[i] / w + e.inv_p() * gs[i] / s) * d.grad[i];
    double rhs = k * W * (grad_dot + d.laplacian);
    double lhs = std::pow(w, 1.0 - e.inv_n_a()) * std::pow(d.det, e.inv_n_a());
    if (b == Branch::first) lhs *= std::pow(weight_eval(omega, d.grad), -e.inv_q()) * std::pow(weight_eval(sigma, d.grad), e.inv_p());
    double viol = lhs - rhs, rel = viol / std::max(std::abs(lhs), std::abs(rhs));
    ++out.points_checked;
    if (viol > out.max_violation) {
      out.max_violation = viol;
      if (viol > 1e-9) out.violating_point = x;
    }
    out.max_relative_violation = std::max(out.max_relative_violation, rel);
  }
  return out;
}

struct ChainCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Last step of the transport argument with v rescaled to unit mass:
/// ∫v^θ h ≤ prefactor (∫v|y|^{p'})^{1/p'} (∫|∇u|^p σ)^{1/p}, for u with ∫|u|^q ω = 1.
inline ChainCheck integrated_chain_check(const GridFunction& u, const TestDensity& v, const WeightedSetting& s, const ConditionConstant& c,
                                         const DensityOptions& opt = {}) {
  const ExponentSet& e = s.exps;
  double norm_q = weighted_lq_norm(u, s.omega, e.q);
  if (std::abs(std::pow(norm_q, e.q) - 1.0) > 1e-6) throw Error(ErrorKind::normalization_failure, "test function must satisfy ∫|u|^q ω = 1");
  Branch b = checked_branch(e, c);
  auto m = density_moments(v, s, b, opt);
  double th = detail::exponent_theta(e, b);
  ChainCheck out;
  out.lhs = m.core / std::pow(m.mass, th);
  out.rhs = k0_prefactor(e, c) * std::pow(m.moment / m.mass, e.inv_p_conj()) * weighted_grad_lp_norm(u, s.sigma, e.p);
  out.holds = out.lhs <= out.rhs * 1.01;
  return out;
}

/// u / ‖u‖_{L^q_ω}.
inline GridFunction normalize_lq(const GridFunction& u, const HomogeneousWeight& omega, double q) {
  double nq = weighted_lq_norm(u, omega, q);
  if (!(nq > 0.0)) throw Error(ErrorKind::normalization_failure, "test function vanishes");
  return u.scaled_by(1.0 / nq);
}

}  // namespace wsi
