#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace wsi {

using Point = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Point scaled(std::span<const double> a, double s) {
  Point r(a.begin(), a.end());
  for (double& v : r) v *= s;
  return r;
}

inline Point normalized(std::span<const double> a) { return scaled(a, 1.0 / norm(a)); }

inline Point add(std::span<const double> a, std::span<const double> b) {
  Point r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline Point sub(std::span<const double> a, std::span<const double> b) {
  Point r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace wsi
