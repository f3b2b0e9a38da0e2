#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace wsi {

struct PatternSearchOptions {
  std::vector<double> steps;  // initial step per coordinate; empty -> initial_step everywhere
  double initial_step = 0.1;
  double min_step = 1e-10;
  double shrink = 0.5;
  int max_iterations = 40;
  int max_evaluations = std::numeric_limits<int>::max();
};

struct PatternSearchResult {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int iterations = 0;
  std::vector<double> trace;  // incumbent value after each evaluation
};

/// Compass search maximizing f. Non-finite values count as -inf. The trajectory
/// does not depend on max_evaluations, so a larger budget only extends it.
template <class F>
PatternSearchResult maximize_pattern(F&& f, std::vector<double> x0, const PatternSearchOptions& opt = {}) {
  auto score = [&](const std::vector<double>& x) {
    double v = f(x);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  };
  PatternSearchResult r;
  r.x = std::move(x0);
  std::vector<double> step = opt.steps.empty() ? std::vector<double>(r.x.size(), opt.initial_step) : opt.steps;
  auto record = [&](double v) {
    ++r.evaluations;
    r.trace.push_back(std::max(v, r.trace.empty() ? v : r.trace.back()));
  };
  r.value = score(r.x);
  record(r.value);
  for (; r.iterations < opt.max_iterations; ++r.iterations) {
    bool improved = false;
    for (std::size_t i = 0; i < r.x.size() && r.evaluations < opt.max_evaluations; ++i) {
      for (double sgn : {1.0, -1.0}) {
        if (r.evaluations >= opt.max_evaluations) break;
        std::vector<double> y = r.x;
        y[i] += sgn * step[i];
        double v = score(y);
        record(v);
        if (v > r.value) {
          r.value = v;
          r.x = std::move(y);
          improved = true;
          break;
        }
      }
    }
    if (r.evaluations >= opt.max_evaluations) break;
    if (!improved) {
      double biggest = 0.0;
      for (double& s : step) {
        s *= opt.shrink;
        biggest = std::max(biggest, s);
      }
      if (biggest < opt.min_step) break;
    }
  }
  return r;
}

template <class F>
PatternSearchResult minimize_pattern(F&& f, std::vector<double> x0, const PatternSearchOptions& opt = {}) {
  auto r = maximize_pattern([&](const std::vector<double>& x) { return -f(x); }, std::move(x0), opt);
  r.value = -r.value;
  for (double& t : r.trace) t = -t;
  return r;
}

}  // namespace wsi
