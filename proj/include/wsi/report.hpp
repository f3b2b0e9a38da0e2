#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conditions.hpp"
#include "constants.hpp"
#include "random.hpp"
#include "scenario.hpp"
#include "transport.hpp"
#include "verifier.hpp"

namespace wsi {

enum class TaskStatus { ok, skipped, error };

inline const char* to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::ok: return "ok";
    case TaskStatus::skipped: return "skipped";
    case TaskStatus::error: return "error";
  }
  return "?";
}

struct ReportValue {
  std::string key;
  double value = 0.0;
  double tolerance = 0.0;
};

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct TaskResult {
  std::string task;
  TaskStatus status = TaskStatus::ok;
  std::string provenance;
  std::vector<ReportValue> values;
  std::vector<ReportTable> tables;
  std::vector<std::string> notes;
  double seconds = 0.0;  // kept out of emitted files

  const ReportValue* find(const std::string& key) const {
    for (const auto& v : values)
      if (v.key == key) return &v;
    return nullptr;
  }
};

struct Report {
  std::string scenario;
  std::string setting;
  std::string exponents;
  bool valid = false;
  std::string validation;
  std::vector<TaskResult> tasks;
  std::vector<std::string> warnings;
  double seconds = 0.0;

  const TaskResult* find(const std::string& task) const {
    for (const auto& t : tasks)
      if (t.task == task) return &t;
    return nullptr;
  }
  bool has_errors() const {
    for (const auto& t : tasks)
      if (t.status == TaskStatus::error) return true;
    return false;
  }
};

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// ω = c σ on sampled directions.
inline bool proportional_weights(const Scenario& s) {
  auto dirs = sample_cone_sphere(s.cone, 64, 7);
  dirs.push_back(s.cone.axis());
  double ref = s.omega.value(dirs.back()) / s.sigma.value(dirs.back());
  for (const auto& d : dirs) {
    double r = s.omega.value(d) / s.sigma.value(d);
    if (!(std::abs(r - ref) <= 1e-12 * std::abs(ref))) return false;
  }
  return true;
}

struct ConditionOutcome {
  std::optional<ConditionConstant> constant;
  std::string source;
  std::optional<ConditionReport> report;
  std::optional<double> monomial;
  std::string reason;  // why no constant is available
};

class ScenarioRunner {
 public:
  explicit ScenarioRunner(const Scenario& s) : s_(s) {}

  Report run() {
    auto t0 = std::chrono::steady_clock::now();
    Report r;
    r.scenario = s_.name;
    r.setting = "cone " + s_.cone.to_string() + ", omega " + s_.omega.to_string() + ", sigma " + s_.sigma.to_string() + ", p " + fmt(s_.p);
    try {
      raw_ = s_.raw_exponents();
      r.exponents = describe(*raw_);
    } catch (const Error& e) {
      r.exponents = std::string("not derivable: ") + e.what();
    }
    try {
      valid_ = validate_exponents(s_.n(), s_.p, s_.tau(), s_.alpha());
      r.valid = true;
      r.validation = "exponents admissible";
    } catch (const Error& e) {
      r.validation = e.what();
    }
    for (const auto& task : known_tasks()) {
      if (!s_.has_task(task)) continue;
      auto ts = std::chrono::steady_clock::now();
      TaskResult t;
      t.task = task;
      try {
        if (auto why = precondition(task)) {
          t.status = TaskStatus::skipped;
          t.notes.push_back(*why);
          r.warnings.push_back(task + " skipped: " + *why);
        } else {
          execute(task, t);
        }
      } catch (const Error& e) {
        t.status = TaskStatus::error;
        t.notes.push_back(e.what());
        r.warnings.push_back(task + " failed: " + e.what());
      }
      t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - ts).count();
      if (task == "k0" && t.status == TaskStatus::ok) k0_ = t.values.front().value;
      r.tasks.push_back(std::move(t));
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }

 private:
  /// Reason to skip, checked from the scenario alone.
  std::optional<std::string> precondition(const std::string& task) {
    auto need_valid = [&]() -> std::optional<std::string> {
      if (!valid_) return "exponents are not admissible";
      return std::nullopt;
    };
    if (task == "validate") return std::nullopt;
    if (task == "check_c0") {
      if (!raw_) return "exponents cannot be derived";
      if (raw_->critical()) return "n_a = n, the C-1 condition applies";
      return std::nullopt;
    }
    if (task == "check_c1") {
      if (!raw_) return "exponents cannot be derived";
      if (!raw_->critical()) return "n_a != n, the C-0 condition applies";
      return std::nullopt;
    }
    if (task == "k0" || task == "transport") return need_valid();
    if (task == "sharp") {
      if (auto w = need_valid()) return w;
      if (!proportional_weights(s_)) return "weights are not proportional";
      return std::nullopt;
    }
    if (task == "verify") {
      if (auto w = need_valid()) return w;
      if (s_.n() > 3 && s_.p == 1.0) return "grid verification supports n = 2, 3";
      return std::nullopt;
    }
    if (task == "necessity") {
      if (!raw_) return "exponents cannot be derived";
      if (s_.n() > 3) return "grid probes support n = 2, 3";
      return std::nullopt;
    }
    if (task == "spectral_gap") {
      if (auto w = need_valid()) return w;
      if (s_.p != 2.0 || std::abs(s_.alpha() - s_.tau() - 2.0) > 1e-12) return "needs p = 2 and alpha = tau + 2";
      if (s_.n() > 3) return "grid bumps support n = 2, 3";
      return std::nullopt;
    }
    if (task == "ckn") return s_.ckn ? std::nullopt : std::optional<std::string>("no [ckn] section");
    if (task == "heisenberg") {
      if (!(s_.p >= 1.0 && s_.p < 4.0)) return "needs 1 <= p < 4";
      return std::nullopt;
    }
    return "unknown task";
  }

  ConditionOutcome& condition() {
    if (cond_) return *cond_;
    cond_.emplace();
    auto& c = *cond_;
    const ExponentSet& e = *raw_;
    if (e.critical()) {
      c.report = check_c1(s_.omega, s_.sigma, e, s_.cone, s_.numeric.samples, s_.numeric.seed);
      if (c.report->verdict == Verdict::holds_with_constant) {
        c.constant = ConditionConstant{Condition::C1, c.report->constant_estimate};
        c.source = "C-1 sampled sup";
      } else {
        c.reason = std::string("C-1 ") + to_string(c.report->verdict);
      }
      return c;
    }
    auto a = s_.omega.monomial_exponents(s_.n()), b = s_.sigma.monomial_exponents(s_.n());
    if (a && b) {
      try {
        c.monomial = monomial_c0(*a, *b, s_.p, s_.n());
      } catch (const Error&) {
      }
    }
    try {
      c.report = estimate_best_c0(s_.omega, s_.sigma, e, s_.cone, s_.numeric.samples, s_.numeric.seed);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::not_applicable) throw;
      ConditionReport rep;
      rep.verdict = Verdict::inconclusive;
      rep.note = err.detail();
      c.report = rep;
    }
    if (c.report->verdict == Verdict::refuted) {
      c.reason = "C-0 refuted by sampled pairs";
    } else if (c.monomial) {
      c.constant = ConditionConstant{Condition::C0, *c.monomial};
      c.source = "C-0 monomial closed form";
    } else if (c.report->verdict == Verdict::holds_with_constant) {
      c.constant = ConditionConstant{Condition::C0, c.report->constant_estimate};
      c.source = "C-0 sampled and refined sup";
    } else {
      c.reason = "C-0 inconclusive" + (c.report->note.empty() ? std::string() : ": " + c.report->note);
    }
    return c;
  }

  /// Fills t or marks it skipped when the condition gives no constant.
  bool require_constant(TaskResult& t) {
    auto& c = condition();
    if (c.constant) {
      t.notes.push_back("condition constant from " + c.source + " = " + fmt(c.constant->value));
      return true;
    }
    t.status = TaskStatus::skipped;
    t.notes.push_back("no condition constant: " + c.reason);
    return false;
  }

  void add_condition_values(TaskResult& t) {
    auto& c = condition();
    const auto& rep = *c.report;
    t.notes.push_back(std::string("verdict: ") + to_string(rep.verdict));
    if (!rep.note.empty()) t.notes.push_back(rep.note);
    if (rep.samples_used == 0) return;
    double tol = 0.0;
    if (rep.checkpoints.size() >= 2) tol = std::abs(rep.checkpoints.back().second - rep.checkpoints[rep.checkpoints.size() - 2].second);
    if (!std::isfinite(tol)) tol = 0.0;
    t.values.push_back({"constant_estimate", rep.constant_estimate, tol});
    t.values.push_back({"sampled_sup", rep.sampled_sup, tol});
    t.values.push_back({"samples", static_cast<double>(rep.samples_used), 0.0});
  }

  void execute(const std::string& task, TaskResult& t) {
    if (task == "validate") {
      t.provenance = "exponent ranges and balance";
      if (!valid_) {
        t.status = TaskStatus::error;
        t.notes.push_back(validation_message());
        return;
      }
      const auto& e = *valid_;
      t.values.push_back({"q", e.q, 0.0});
      t.values.push_back({"n_a", e.n_a, 0.0});
      t.values.push_back({"balance_residual", e.balance_residual(), 1e-12});
      return;
    }
    if (task == "check_c0") {
      t.provenance = "sampled pairs plus pattern search";
      add_condition_values(t);
      auto& c = condition();
      if (c.monomial) {
        t.values.push_back({"monomial_c0", *c.monomial, 1e-12});
        if (!raw_->n_a_infinite() && raw_->n_a > raw_->n) t.values.push_back({"rigidity_floor", rigidity_floor(*raw_), 0.0});
      }
      if (c.report->verdict == Verdict::refuted) t.notes.push_back("refuting pairs: " + std::to_string(c.report->refuting_pairs));
      return;
    }
    if (task == "check_c1") {
      t.provenance = "sampled sphere sup";
      add_condition_values(t);
      t.values.push_back({"gradient_positivity_violations", static_cast<double>(condition().report->gradient_positivity_violations), 0.0});
      return;
    }
    if (task == "k0") {
      if (!require_constant(t)) return;
      auto setting = make_setting(s_.cone, s_.omega, s_.sigma, s_.p);
      ConstantResult cr;
      if (s_.p == 1.0) {
        cr = k0_p1(setting, *condition().constant);
      } else {
        K0SearchOptions o;
        o.budget = s_.numeric.budget;
        cr = k0_general(setting, *condition().constant, o);
        ReportTable tr{"trace", {"evaluation", "k0"}, {}};
        for (std::size_t i = 0; i < cr.trace.size(); ++i) tr.rows.push_back({static_cast<double>(i + 1), cr.trace[i]});
        t.tables.push_back(std::move(tr));
        for (const auto& [fam, v] : cr.family_best) t.notes.push_back("best over " + fam + ": " + fmt(v));
      }
      t.provenance = cr.formula_branch;
      t.values.push_back({"K0", cr.k0, cr.quadrature_error});
      t.notes.push_back("density: " + cr.v_star);
      return;
    }
    if (task == "sharp") {
      auto cr = k0_sharp_equal(s_.omega, s_.sigma, *valid_, s_.cone);
      t.provenance = cr.formula_branch;
      t.values.push_back({"K0_sharp", cr.k0, cr.quadrature_error});
      t.notes.push_back("extremal: " + cr.v_star);
      return;
    }
    if (task == "verify") {
      t.provenance = "grid Sobolev quotient, pattern search over test families";
      auto setting = make_setting(s_.cone, s_.omega, s_.sigma, s_.p);
      QuotientOptions o;
      o.grid2 = s_.numeric.grid;
      o.grid3 = std::min(s_.numeric.grid, 64);
      o.budget = s_.numeric.budget;
      double best = 0.0;
      std::string best_desc;
      for (auto fam : {QuotientFamily::talenti, QuotientFamily::gaussian_bump, QuotientFamily::smoothed_cap}) {
        if (fam == QuotientFamily::talenti && s_.p == 1.0) continue;
        if (fam != QuotientFamily::talenti && s_.n() > 3) continue;
        auto r = maximize_quotient(setting, fam, o);
        t.values.push_back({std::string("quotient_") + to_string(fam), r.quotient, 0.01 * r.quotient});
        if (r.quotient > best) best = r.quotient, best_desc = r.description;
      }
      t.values.push_back({"best_quotient", best, 0.01 * best});
      t.notes.push_back("best test function: " + best_desc);
      if (k0_) {
        t.values.push_back({"quotient_over_K0", best / *k0_, 0.01});
        t.notes.push_back(best <= *k0_ * 1.01 ? "quotient below K0 within 1% slack" : "quotient exceeds K0 beyond 1% slack");
      }
      return;
    }
    if (task == "necessity") {
      t.provenance = "translated bump and logarithmic ring families";
      const ExponentSet& e = *raw_;
      const Point& axis = s_.cone.axis();
      double d0 = 2.0;
      while (!(s_.cone.boundary_distance(scaled(axis, d0)) > 1.0)) d0 *= 2.0;
      std::vector<double> deltas;
      for (int i = 0; i < 6; ++i) deltas.push_back(d0 * std::pow(2.0, i));
      ProbeOptions po;
      po.grid2 = s_.numeric.grid;
      po.grid3 = std::min(s_.numeric.grid, 48);
      auto shift = necessity_probe_shift(s_.omega, s_.sigma, e, s_.cone, axis, deltas, po);
      t.values.push_back({"shift_slope", shift.slope, shift.slope_error});
      t.values.push_back({"shift_predicted", shift.predicted, 0.0});
      ReportTable tb{"shift", {"delta", "quotient", "fitted_slope"}, {}};
      for (std::size_t i = 0; i < deltas.size(); ++i) tb.rows.push_back({deltas[i], shift.quotients[i], shift.slope});
      t.tables.push_back(std::move(tb));
      if (shift.slope > 0.02) t.notes.push_back("quotient grows under translation: no inequality can hold");
      if (s_.p == 1.0) {
        t.notes.push_back("log family skipped: it probes q < p and needs p > 1");
        return;
      }
      ProbeResult lg;
      try {
        lg = necessity_probe_log(e, s_.cone, {1e-10, 1e-20, 1e-40, 1e-80, 1e-160, 1e-300});
      } catch (const Error& err) {
        t.notes.push_back(std::string("log probe unavailable: ") + err.what());
        return;
      }
      t.values.push_back({"log_left_exponent", lg.left_exponent, 0.05});
      t.values.push_back({"log_right_exponent", lg.right_exponent, 0.05});
      ReportTable tl{"log", {"epsilon", "quotient", "fitted_slope"}, {}};
      for (std::size_t i = 0; i < lg.parameters.size(); ++i) tl.rows.push_back({lg.parameters[i], lg.quotients[i], lg.slope});
      t.tables.push_back(std::move(tl));
      if (lg.unbounded) t.notes.push_back("logarithmic family is unbounded: q < p");
      return;
    }
    if (task == "spectral_gap") {
      if (!require_constant(t)) return;
      t.provenance = "concentrating bumps, bound (1/(4 C0^2)) sup ratio";
      auto centers = sample_cone_sphere(s_.cone, 32, s_.numeric.seed);
      centers.push_back(s_.cone.axis());
      auto r = spectral_gap_bound(s_.omega, s_.sigma, condition().constant->value, *valid_, s_.cone, centers, {0.2, 0.1, 0.05, 0.02},
                                  std::min(s_.numeric.grid, 96));
      t.values.push_back({"eigenvalue_lower_bound", r.bound, 0.0});
      t.values.push_back({"best_ratio", r.best_ratio, 0.0});
      t.notes.push_back("bumps used: " + std::to_string(r.bumps_used));
      return;
    }
    if (task == "ckn") {
      t.provenance = "exponent mapping into the two-weight setting";
      auto c = ckn_parameters(s_.n(), s_.p, s_.ckn->beta, s_.ckn->gamma);
      t.values.push_back({"r", c.r, 0.0});
      t.values.push_back({"d", c.d, 0.0});
      t.values.push_back({"tau", c.tau, 0.0});
      t.values.push_back({"alpha", c.alpha, 0.0});
      t.values.push_back({"q", c.exps.q, 0.0});
      t.values.push_back({"n_a", c.exps.n_a, 0.0});
      return;
    }
    if (task == "heisenberg") {
      K0SearchOptions o;
      o.budget = s_.numeric.budget;
      auto cr = heisenberg_constant(s_.p, o);
      t.provenance = cr.formula_branch;
      t.values.push_back({"K0", cr.k0, cr.quadrature_error});
      if (s_.p == 1.0) {
        t.values.push_back({"pansu_constant", pansu_constant(), 0.0});
        t.notes.push_back(cr.k0 > pansu_constant() ? "K0 exceeds the claimed optimal constant" : "K0 below the claimed optimal constant");
      }
      return;
    }
    if (task == "transport") {
      if (!require_constant(t)) return;
      t.provenance = "pointwise divergence inequality on analytic potentials, discrete plan checks";
      auto pts = sample_cone_sphere(s_.cone, 2000, s_.numeric.seed);
      Rng rng(s_.numeric.seed + 17);
      for (auto& x : pts) x = scaled(x, std::exp(rng.uniform(std::log(0.3), std::log(3.0))));
      const std::vector<std::pair<std::string, Potential>> phis{{"quadratic_0.5", QuadraticPotential{0.5, {}}},
                                                               {"quadratic_1", QuadraticPotential{1.0, {}}},
                                                               {"quadratic_2", QuadraticPotential{2.0, {}}},
                                                               {"power_3", PowerPotential{1.0, 3.0}}};
      for (const auto& [nm, phi] : phis) {
        auto r = pointwise_divergence_check(s_.omega, s_.sigma, *valid_, *condition().constant, phi, pts, s_.cone);
        t.values.push_back({"max_violation_" + nm, r.max_violation, 1e-9});
      }
      auto a = sample_cone_sphere(s_.cone, 48, s_.numeric.seed + 1), b = sample_cone_sphere(s_.cone, 48, s_.numeric.seed + 2);
      for (auto& x : b) x = scaled(x, 2.0);
      auto mu = uniform_measure(a), nu = uniform_measure(b);
      auto plan = solve_discrete_ot(mu, nu);
      t.values.push_back({"plan_cost", plan.cost, 1e-12});
      t.values.push_back({"plan_marginal_error", plan.marginal_error(mu, nu), 1e-10});
      t.values.push_back({"monotonicity_violations", static_cast<double>(cyclical_monotonicity_violations(plan, mu, nu, 2000, s_.numeric.seed)), 0.0});
      return;
    }
    throw Error(ErrorKind::invalid_argument, "unknown task " + task);
  }

  std::string validation_message() const {
    try {
      validate_exponents(s_.n(), s_.p, s_.tau(), s_.alpha());
    } catch (const Error& e) {
      return e.what();
    }
    return "ok";
  }

  const Scenario& s_;
  std::optional<ExponentSet> raw_, valid_;
  std::optional<ConditionOutcome> cond_;
  std::optional<double> k0_;
};

}  // namespace detail

/// Runs the tasks in dependency order; a failing task never stops later ones.
inline Report run_scenario(const Scenario& s) { return detail::ScenarioRunner(s).run(); }

inline std::string report_text(const Report& r) {
  std::ostringstream os;
  os << "scenario: " << r.scenario << "\n";
  os << "setting: " << r.setting << "\n";
  os << "exponents: " << r.exponents << "\n";
  os << "validation: " << r.validation << "\n";
  for (const auto& t : r.tasks) {
    os << "\n[" << t.task << "] " << to_string(t.status) << "\n";
    if (!t.provenance.empty()) os << "  method: " << t.provenance << "\n";
    for (const auto& v : t.values) os << "  " << v.key << " = " << detail::fmt(v.value) << " +- " << detail::fmt(v.tolerance) << "\n";
    for (const auto& tb : t.tables) os << "  table " << tb.name << ": " << tb.rows.size() << " rows\n";
    for (const auto& n : t.notes) os << "  note: " << n << "\n";
  }
  if (!r.warnings.empty()) {
    os << "\nwarnings:\n";
    for (const auto& w : r.warnings) os << "  " << w << "\n";
  }
  return os.str();
}

inline std::string table_csv(const ReportTable& tb) {
  std::ostringstream os;
  for (std::size_t i = 0; i < tb.columns.size(); ++i) os << (i ? "," : "") << tb.columns[i];
  os << "\n";
  for (const auto& row : tb.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << detail::fmt(row[i]);
    os << "\n";
  }
  return os.str();
}

inline std::string values_csv(const Report& r) {
  std::ostringstream os;
  os << "task,parameter,value,tolerance\n";
  for (const auto& t : r.tasks)
    for (const auto& v : t.values) os << t.task << "," << v.key << "," << detail::fmt(v.value) << "," << detail::fmt(v.tolerance) << "\n";
  return os.str();
}

/// Writes <name>.txt and/or <name>.csv plus one <name>_<task>_<table>.csv per table.
inline std::vector<std::string> emit_report(const Report& r, const std::string& out_dir, const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  for (const auto& f : formats)
    if (f != "text" && f != "csv") throw Error(ErrorKind::invalid_argument, "unknown format '" + f + "'");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot create " + out_dir + ": " + ec.message());
  std::vector<std::string> files;
  auto write = [&](const std::string& name, const std::string& body) {
    fs::path path = fs::path(out_dir) / name;
    std::ofstream os(path, std::ios::binary);
    os << body;
    os.close();
    if (!os) throw Error(ErrorKind::io_error, "cannot write " + path.string());
    files.push_back(path.string());
  };
  bool text = std::find(formats.begin(), formats.end(), "text") != formats.end();
  bool csv = std::find(formats.begin(), formats.end(), "csv") != formats.end();
  if (text) write(r.scenario + ".txt", report_text(r));
  if (csv) {
    write(r.scenario + ".csv", values_csv(r));
    for (const auto& t : r.tasks)
      for (const auto& tb : t.tables) write(r.scenario + "_" + t.task + "_" + tb.name + ".csv", table_csv(tb));
  }
  return files;
}

}  // namespace wsi
