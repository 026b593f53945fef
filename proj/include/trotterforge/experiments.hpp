#pragma once

// Convergence studies, one-step order probes, light cones, circuit depth and
// truncation studies on top of the dense simulator.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "trotterforge/dense.hpp"
#include "trotterforge/error.hpp"
#include "trotterforge/format.hpp"
#include "trotterforge/interaction.hpp"
#include "trotterforge/lattice.hpp"
#include "trotterforge/model.hpp"
#include "trotterforge/schedule.hpp"
#include "trotterforge/simulator.hpp"

namespace trotterforge {

/// Errors at or below this are treated as roundoff and left out of fits.
inline constexpr double kErrorFloor = 1e-12;

/// Leakage threshold defining the light-cone radius r*.
inline constexpr double kLightconeThreshold = 1e-6;

/// Expected global order: m for even m, m + 1 for odd m.
inline int expected_order(int m) { return m % 2 == 0 ? m : m + 1; }

/// Ordinary least squares y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("fit: mismatched sample sizes");
  if (x.size() < 2) throw DegenerateFitError("fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateFitError("fit: all abscissae coincide");
  LinearFit fit;
  fit.points = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += res * res;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return fit;
}

/// Log-log fit of error against the sample abscissa, dropping sub-floor points.
inline LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& errors,
                            double floor = kErrorFloor) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (errors[i] > floor) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(errors[i]));
    }
  }
  if (lx.size() < 2)
    throw DegenerateFitError("fewer than two errors above the roundoff floor; use a larger t or a lower m");
  return fit_line(lx, ly);
}

struct ConvergenceSample {
  int n = 0;
  double error = 0.0;
};

struct ConvergenceReport {
  std::string model_id;
  int m = 1, r = 3, k = 1;
  double t = 0.0;
  std::vector<ConvergenceSample> samples;  ///< sorted by n
  double fitted_order = 0.0;               ///< negated log-log slope
  double fit_stderr = 0.0;
  double r_squared = 0.0;
  int alpha_expected = 2;
  std::size_t points_used = 0;
};

/// Measures ||tau_t(O) - pi^(m)_{t,n}(O)|| for every n and fits the order.
inline ConvergenceReport convergence_study(const Decomposition& decomposition, const DenseOperator& o, double t,
                                           int m, int r, std::vector<int> n_list, std::string model_id = "") {
  ScheduleParams{decomposition.k(), m, r}.validate();
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  if (n_list.size() < 3) throw ValidationError("convergence study needs at least three step counts");
  if (n_list.front() < 1) throw ValidationError("step counts must be >= 1");
  if (n_list.back() < 4 * n_list.front())
    throw ValidationError("step counts must span at least two octaves");

  const EvolutionPlan plan(decomposition, o.sites());
  const DenseOperator exact = heisenberg(plan.hamiltonian(), t, o);
  const ProductSchedule schedule = suzuki_schedule(decomposition.k(), m, r);

  ConvergenceReport report;
  report.model_id = std::move(model_id);
  report.m = m;
  report.r = r;
  report.k = decomposition.k();
  report.t = t;
  report.alpha_expected = expected_order(m);
  std::vector<double> ns, errs;
  for (int n : n_list) {
    const double err = error_norm(exact, run_schedule(plan, schedule, t / n, n, o));
    report.samples.push_back({n, err});
    ns.push_back(n);
    errs.push_back(err);
  }
  const LinearFit fit = fit_loglog(ns, errs);
  report.fitted_order = -fit.slope;
  report.fit_stderr = fit.slope_stderr;
  report.r_squared = fit.r_squared;
  report.points_used = fit.points;
  return report;
}

struct StepSample {
  double mu = 0.0;
  double error = 0.0;
};

struct StepOrderReport {
  int m = 1, r = 3;
  std::vector<StepSample> samples;
  double exponent = 0.0;  ///< log-log slope of error against mu
  double fit_stderr = 0.0;
  double r_squared = 0.0;
  int exponent_expected = 3;
};

/// One-step error ||tau_mu(O) - sigma^(m)_mu(O)|| over a list of mu.
inline StepOrderReport single_step_order(const Decomposition& decomposition, const DenseOperator& o, int m, int r,
                                         const std::vector<double>& mu_list) {
  ScheduleParams{decomposition.k(), m, r}.validate();
  if (mu_list.size() < 2) throw ValidationError("single-step study needs at least two step sizes");
  const EvolutionPlan plan(decomposition, o.sites());
  const Eigensystem full = Eigensystem::of(plan.hamiltonian());
  const ProductSchedule schedule = suzuki_schedule(decomposition.k(), m, r);
  StepOrderReport report;
  report.m = m;
  report.r = r;
  report.exponent_expected = expected_order(m) + 1;
  std::vector<double> mus, errs;
  for (double mu : mu_list) {
    if (!(mu > 0.0)) throw ValidationError("step sizes must be positive");
    const DenseOperator exact = heisenberg(full, o.sites(), mu, o);
    const double err = error_norm(exact, run_schedule(plan, schedule, mu, 1, o));
    report.samples.push_back({mu, err});
    mus.push_back(mu);
    errs.push_back(err);
  }
  const LinearFit fit = fit_loglog(mus, errs);
  report.exponent = fit.slope;
  report.fit_stderr = fit.slope_stderr;
  report.r_squared = fit.r_squared;
  return report;
}

struct LightconeRow {
  double t = 0.0;
  int radius = 0;
  double leakage = 0.0;
};

struct LightconeReport {
  std::vector<LightconeRow> rows;
  std::vector<std::pair<double, int>> radius_at_threshold;  ///< (t, r*)
};

/// Leakage profiles of tau_t(O) around Z = supp(O) for each t, with the
/// smallest radius r* whose leakage falls below `threshold`.
inline LightconeReport lightcone_study(const Model& model, const DenseOperator& o, const VertexSet& Z,
                                       std::vector<double> t_list, double threshold = kLightconeThreshold) {
  std::sort(t_list.begin(), t_list.end());
  const DenseOperator h = assemble(model.interaction, o.sites());
  const Eigensystem es = Eigensystem::of(h);
  LightconeReport report;
  for (double t : t_list) {
    const DenseOperator evolved = heisenberg(es, o.sites(), t, o);
    const auto profile = leakage_profile(evolved, Z, model.graph);
    std::optional<int> r_star;
    for (const auto& point : profile) {
      report.rows.push_back({t, point.radius, point.leakage});
      if (!r_star && point.leakage < threshold) r_star = point.radius;
    }
    report.radius_at_threshold.emplace_back(t, r_star.value_or(profile.back().radius));
  }
  return report;
}

struct DepthReport {
  double epsilon = 0.0;
  int n_min = 1;
  double error_at_n_min = 0.0;
  std::optional<double> error_below_n_min;  ///< error at n_min - 1, absent when n_min = 1
  long long factors_per_step = 0;
  long long total_depth = 0;
};

/// Smallest n with ||tau_t(O) - pi^(m)_{t,n}(O)|| <= epsilon, by doubling then
/// bisection. The report certifies err(n_min) <= epsilon < err(n_min - 1).
inline DepthReport depth_search(const Decomposition& decomposition, const DenseOperator& o, double t, int m, int r,
                                double epsilon, int n_cap = 1 << 16) {
  ScheduleParams{decomposition.k(), m, r}.validate();
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const EvolutionPlan plan(decomposition, o.sites());
  const DenseOperator exact = heisenberg(plan.hamiltonian(), t, o);
  const ProductSchedule schedule = suzuki_schedule(decomposition.k(), m, r);
  std::map<int, double> memo;
  auto error_at = [&](int n) {
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    const double err = error_norm(exact, run_schedule(plan, schedule, t / n, n, o));
    memo.emplace(n, err);
    return err;
  };

  int hi = 1;
  while (error_at(hi) > epsilon) {
    if (hi >= n_cap)
      throw ResourceError("no step count up to " + std::to_string(n_cap) + " reaches epsilon=" +
                          format_double(epsilon));
    hi = std::min(2 * hi, n_cap);
  }
  int lo = hi / 2;  // err(lo) > epsilon unless lo == 0
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (error_at(mid) <= epsilon) hi = mid;
    else lo = mid;
  }

  DepthReport report;
  report.epsilon = epsilon;
  report.n_min = hi;
  report.error_at_n_min = error_at(hi);
  if (hi > 1) report.error_below_n_min = error_at(hi - 1);
  report.factors_per_step = static_cast<long long>(merge_adjacent(schedule).size());
  report.total_depth = report.factors_per_step * hi;
  return report;
}

struct TruncationRow {
  int range = 0;
  double norm_lhs = 0.0;
  double norm_rhs = 0.0;
  double dyn_error = 0.0;
};

struct TruncationReport {
  std::vector<TruncationRow> rows;
  bool bounds_hold() const {
    return std::all_of(rows.begin(), rows.end(), [](const TruncationRow& r) { return r.norm_lhs <= r.norm_rhs; });
  }
};

/// Per range R: both sides of the truncation norm bound and the dynamical
/// error ||tau_t^{Phi_R}(O) - tau_t^{Phi}(O)||.
inline TruncationReport truncation_study(const Model& model, std::vector<int> ranges, double b_prime, double t,
                                         const DenseOperator& o) {
  std::sort(ranges.begin(), ranges.end());
  const DenseOperator exact = heisenberg(assemble(model.interaction, o.sites()), t, o);
  TruncationReport report;
  for (int range : ranges) {
    if (range < 0) throw ValidationError("truncation range must be non-negative");
    const TruncationCheck check = truncation_bound_check(model.interaction, model.graph, range, model.decay, b_prime);
    const Interaction truncated = truncate(model.interaction, model.graph, range);
    const DenseOperator approx = heisenberg(assemble(truncated, o.sites()), t, o);
    report.rows.push_back({range, check.lhs, check.rhs, error_norm(exact, approx)});
  }
  return report;
}

// CSV writers. Every float is printed with 17 significant digits.

inline void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  os << "n,error\n";
  for (const auto& s : report.samples) os << s.n << ',' << format_double(s.error) << '\n';
}

inline void write_step_csv(std::ostream& os, const StepOrderReport& report) {
  os << "mu,error\n";
  for (const auto& s : report.samples) os << format_double(s.mu) << ',' << format_double(s.error) << '\n';
}

inline void write_lightcone_csv(std::ostream& os, const LightconeReport& report) {
  os << "t,r,leakage\n";
  for (const auto& row : report.rows)
    os << format_double(row.t) << ',' << row.radius << ',' << format_double(row.leakage) << '\n';
}

inline void write_depth_csv(std::ostream& os, const DepthReport& report) {
  os << "epsilon,n_min,factors_per_step,total_depth\n";
  os << format_double(report.epsilon) << ',' << report.n_min << ',' << report.factors_per_step << ','
     << report.total_depth << '\n';
}

inline void write_truncation_csv(std::ostream& os, const TruncationReport& report) {
  os << "R,norm_lhs,norm_rhs,dyn_error\n";
  for (const auto& row : report.rows)
    os << row.range << ',' << format_double(row.norm_lhs) << ',' << format_double(row.norm_rhs) << ','
       << format_double(row.dyn_error) << '\n';
}

/// Two-column quantity,value report.
inline void write_quantity_csv(std::ostream& os, const std::vector<std::pair<std::string, double>>& rows) {
  os << "quantity,value\n";
  for (const auto& [name, value] : rows) os << name << ',' << format_double(value) << '\n';
}

}  // namespace trotterforge
