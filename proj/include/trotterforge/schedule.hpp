#pragma once

// Product-formula schedules: the symmetric base product, Suzuki's recursion,
// order-condition checks and the schedule algebra (reverse, compose, merge).
//
// A schedule is an ordered list of (layer, fraction) entries. Entry i stands
// for the automorphism O -> exp(i f_i mu K_l) O exp(-i f_i mu K_l) of layer l
// over the signed time f_i * mu. Entries are applied to the observable in
// list order: the first entry is the innermost conjugation. Layers are
// labelled 1..k.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "trotterforge/error.hpp"
#include "trotterforge/format.hpp"

namespace trotterforge {

struct ScheduleParams {
  int k = 1;  ///< number of Hamiltonian parts
  int m = 1;  ///< order label of sigma^(m); even labels alias m - 1
  int r = 3;  ///< recursion arity, odd and >= 3

  void validate() const {
    if (k < 1) throw ValidationError("k must be >= 1, got " + std::to_string(k));
    if (m < 1) throw ValidationError("m must be >= 1, got " + std::to_string(m));
    if (r < 3 || r % 2 == 0)
      throw ValidationError("r must be an odd integer >= 3, got " + std::to_string(r));
  }

  /// Number of Suzuki recursion levels behind sigma^(m).
  int recursion_depth() const { return (m - 1) / 2; }

  /// Odd order label actually stored (sigma^(2j+2) is sigma^(2j+1)).
  int odd_order() const { return m % 2 == 0 ? m - 1 : m; }

  friend bool operator==(const ScheduleParams&, const ScheduleParams&) = default;
};

struct ScheduleEntry {
  int layer = 1;
  double fraction = 0.0;

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

class ProductSchedule {
 public:
  ProductSchedule() = default;

  ProductSchedule(ScheduleParams params, std::vector<ScheduleEntry> entries)
      : params_(params), entries_(std::move(entries)) {
    if (params_.k < 1) throw ValidationError("schedule needs k >= 1");
    for (const auto& e : entries_) {
      if (e.layer < 1 || e.layer > params_.k)
        throw ValidationError("schedule layer " + std::to_string(e.layer) +
                              " outside 1.." + std::to_string(params_.k));
    }
  }

  const ScheduleParams& params() const { return params_; }
  const std::vector<ScheduleEntry>& entries() const { return entries_; }
  int k() const { return params_.k; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Signed time consumed by each layer, indexed 0..k-1.
  std::vector<double> layer_sums() const {
    std::vector<double> sums(static_cast<std::size_t>(params_.k), 0.0);
    for (const auto& e : entries_) sums[static_cast<std::size_t>(e.layer - 1)] += e.fraction;
    return sums;
  }

  /// Structural equality with the reversed entry list.
  bool is_palindrome() const {
    const std::size_t n = entries_.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
      if (!(entries_[i] == entries_[n - 1 - i])) return false;
    }
    return true;
  }

  friend bool operator==(const ProductSchedule&, const ProductSchedule&) = default;

 private:
  ScheduleParams params_{};
  std::vector<ScheduleEntry> entries_;
};

/// Entries with |fraction| below this are dropped by merge_adjacent.
inline constexpr double kZeroFraction = 1e-15;

/// sigma^(1): [(1,1/2),...,(k,1/2),(k,1/2),...,(1,1/2)].
inline ProductSchedule base_symmetric(int k) {
  if (k < 1) throw ValidationError("base_symmetric needs k >= 1, got " + std::to_string(k));
  std::vector<ScheduleEntry> entries;
  entries.reserve(static_cast<std::size_t>(2 * k));
  for (int j = 1; j <= k; ++j) entries.push_back({j, 0.5});
  for (int j = k; j >= 1; --j) entries.push_back({j, 0.5});
  return ProductSchedule({k, 1, 3}, std::move(entries));
}

/// s_m = 1 / ((r - 1) - (r - 1)^{1/(2m+1)}).
inline double suzuki_coefficient(int m, int r) {
  ScheduleParams{1, m, r}.validate();
  const double rm1 = static_cast<double>(r - 1);
  return 1.0 / (rm1 - std::pow(rm1, 1.0 / (2.0 * m + 1.0)));
}

/// The r time scalings used at recursion level m:
/// (s_m, ..., s_m, 1 - (r-1) s_m, s_m, ..., s_m).
inline std::vector<double> level_fractions(int m, int r) {
  const double s = suzuki_coefficient(m, r);
  std::vector<double> p(static_cast<std::size_t>(r), s);
  p[static_cast<std::size_t>(r / 2)] = 1.0 - (r - 1) * s;
  return p;
}

namespace detail {

inline void append_scaled(std::vector<ScheduleEntry>& out, const std::vector<ScheduleEntry>& block,
                          double scale) {
  for (const auto& e : block) out.push_back({e.layer, e.fraction * scale});
}

}  // namespace detail

/// Suzuki's recursion starting from the base schedule sigma^(1). Level j
/// replaces the current schedule S by S_{s_j}^l . S_{(1-(r-1)s_j)} . S_{s_j}^l
/// with l = (r-1)/2. Even order labels alias the preceding odd order. The
/// result is not merged; pass it through merge_adjacent for factor counts.
inline ProductSchedule suzuki_recurse(const ProductSchedule& base, int m_target, int r) {
  const int k = base.k();
  const ScheduleParams params{k, m_target, r};
  params.validate();
  if (!(base == base_symmetric(k)))
    throw ValidationError("suzuki_recurse expects the base symmetric schedule");

  std::vector<ScheduleEntry> current = base.entries();
  const int half = (r - 1) / 2;
  for (int level = 1; level <= params.recursion_depth(); ++level) {
    const double s = suzuki_coefficient(level, r);
    const double middle = 1.0 - (r - 1) * s;
    std::vector<ScheduleEntry> next;
    next.reserve(current.size() * static_cast<std::size_t>(r));
    for (int i = 0; i < half; ++i) detail::append_scaled(next, current, s);
    detail::append_scaled(next, current, middle);
    for (int i = 0; i < half; ++i) detail::append_scaled(next, current, s);
    current = std::move(next);
  }
  return ProductSchedule(params, std::move(current));
}

/// Convenience: sigma^(m) for k parts and arity r, unmerged.
inline ProductSchedule suzuki_schedule(int k, int m, int r = 3) {
  return suzuki_recurse(base_symmetric(k), m, r);
}

/// r^depth (2k - 2) + 1, the merged factor count of sigma^(2 depth + 1).
inline long long expected_factor_count(int k, int depth, int r) {
  long long power = 1;
  for (int i = 0; i < depth; ++i) power *= r;
  return power * (2LL * k - 2) + 1;
}

/// k * prod_{j=1}^{depth} (2 (r-1) s_j - 1), in units of mu.
inline double closed_form_total_time(int k, int m, int r) {
  const ScheduleParams params{k, m, r};
  params.validate();
  double total = k;
  for (int j = 1; j <= params.recursion_depth(); ++j)
    total *= 2.0 * (r - 1) * suzuki_coefficient(j, r) - 1.0;
  return total;
}

struct OrderConditionReport {
  int m = 1;
  double sum_residual = 0.0;         ///< |sum p_j - 1|
  double power_residual = 0.0;       ///< |sum p_j^{2m+1}|
  double palindrome_residual = 0.0;  ///< max_j |p_j - p_{r+1-j}|

  bool satisfied(double tol = 1e-10) const {
    return sum_residual < tol && power_residual < tol && palindrome_residual < tol;
  }
};

/// Residuals of sum p = 1, sum p^{2m+1} = 0 and p_j = p_{r+1-j} for the
/// coefficients of one recursion level. Any real coefficient set may be
/// checked, not only the canonical s_m choice.
inline OrderConditionReport check_order_conditions(std::span<const double> fractions, int m) {
  if (fractions.empty() || fractions.size() % 2 == 0)
    throw ValidationError("order conditions need an odd number of coefficients");
  if (m < 1) throw ValidationError("order conditions need m >= 1");
  OrderConditionReport report;
  report.m = m;
  double sum = 0.0;
  double power_sum = 0.0;
  for (double p : fractions) {
    sum += p;
    power_sum += std::pow(p, 2 * m + 1);
  }
  report.sum_residual = std::abs(sum - 1.0);
  report.power_residual = std::abs(power_sum);
  const std::size_t n = fractions.size();
  for (std::size_t j = 0; j < n / 2; ++j)
    report.palindrome_residual =
        std::max(report.palindrome_residual, std::abs(fractions[j] - fractions[n - 1 - j]));
  return report;
}

/// Sum of |fraction| over all entries, in units of mu.
inline double total_absolute_time(const ProductSchedule& schedule) {
  double total = 0.0;
  for (const auto& e : schedule.entries()) total += std::abs(e.fraction);
  return total;
}

/// Negated, reversed entries: realizes sigma_{-mu}.
inline ProductSchedule reverse(const ProductSchedule& schedule) {
  std::vector<ScheduleEntry> out(schedule.entries().rbegin(), schedule.entries().rend());
  for (auto& e : out) e.fraction = -e.fraction;
  return ProductSchedule(schedule.params(), std::move(out));
}

/// Entries of `first` followed by entries of `second`: apply `first`, then `second`.
inline ProductSchedule compose(const ProductSchedule& first, const ProductSchedule& second) {
  if (first.k() != second.k())
    throw ValidationError("compose: mismatched k (" + std::to_string(first.k()) + " vs " +
                          std::to_string(second.k()) + ")");
  std::vector<ScheduleEntry> out = first.entries();
  out.insert(out.end(), second.entries().begin(), second.entries().end());
  return ProductSchedule(first.params(), std::move(out));
}

/// Coalesce runs of equal-layer entries and drop zero-time factors, repeated
/// until no adjacent pair shares a layer.
inline ProductSchedule merge_adjacent(const ProductSchedule& schedule) {
  std::vector<ScheduleEntry> out;
  out.reserve(schedule.size());
  for (const auto& e : schedule.entries()) {
    if (!out.empty() && out.back().layer == e.layer) {
      out.back().fraction += e.fraction;
      if (std::abs(out.back().fraction) < kZeroFraction) out.pop_back();
    } else if (std::abs(e.fraction) >= kZeroFraction) {
      out.push_back(e);
    }
  }
  return ProductSchedule(schedule.params(), std::move(out));
}

/// Cumulative signed time of each layer in execution order. Each sequence
/// starts at 0 and gains one point per entry of that layer.
struct PathTrace {
  std::vector<std::vector<double>> layers;
};

inline PathTrace path_trace(const ProductSchedule& schedule) {
  PathTrace trace;
  trace.layers.assign(static_cast<std::size_t>(schedule.k()), std::vector<double>{0.0});
  for (const auto& e : schedule.entries()) {
    auto& seq = trace.layers[static_cast<std::size_t>(e.layer - 1)];
    seq.push_back(seq.back() + e.fraction);
  }
  return trace;
}

/// Header "#k=<k> m=<m> r=<r>", then one "layer<TAB>fraction" line per entry.
inline void write_schedule(std::ostream& os, const ProductSchedule& schedule) {
  const auto& p = schedule.params();
  os << "#k=" << p.k << " m=" << p.m << " r=" << p.r << '\n';
  for (const auto& e : schedule.entries()) os << e.layer << '\t' << format_double(e.fraction) << '\n';
}

inline ProductSchedule read_schedule(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ValidationError("schedule file is empty");
  ScheduleParams params;
  if (std::sscanf(header.c_str(), "#k=%d m=%d r=%d", &params.k, &params.m, &params.r) != 3)
    throw ValidationError("malformed schedule header: " + header);
  std::vector<ScheduleEntry> entries;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    ScheduleEntry e;
    if (!(ls >> e.layer >> e.fraction)) throw ValidationError("malformed schedule line: " + line);
    entries.push_back(e);
  }
  return ProductSchedule(params, std::move(entries));
}

/// CSV with columns step,layer,cumulative_time. Step 0 is the origin of every
/// layer; step i >= 1 is the state after the i-th schedule entry.
inline void write_path_trace_csv(std::ostream& os, const ProductSchedule& schedule) {
  os << "step,layer,cumulative_time\n";
  std::vector<double> cumulative(static_cast<std::size_t>(schedule.k()), 0.0);
  for (int j = 1; j <= schedule.k(); ++j) os << 0 << ',' << j << ',' << format_double(0.0) << '\n';
  std::size_t step = 0;
  for (const auto& e : schedule.entries()) {
    ++step;
    double& c = cumulative[static_cast<std::size_t>(e.layer - 1)];
    c += e.fraction;
    os << step << ',' << e.layer << ',' << format_double(c) << '\n';
  }
}

}  // namespace trotterforge
