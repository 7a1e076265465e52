#include "cglab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cglab/dd.hpp"
#include "cglab/error.hpp"

namespace cglab {

MonotonicityReport scan_almost_monotonicity(std::span<const double> series, double eps_m, std::string name) {
  MonotonicityReport rep;
  rep.series_name = std::move(name);
  rep.length = series.size();
  if (series.empty()) return rep;

  // Suffix extremes over valid entries strictly after j.
  const std::size_t n = series.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> later_min(n, inf);
  std::vector<double> later_max(n, -inf);
  for (std::size_t j = n - 1; j-- > 0;) {
    const double v = series[j + 1];
    later_min[j] = later_min[j + 1];
    later_max[j] = later_max[j + 1];
    if (!std::isnan(v)) {
      later_min[j] = std::min(later_min[j], v);
      later_max[j] = std::max(later_max[j], v);
    }
  }

  // Frozen from j: every later value within a factor eps of value(j).
  std::size_t first = n - 1;
  while (first > 0 && std::isnan(series[first])) --first;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = series[j];
    if (std::isnan(v)) continue;
    const bool frozen = later_min[j] >= (1.0 - eps_m) * v && later_max[j] <= (1.0 + eps_m) * v;
    if (frozen) {
      first = j;
      break;
    }
  }
  rep.first_stagnation = first;

  for (std::size_t j = 0; j < n; ++j) {
    const double v = series[j];
    if (std::isnan(v)) continue;
    if (later_min[j] < v) continue;
    (j < first ? rep.violations : rep.trailing).push_back(j);
  }
  return rep;
}

std::vector<double> series_of(const CgTrace& trace, std::string_view name) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& r : trace) {
    if (name == "rnorm") out.push_back(r.rnorm);
    else if (name == "snorm") out.push_back(r.snorm);
    else if (name == "gap") out.push_back(r.gap);
    else if (name == "alpha") out.push_back(r.alpha);
    else if (name == "enorm2") out.push_back(r.enorm2.value_or(nan));
    else if (name == "enormA") out.push_back(r.enormA.value_or(nan));
    else if (name == "dr_ratio") out.push_back(r.dr_ratio.value_or(nan));
    else throw UsageError("unknown trace series '" + std::string(name) + "'");
  }
  return out;
}

std::vector<MonotonicityReport> scan_trace(const CgTrace& trace, double eps_m) {
  std::vector<MonotonicityReport> out;
  if (trace.empty()) return out;
  for (const char* name : {"enorm2", "enormA", "snorm", "rnorm"}) {
    const auto s = series_of(trace, name);
    if (std::all_of(s.begin(), s.end(), [](double v) { return std::isnan(v); })) continue;
    out.push_back(scan_almost_monotonicity(s, eps_m, name));
  }
  return out;
}

std::optional<std::size_t> trailing_stagnation_start(const CgTrace& trace, double eps_m) {
  if (trace.size() < kStagnationWindow + 1) return std::nullopt;
  const double limit = kStagnationWindowFactor * eps_m;
  std::size_t start = trace.size() - 1;
  while (start > 0) {
    const double a = trace[start - 1].snorm;
    const double b = trace[start].snorm;
    if (std::isnan(a) || std::isnan(b)) break;
    const bool flat = a == 0.0 ? b == 0.0 : std::abs(b - a) / a < limit;
    if (!flat) break;
    --start;
  }
  if (trace.size() - 1 - start < kStagnationWindow) return std::nullopt;
  return start;
}

FloorEstimate estimate_floor(const CgProblem& problem, const CgRunResult& run, double eps_m) {
  if (!problem.reference_solution) throw Unavailable("estimate_floor: the problem has no reference solution");
  if (run.trace.empty()) throw NotStagnated("estimate_floor: empty trace");

  FloorEstimate est{run.final_x, DenseVector(problem.order()), 0.0, 0, 0.0, {}};
  if (run.verdict.kind == VerdictKind::stagnation) {
    est.stagnation_index = run.verdict.fired_at;
    est.detected_by = "stagnation-criterion";
  } else if (const auto start = trailing_stagnation_start(run.trace, eps_m)) {
    est.stagnation_index = run.trace[*start].k;
    est.detected_by = "trailing-window";
  } else if (const double r = run.trace.back().rnorm; r * r < std::numeric_limits<double>::min()) {
    // Too short for the window, but the recursion itself ran out of residual.
    est.stagnation_index = run.stop_index;
    est.detected_by = "zero-residual";
  } else {
    throw NotStagnated("estimate_floor: no stagnation detected in the trace");
  }

  const DenseVector& x_star = *problem.reference_solution;
  const std::size_t n = problem.order();
  std::vector<dd::DoubleDouble> err(n);
  for (std::size_t i = 0; i < n; ++i) err[i] = dd::two_sum(x_star[i], -est.x_stop[i]);
  for (std::size_t i = 0; i < n; ++i) {
    dd::DoubleDouble acc;
    problem.A.for_each_in_row(i, [&](std::size_t j, double a) {
      acc = dd::fma_acc(acc, a, err[j].hi);
      acc = dd::fma_acc(acc, a, err[j].lo);
    });
    est.floor_vector[i] = acc.value();
  }
  est.floor_norm = norm2(est.floor_vector);

  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : run.trace) {
    if (r.k >= est.stagnation_index && !std::isnan(r.snorm)) {
      sum += r.snorm;
      ++count;
    }
  }
  est.trailing_snorm_mean = count ? sum / static_cast<double>(count) : 0.0;
  return est;
}

double theorem5_threshold(double eps_m, double slack) { return 1.0 - 2.0 * eps_m / (1.0 + eps_m) - slack; }

Theorem5Audit audit_theorem5(const CgTrace& trace, double eps_m, double slack) {
  Theorem5Audit audit;
  audit.threshold = theorem5_threshold(eps_m, slack);
  audit.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& r : trace) {
    if (!r.dr_ratio) continue;
    const bool pass = *r.dr_ratio >= audit.threshold;
    audit.entries.push_back({r.k, *r.dr_ratio, pass});
    audit.failures += !pass;
    audit.min_ratio = std::min(audit.min_ratio, *r.dr_ratio);
  }
  return audit;
}

GapReport gap_report(const CgTrace& trace, std::size_t window) {
  GapReport rep;
  rep.window = std::max<std::size_t>(window, 1);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    rep.gaps.push_back(r.gap);
    double wmax = 0.0;
    for (std::size_t j = i + 1 > rep.window ? i + 1 - rep.window : 0; j <= i; ++j) {
      if (!std::isnan(trace[j].gap)) wmax = std::max(wmax, trace[j].gap);
    }
    rep.windowed_max.push_back(wmax);
    if (!std::isnan(r.gap)) {
      rep.max_gap = std::max(rep.max_gap, r.gap);
      rep.final_gap = r.gap;
      if (!rep.crossover && !std::isnan(r.snorm) && r.gap > r.snorm) rep.crossover = r.k;
    }
  }
  return rep;
}

}  // namespace cglab
