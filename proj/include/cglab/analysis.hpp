#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cglab/cg.hpp"
#include "cglab/linalg.hpp"

namespace cglab {

/// Almost-monotonicity over a finite trace. For index j a witness is any
/// later k with value(k) < value(j). `first_stagnation` is the smallest j
/// from which the series no longer moves by more than a factor eps_m
/// (it has frozen); indices from there on that lack a witness are listed
/// under `trailing`, all earlier ones under `violations`.
struct MonotonicityReport {
  std::string series_name;
  std::vector<std::size_t> violations;
  std::vector<std::size_t> trailing;
  std::size_t first_stagnation = 0;
  std::size_t length = 0;
};

/// NaN entries (iterations with no measurement) are neither witnesses nor
/// candidates.
MonotonicityReport scan_almost_monotonicity(std::span<const double> series, double eps_m,
                                            std::string name = "series");

/// One report per available series: enorm2, enormA, snorm, rnorm.
std::vector<MonotonicityReport> scan_trace(const CgTrace& trace, double eps_m);

std::vector<double> series_of(const CgTrace& trace, std::string_view name);

struct FloorEstimate {
  DenseVector x_stop;
  DenseVector floor_vector;  // A (x* - x_stop), double-double then rounded
  double floor_norm = 0.0;
  std::size_t stagnation_index = 0;
  /// Mean of snorm from stagnation_index to the end of the trace.
  double trailing_snorm_mean = 0.0;
  std::string detected_by;  // "stagnation-criterion", "zero-residual" or "trailing-window"
};

/// Fallback stagnation window: at least this many consecutive iterations
/// whose relative snorm change stays below kStagnationWindowFactor * eps_m.
inline constexpr std::size_t kStagnationWindow = 10;
inline constexpr double kStagnationWindowFactor = 10.0;

/// Index where the trailing flat snorm window starts, if there is one.
std::optional<std::size_t> trailing_stagnation_start(const CgTrace& trace, double eps_m);

/// Throws Unavailable without a reference solution and NotStagnated when
/// the run shows no stagnation.
FloorEstimate estimate_floor(const CgProblem& problem, const CgRunResult& run, double eps_m);

struct Theorem5Entry {
  std::size_t k = 0;
  double dr_ratio = 0.0;
  bool pass = true;
};

struct Theorem5Audit {
  std::vector<Theorem5Entry> entries;
  double threshold = 0.0;  // 1 - 2 eps/(1 + eps) - slack
  std::size_t failures = 0;
  double min_ratio = 0.0;
};

inline constexpr double kTheorem5Slack = 1e-10;

/// Lower bound every computed ||r_{k-1} - r_k|| / ||r_{k-1}|| must respect.
double theorem5_threshold(double eps_m, double slack = kTheorem5Slack);

Theorem5Audit audit_theorem5(const CgTrace& trace, double eps_m, double slack = kTheorem5Slack);

struct GapReport {
  std::vector<double> gaps;
  std::vector<double> windowed_max;  // max over the last `window` iterations
  std::size_t window = 5;
  /// First k with gap > snorm.
  std::optional<std::size_t> crossover;
  double final_gap = 0.0;
  double max_gap = 0.0;
};

GapReport gap_report(const CgTrace& trace, std::size_t window = 5);

}  // namespace cglab
