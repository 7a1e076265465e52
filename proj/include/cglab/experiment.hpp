#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cglab/analysis.hpp"
#include "cglab/cg.hpp"
#include "cglab/problems.hpp"

namespace cglab {

/// Everything needed to reproduce a run. Exactly one of `generator` and
/// `matrix` is set. For matrix input `rhs` is "ones" (b = 1), "xstar-ones"
/// (x* = 1, b = A x* in double-double) or a vector file path.
struct ExperimentConfig {
  std::optional<std::string> generator;
  std::optional<std::string> matrix;
  std::string rhs = "ones";
  std::string precision = "double";
  std::string criteria;
  std::string ginsburg_exponent = "2k/n";
  std::size_t max_iters = 1000;
  std::size_t true_residual_every = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> trace_path;
  std::optional<std::string> report_path;
  std::optional<std::string> plot_path;
  std::vector<std::string> plot_cols;

  nlohmann::json to_json() const;
  /// Unknown keys and wrong types are ConfigErrors naming the key.
  static ExperimentConfig from_json(const nlohmann::json& j);

  /// Checks every field without touching the file system.
  void validate() const;
};

/// Seed from CGLAB_SEED, when set, replaces the configured one.
ExperimentConfig apply_environment(ExperimentConfig config);

/// Problem described by the config, built under `m`.
struct LoadedProblem {
  CgProblem problem;
  std::optional<SpectralInfo> spectrum;
  std::string description;
};

LoadedProblem load_problem(const ExperimentConfig& config, const RoundingModel& m);

struct RunAnalysis {
  std::vector<MonotonicityReport> monotonicity;
  std::optional<FloorEstimate> floor;
  std::string floor_unavailable;  // reason, when floor is empty
  Theorem5Audit theorem5;
  GapReport gap;
};

RunAnalysis analyze_run(const CgProblem& problem, const CgRunResult& run, const RoundingModel& m);

struct Experiment {
  ExperimentConfig config;
  RoundingModel model;
  LoadedProblem loaded;
  CgRunResult run;
  RunAnalysis analysis;
};

/// Loads, solves and analyzes. Writes nothing.
Experiment run_experiment(const ExperimentConfig& config);

/// 0 for ginsburg, stagnation, relres and recursive-collapse; 2 for
/// exhausted; 3 for breakdown.
int exit_code_for(VerdictKind kind);

nlohmann::json report_json(const Experiment& e);

/// Selected trace columns as CSV; empty `cols` means every column.
std::string format_plot(const CgTrace& trace, const std::vector<std::string>& cols);

/// Writes the trace, report and plot files named in the config.
void write_outputs(const Experiment& e);

struct CompareResult {
  std::vector<Experiment> runs;
  nlohmann::json report;
  int exit_code = 0;
};

/// Same problem and seed under each precision (at least two).
CompareResult compare_precisions(const ExperimentConfig& config, const std::vector<std::string>& precisions);

// Canned property suites.

struct SweepCase {
  GeneratorSpec spec;
  std::size_t max_iters = 0;
};

/// kappa in {1e2, 1e6, 1e10, 1e12}, n in {50, 200}, seeds 1-4, for
/// diag-geometric and dense-spd: 64 native-double runs of at most 5n steps,
/// stopped early by the stagnation rule.
std::vector<SweepCase> standard_sweep();
inline constexpr const char* kSweepCriteria = "stagnation";

struct SweepRun {
  SweepCase c;
  CgProblem problem;
  CgRunResult run;
};

std::vector<SweepRun> run_sweep(const std::vector<SweepCase>& cases);

struct SuiteResult {
  std::string name;
  bool passed = false;
  nlohmann::json summary;
};

/// "oracle", "monotonicity" or "theorem5"; anything else is a UsageError.
SuiteResult run_suite(const std::string& name);

}  // namespace cglab
