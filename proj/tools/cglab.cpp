// cglab: run, compare and verify instrumented CG experiments.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cglab/error.hpp"
#include "cglab/experiment.hpp"

using nlohmann::json;

namespace {

struct ProblemFlags {
  std::string config_file;
  std::string gen, matrix, rhs, precision, criteria, exponent;
  std::size_t max_iters = 0;
  std::size_t every = 0;
  std::uint64_t seed = 0;
  std::string trace, report, plot;
  std::vector<std::string> plot_cols;
};

void add_problem_flags(CLI::App* cmd, ProblemFlags& f, bool with_precision) {
  cmd->add_option("--config", f.config_file, "JSON config file; flags given here override it");
  cmd->add_option("--gen", f.gen, "generator spec, e.g. diag-geometric:1e8:100");
  cmd->add_option("--matrix", f.matrix, "Matrix Market file (real symmetric)");
  cmd->add_option("--rhs", f.rhs, "for --matrix: ones, xstar-ones or a vector file");
  if (with_precision) cmd->add_option("--precision", f.precision, "double or p:<bits>");
  cmd->add_option("--criteria", f.criteria, "comma list of ginsburg, stagnation, relres:<tol>, collapse");
  cmd->add_option("--ginsburg-exponent", f.exponent, "2k/n (default) or (k/n)^2");
  cmd->add_option("--max-iters", f.max_iters, "iteration cap (default 1000)");
  cmd->add_option("--true-residual-every", f.every, "recompute b - Ax every this many steps");
  cmd->add_option("--seed", f.seed, "seed for seeded generator families");
}

cglab::ExperimentConfig build_config(const CLI::App* cmd, const ProblemFlags& f) {
  cglab::ExperimentConfig c;
  if (cmd->count("--config")) {
    json j;
    try {
      j = json::parse(cglab::read_text_file(f.config_file));
    } catch (const json::parse_error& e) {
      throw cglab::ConfigError("config", e.what());
    }
    c = cglab::ExperimentConfig::from_json(j);
  }
  auto given = [&](const char* name) { return cmd->get_option_no_throw(name) && cmd->count(name) > 0; };
  if (given("--gen")) {
    c.generator = f.gen;
    c.matrix.reset();
  }
  if (given("--matrix")) {
    c.matrix = f.matrix;
    if (!given("--gen")) c.generator.reset();
  }
  if (given("--rhs")) c.rhs = f.rhs;
  if (given("--precision")) c.precision = f.precision;
  if (given("--criteria")) c.criteria = f.criteria;
  if (given("--ginsburg-exponent")) c.ginsburg_exponent = f.exponent;
  if (given("--max-iters")) c.max_iters = f.max_iters;
  if (given("--true-residual-every")) c.true_residual_every = f.every;
  if (given("--seed")) c.seed = f.seed;
  if (given("--trace")) c.trace_path = f.trace;
  if (given("--report")) c.report_path = f.report;
  if (given("--plot")) c.plot_path = f.plot;
  if (given("--plot-cols")) c.plot_cols = f.plot_cols;
  c = cglab::apply_environment(std::move(c));
  c.validate();
  return c;
}

int cmd_solve(const CLI::App* cmd, const ProblemFlags& f) {
  const cglab::ExperimentConfig config = build_config(cmd, f);
  const cglab::Experiment e = cglab::run_experiment(config);
  cglab::write_outputs(e);

  const auto& v = e.run.verdict;
  std::printf("problem    %s (n = %zu)\n", e.loaded.description.c_str(), e.loaded.problem.order());
  std::printf("precision  %s (unit roundoff %.3g)\n", e.model.to_string().c_str(), e.model.unit_roundoff());
  std::printf("verdict    %s at k = %zu\n", cglab::to_string(v.kind).c_str(), v.fired_at);
  const auto& last = e.run.trace.back();
  std::printf("final      rnorm %.6e  snorm %.6e  gap %.6e\n", last.rnorm, last.snorm, last.gap);
  if (e.analysis.floor) {
    std::printf("floor      %.6e from k = %zu (%s)\n", e.analysis.floor->floor_norm, e.analysis.floor->stagnation_index,
                e.analysis.floor->detected_by.c_str());
  }
  if (e.analysis.gap.crossover) std::printf("crossover  k = %zu\n", *e.analysis.gap.crossover);
  std::printf("theorem5   %zu failing steps of %zu\n", e.analysis.theorem5.failures, e.analysis.theorem5.entries.size());
  return cglab::exit_code_for(v.kind);
}

int cmd_compare(const CLI::App* cmd, const ProblemFlags& f, const std::vector<std::string>& precisions,
                const std::string& trace_prefix) {
  const cglab::ExperimentConfig config = build_config(cmd, f);
  const cglab::CompareResult r = cglab::compare_precisions(config, precisions);
  if (!trace_prefix.empty()) {
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      std::string tag = r.runs[i].model.to_string();
      for (char& c : tag) {
        if (c == ':') c = '_';
      }
      cglab::write_trace(r.runs[i].run.trace, trace_prefix + std::to_string(i) + "_" + tag + ".csv");
    }
  }
  if (config.report_path) cglab::write_text_file(*config.report_path, r.report.dump(2) + "\n");
  std::printf("%-10s %-18s %10s %14s %12s %10s\n", "precision", "verdict", "iterations", "floor_norm", "stagnation",
              "crossover");
  for (const auto& row : r.report["runs"]) {
    auto cell = [](const json& v) { return v.is_null() ? std::string("-") : v.dump(); };
    std::printf("%-10s %-18s %10s %14s %12s %10s\n", row["precision"].get<std::string>().c_str(),
                row["verdict"].get<std::string>().c_str(), cell(row["iterations"]).c_str(),
                cell(row["floor_norm"]).c_str(), cell(row["stagnation_index"]).c_str(),
                cell(row["crossover"]).c_str());
  }
  for (const auto& ratio : r.report["floor_ratios"]) std::printf("%s\n", ratio.dump().c_str());
  return r.exit_code;
}

int cmd_verify(const std::vector<std::string>& suites, const std::string& report) {
  for (const auto& name : suites) {
    if (name != "oracle" && name != "monotonicity" && name != "theorem5") {
      throw cglab::UsageError("unknown verify suite '" + name + "' (expected oracle, monotonicity or theorem5)");
    }
  }
  json all = json::array();
  bool ok = true;
  for (const auto& name : suites) {
    const cglab::SuiteResult s = cglab::run_suite(name);
    ok = ok && s.passed;
    json brief{{"suite", s.name}, {"passed", s.passed}};
    for (const auto& [key, value] : s.summary.items()) {
      if (!value.is_array()) brief[key] = value;
    }
    std::printf("%s\n", brief.dump().c_str());
    json full = s.summary;
    full["suite"] = s.name;
    full["passed"] = s.passed;
    all.push_back(full);
  }
  if (!report.empty()) cglab::write_text_file(report, all.dump(2) + "\n");
  return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instrumented conjugate gradient experiments"};
  app.require_subcommand(1);

  ProblemFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "run CG on one problem and analyze the trace");
  add_problem_flags(solve, solve_flags, true);
  solve->add_option("--trace", solve_flags.trace, "trace CSV output");
  solve->add_option("--report", solve_flags.report, "report JSON output");
  solve->add_option("--plot", solve_flags.plot, "plot-ready CSV output");
  solve->add_option("--plot-cols", solve_flags.plot_cols, "columns for --plot")->delimiter(',');

  ProblemFlags compare_flags;
  std::vector<std::string> precisions;
  std::string trace_prefix;
  CLI::App* compare = app.add_subcommand("compare", "solve one problem under several precisions");
  add_problem_flags(compare, compare_flags, false);
  compare->add_option("--precisions", precisions, "comma list, at least two")->delimiter(',')->required();
  compare->add_option("--report", compare_flags.report, "consolidated report JSON output");
  compare->add_option("--trace-prefix", trace_prefix, "write one trace per precision as <prefix><i>_<precision>.csv");

  std::vector<std::string> suites;
  std::string verify_report;
  CLI::App* verify = app.add_subcommand("verify", "run canned property suites: oracle, monotonicity, theorem5");
  verify->add_option("suite", suites, "suite names")->required();
  verify->add_option("--report", verify_report, "full JSON summary output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*solve) return cmd_solve(solve, solve_flags);
    if (*compare) return cmd_compare(compare, compare_flags, precisions, trace_prefix);
    if (*verify) return cmd_verify(suites, verify_report);
  } catch (const cglab::ConfigError& e) {
    std::cerr << "cglab: invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const cglab::UsageError& e) {
    std::cerr << "cglab: " << e.what() << "\n";
    return 1;
  } catch (const cglab::Error& e) {
    std::cerr << "cglab: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
