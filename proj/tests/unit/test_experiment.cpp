#include <doctest.h>

#include <cstdlib>

#include "cglab/error.hpp"
#include "cglab/experiment.hpp"

using namespace cglab;
using nlohmann::json;

namespace {

ExperimentConfig gen_config(const std::string& gen, const std::string& precision = "double") {
  ExperimentConfig c;
  c.generator = gen;
  c.precision = precision;
  return c;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("config JSON round trip") {
    ExperimentConfig c = gen_config("dense-spd:1e6:40:2", "p:24");
    c.criteria = "ginsburg,relres:1e-10";
    c.ginsburg_exponent = "(k/n)^2";
    c.max_iters = 77;
    c.true_residual_every = 3;
    c.seed = 9;
    c.trace_path = "t.csv";
    c.plot_cols = {"k", "rnorm"};
    const ExperimentConfig back = ExperimentConfig::from_json(json::parse(c.to_json().dump()));
    CHECK(back.to_json() == c.to_json());
  }

  TEST_CASE("config validation names the field") {
    try {
      ExperimentConfig::from_json(json{{"generatr", "laplacian-1d:4"}});
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "generatr");
    }
    auto field_of = [](const ExperimentConfig& c) {
      try {
        c.validate();
      } catch (const ConfigError& e) {
        return e.field();
      }
      return std::string();
    };
    CHECK(field_of(ExperimentConfig{}) == "generator/matrix");
    CHECK(field_of(gen_config("laplacian-1d:4", "p:99")) == "precision");
    CHECK(field_of(gen_config("nope:4")) == "generator");
    ExperimentConfig c = gen_config("laplacian-1d:4");
    c.criteria = "relres";
    CHECK(field_of(c) == "criteria");
    c.criteria = "";
    c.plot_cols = {"zzz"};
    CHECK(field_of(c) == "plot_cols");
    CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"max_iters", "ten"}}), ConfigError);
  }

  TEST_CASE("CGLAB_SEED overrides the configured seed") {
    ExperimentConfig c = gen_config("dense-spd:1e3:20:1");
    c.seed = 4;
    setenv("CGLAB_SEED", "17", 1);
    const ExperimentConfig env = apply_environment(c);
    unsetenv("CGLAB_SEED");
    CHECK(env.seed == 17u);
    CHECK(load_problem(env, {}).description == "dense-spd:1000:20:17");
    CHECK(apply_environment(c).seed == 4u);
    setenv("CGLAB_SEED", "-3", 1);
    CHECK_THROWS_AS(apply_environment(c), ConfigError);
    unsetenv("CGLAB_SEED");
  }

  TEST_CASE("identical configs give byte-identical traces") {
    for (const char* precision : {"p:24", "p:40", "double"}) {
      ExperimentConfig c = gen_config("dense-spd:1e5:40:6", precision);
      c.max_iters = 120;
      const Experiment a = run_experiment(c), b = run_experiment(c);
      CHECK(format_trace(a.run.trace) == format_trace(b.run.trace));
    }
  }

  TEST_CASE("report embeds the config and the verdict") {
    ExperimentConfig c = gen_config("diag-geometric:1e2:50");
    c.criteria = "relres:1e-12";
    const Experiment e = run_experiment(c);
    const json r = report_json(e);
    CHECK(r["config"] == c.to_json());
    CHECK(r["verdict"]["kind"] == "relres");
    CHECK(r["precision"]["unit_roundoff"] == 0x1p-53);
    CHECK(r["problem"]["order"] == 50);
    CHECK(exit_code_for(e.run.verdict.kind) == 0);
    CHECK(exit_code_for(VerdictKind::exhausted) == 2);
    CHECK(exit_code_for(VerdictKind::breakdown) == 3);
  }

  TEST_CASE("plot columns") {
    ExperimentConfig c = gen_config("laplacian-1d:6");
    const Experiment e = run_experiment(c);
    const std::string plot = format_plot(e.run.trace, {"k", "rnorm"});
    CHECK(plot.rfind("k,rnorm\n0,", 0) == 0);
    CHECK(format_plot(e.run.trace, {}).rfind("k,alpha,rnorm,snorm,gap,enorm2,enormA,dr_ratio\n", 0) == 0);
  }

  TEST_CASE("compare needs two precisions and reports floor ratios") {
    ExperimentConfig c = gen_config("dense-spd:1e6:60:1");
    c.criteria = "stagnation";
    c.max_iters = 2000;
    CHECK_THROWS_AS(compare_precisions(c, {"p:10"}), ConfigError);
    const CompareResult same = compare_precisions(c, {"double", "double"});
    CHECK(format_trace(same.runs[0].run.trace) == format_trace(same.runs[1].run.trace));
    const CompareResult r = compare_precisions(c, {"double", "p:24"});
    REQUIRE(r.runs.size() == 2);
    REQUIRE(r.runs[0].analysis.floor);
    REQUIRE(r.runs[1].analysis.floor);
    CHECK(r.runs[1].analysis.floor->floor_norm > r.runs[0].analysis.floor->floor_norm);
    CHECK(r.report["floor_ratios"].size() == 1);
  }

  TEST_CASE("relres at 10 kappa eps fires within 5n steps") {
    // diag-geometric at kappa 1e6 needs more than 5n steps and is left out.
    for (const auto& c : standard_sweep()) {
      if (c.spec.family == GeneratorSpec::Family::diag_geometric && c.spec.kappa == 1e6) continue;
      const auto g = generate(c.spec);
      Criterion relres;
      relres.tolerance = 10 * c.spec.kappa * 0x1p-53;
      const CgRunResult r = run_cg(g.problem, {}, CriteriaSet({relres}), {c.max_iters, 1});
      INFO(c.spec.to_string());
      CHECK(r.verdict.kind == VerdictKind::relres);
    }
  }

  TEST_CASE("suites") {
    CHECK(run_suite("oracle").passed);
    CHECK_THROWS_AS(run_suite("bogus"), UsageError);
    CHECK(standard_sweep().size() >= 50);
  }
}
