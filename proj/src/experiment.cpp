#include "cglab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "cglab/error.hpp"
#include "cglab/oracle.hpp"

namespace cglab {

using nlohmann::json;

namespace {

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{"k", "alpha", "rnorm", "snorm", "gap", "enorm2", "enormA", "dr_ratio"};
  return cols;
}

template <class T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, std::string("wrong type (") + e.what() + ")");
  }
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_field<T>(j, key);
}

json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

json spectrum_json(const std::optional<SpectralInfo>& s) {
  if (!s) return nullptr;
  return {{"lambda_min", s->lambda_min}, {"lambda_max", s->lambda_max}, {"kappa", s->kappa}};
}

}  // namespace

json ExperimentConfig::to_json() const {
  return json{{"generator", optional_json(generator)},
              {"matrix", optional_json(matrix)},
              {"rhs", rhs},
              {"precision", precision},
              {"criteria", criteria},
              {"ginsburg_exponent", ginsburg_exponent},
              {"max_iters", max_iters},
              {"true_residual_every", true_residual_every},
              {"seed", seed ? json(*seed) : json(nullptr)},
              {"trace", optional_json(trace_path)},
              {"report", optional_json(report_path)},
              {"plot", optional_json(plot_path)},
              {"plot_cols", plot_cols}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  static const std::set<std::string> known{"generator", "matrix",   "rhs",       "precision", "criteria",
                                           "ginsburg_exponent", "max_iters", "true_residual_every",
                                           "seed",      "trace",    "report",    "plot",      "plot_cols"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown config key");
  }
  ExperimentConfig c;
  c.generator = get_optional<std::string>(j, "generator");
  c.matrix = get_optional<std::string>(j, "matrix");
  if (auto v = get_optional<std::string>(j, "rhs")) c.rhs = *v;
  if (auto v = get_optional<std::string>(j, "precision")) c.precision = *v;
  if (auto v = get_optional<std::string>(j, "criteria")) c.criteria = *v;
  if (auto v = get_optional<std::string>(j, "ginsburg_exponent")) c.ginsburg_exponent = *v;
  if (auto v = get_optional<std::size_t>(j, "max_iters")) c.max_iters = *v;
  if (auto v = get_optional<std::size_t>(j, "true_residual_every")) c.true_residual_every = *v;
  c.seed = get_optional<std::uint64_t>(j, "seed");
  c.trace_path = get_optional<std::string>(j, "trace");
  c.report_path = get_optional<std::string>(j, "report");
  c.plot_path = get_optional<std::string>(j, "plot");
  if (auto v = get_optional<std::vector<std::string>>(j, "plot_cols")) c.plot_cols = *v;
  return c;
}

void ExperimentConfig::validate() const {
  if (generator.has_value() == matrix.has_value()) {
    throw ConfigError("generator/matrix", "exactly one problem source (--gen or --matrix) is required");
  }
  if (generator) {
    try {
      GeneratorSpec::parse(*generator);
    } catch (const UsageError& e) {
      throw ConfigError("generator", e.what());
    }
  }
  if (rhs.empty()) throw ConfigError("rhs", "must not be empty");
  try {
    RoundingModel::parse(precision);
  } catch (const UsageError& e) {
    throw ConfigError("precision", e.what());
  }
  GinsburgExponent exponent{};
  try {
    exponent = ginsburg_exponent_from_string(ginsburg_exponent);
  } catch (const UsageError& e) {
    throw ConfigError("ginsburg_exponent", e.what());
  }
  try {
    CriteriaSet::parse(criteria, exponent);
  } catch (const UsageError& e) {
    throw ConfigError("criteria", e.what());
  }
  if (true_residual_every == 0) throw ConfigError("true_residual_every", "must be at least 1");
  for (const auto& col : plot_cols) {
    const auto& all = trace_columns();
    if (std::find(all.begin(), all.end(), col) == all.end()) {
      throw ConfigError("plot_cols", "unknown column '" + col + "'");
    }
  }
}

ExperimentConfig apply_environment(ExperimentConfig config) {
  if (const char* env = std::getenv("CGLAB_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw ConfigError("CGLAB_SEED", std::string("not an unsigned integer: ") + env);
    config.seed = v;
  }
  return config;
}

LoadedProblem load_problem(const ExperimentConfig& config, const RoundingModel& m) {
  if (config.generator) {
    GeneratorSpec spec = GeneratorSpec::parse(*config.generator);
    if (config.seed && spec.accepts_seed()) spec.seed = *config.seed;
    GeneratedProblem g = generate(spec, m);
    return LoadedProblem{std::move(g.problem), g.spectrum, spec.to_string()};
  }
  const SpdMatrix A = read_matrix_market(*config.matrix).rounded(m);
  const std::size_t n = A.order();
  std::optional<DenseVector> reference;
  DenseVector b(n);
  if (config.rhs == "ones") {
    b = DenseVector(n, 1.0);
  } else if (config.rhs == "xstar-ones") {
    reference = DenseVector(n, 1.0);
    b = extended_matvec(A, *reference, m);
  } else {
    b = rounded(read_vector_market(config.rhs), m);
    if (b.size() != n) throw ConfigError("rhs", "vector length does not match the matrix order");
  }
  return LoadedProblem{CgProblem::zero_start(A, std::move(b), std::move(reference)), std::nullopt,
                       *config.matrix + " (rhs " + config.rhs + ")"};
}

RunAnalysis analyze_run(const CgProblem& problem, const CgRunResult& run, const RoundingModel& m) {
  const double eps = m.unit_roundoff();
  RunAnalysis a;
  a.monotonicity = scan_trace(run.trace, eps);
  try {
    a.floor = estimate_floor(problem, run, eps);
  } catch (const Unavailable& e) {
    a.floor_unavailable = e.what();
  } catch (const NotStagnated& e) {
    a.floor_unavailable = e.what();
  }
  a.theorem5 = audit_theorem5(run.trace, eps);
  a.gap = gap_report(run.trace);
  return a;
}

Experiment run_experiment(const ExperimentConfig& config) {
  config.validate();
  const RoundingModel m = RoundingModel::parse(config.precision);
  const CriteriaSet criteria =
      CriteriaSet::parse(config.criteria, ginsburg_exponent_from_string(config.ginsburg_exponent));
  LoadedProblem loaded = load_problem(config, m);
  RunOptions opts;
  opts.max_iters = config.max_iters;
  opts.true_residual_every = config.true_residual_every;
  CgRunResult run = run_cg(loaded.problem, m, criteria, opts);
  RunAnalysis analysis = analyze_run(loaded.problem, run, m);
  return Experiment{config, m, std::move(loaded), std::move(run), std::move(analysis)};
}

int exit_code_for(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::exhausted: return 2;
    case VerdictKind::breakdown: return 3;
    default: return 0;
  }
}

json report_json(const Experiment& e) {
  const auto& p = e.loaded.problem;
  json monotonicity = json::array();
  for (const auto& r : e.analysis.monotonicity) {
    monotonicity.push_back({{"series", r.series_name},
                            {"first_stagnation", r.first_stagnation},
                            {"violations", r.violations},
                            {"trailing_count", r.trailing.size()},
                            {"length", r.length}});
  }
  json floor;
  if (const auto& f = e.analysis.floor) {
    floor = {{"available", true},
             {"floor_norm", f->floor_norm},
             {"stagnation_index", f->stagnation_index},
             {"trailing_snorm_mean", f->trailing_snorm_mean},
             {"detected_by", f->detected_by}};
  } else {
    floor = {{"available", false}, {"reason", e.analysis.floor_unavailable}};
  }
  const auto& t5 = e.analysis.theorem5;
  json failing = json::array();
  for (const auto& entry : t5.entries) {
    if (!entry.pass) failing.push_back({{"k", entry.k}, {"dr_ratio", entry.dr_ratio}});
  }
  const auto& g = e.analysis.gap;
  return json{
      {"config", e.config.to_json()},
      {"problem",
       {{"source", e.loaded.description},
        {"order", p.order()},
        {"nonzeros", p.A.nonzeros()},
        {"bnorm", norm2(p.b)},
        {"has_reference", p.reference_solution.has_value()},
        {"spectrum", spectrum_json(e.loaded.spectrum)}}},
      {"precision",
       {{"model", e.model.to_string()}, {"bits", e.model.bits()}, {"unit_roundoff", e.model.unit_roundoff()}}},
      {"criteria",
       {{"spec", CriteriaSet::parse(e.config.criteria, ginsburg_exponent_from_string(e.config.ginsburg_exponent))
                     .to_string()},
        {"ginsburg_exponent", e.config.ginsburg_exponent}}},
      {"verdict",
       {{"kind", to_string(e.run.verdict.kind)}, {"fired_at", e.run.verdict.fired_at}, {"witness", e.run.verdict.witness}}},
      {"iterations", e.run.stop_index},
      {"monotonicity", monotonicity},
      {"floor", floor},
      {"theorem5_audit",
       {{"threshold", t5.threshold},
        {"steps", t5.entries.size()},
        {"failures", t5.failures},
        {"min_ratio", t5.entries.empty() ? json(nullptr) : json(t5.min_ratio)},
        {"failing_steps", failing}}},
      {"gap",
       {{"crossover", g.crossover ? json(*g.crossover) : json(nullptr)},
        {"final_gap", g.final_gap},
        {"max_gap", g.max_gap},
        {"window", g.window}}}};
}

std::string format_plot(const CgTrace& trace, const std::vector<std::string>& cols) {
  const std::vector<std::string>& use = cols.empty() ? trace_columns() : cols;
  std::vector<std::vector<double>> columns;
  for (const auto& c : use) columns.push_back(c == "k" ? std::vector<double>{} : series_of(trace, c));
  std::string out;
  for (std::size_t i = 0; i < use.size(); ++i) out += (i ? "," : "") + use[i];
  out += '\n';
  char buf[32];
  for (std::size_t row = 0; row < trace.size(); ++row) {
    for (std::size_t i = 0; i < use.size(); ++i) {
      if (i) out += ',';
      if (use[i] == "k") {
        out += std::to_string(trace[row].k);
      } else if (const double v = columns[i][row]; !std::isnan(v)) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

void write_outputs(const Experiment& e) {
  if (e.config.trace_path) write_trace(e.run.trace, *e.config.trace_path);
  if (e.config.report_path) write_text_file(*e.config.report_path, report_json(e).dump(2) + "\n");
  if (e.config.plot_path) write_text_file(*e.config.plot_path, format_plot(e.run.trace, e.config.plot_cols));
}

CompareResult compare_precisions(const ExperimentConfig& config, const std::vector<std::string>& precisions) {
  if (precisions.size() < 2) throw ConfigError("precisions", "compare needs at least two precisions");
  CompareResult out;
  json rows = json::array();
  for (const auto& prec : precisions) {
    ExperimentConfig c = config;
    c.precision = prec;
    c.trace_path.reset();
    c.report_path.reset();
    c.plot_path.reset();
    Experiment e = run_experiment(c);
    const auto& f = e.analysis.floor;
    rows.push_back({{"precision", e.model.to_string()},
                    {"unit_roundoff", e.model.unit_roundoff()},
                    {"verdict", to_string(e.run.verdict.kind)},
                    {"iterations", e.run.stop_index},
                    {"floor_norm", f ? json(f->floor_norm) : json(nullptr)},
                    {"stagnation_index", f ? json(f->stagnation_index) : json(nullptr)},
                    {"crossover", e.analysis.gap.crossover ? json(*e.analysis.gap.crossover) : json(nullptr)}});
    out.exit_code = std::max(out.exit_code, exit_code_for(e.run.verdict.kind));
    out.runs.push_back(std::move(e));
  }
  json ratios = json::array();
  const auto& base = out.runs.front().analysis.floor;
  for (std::size_t i = 1; i < out.runs.size(); ++i) {
    const auto& f = out.runs[i].analysis.floor;
    json ratio = nullptr;
    if (base && f && base->floor_norm > 0.0) ratio = f->floor_norm / base->floor_norm;
    ratios.push_back({{"precision", out.runs[i].model.to_string()},
                      {"relative_to", out.runs.front().model.to_string()},
                      {"floor_ratio", ratio},
                      {"log2_floor_ratio", ratio.is_null() ? json(nullptr) : json(std::log2(ratio.get<double>()))}});
  }
  ExperimentConfig shown = config;
  shown.precision.clear();
  json cfg = shown.to_json();
  cfg["precisions"] = precisions;
  out.report = json{{"config", cfg}, {"runs", rows}, {"floor_ratios", ratios}};
  return out;
}

std::vector<SweepCase> standard_sweep() {
  std::vector<SweepCase> cases;
  for (const auto family : {GeneratorSpec::Family::diag_geometric, GeneratorSpec::Family::dense_spd}) {
    for (const double kappa : {1e2, 1e6, 1e10, 1e12}) {
      for (const std::size_t n : {50, 200}) {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
          GeneratorSpec spec;
          spec.family = family;
          spec.kappa = kappa;
          spec.n = n;
          spec.seed = seed;
          cases.push_back({spec, 5 * n});
        }
      }
    }
  }
  return cases;
}

std::vector<SweepRun> run_sweep(const std::vector<SweepCase>& cases) {
  const RoundingModel m = RoundingModel::native();
  const CriteriaSet criteria = CriteriaSet::parse(kSweepCriteria);
  std::vector<SweepRun> runs;
  runs.reserve(cases.size());
  for (const auto& c : cases) {
    GeneratedProblem g = generate(c.spec, m);
    RunOptions opts;
    opts.max_iters = c.max_iters;
    CgRunResult r = run_cg(g.problem, m, criteria, opts);
    runs.push_back(SweepRun{c, std::move(g.problem), std::move(r)});
  }
  return runs;
}

namespace {

SuiteResult oracle_suite() {
  SuiteResult s{"oracle", true, json::object()};
  json cases = json::array();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 2 + seed % 7;
    GeneratorSpec spec;
    spec.family = GeneratorSpec::Family::integer_spd;
    spec.n = n;
    spec.seed = seed;
    const GeneratedProblem g = generate(spec);
    const auto A = oracle::RationalMatrix::from(g.problem.A);
    const auto b = oracle::matvec(A, oracle::to_rational(*g.problem.reference_solution));
    const oracle::IdentityReport rep = oracle::check_identities(A, b);
    s.passed = s.passed && rep.all_pass();
    cases.push_back({{"problem", spec.to_string()},
                     {"steps", rep.steps},
                     {"residual_matches_true", rep.residual_matches_true},
                     {"residuals_orthogonal", rep.residuals_orthogonal},
                     {"anorm_strictly_decreasing", rep.anorm_strictly_decreasing},
                     {"dr_dominates_r", rep.dr_dominates_r},
                     {"terminated_within_order", rep.terminated_within_order},
                     {"reaches_solution", rep.reaches_solution},
                     {"pass", rep.all_pass()}});
  }
  s.summary = {{"cases", cases}};
  return s;
}

SuiteResult monotonicity_suite() {
  SuiteResult s{"monotonicity", true, json::object()};
  const double eps = RoundingModel::native().unit_roundoff();
  json rows = json::array();
  std::size_t total = 0;
  for (const auto& r : run_sweep(standard_sweep())) {
    json series = json::object();
    for (const auto& rep : scan_trace(r.run.trace, eps)) {
      series[rep.series_name] = {{"violations", rep.violations.size()}, {"first_stagnation", rep.first_stagnation}};
      total += rep.violations.size();
    }
    rows.push_back({{"problem", r.c.spec.to_string()},
                    {"verdict", to_string(r.run.verdict.kind)},
                    {"iterations", r.run.stop_index},
                    {"series", series}});
  }
  s.passed = total == 0;
  s.summary = {{"total_violations", total}, {"runs", rows}};
  return s;
}

SuiteResult theorem5_suite() {
  SuiteResult s{"theorem5", true, json::object()};
  const double eps = RoundingModel::native().unit_roundoff();
  json rows = json::array();
  std::size_t failures = 0;
  double min_ratio = INFINITY;
  for (const auto& r : run_sweep(standard_sweep())) {
    const Theorem5Audit a = audit_theorem5(r.run.trace, eps);
    failures += a.failures;
    min_ratio = std::min(min_ratio, a.min_ratio);
    rows.push_back({{"problem", r.c.spec.to_string()},
                    {"steps", a.entries.size()},
                    {"failures", a.failures},
                    {"min_ratio", a.min_ratio}});
  }
  s.passed = failures == 0;
  s.summary = {{"threshold", theorem5_threshold(eps)},
               {"failures", failures},
               {"min_ratio", min_ratio},
               {"runs", rows}};
  return s;
}

}  // namespace

SuiteResult run_suite(const std::string& name) {
  if (name == "oracle") return oracle_suite();
  if (name == "monotonicity") return monotonicity_suite();
  if (name == "theorem5") return theorem5_suite();
  throw UsageError("unknown verify suite '" + name + "' (expected oracle, monotonicity or theorem5)");
}

}  // namespace cglab
