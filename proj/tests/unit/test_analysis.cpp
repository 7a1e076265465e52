#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cglab/analysis.hpp"
#include "cglab/error.hpp"
#include "cglab/oracle.hpp"
#include "cglab/problems.hpp"

using namespace cglab;

namespace {

using Idx = std::vector<std::size_t>;
constexpr double kEps = 0x1p-53;

CgProblem scaled(const CgProblem& p, double s) {
  DenseVector b = p.b, xs = *p.reference_solution;
  for (std::size_t i = 0; i < b.size(); ++i) {
    b[i] *= s;
    xs[i] *= s;
  }
  return CgProblem::zero_start(p.A, b, xs);
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("scan examples") {
    const std::vector<double> a{3, 2, 2.5, 1};
    const auto ra = scan_almost_monotonicity(a, kEps);
    CHECK(ra.violations.empty());
    CHECK(ra.trailing == Idx{3});
    CHECK(ra.first_stagnation == 3);

    const std::vector<double> b{1, 2, 3};
    const auto rb = scan_almost_monotonicity(b, kEps);
    CHECK(rb.violations == Idx{0, 1});
    CHECK(rb.trailing == Idx{2});
    CHECK(rb.first_stagnation == 2);
  }

  TEST_CASE("strictly decreasing series") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> s{1.0};
      for (int i = 0; i < 40; ++i) s.push_back(s.back() * u(gen));
      const auto r = scan_almost_monotonicity(s, kEps);
      REQUIRE(r.violations.empty());
      REQUIRE(r.trailing == Idx{s.size() - 1});
    }
  }

  TEST_CASE("frozen tail is trailing, earlier plateaus are violations") {
    // 4 is never beaten later, but the series moves again afterwards.
    const std::vector<double> s{5, 4, 4, 6, 4.5, 4.5, 4.5};
    const auto r = scan_almost_monotonicity(s, kEps);
    CHECK(r.first_stagnation == 4);
    CHECK(r.violations == Idx{1, 2});
    CHECK(r.trailing == Idx{4, 5, 6});
  }

  TEST_CASE("NaN entries are skipped") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::vector<double> s{4, nan, 3, nan, 1};
    const auto r = scan_almost_monotonicity(s, kEps);
    CHECK(r.violations.empty());
    CHECK(r.trailing == Idx{4});
  }

  TEST_CASE("residual step ratio audit") {
    const DenseVector r0{1, 0}, r1{0, 0.5};
    CgTrace t(2);
    t[1].k = 1;
    t[1].dr_ratio = norm2(subtract(r0, r1)) / norm2(r0);
    const Theorem5Audit a = audit_theorem5(t, kEps);
    REQUIRE(a.entries.size() == 1);
    CHECK(a.entries[0].dr_ratio == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK(a.entries[0].pass);
    CHECK(a.failures == 0);
    CHECK(theorem5_threshold(kEps) == doctest::Approx(1 - 2 * kEps / (1 + kEps) - 1e-10).epsilon(1e-16));

    t[1].dr_ratio = 0.9;
    CHECK(audit_theorem5(t, kEps).failures == 1);
  }

  TEST_CASE("native runs respect the residual step ratio bound") {
    for (const char* spec : {"dense-spd:1e6:60:2", "diag-geometric:1e10:60:5", "laplacian-2d:8"}) {
      const auto g = generate(GeneratorSpec::parse(spec));
      const CgRunResult run = run_cg(g.problem, {}, CriteriaSet{}, {300, 1});
      const Theorem5Audit a = audit_theorem5(run.trace, kEps);
      INFO(spec);
      CHECK(a.failures == 0);
    }
  }

  TEST_CASE("floor of the oracle trace is zero") {
    const auto g = generate(GeneratorSpec::parse("integer-spd:5:4"));
    const auto A = oracle::RationalMatrix::from(g.problem.A);
    const auto xs = oracle::to_rational(*g.problem.reference_solution);
    const auto b = oracle::matvec(A, xs);
    const auto states = oracle::oracle_run(A, b);
    CgRunResult run{oracle::to_trace(A, b, states, &xs), {}, oracle::to_double(states.back().x), states.size() - 1};
    run.verdict.kind = VerdictKind::recursive_collapse;
    run.verdict.fired_at = run.stop_index;
    const CgProblem pb = CgProblem::zero_start(g.problem.A, oracle::to_double(b), g.problem.reference_solution);
    const FloorEstimate f = estimate_floor(pb, run, 0.0);
    CHECK(f.floor_norm == 0.0);
    CHECK(gap_report(run.trace).max_gap == 0.0);
  }

  TEST_CASE("identity floor is within n eps ||b||") {
    const std::size_t n = 12;
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1, 1);
    DenseVector xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = u(gen);
    const CgProblem pb = CgProblem::zero_start(SpdMatrix::identity(n), xs, xs);
    const CgRunResult run = run_cg(pb, {}, CriteriaSet::parse("stagnation"), {});
    const FloorEstimate f = estimate_floor(pb, run, kEps);
    CHECK(f.floor_norm <= n * kEps * norm2(pb.b));
  }

  TEST_CASE("floor scales with power-of-two rescaling") {
    const auto g = generate(GeneratorSpec::parse("dense-spd:1e6:60:3"));
    const CriteriaSet c = CriteriaSet::parse("stagnation");
    const CgRunResult base_run = run_cg(g.problem, {}, c, {2000, 1});
    const FloorEstimate base = estimate_floor(g.problem, base_run, kEps);
    REQUIRE(base.floor_norm > 0.0);
    for (double s : {0.25, 8.0, 1024.0}) {
      const CgProblem p = scaled(g.problem, s);
      const FloorEstimate f = estimate_floor(p, run_cg(p, {}, c, {2000, 1}), kEps);
      CHECK(f.floor_norm == doctest::Approx(s * base.floor_norm).epsilon(4 * kEps));
    }
  }

  TEST_CASE("floor errors") {
    const CgProblem no_ref = CgProblem::zero_start(SpdMatrix::identity(3), DenseVector{1, 1, 1});
    CHECK_THROWS_AS(estimate_floor(no_ref, run_cg(no_ref, {}, {}, {}), kEps), Unavailable);
    const auto g = generate(GeneratorSpec::parse("diag-geometric:1e8:50:1"));
    CHECK_THROWS_AS(estimate_floor(g.problem, run_cg(g.problem, {}, {}, {5, 1}), kEps), NotStagnated);
  }

  TEST_CASE("gap report") {
    CgTrace t(6);
    const double gaps[] = {0, 1e-9, 1e-8, 2e-8, 3e-8, 3e-8};
    const double snorms[] = {1, 1e-3, 1e-6, 1e-8, 2e-8, 2e-8};
    for (std::size_t k = 0; k < 6; ++k) {
      t[k].k = k;
      t[k].gap = gaps[k];
      t[k].snorm = snorms[k];
    }
    const GapReport r = gap_report(t, 2);
    REQUIRE(r.crossover);
    CHECK(*r.crossover == 3);
    CHECK(r.max_gap == 3e-8);
    CHECK(r.final_gap == 3e-8);
    CHECK(r.windowed_max.size() == 6);
    CHECK(r.windowed_max[2] == 1e-8);
  }

  TEST_CASE("no crossover on well-conditioned runs stopped by relres") {
    for (const char* spec : {"dense-spd:1e2:50:1", "diag-geometric:1e2:200:3", "laplacian-1d:20"}) {
      const auto g = generate(GeneratorSpec::parse(spec));
      const CgRunResult run = run_cg(g.problem, {}, CriteriaSet::parse("relres:1e-12"), {1000, 1});
      INFO(spec);
      CHECK(run.verdict.kind == VerdictKind::relres);
      CHECK_FALSE(gap_report(run.trace).crossover.has_value());
    }
  }

  TEST_CASE("windowed gap envelope does not decay on an ill-conditioned run") {
    // Once x freezes the gap saturates and jitters by ~10% between windows,
    // so the check is against the running maximum with a factor 2 allowance.
    const auto g = generate(GeneratorSpec::parse("dense-spd:1e10:100:1"));
    const CgRunResult run = run_cg(g.problem, {}, CriteriaSet{}, {500, 1});
    const GapReport r = gap_report(run.trace, 5);
    double running = 0.0;
    std::size_t decays = 0;
    for (std::size_t k = 4; k < r.windowed_max.size(); k += 5) {
      if (r.windowed_max[k] < 0.5 * running) ++decays;
      running = std::max(running, r.windowed_max[k]);
    }
    CHECK(decays == 0);
    CHECK(r.windowed_max.back() >= 0.5 * r.max_gap);
  }
}
