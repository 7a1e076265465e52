#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cglab/cg.hpp"
#include "cglab/error.hpp"
#include "cglab/problems.hpp"

using namespace cglab;

namespace {

SpdMatrix diag(std::vector<double> d) { return SpdMatrix::diagonal(d); }

}  // namespace

TEST_SUITE("cg") {
  TEST_CASE("identity converges in one step") {
    const CgProblem pb = CgProblem::zero_start(SpdMatrix::identity(2), DenseVector{1, 2});
    const RoundingModel m;
    const CgState s1 = cg_step(cg_initial_state(pb, m), pb.A, m);
    CHECK(s1.x == DenseVector{1, 2});
    CHECK(s1.r == DenseVector{0, 0});
    CHECK(cg_converged(s1));
    CHECK_THROWS_AS(cg_step(s1, pb.A, m), UsageError);
  }

  TEST_CASE("diag(1, 2) reaches (1, 1) at k = 2") {
    const CgProblem pb = CgProblem::zero_start(diag({1, 2}), DenseVector{1, 2});
    const RoundingModel m;
    CgState s = cg_initial_state(pb, m);
    s = cg_step(s, pb.A, m);
    CHECK_FALSE(cg_converged(s));
    s = cg_step(s, pb.A, m);
    CHECK(s.k == 2);
    CHECK(s.x[0] == doctest::Approx(1).epsilon(1e-15));
    CHECK(s.x[1] == doctest::Approx(1).epsilon(1e-15));
    CHECK(norm2(s.r) <= 1e-15);
  }

  TEST_CASE("eigenvector right-hand side converges in one step") {
    const CgProblem pb = CgProblem::zero_start(diag({1, 2}), DenseVector{1, 0});
    const RoundingModel m;
    const CgState s = cg_step(cg_initial_state(pb, m), pb.A, m);
    CHECK(s.alpha == 1.0);
    CHECK(s.x == DenseVector{1, 0});
    CHECK(s.r == DenseVector{0, 0});
  }

  TEST_CASE("breakdown on an indefinite matrix") {
    const CgProblem pb = CgProblem::zero_start(diag({1, -4, 1}), DenseVector{1, 1, 1});
    const RoundingModel m;
    CHECK_THROWS_AS(cg_step(cg_initial_state(pb, m), pb.A, m), BreakdownError);
    const CgRunResult run = run_cg(pb, m, {}, {});
    CHECK(run.verdict.kind == VerdictKind::breakdown);
    CHECK(run.verdict.fired_at == 0);
  }

  TEST_CASE("true_residual") {
    const SpdMatrix A = diag({1, 4});
    const DenseVector b{1, 4};
    const RoundingModel m;
    CHECK(true_residual(A, b, DenseVector{1, 1}, m) == DenseVector{0, 0});
    CHECK(true_residual(A, b, DenseVector{0, 0}, m) == b);
    const DenseVector s = true_residual(A, b, DenseVector{1, 0.999}, m);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == doctest::Approx(0.004).epsilon(1e-12));
  }

  TEST_CASE("run_cg on the identity") {
    const CgProblem pb = CgProblem::zero_start(SpdMatrix::identity(5), DenseVector{1, 2, 3, 4, 5}, DenseVector{1, 2, 3, 4, 5});
    for (const char* c : {"", "relres:1e-12", "ginsburg", "stagnation", "collapse"}) {
      const CgRunResult run = run_cg(pb, {}, CriteriaSet::parse(c), {});
      CHECK(run.stop_index <= 1);
      CHECK(run.trace.back().gap == 0.0);
    }
  }

  TEST_CASE("diagonal spectrum 1..10 reaches relres 1e-12") {
    std::vector<double> d(10);
    std::iota(d.begin(), d.end(), 1.0);
    const CgProblem pb = CgProblem::zero_start(diag(d), DenseVector(10, 1.0));
    const CgRunResult run = run_cg(pb, {}, CriteriaSet::parse("relres:1e-12"), {100, 1});
    CHECK(run.verdict.kind == VerdictKind::relres);
    CHECK(run.trace.back().snorm / norm2(pb.b) <= 1e-12);
  }

  TEST_CASE("trace records") {
    const auto g = generate(GeneratorSpec::parse("diag-geometric:1e3:20:1"));
    const CgRunResult run = run_cg(g.problem, {}, CriteriaSet{}, {30, 1});
    REQUIRE(run.trace.size() == 31);
    CHECK(run.verdict.kind == VerdictKind::exhausted);
    CHECK(run.trace[0].k == 0);
    CHECK(run.trace[0].alpha == 0.0);
    CHECK(run.trace[0].gap == 0.0);
    CHECK_FALSE(run.trace[0].dr_ratio.has_value());
    for (std::size_t k = 0; k < run.trace.size(); ++k) {
      CHECK(run.trace[k].k == k);
      CHECK(run.trace[k].enorm2.has_value());
      CHECK(run.trace[k].enormA.has_value());
      if (k > 0) CHECK(run.trace[k].dr_ratio.has_value());
    }
  }

  TEST_CASE("true residual cadence leaves NaN gaps") {
    const auto g = generate(GeneratorSpec::parse("laplacian-1d:30"));
    const CgRunResult run = run_cg(g.problem, {}, CriteriaSet{}, {12, 5});
    for (const auto& rec : run.trace) {
      const bool measured = rec.k % 5 == 0 || rec.k == run.trace.back().k;
      CHECK(std::isnan(rec.snorm) != measured);
      CHECK(std::isnan(rec.gap) != measured);
    }
  }

  TEST_CASE("simulated runs are deterministic") {
    const RoundingModel p24 = RoundingModel::simulated(24);
    const auto g = generate(GeneratorSpec::parse("dense-spd:1e4:40:3"), p24);
    const CgRunResult a = run_cg(g.problem, p24, CriteriaSet{}, {80, 1});
    const CgRunResult b = run_cg(g.problem, p24, CriteriaSet{}, {80, 1});
    CHECK(a.trace == b.trace);
  }

  TEST_CASE("gap starts at zero and grows on an ill-conditioned run") {
    const auto g = generate(GeneratorSpec::parse("dense-spd:1e10:100:1"));
    const CgRunResult run = run_cg(g.problem, {}, CriteriaSet{}, {500, 1});
    CHECK(run.trace.front().gap == 0.0);
    CHECK(run.trace.back().gap > 0.0);
  }

  TEST_CASE("invalid options") {
    const CgProblem pb = CgProblem::zero_start(SpdMatrix::identity(2), DenseVector{1, 1});
    CHECK_THROWS_AS(run_cg(pb, {}, {}, {0, 1}), UsageError);
    CHECK_THROWS_AS(CgProblem::zero_start(SpdMatrix::identity(2), DenseVector{1, 1, 1}), UsageError);
  }
}
