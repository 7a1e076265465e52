#include <doctest.h>

#include "cglab/analysis.hpp"
#include "cglab/error.hpp"
#include "cglab/oracle.hpp"
#include "cglab/problems.hpp"

using namespace cglab;
using namespace cglab::oracle;

namespace {

RationalVector ints(std::initializer_list<long> v) {
  RationalVector out;
  for (long x : v) out.emplace_back(x);
  return out;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("scaled identity: one step") {
    const auto A = RationalMatrix::from_integers(2, {2, 0, 0, 2});
    const auto states = oracle_run(A, ints({2, 2}));
    REQUIRE(states.size() == 2);
    CHECK(states[1].x == ints({1, 1}));
    CHECK(is_zero(states[1].r));
  }

  TEST_CASE("[[2,1],[1,2]] x = (1,0)") {
    const auto A = RationalMatrix::from_integers(2, {2, 1, 1, 2});
    const RationalVector want{Rational(2, 3), Rational(-1, 3)};
    const auto states = oracle_run(A, ints({1, 0}));
    REQUIRE(states.size() == 3);
    CHECK(states.back().k == 2);
    CHECK(states.back().x == want);
    CHECK(oracle_solution(A, ints({1, 0})) == want);
  }

  TEST_CASE("indefinite rejection carries the direction") {
    const auto A = RationalMatrix::from_integers(2, {1, 0, 0, -1});
    try {
      oracle_run(A, ints({0, 1}));
      FAIL("expected IndefiniteDirection");
    } catch (const IndefiniteDirection& e) {
      CHECK(e.witness() == ints({0, 1}));
    }
    CHECK_THROWS_AS(oracle_run(A, ints({1, 1})), NotPositiveDefinite);
  }

  TEST_CASE("oracle_solution") {
    const auto I = RationalMatrix::from_integers(3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    CHECK(oracle_solution(I, ints({4, -5, 6})) == ints({4, -5, 6}));

    std::vector<Rational> h;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) h.emplace_back(1, i + j + 1);
    }
    const RationalMatrix H(3, h);
    RationalVector b(3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) b[i] += H(i, j);
    }
    CHECK(oracle_solution(H, b) == ints({1, 1, 1}));
    CHECK(oracle_run(H, b).back().x == ints({1, 1, 1}));

    const auto S = RationalMatrix::from_integers(2, {1, 2, 2, 4});
    CHECK_THROWS_AS(oracle_solution(S, ints({1, 1})), SingularMatrix);
  }

  TEST_CASE("exact identities on random integer SPD matrices") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const std::size_t n = 2 + seed % 7;
      const auto g = generate(GeneratorSpec::parse("integer-spd:" + std::to_string(n) + ":" + std::to_string(seed)));
      const auto A = RationalMatrix::from(g.problem.A);
      const RationalVector b = matvec(A, to_rational(*g.problem.reference_solution));
      const IdentityReport rep = check_identities(A, b);
      INFO("seed " << seed);
      CHECK(rep.all_pass());
      CHECK(rep.steps <= n);
      CHECK(audit_theorem5_exact(oracle_run(A, b)).empty());
    }
  }

  TEST_CASE("A-norm error strictly decreases") {
    const auto g = generate(GeneratorSpec::parse("integer-spd:6:3"));
    const auto A = RationalMatrix::from(g.problem.A);
    const RationalVector xs = to_rational(*g.problem.reference_solution);
    const auto states = oracle_run(A, matvec(A, xs));
    for (std::size_t k = 1; k < states.size(); ++k) {
      CHECK(error_anorm_squared(A, xs, states[k].x) < error_anorm_squared(A, xs, states[k - 1].x));
    }
    CHECK(error_anorm_squared(A, xs, states.back().x) == 0);
  }

  TEST_CASE("oracle trace converts to a zero-gap double trace") {
    const auto g = generate(GeneratorSpec::parse("integer-spd:5:9"));
    const auto A = RationalMatrix::from(g.problem.A);
    const RationalVector xs = to_rational(*g.problem.reference_solution);
    const RationalVector b = matvec(A, xs);
    const auto states = oracle_run(A, b);
    const CgTrace t = to_trace(A, b, states, &xs);
    REQUIRE(t.size() == states.size());
    for (const auto& rec : t) CHECK(rec.gap == 0.0);
    CHECK(t.back().rnorm == 0.0);
    CHECK(*t.back().enormA == 0.0);
    const Theorem5Audit audit = audit_theorem5(t, 0.0, 0.0);
    CHECK(audit.failures == 0);
    CHECK(audit.min_ratio >= 1.0);
    CHECK_FALSE(gap_report(t).crossover.has_value());
  }

  TEST_CASE("conversions are exact") {
    const DenseVector v{0.1, -3.5, 1e-300};
    CHECK(to_double(to_rational(v)) == v);
    CHECK(to_rational(v)[0] != Rational(1, 10));
  }
}
