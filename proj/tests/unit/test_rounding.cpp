#include <doctest.h>
#include <gmpxx.h>

#include <cmath>
#include <limits>
#include <random>

#include "cglab/error.hpp"
#include "cglab/rounding.hpp"

using namespace cglab;

namespace {

// Nearest p-bit value to the exact rational q > 0 (normal range), by
// scanning the mantissas around q; ties go to the even mantissa.
double nearest_by_enumeration(const mpq_class& q, int p) {
  int e = 0;
  mpq_class scaled = q;
  const mpq_class lo(mpz_class(1) << (p - 1)), hi(mpz_class(1) << p);
  while (scaled >= hi) {
    scaled /= 2;
    ++e;
  }
  while (scaled < lo) {
    scaled *= 2;
    --e;
  }
  mpz_class base = scaled.get_num() / scaled.get_den();
  mpz_class best = base;
  mpq_class best_dist = abs(scaled - mpq_class(base));
  for (mpz_class m = base - 1; m <= base + 1; ++m) {
    const mpq_class d = abs(scaled - mpq_class(m));
    if (d < best_dist || (d == best_dist && m % 2 == 0)) {
      best = m;
      best_dist = d;
    }
  }
  return std::ldexp(best.get_d(), e);
}

mpq_class exact(double x) { return mpq_class(x); }

}  // namespace

TEST_SUITE("rounding") {
  TEST_CASE("parse and print") {
    CHECK(RoundingModel::parse("double").is_native());
    CHECK(RoundingModel::parse("p:24").bits() == 24);
    CHECK(RoundingModel::parse("p:24").to_string() == "p:24");
    CHECK(RoundingModel::native().to_string() == "double");
    CHECK_THROWS_AS(RoundingModel::parse("p:1"), UsageError);
    CHECK_THROWS_AS(RoundingModel::parse("p:53"), UsageError);
    CHECK_THROWS_AS(RoundingModel::parse("single"), UsageError);
  }

  TEST_CASE("unit roundoff is 2^-bits") {
    CHECK(RoundingModel::native().unit_roundoff() == 0x1p-53);
    CHECK(RoundingModel::simulated(24).unit_roundoff() == 0x1p-24);
    CHECK(RoundingModel::simulated(8).unit_roundoff() == 0x1p-8);
  }

  TEST_CASE("round_to_model examples") {
    CHECK(round_to_model(1.0 + 0x1p-60, RoundingModel::simulated(20)) == 1.0);
    CHECK(round_to_model(0.5, RoundingModel::simulated(8)) == 0.5);
    // 8 significant bits: 1/3 lies between 170/512 and 171/512, nearer the latter.
    CHECK(round_to_model(1.0 / 3.0, RoundingModel::simulated(8)) == 171.0 / 512.0);
    CHECK(round_to_model(1.0 / 3.0, RoundingModel::simulated(7)) == 85.0 / 256.0);
    CHECK_THROWS_AS(round_to_model(std::nan(""), RoundingModel::simulated(8)), UsageError);
  }

  TEST_CASE("round matches the enumeration oracle") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> mant(0.5, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int p : {2, 3, 8, 11, 24, 40, 52}) {
      const RoundingModel m = RoundingModel::simulated(p);
      for (int t = 0; t < 300; ++t) {
        const double x = std::ldexp(mant(gen), expo(gen));
        const double want = nearest_by_enumeration(exact(x), p);
        REQUIRE(m.round(x) == want);
        REQUIRE(m.round(-x) == -want);
      }
    }
  }

  TEST_CASE("ties go to even") {
    const RoundingModel m = RoundingModel::simulated(4);
    // 4 bits: 8/8 .. 15/8 spaced by 1/8; midpoints round to the even mantissa.
    CHECK(m.round(1.0 + 1.0 / 16) == 1.0);
    CHECK(m.round(1.0 + 3.0 / 16) == 1.25);
    CHECK(m.round(-(1.0 + 3.0 / 16)) == -1.25);
  }

  TEST_CASE("monotone, symmetric, exact on small integers") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int p : {5, 12, 24}) {
      const RoundingModel m = RoundingModel::simulated(p);
      for (int t = 0; t < 2000; ++t) {
        double a = u(gen), b = u(gen);
        if (a > b) std::swap(a, b);
        REQUIRE(m.round(a) <= m.round(b));
        REQUIRE(m.round(-a) == -m.round(a));
      }
      const long top = 1L << p;
      for (long k = -top + 1; k < top; k += std::max(1L, top / 997)) REQUIRE(m.round(double(k)) == double(k));
    }
  }

  TEST_CASE("native mode is the identity and the platform operation") {
    const RoundingModel m;
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int t = 0; t < 1000; ++t) {
      const double a = u(gen), b = u(gen);
      REQUIRE(m.round(a) == a);
      REQUIRE(m.add(a, b) == a + b);
      REQUIRE(m.sub(a, b) == a - b);
      REQUIRE(m.mul(a, b) == a * b);
      REQUIRE(m.div(a, b) == a / b);
    }
  }

  TEST_CASE("rounded_op examples") {
    const RoundingModel p20 = RoundingModel::simulated(20), p8 = RoundingModel::simulated(8);
    CHECK(rounded_op(Op::add, 1.0, 0x1p-30, p20) == 1.0);
    CHECK(rounded_op(Op::mul, 0.5, 0.5, p8) == 0.25);
    // 1.0000001 snaps to 1 + 2^-19 * round(0.0000001 * 2^19) = 1 at 20 bits:
    // the spacing near 1 is 2^-19 ~ 1.9e-6, so the perturbation is lost.
    CHECK(p20.round(1.0000001) == 1.0);
    CHECK(rounded_op(Op::add, 1.0000001, -1.0, p20) == 0.0);
    // A perturbation above half the spacing survives as exactly one ulp.
    CHECK(rounded_op(Op::add, 1.000001, -1.0, p20) == 0x1p-19);
    CHECK_THROWS_AS(rounded_op(Op::div, 1.0, 0.0, p20), ArithmeticError);
    CHECK_THROWS_AS(rounded_op(Op::div, 1.0, 0.0, RoundingModel{}), ArithmeticError);
  }

  TEST_CASE("simulated operations round the exact result once") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int p : {6, 24, 45}) {
      const RoundingModel m = RoundingModel::simulated(p);
      for (int t = 0; t < 500; ++t) {
        const double a = m.round(u(gen)), b = m.round(u(gen));
        const mpq_class qa = exact(a), qb = exact(b);
        auto want = [&](const mpq_class& q) {
          if (q == 0) return 0.0;
          const double mag = nearest_by_enumeration(abs(q), p);
          return q < 0 ? -mag : mag;
        };
        REQUIRE(m.add(a, b) == want(qa + qb));
        REQUIRE(m.sub(a, b) == want(qa - qb));
        REQUIRE(m.mul(a, b) == want(qa * qb));
        if (b != 0.0) REQUIRE(m.div(a, b) == want(qa / qb));
      }
    }
  }

  TEST_CASE("sqrt is correctly rounded") {
    const RoundingModel m = RoundingModel::simulated(10);
    for (double x : {2.0, 3.0, 10.0, 0.7, 1e10, 7e-9}) {
      const double xr = m.round(x);
      const double s = m.sqrt(xr);
      CHECK(s == m.round(s));
      // neighbors one ulp away are no closer in square
      const double ulp = std::ldexp(1.0, std::ilogb(s) - 9);
      const mpq_class target = exact(xr);
      auto err = [&](double c) -> mpq_class { return abs(mpq_class(c) * mpq_class(c) - target); };
      CHECK(err(s) <= err(s + ulp));
      CHECK(err(s) <= err(s - ulp));
    }
  }

  TEST_CASE("round_pair uses the sign of the low part") {
    const RoundingModel m = RoundingModel::simulated(4);
    const double mid = 1.0 + 1.0 / 16;  // tie between 1 and 1.125
    CHECK(m.round_pair(mid, 0x1p-40) == 1.125);
    CHECK(m.round_pair(mid, -0x1p-40) == 1.0);
    CHECK(m.round_pair(mid, 0.0) == 1.0);
  }
}
