#include "cglab/rounding.hpp"

#include <charconv>
#include <cmath>

#include "cglab/dd.hpp"
#include "cglab/error.hpp"

namespace cglab {

RoundingModel::RoundingModel(int bits) : bits_(bits), unit_roundoff_(std::ldexp(1.0, -bits)) {}

RoundingModel RoundingModel::simulated(int bits) {
  if (bits < kMinBits || bits > kMaxSimulatedBits) {
    throw UsageError("simulated precision must be between " + std::to_string(kMinBits) + " and " +
                     std::to_string(kMaxSimulatedBits) + " bits, got " + std::to_string(bits));
  }
  return RoundingModel(bits);
}

RoundingModel RoundingModel::parse(std::string_view text) {
  if (text == "double") return native();
  if (text.size() > 2 && text.substr(0, 2) == "p:") {
    int bits = 0;
    const auto digits = text.substr(2);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), bits);
    if (ec == std::errc{} && ptr == digits.data() + digits.size()) return simulated(bits);
  }
  throw UsageError("unrecognized precision '" + std::string(text) + "' (expected double or p:<bits>)");
}

std::string RoundingModel::to_string() const {
  return is_native() ? std::string("double") : "p:" + std::to_string(bits_);
}

double RoundingModel::round(double x) const {
  if (std::isnan(x)) throw UsageError("round_to_model: NaN input");
  if (is_native() || x == 0.0 || std::isinf(x)) return x;
  int exponent = 0;
  const double frac = std::frexp(x, &exponent);  // |frac| in [0.5, 1)
  // nearbyint honours the default rounding mode: nearest, ties to even.
  const double scaled = std::nearbyint(std::ldexp(frac, bits_));
  return std::ldexp(scaled, exponent - bits_);
}

double RoundingModel::round_pair(double hi, double lo) const {
  if (is_native()) return hi;
  const double r = round(hi);
  if (lo == 0.0 || std::isinf(hi)) return r;
  // hi is within half a binary64 ulp of the exact value, and every midpoint
  // of the coarser grid is a binary64 number, so only an exact tie at hi
  // can be decided differently by lo.
  int exponent = 0;
  const double scaled = std::ldexp(std::frexp(hi, &exponent), bits_);
  const double below = std::floor(scaled);
  if (scaled - below != 0.5) return r;
  return std::ldexp(lo > 0.0 ? below + 1.0 : below, exponent - bits_);
}

double RoundingModel::add(double a, double b) const {
  if (is_native()) return a + b;
  const auto s = dd::two_sum(round(a), round(b));
  return round_pair(s.hi, s.lo);
}

double RoundingModel::sub(double a, double b) const {
  if (is_native()) return a - b;
  const auto s = dd::two_sum(round(a), -round(b));
  return round_pair(s.hi, s.lo);
}

double RoundingModel::mul(double a, double b) const {
  if (is_native()) return a * b;
  const auto p = dd::two_prod(round(a), round(b));
  return round_pair(p.hi, p.lo);
}

double RoundingModel::div(double a, double b) const {
  const double ar = round(a);
  const double br = round(b);
  if (br == 0.0) throw ArithmeticError("division by zero");
  if (is_native()) return ar / br;
  const double q = ar / br;
  // ar = q*br + rem exactly; the exact quotient is q + rem/br.
  const double rem = std::fma(-q, br, ar);
  return round_pair(q, rem / br);
}

double RoundingModel::sqrt(double a) const {
  const double ar = round(a);
  if (is_native()) return std::sqrt(ar);
  const double s = std::sqrt(ar);
  if (s == 0.0) return s;
  // sqrt(ar) = s + (ar - s^2) / (2s) to well below an ulp of s.
  const double rem = std::fma(-s, s, ar);
  return round_pair(s, rem / (2.0 * s));
}

double round_to_model(double x, const RoundingModel& m) { return m.round(x); }

double rounded_op(Op op, double a, double b, const RoundingModel& m) {
  switch (op) {
    case Op::add: return m.add(a, b);
    case Op::sub: return m.sub(a, b);
    case Op::mul: return m.mul(a, b);
    case Op::div: return m.div(a, b);
  }
  throw UsageError("unknown operation");
}

}  // namespace cglab
