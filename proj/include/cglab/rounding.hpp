#pragma once

#include <string>
#include <string_view>

namespace cglab {

enum class Op { add, sub, mul, div };

/// Arithmetic context for a run: either the platform's binary64 or a
/// simulated binary format with `bits` significant bits (leading bit
/// included) and the native exponent range. Unit roundoff is 2^-bits, so
/// native double is the bits = 53 case.
///
/// Simulated operations snap both operands to the format, form the exact
/// result as a double-double, and round that once, ties to even.
class RoundingModel {
 public:
  static constexpr int kMinBits = 2;
  static constexpr int kMaxSimulatedBits = 52;
  static constexpr int kNativeBits = 53;

  RoundingModel() = default;

  static RoundingModel native() { return RoundingModel{}; }
  static RoundingModel simulated(int bits);

  /// "double" or "p:<bits>".
  static RoundingModel parse(std::string_view text);
  std::string to_string() const;

  bool is_native() const { return bits_ == kNativeBits; }
  int bits() const { return bits_; }
  double unit_roundoff() const { return unit_roundoff_; }

  double round(double x) const;

  double add(double a, double b) const;
  double sub(double a, double b) const;
  double mul(double a, double b) const;
  double div(double a, double b) const;
  double sqrt(double a) const;

  /// Correctly rounds the exact value hi + lo to the model, where hi is
  /// the binary64 rounding of hi + lo (a normalized double-double).
  double round_pair(double hi, double lo) const;

  friend bool operator==(const RoundingModel&, const RoundingModel&) = default;

 private:
  explicit RoundingModel(int bits);

  int bits_ = kNativeBits;
  double unit_roundoff_ = 0x1p-53;
};

double round_to_model(double x, const RoundingModel& m);
double rounded_op(Op op, double a, double b, const RoundingModel& m);

}  // namespace cglab
