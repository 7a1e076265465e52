#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cglab/linalg.hpp"

namespace cglab {

enum class VerdictKind { ginsburg, stagnation, relres, recursive_collapse, exhausted, breakdown };

std::string to_string(VerdictKind kind);
VerdictKind verdict_kind_from_string(std::string_view text);

struct StoppingVerdict {
  VerdictKind kind = VerdictKind::exhausted;
  std::size_t fired_at = 0;
  std::map<std::string, double> witness;
};

/// How Ginsburg's growth factor exp(k/n)^2 is read.
enum class GinsburgExponent {
  two_k_over_n,      // e^(2k/n)
  k_over_n_squared,  // e^((k/n)^2)
};

std::string to_string(GinsburgExponent e);
GinsburgExponent ginsburg_exponent_from_string(std::string_view text);

// Pure predicates. Each mirrors one stopping rule.

/// rnorm < g(k, n) * gap with g chosen by `exponent`.
bool ginsburg_check(std::size_t k, std::size_t n, double rnorm, double gap,
                    GinsburgExponent exponent = GinsburgExponent::two_k_over_n);
double ginsburg_factor(std::size_t k, std::size_t n, GinsburgExponent exponent);

/// Every component's correction is lost in x's trailing digits:
/// |dx_i| / |x_i| < eps for x_i != 0, and dx_i == 0 where x_i == 0.
bool stagnation_check(const DenseVector& x, const DenseVector& delta_x, double eps_m);

/// rnorm_next <= eps * rnorm.
bool recursive_collapse_check(double rnorm_next, double rnorm, double eps_m);

/// snorm / bnorm <= tol, inclusive. Throws UsageError on bnorm == 0.
bool relres_check(double snorm, double bnorm, double tol);

/// Everything a criterion may look at after iteration k has been recorded.
struct CriterionContext {
  std::size_t k = 0;
  std::size_t n = 0;
  double rnorm = 0.0;
  double rnorm_prev = 0.0;
  double snorm = 0.0;
  double gap = 0.0;
  double bnorm = 0.0;
  double eps_m = 0.0;
  const DenseVector* x_prev = nullptr;      // x_{k-1}
  const DenseVector* correction = nullptr;  // alpha_{k-1} p_{k-1} as computed
};

struct Criterion {
  enum class Kind { ginsburg, stagnation, relres, collapse };
  Kind kind = Kind::relres;
  double tolerance = 0.0;  // relres only
  GinsburgExponent exponent = GinsburgExponent::two_k_over_n;

  std::string to_string() const;
};

/// Ordered criteria; the first one that fires wins.
class CriteriaSet {
 public:
  CriteriaSet() = default;
  explicit CriteriaSet(std::vector<Criterion> criteria) : criteria_(std::move(criteria)) {}

  /// Comma-separated "ginsburg", "stagnation", "relres:<tol>", "collapse";
  /// empty string gives an empty set.
  static CriteriaSet parse(std::string_view text, GinsburgExponent exponent = GinsburgExponent::two_k_over_n);
  std::string to_string() const;

  const std::vector<Criterion>& criteria() const { return criteria_; }
  bool empty() const { return criteria_.empty(); }

  std::optional<StoppingVerdict> evaluate(const CriterionContext& ctx) const;

 private:
  std::vector<Criterion> criteria_;
};

}  // namespace cglab
