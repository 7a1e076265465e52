#pragma once

// Exact-arithmetic conjugate gradients over GMP rationals. Every identity
// that holds for CG in exact arithmetic is checked here with zero tolerance.

#include <gmpxx.h>

#include <cstddef>
#include <vector>

#include "cglab/cg.hpp"
#include "cglab/error.hpp"
#include "cglab/linalg.hpp"

namespace cglab::oracle {

/// Always canonical (lowest terms, positive denominator).
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

class RationalMatrix {
 public:
  RationalMatrix(std::size_t n, std::vector<Rational> row_major);
  /// Exact conversion: every binary64 value is a rational.
  static RationalMatrix from(const SpdMatrix& A);
  static RationalMatrix from_integers(std::size_t n, const std::vector<long>& row_major);

  std::size_t order() const { return n_; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<Rational> a_;
};

RationalVector to_rational(const DenseVector& v);
DenseVector to_double(const RationalVector& v);

Rational dot(const RationalVector& u, const RationalVector& v);
RationalVector matvec(const RationalMatrix& A, const RationalVector& v);
RationalVector subtract(const RationalVector& a, const RationalVector& b);
bool is_zero(const RationalVector& v);

struct RationalCgState {
  std::size_t k = 0;
  RationalVector x;
  RationalVector r;
  RationalVector p;
  Rational alpha;  // step length that produced x (0 at k = 0)
};

/// (p, Ap) <= 0 was met; the offending direction is the witness.
class IndefiniteDirection : public NotPositiveDefinite {
 public:
  IndefiniteDirection(const std::string& what, RationalVector witness)
      : NotPositiveDefinite(what), witness_(std::move(witness)) {}
  const RationalVector& witness() const { return witness_; }

 private:
  RationalVector witness_;
};

/// Exact CG from x0 until r = 0. At most order(A) steps for SPD input;
/// the trace includes the initial state.
std::vector<RationalCgState> oracle_run(const RationalMatrix& A, const RationalVector& b, const RationalVector& x0);
std::vector<RationalCgState> oracle_run(const RationalMatrix& A, const RationalVector& b);

/// Fraction-free (Bareiss) elimination with row pivoting.
RationalVector oracle_solution(const RationalMatrix& A, const RationalVector& b);

/// Outcome of checking every exact identity on one oracle run.
struct IdentityReport {
  std::size_t order = 0;
  std::size_t steps = 0;
  bool residual_matches_true = true;   // r_k == b - A x_k
  bool residuals_orthogonal = true;    // (r_j, r_k) == 0, j != k
  bool anorm_strictly_decreasing = true;
  bool dr_dominates_r = true;          // ||r_{k-1} - r_k||^2 >= ||r_{k-1}||^2
  bool terminated_within_order = true;
  bool reaches_solution = true;        // final x == A^{-1} b

  bool all_pass() const {
    return residual_matches_true && residuals_orthogonal && anorm_strictly_decreasing && dr_dominates_r &&
           terminated_within_order && reaches_solution;
  }
};

IdentityReport check_identities(const RationalMatrix& A, const RationalVector& b);

/// Squared A-norm of x* - x, exactly.
Rational error_anorm_squared(const RationalMatrix& A, const RationalVector& x_star, const RationalVector& x);

/// Per-step exact check ||r_{k-1} - r_k||^2 >= ||r_{k-1}||^2; returns the
/// indices k that fail (empty for every valid exact run).
std::vector<std::size_t> audit_theorem5_exact(const std::vector<RationalCgState>& states);

/// Converts an exact run into a double trace (norms rounded once from exact
/// squared values).
CgTrace to_trace(const RationalMatrix& A, const RationalVector& b, const std::vector<RationalCgState>& states,
                 const RationalVector* x_star = nullptr);

}  // namespace cglab::oracle
