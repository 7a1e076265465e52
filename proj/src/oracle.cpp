#include "cglab/oracle.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cglab::oracle {

RationalMatrix::RationalMatrix(std::size_t n, std::vector<Rational> row_major) : n_(n), a_(std::move(row_major)) {
  if (n == 0 || a_.size() != n * n) throw UsageError("RationalMatrix needs n*n entries");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (a_[i * n + j] != a_[j * n + i]) throw UsageError("RationalMatrix is not symmetric");
    }
  }
}

RationalMatrix RationalMatrix::from(const SpdMatrix& A) {
  const std::size_t n = A.order();
  std::vector<Rational> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    A.for_each_in_row(i, [&](std::size_t j, double v) { a[i * n + j] = Rational(v); });
  }
  return RationalMatrix(n, std::move(a));
}

RationalMatrix RationalMatrix::from_integers(std::size_t n, const std::vector<long>& row_major) {
  std::vector<Rational> a;
  a.reserve(row_major.size());
  for (long v : row_major) a.emplace_back(v);
  return RationalMatrix(n, std::move(a));
}

RationalVector to_rational(const DenseVector& v) {
  RationalVector out;
  out.reserve(v.size());
  for (double x : v.values()) out.emplace_back(x);
  return out;
}

DenseVector to_double(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(q.get_d());
  return DenseVector(std::move(out));
}

Rational dot(const RationalVector& u, const RationalVector& v) {
  if (u.size() != v.size()) throw UsageError("oracle dot: dimension mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

RationalVector matvec(const RationalMatrix& A, const RationalVector& v) {
  if (A.order() != v.size()) throw UsageError("oracle matvec: dimension mismatch");
  RationalVector y(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < v.size(); ++j) s += A(i, j) * v[j];
    y[i] = s;
  }
  return y;
}

RationalVector subtract(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw UsageError("oracle subtract: dimension mismatch");
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

bool is_zero(const RationalVector& v) {
  for (const auto& q : v) {
    if (sgn(q) != 0) return false;
  }
  return true;
}

std::vector<RationalCgState> oracle_run(const RationalMatrix& A, const RationalVector& b, const RationalVector& x0) {
  const std::size_t n = A.order();
  if (b.size() != n || x0.size() != n) throw UsageError("oracle_run: dimension mismatch");
  RationalCgState s{0, x0, subtract(b, matvec(A, x0)), {}, 0};
  s.p = s.r;
  std::vector<RationalCgState> states{s};
  Rational rr = dot(s.r, s.r);
  // Exact CG cannot need more than n steps; the cap only guards against a
  // non-SPD matrix that happens to keep (p, Ap) positive.
  while (!is_zero(states.back().r) && states.size() <= n) {
    const RationalCgState& cur = states.back();
    const RationalVector Ap = matvec(A, cur.p);
    const Rational pAp = dot(cur.p, Ap);
    if (sgn(pAp) <= 0) {
      throw IndefiniteDirection("oracle: (p, Ap) = " + pAp.get_str() + " at step " + std::to_string(cur.k) +
                                    "; matrix is not positive definite",
                                cur.p);
    }
    RationalCgState next{cur.k + 1, cur.x, cur.r, cur.p, rr / pAp};
    for (std::size_t i = 0; i < n; ++i) {
      next.x[i] += next.alpha * cur.p[i];
      next.r[i] -= next.alpha * Ap[i];
    }
    const Rational rr_next = dot(next.r, next.r);
    const Rational beta = rr_next / rr;
    for (std::size_t i = 0; i < n; ++i) next.p[i] = next.r[i] + beta * cur.p[i];
    rr = rr_next;
    states.push_back(std::move(next));
  }
  return states;
}

std::vector<RationalCgState> oracle_run(const RationalMatrix& A, const RationalVector& b) {
  return oracle_run(A, b, RationalVector(A.order(), Rational(0)));
}

RationalVector oracle_solution(const RationalMatrix& A, const RationalVector& b) {
  const std::size_t n = A.order();
  if (b.size() != n) throw UsageError("oracle_solution: dimension mismatch");
  // Scale each augmented row to integers, then run Bareiss elimination,
  // whose divisions are all exact.
  std::vector<std::vector<mpz_class>> M(n, std::vector<mpz_class>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class lcm = 1;
    for (std::size_t j = 0; j < n; ++j) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), A(i, j).get_den_mpz_t());
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), b[i].get_den_mpz_t());
    for (std::size_t j = 0; j < n; ++j) M[i][j] = A(i, j).get_num() * (lcm / A(i, j).get_den());
    M[i][n] = b[i].get_num() * (lcm / b[i].get_den());
  }

  mpz_class prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && M[pivot][k] == 0) ++pivot;
    if (pivot == n) throw SingularMatrix("oracle_solution: matrix is singular");
    std::swap(M[k], M[pivot]);
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j <= n; ++j) {
        M[i][j] = (M[k][k] * M[i][j] - M[i][k] * M[k][j]) / prev;  // exact division
      }
      M[i][k] = 0;
    }
    prev = M[k][k];
  }

  RationalVector x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational s(M[i][n]);
    for (std::size_t j = i + 1; j < n; ++j) s -= Rational(M[i][j]) * x[j];
    x[i] = s / Rational(M[i][i]);
  }
  return x;
}

Rational error_anorm_squared(const RationalMatrix& A, const RationalVector& x_star, const RationalVector& x) {
  const RationalVector e = subtract(x_star, x);
  return dot(e, matvec(A, e));
}

std::vector<std::size_t> audit_theorem5_exact(const std::vector<RationalCgState>& states) {
  std::vector<std::size_t> failures;
  for (std::size_t k = 1; k < states.size(); ++k) {
    const RationalVector dr = subtract(states[k - 1].r, states[k].r);
    if (dot(dr, dr) < dot(states[k - 1].r, states[k - 1].r)) failures.push_back(k);
  }
  return failures;
}

IdentityReport check_identities(const RationalMatrix& A, const RationalVector& b) {
  IdentityReport rep;
  rep.order = A.order();
  const auto states = oracle_run(A, b);
  rep.steps = states.size() - 1;
  const RationalVector x_star = oracle_solution(A, b);

  Rational prev_energy;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    if (subtract(b, matvec(A, s.x)) != s.r) rep.residual_matches_true = false;
    for (std::size_t j = 0; j < k; ++j) {
      if (sgn(dot(states[j].r, s.r)) != 0) rep.residuals_orthogonal = false;
    }
    const Rational energy = error_anorm_squared(A, x_star, s.x);
    if (k > 0 && !(energy < prev_energy)) rep.anorm_strictly_decreasing = false;
    prev_energy = energy;
  }
  rep.dr_dominates_r = audit_theorem5_exact(states).empty();
  rep.terminated_within_order = is_zero(states.back().r) && rep.steps <= rep.order;
  rep.reaches_solution = states.back().x == x_star;
  return rep;
}

namespace {

double sqrt_of(const Rational& q) { return std::sqrt(q.get_d()); }

}  // namespace

CgTrace to_trace(const RationalMatrix& A, const RationalVector& b, const std::vector<RationalCgState>& states,
                 const RationalVector* x_star) {
  CgTrace trace;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    CgTraceRecord rec;
    rec.k = s.k;
    rec.alpha = s.alpha.get_d();
    rec.rnorm = sqrt_of(dot(s.r, s.r));
    const RationalVector true_r = subtract(b, matvec(A, s.x));
    const RationalVector diff = subtract(true_r, s.r);
    rec.snorm = sqrt_of(dot(true_r, true_r));
    rec.gap = sqrt_of(dot(diff, diff));
    if (x_star) {
      const RationalVector e = subtract(*x_star, s.x);
      rec.enorm2 = sqrt_of(dot(e, e));
      rec.enormA = sqrt_of(dot(e, matvec(A, e)));
    }
    if (k > 0) {
      const RationalVector dr = subtract(states[k - 1].r, s.r);
      rec.dr_ratio = sqrt_of(dot(dr, dr) / dot(states[k - 1].r, states[k - 1].r));
    }
    trace.push_back(rec);
  }
  return trace;
}

}  // namespace cglab::oracle
