#include "cglab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "cglab/error.hpp"

namespace cglab {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw UsageError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

void require_finite(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw UsageError("vector entry " + std::to_string(i) + " is not finite");
  }
}

double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

DenseVector::DenseVector(std::size_t n, double fill) : entries_(n, fill) {
  if (n == 0) throw UsageError("vector length must be at least 1");
  require_finite(entries_);
}

DenseVector::DenseVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw UsageError("vector length must be at least 1");
  require_finite(entries_);
}

DenseVector::DenseVector(std::initializer_list<double> entries) : DenseVector(std::vector<double>(entries)) {}

SpectralInfo SpectralInfo::from_extremes(double lambda_min, double lambda_max) {
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min)) {
    throw NotPositiveDefinite("invalid spectral extremes " + std::to_string(lambda_min) + ", " +
                              std::to_string(lambda_max));
  }
  return {lambda_min, lambda_max, lambda_max / lambda_min};
}

// ---------------------------------------------------------------------------
// SpdMatrix

SpdMatrix SpdMatrix::dense(std::size_t n, std::vector<double> values) {
  if (n == 0) throw UsageError("matrix order must be at least 1");
  if (values.size() != n * n) throw UsageError("dense matrix needs n*n values");
  require_finite(values);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (values[i * n + j] != values[j * n + i]) {
        throw UsageError("matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  SpdMatrix A;
  A.n_ = n;
  A.storage_ = Storage::dense;
  A.dense_ = std::move(values);
  return A;
}

SpdMatrix SpdMatrix::from_triplets(std::size_t n, std::span<const Triplet> entries) {
  return from_triplets(n, entries, storage_for(n));
}

SpdMatrix SpdMatrix::from_triplets(std::size_t n, std::span<const Triplet> entries, Storage storage) {
  if (n == 0) throw UsageError("matrix order must be at least 1");
  // Fold everything onto the lower triangle first so that a pair given in
  // both triangles is summed once per position, not mirrored twice.
  std::vector<Triplet> lower;
  lower.reserve(entries.size());
  for (const auto& t : entries) {
    if (t.row >= n || t.col >= n) throw UsageError("triplet index out of range");
    if (!std::isfinite(t.value)) throw UsageError("triplet value is not finite");
    lower.push_back(t.row >= t.col ? t : Triplet{t.col, t.row, t.value});
  }
  std::sort(lower.begin(), lower.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<Triplet> merged;
  for (const auto& t : lower) {
    if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col) {
      merged.back().value += t.value;
    } else {
      merged.push_back(t);
    }
  }

  SpdMatrix A;
  A.n_ = n;
  A.storage_ = storage;
  if (storage == Storage::dense) {
    A.dense_.assign(n * n, 0.0);
    for (const auto& t : merged) {
      A.dense_[t.row * n + t.col] = t.value;
      A.dense_[t.col * n + t.row] = t.value;
    }
    return A;
  }

  std::vector<Triplet> full;
  full.reserve(2 * merged.size());
  for (const auto& t : merged) {
    full.push_back(t);
    if (t.row != t.col) full.push_back({t.col, t.row, t.value});
  }
  std::sort(full.begin(), full.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  A.row_ptr_.assign(n + 1, 0);
  A.col_idx_.reserve(full.size());
  A.csr_values_.reserve(full.size());
  for (const auto& t : full) {
    ++A.row_ptr_[t.row + 1];
    A.col_idx_.push_back(t.col);
    A.csr_values_.push_back(t.value);
  }
  for (std::size_t i = 0; i < n; ++i) A.row_ptr_[i + 1] += A.row_ptr_[i];
  return A;
}

SpdMatrix SpdMatrix::diagonal(std::span<const double> diag) {
  std::vector<Triplet> t;
  t.reserve(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) t.push_back({i, i, diag[i]});
  return from_triplets(diag.size(), t);
}

SpdMatrix SpdMatrix::identity(std::size_t n) {
  std::vector<double> ones(n, 1.0);
  return diagonal(ones).with_known_spectrum({1.0, 1.0, 1.0});
}

double SpdMatrix::entry(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw UsageError("matrix index out of range");
  if (storage_ == Storage::dense) return dense_[i * n_ + j];
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return csr_values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<Triplet> SpdMatrix::lower_triplets() const {
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for_each_in_row(i, [&](std::size_t j, double v) {
      if (j <= i && v != 0.0) out.push_back({i, j, v});
    });
  }
  return out;
}

std::size_t SpdMatrix::nonzeros() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for_each_in_row(i, [&](std::size_t, double v) { count += (v != 0.0); });
  }
  return count;
}

SpdMatrix SpdMatrix::with_known_spectrum(SpectralInfo info) const {
  SpdMatrix copy = *this;
  copy.known_spectrum_ = info;
  return copy;
}

SpdMatrix SpdMatrix::without_known_spectrum() const {
  SpdMatrix copy = *this;
  copy.known_spectrum_.reset();
  return copy;
}

SpdMatrix SpdMatrix::rounded(const RoundingModel& m) const {
  SpdMatrix copy = *this;
  if (m.is_native()) return copy;
  for (double& v : copy.dense_) v = m.round(v);
  for (double& v : copy.csr_values_) v = m.round(v);
  return copy;
}

double SpdMatrix::inf_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0;
    for_each_in_row(i, [&](std::size_t, double v) { row += std::abs(v); });
    best = std::max(best, row);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Kernels

DenseVector matvec(const SpdMatrix& A, const DenseVector& v, const RoundingModel& m) {
  require_same_size(A.order(), v.size(), "matvec");
  DenseVector y(A.order());
  if (m.is_native()) {
    for (std::size_t i = 0; i < A.order(); ++i) {
      double s = 0.0;
      A.for_each_in_row(i, [&](std::size_t j, double a) { s += a * v[j]; });
      y[i] = s;
    }
  } else {
    for (std::size_t i = 0; i < A.order(); ++i) {
      double s = 0.0;
      A.for_each_in_row(i, [&](std::size_t j, double a) {
        if (a != 0.0) s = m.add(s, m.mul(a, v[j]));
      });
      y[i] = s;
    }
  }
  return y;
}

double dot(const DenseVector& u, const DenseVector& v, const RoundingModel& m) {
  require_same_size(u.size(), v.size(), "dot");
  double s = 0.0;
  if (m.is_native()) {
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) s = m.add(s, m.mul(u[i], v[i]));
  }
  return s;
}

double norm2(const DenseVector& v) {
  const double scale = max_abs(v.values());
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double x : v.values()) {
    const double t = x / scale;
    sum += t * t;
  }
  return scale * std::sqrt(sum);
}

double norm_A(const SpdMatrix& A, const DenseVector& v) {
  require_same_size(A.order(), v.size(), "norm_A");
  const double scale = max_abs(v.values());
  if (scale == 0.0) return 0.0;
  DenseVector u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i] / scale;
  const DenseVector Au = matvec(A, u);
  double q = 0.0;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u[i] * Au[i];
    q += t;
    magnitude += std::abs(t);
  }
  if (q < 0.0) {
    const double slack = 4.0 * static_cast<double>(u.size()) * std::numeric_limits<double>::epsilon() * magnitude;
    if (q < -slack) {
      throw NotPositiveDefinite("negative quadratic form v'Av = " + std::to_string(q * scale * scale));
    }
    return 0.0;
  }
  return scale * std::sqrt(q);
}

DenseVector axpy(double alpha, const DenseVector& x, const DenseVector& y, const RoundingModel& m) {
  require_same_size(x.size(), y.size(), "axpy");
  DenseVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = m.add(y[i], m.mul(alpha, x[i]));
  return out;
}

DenseVector subtract(const DenseVector& a, const DenseVector& b, const RoundingModel& m) {
  require_same_size(a.size(), b.size(), "subtract");
  DenseVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = m.sub(a[i], b[i]);
  return out;
}

DenseVector rounded(const DenseVector& v, const RoundingModel& m) {
  DenseVector out = v;
  if (!m.is_native()) {
    for (auto& x : out.values()) x = m.round(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral estimates

namespace {

DenseVector start_vector(std::size_t n) {
  std::mt19937_64 gen(0x5eed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  DenseVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

void normalize(DenseVector& v) {
  const double s = norm2(v);
  for (auto& x : v.values()) x /= s;
}

class CholeskySolver {
 public:
  explicit CholeskySolver(const SpdMatrix& A) : n_(A.order()), L_(n_ * n_, 0.0) {
    for (std::size_t j = 0; j < n_; ++j) {
      double d = A.entry(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= L_[j * n_ + k] * L_[j * n_ + k];
      if (!(d > 0.0)) throw NotPositiveDefinite("Cholesky pivot " + std::to_string(j) + " is not positive");
      const double ljj = std::sqrt(d);
      L_[j * n_ + j] = ljj;
      for (std::size_t i = j + 1; i < n_; ++i) {
        double s = A.entry(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= L_[i * n_ + k] * L_[j * n_ + k];
        L_[i * n_ + j] = s / ljj;
      }
    }
  }

  DenseVector solve(const DenseVector& b) const {
    DenseVector y = b;
    for (std::size_t i = 0; i < n_; ++i) {
      double s = y[i];
      for (std::size_t k = 0; k < i; ++k) s -= L_[i * n_ + k] * y[k];
      y[i] = s / L_[i * n_ + i];
    }
    for (std::size_t i = n_; i-- > 0;) {
      double s = y[i];
      for (std::size_t k = i + 1; k < n_; ++k) s -= L_[k * n_ + i] * y[k];
      y[i] = s / L_[i * n_ + i];
    }
    return y;
  }

 private:
  std::size_t n_;
  std::vector<double> L_;
};

// Plain CG to a tight relative tolerance; only used for the inverse
// iteration on sparse matrices.
DenseVector inner_cg_solve(const SpdMatrix& A, const DenseVector& b) {
  const std::size_t n = A.order();
  DenseVector x(n);
  DenseVector r = b;
  DenseVector p = r;
  double rr = dot(r, r);
  const double stop = 1e-28 * rr;
  for (std::size_t it = 0; it < 20 * n && rr > stop; ++it) {
    const DenseVector Ap = matvec(A, p);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) throw NotPositiveDefinite("inner CG breakdown during inverse iteration");
    const double alpha = rr / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return x;
}

}  // namespace

SpectralInfo spectral_info(const SpdMatrix& A, const SpectralOptions& opts) {
  if (A.known_spectrum()) return *A.known_spectrum();
  return estimate_spectrum(A, opts);
}

SpectralInfo estimate_spectrum(const SpdMatrix& A, const SpectralOptions& opts) {
  const std::size_t n = A.order();
  const std::size_t cap = opts.max_iterations ? opts.max_iterations : 10 * n;

  // Power iteration with Rayleigh quotients.
  DenseVector v = start_vector(n);
  normalize(v);
  double lambda_max = 0.0;
  bool max_converged = false;
  for (std::size_t it = 0; it < cap; ++it) {
    DenseVector w = matvec(A, v);
    const double rq = dot(v, w);
    const double wn = norm2(w);
    if (wn == 0.0) throw NotPositiveDefinite("A v = 0 during power iteration");
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (it > 0 && std::abs(rq - lambda_max) <= opts.tolerance * std::abs(rq)) {
      lambda_max = rq;
      max_converged = true;
      break;
    }
    lambda_max = rq;
  }

  std::optional<CholeskySolver> chol;
  if (A.storage() == Storage::dense) chol.emplace(A);

  DenseVector u = start_vector(n);
  normalize(u);
  double mu = 0.0;  // estimate of 1 / lambda_min
  bool min_converged = false;
  for (std::size_t it = 0; it < cap; ++it) {
    DenseVector y = chol ? chol->solve(u) : inner_cg_solve(A, u);
    const double rq = dot(u, y);
    const double yn = norm2(y);
    if (!(rq > 0.0)) throw NotPositiveDefinite("nonpositive Rayleigh quotient in inverse iteration");
    for (std::size_t i = 0; i < n; ++i) u[i] = y[i] / yn;
    if (it > 0 && std::abs(rq - mu) <= opts.tolerance * std::abs(rq)) {
      mu = rq;
      min_converged = true;
      break;
    }
    mu = rq;
  }

  const double lambda_min = 1.0 / mu;
  if (!max_converged || !min_converged) {
    throw EstimationFailed("eigenvalue iteration did not converge within " + std::to_string(cap) + " iterations",
                           lambda_min, lambda_max);
  }
  return SpectralInfo::from_extremes(lambda_min, std::max(lambda_max, lambda_min));
}

}  // namespace cglab
