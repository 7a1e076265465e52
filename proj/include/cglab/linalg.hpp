#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "cglab/rounding.hpp"

namespace cglab {

/// Fixed-length real vector. Entries are finite when constructed from
/// external data; kernels write results through `operator[]`.
class DenseVector {
 public:
  explicit DenseVector(std::size_t n, double fill = 0.0);
  explicit DenseVector(std::vector<double> entries);
  DenseVector(std::initializer_list<double> entries);

  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  double& operator[](std::size_t i) { return entries_[i]; }

  std::span<const double> values() const { return entries_; }
  std::span<double> values() { return entries_; }
  const std::vector<double>& to_vector() const { return entries_; }

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> entries_;
};

struct SpectralInfo {
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double kappa = 1.0;

  static SpectralInfo from_extremes(double lambda_min, double lambda_max);
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

enum class Storage { dense, csr };

/// Symmetric matrix claimed positive definite. Dense storage keeps the full
/// row-major square; CSR keeps both triangles with sorted column indices.
/// Positive definiteness is certified by the generator (known spectrum) or
/// discovered at solve time through CG breakdown.
class SpdMatrix {
 public:
  static constexpr std::size_t kDenseLimit = 512;

  /// Full row-major n*n values; must be exactly symmetric.
  static SpdMatrix dense(std::size_t n, std::vector<double> values);
  /// Entries may be given for one or both triangles; duplicates are summed
  /// and the mirror is filled in. Storage follows `storage_for(n)`.
  static SpdMatrix from_triplets(std::size_t n, std::span<const Triplet> entries);
  static SpdMatrix from_triplets(std::size_t n, std::span<const Triplet> entries, Storage storage);
  static SpdMatrix diagonal(std::span<const double> diag);
  static SpdMatrix identity(std::size_t n);

  static Storage storage_for(std::size_t n) { return n <= kDenseLimit ? Storage::dense : Storage::csr; }

  std::size_t order() const { return n_; }
  Storage storage() const { return storage_; }
  double entry(std::size_t i, std::size_t j) const;

  /// Visits the stored nonzeros of row i in ascending column order.
  template <class F>
  void for_each_in_row(std::size_t i, F&& f) const {
    if (storage_ == Storage::dense) {
      const double* row = dense_.data() + i * n_;
      for (std::size_t j = 0; j < n_; ++j) f(j, row[j]);
    } else {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) f(col_idx_[k], csr_values_[k]);
    }
  }

  /// Lower-triangle nonzeros (row >= col), row-major order.
  std::vector<Triplet> lower_triplets() const;
  std::size_t nonzeros() const;

  const std::optional<SpectralInfo>& known_spectrum() const { return known_spectrum_; }
  SpdMatrix with_known_spectrum(SpectralInfo info) const;
  SpdMatrix without_known_spectrum() const;

  /// Copy with every entry snapped to the model's format.
  SpdMatrix rounded(const RoundingModel& m) const;

  /// max_i sum_j |a_ij|, an upper bound on the spectral norm.
  double inf_norm() const;

 private:
  SpdMatrix() = default;

  std::size_t n_ = 0;
  Storage storage_ = Storage::dense;
  std::vector<double> dense_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> csr_values_;
  std::optional<SpectralInfo> known_spectrum_;
};

/// Av, each row summed left to right in the model's arithmetic.
DenseVector matvec(const SpdMatrix& A, const DenseVector& v, const RoundingModel& m = {});
double dot(const DenseVector& u, const DenseVector& v, const RoundingModel& m = {});

/// Overflow-safe Euclidean norm (scaled by the largest magnitude), native double.
double norm2(const DenseVector& v);
/// sqrt(v' A v) with the same scaling as norm2. Throws NotPositiveDefinite
/// when the quadratic form is negative beyond rounding level.
double norm_A(const SpdMatrix& A, const DenseVector& v);

DenseVector axpy(double alpha, const DenseVector& x, const DenseVector& y, const RoundingModel& m = {});
DenseVector subtract(const DenseVector& a, const DenseVector& b, const RoundingModel& m = {});
DenseVector rounded(const DenseVector& v, const RoundingModel& m);

struct SpectralOptions {
  double tolerance = 1e-8;
  /// 0 means 10 * order.
  std::size_t max_iterations = 0;
};

/// Known spectrum when the matrix carries one, otherwise estimate_spectrum.
SpectralInfo spectral_info(const SpdMatrix& A, const SpectralOptions& opts = {});
/// Power iteration for lambda_max, inverse power iteration for lambda_min
/// (dense Cholesky solves for dense storage, inner CG for CSR).
SpectralInfo estimate_spectrum(const SpdMatrix& A, const SpectralOptions& opts = {});

}  // namespace cglab
