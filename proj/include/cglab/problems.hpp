#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "cglab/cg.hpp"
#include "cglab/linalg.hpp"
#include "cglab/rounding.hpp"

namespace cglab {

/// Generator families. String forms:
///   diag-geometric:<kappa>:<n>[:<seed>]   lambda_i = kappa^((i-1)/(n-1))
///   laplacian-1d:<n>                      tridiag(-1, 2, -1)
///   laplacian-2d:<g>                      5-point stencil on a g x g grid
///   integer-spd:<n>:<seed>                M'M + I with small integer M
///   dense-spd:<kappa>:<n>:<seed>[:<dist>] Q diag(lambda) Q', Q random orthogonal;
///                                         dist is arithmetic (default),
///                                         lambda_i = 1 + (kappa-1)(i-1)/(n-1),
///                                         or geometric
/// Families with a seed draw x* uniformly from [-1, 1] (integers in
/// {-1, 0, 1} for integer-spd); the others use x* = ones.
struct GeneratorSpec {
  enum class Family { diag_geometric, laplacian_1d, laplacian_2d, integer_spd, dense_spd };
  enum class Spread { arithmetic, geometric };

  Family family = Family::diag_geometric;
  double kappa = 1.0;
  std::size_t n = 1;  // grid side for laplacian-2d
  std::optional<std::uint64_t> seed;
  Spread spread = Spread::arithmetic;  // dense-spd only

  static GeneratorSpec parse(std::string_view text);
  std::string to_string() const;

  bool accepts_seed() const { return family != Family::laplacian_1d && family != Family::laplacian_2d; }
};

struct GeneratedProblem {
  CgProblem problem;
  std::optional<SpectralInfo> spectrum;  // exact for spectral families
  GeneratorSpec spec;
};

/// Builds A and x*, snaps both to `m`, then forms b = A x* in double-double
/// and rounds it once to `m`. With a simulated model the stored x* is
/// therefore the exact solution of a system within one rounding of the
/// stored one.
GeneratedProblem generate(const GeneratorSpec& spec, const RoundingModel& m = {});

/// A x accumulated in double-double, rounded once to `m`.
DenseVector extended_matvec(const SpdMatrix& A, const DenseVector& x, const RoundingModel& m = {});

// Matrix Market exchange format (real symmetric only).

SpdMatrix read_matrix_market(const std::filesystem::path& path);
SpdMatrix parse_matrix_market(std::string_view text);
/// Coordinate format, lower triangle, 17 significant digits.
void write_matrix_market(const SpdMatrix& A, const std::filesystem::path& path);
std::string format_matrix_market(const SpdMatrix& A);

/// Dense column vector in "array real general" form (n x 1).
DenseVector read_vector_market(const std::filesystem::path& path);
void write_vector_market(const DenseVector& v, const std::filesystem::path& path);

// Trace CSV: header `k,alpha,rnorm,snorm,gap,enorm2,enormA,dr_ratio`,
// empty cells for absent values, 17 significant digits.

std::string format_trace(const CgTrace& trace);
CgTrace parse_trace(std::string_view text);
void write_trace(const CgTrace& trace, const std::filesystem::path& path);
CgTrace read_trace(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace cglab
