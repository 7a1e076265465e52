#include "cglab/problems.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "cglab/dd.hpp"
#include "cglab/error.hpp"

namespace cglab {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(sep);
    parts.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text = text.substr(pos + 1);
  }
  return parts;
}

template <class T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError(std::string("invalid ") + what + " '" + std::string(text) + "' in generator spec");
  }
  return value;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

DenseVector random_uniform(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

// Orthonormal columns from a Gaussian matrix by Gram-Schmidt run twice per
// column; returned row-major.
std::vector<double> random_orthogonal(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<std::vector<double>> cols(n, std::vector<double>(n));
  for (auto& c : cols) {
    for (auto& v : c) v = dist(gen);
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += cols[k][i] * cols[j][i];
        for (std::size_t i = 0; i < n; ++i) cols[j][i] -= proj * cols[k][i];
      }
    }
    double nrm = 0.0;
    for (double v : cols[j]) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : cols[j]) v /= nrm;
  }
  std::vector<double> Q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) Q[i * n + j] = cols[j][i];
  }
  return Q;
}

std::vector<double> geometric_spectrum(double kappa, std::size_t n) {
  std::vector<double> lambda(n, 1.0);
  for (std::size_t i = 1; i < n; ++i) {
    lambda[i] = std::pow(kappa, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return lambda;
}

std::vector<double> arithmetic_spectrum(double kappa, std::size_t n) {
  std::vector<double> lambda(n, 1.0);
  for (std::size_t i = 1; i < n; ++i) {
    lambda[i] = 1.0 + (kappa - 1.0) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return lambda;
}

double laplace_eig(std::size_t k, std::size_t n) {
  return 2.0 - 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(n + 1));
}

}  // namespace

GeneratorSpec GeneratorSpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  const auto family = parts[0];
  using Spread = GeneratorSpec::Spread;
  GeneratorSpec spec;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) {
      throw UsageError("wrong number of parameters in generator spec '" + std::string(text) + "'");
    }
  };
  if (family == "diag-geometric") {
    need(3, 4);
    spec.family = Family::diag_geometric;
    spec.kappa = parse_number<double>(parts[1], "kappa");
    spec.n = parse_number<std::size_t>(parts[2], "n");
    if (parts.size() == 4) spec.seed = parse_number<std::uint64_t>(parts[3], "seed");
  } else if (family == "laplacian-1d") {
    need(2, 2);
    spec.family = Family::laplacian_1d;
    spec.n = parse_number<std::size_t>(parts[1], "n");
  } else if (family == "laplacian-2d") {
    need(2, 2);
    spec.family = Family::laplacian_2d;
    spec.n = parse_number<std::size_t>(parts[1], "grid");
  } else if (family == "integer-spd") {
    need(3, 3);
    spec.family = Family::integer_spd;
    spec.n = parse_number<std::size_t>(parts[1], "n");
    spec.seed = parse_number<std::uint64_t>(parts[2], "seed");
  } else if (family == "dense-spd") {
    need(4, 5);
    spec.family = Family::dense_spd;
    spec.kappa = parse_number<double>(parts[1], "kappa");
    spec.n = parse_number<std::size_t>(parts[2], "n");
    spec.seed = parse_number<std::uint64_t>(parts[3], "seed");
    if (parts.size() == 5) {
      if (parts[4] == "geometric") spec.spread = Spread::geometric;
      else if (parts[4] != "arithmetic") throw UsageError("unknown spectrum spread '" + std::string(parts[4]) + "'");
    }
  } else {
    throw UsageError("unknown generator family '" + std::string(family) + "'");
  }
  if (spec.n < 1) throw UsageError("generator size must be at least 1");
  if (!(spec.kappa >= 1.0) || !std::isfinite(spec.kappa)) throw UsageError("kappa must be finite and >= 1");
  return spec;
}

std::string GeneratorSpec::to_string() const {
  std::string seed_suffix = seed ? ":" + std::to_string(*seed) : std::string();
  switch (family) {
    case Family::diag_geometric:
      return "diag-geometric:" + format_double(kappa) + ":" + std::to_string(n) + seed_suffix;
    case Family::laplacian_1d: return "laplacian-1d:" + std::to_string(n);
    case Family::laplacian_2d: return "laplacian-2d:" + std::to_string(n);
    case Family::integer_spd: return "integer-spd:" + std::to_string(n) + seed_suffix;
    case Family::dense_spd:
      return "dense-spd:" + format_double(kappa) + ":" + std::to_string(n) + seed_suffix +
             (spread == Spread::geometric ? ":geometric" : "");
  }
  return "unknown";
}

DenseVector extended_matvec(const SpdMatrix& A, const DenseVector& x, const RoundingModel& m) {
  if (x.size() != A.order()) throw UsageError("extended_matvec: dimension mismatch");
  DenseVector y(A.order());
  for (std::size_t i = 0; i < A.order(); ++i) {
    dd::DoubleDouble acc;
    A.for_each_in_row(i, [&](std::size_t j, double a) { acc = dd::fma_acc(acc, a, x[j]); });
    y[i] = m.round_pair(acc.hi, acc.lo);
  }
  return y;
}

GeneratedProblem generate(const GeneratorSpec& spec, const RoundingModel& m) {
  using Family = GeneratorSpec::Family;
  const std::size_t n = spec.family == Family::laplacian_2d ? spec.n * spec.n : spec.n;
  std::mt19937_64 gen(spec.seed.value_or(0));

  std::optional<SpdMatrix> A;
  std::optional<SpectralInfo> spectrum;
  std::optional<DenseVector> x_star;

  switch (spec.family) {
    case Family::diag_geometric: {
      if (n == 1 && spec.kappa != 1.0) throw UsageError("diag-geometric with n = 1 requires kappa = 1");
      std::vector<double> lambda = geometric_spectrum(spec.kappa, n);
      for (double& l : lambda) l = m.round(l);
      A = SpdMatrix::diagonal(lambda);
      spectrum = SpectralInfo::from_extremes(lambda.front(), lambda.back());
      if (spec.seed) x_star = random_uniform(n, gen);
      break;
    }
    case Family::laplacian_1d: {
      std::vector<Triplet> t;
      for (std::size_t i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0});
        if (i > 0) t.push_back({i, i - 1, -1.0});
      }
      A = SpdMatrix::from_triplets(n, t);
      spectrum = SpectralInfo::from_extremes(laplace_eig(1, n), laplace_eig(n, n));
      break;
    }
    case Family::laplacian_2d: {
      const std::size_t g = spec.n;
      std::vector<Triplet> t;
      for (std::size_t r = 0; r < g; ++r) {
        for (std::size_t c = 0; c < g; ++c) {
          const std::size_t i = r * g + c;
          t.push_back({i, i, 4.0});
          if (c > 0) t.push_back({i, i - 1, -1.0});
          if (r > 0) t.push_back({i, i - g, -1.0});
        }
      }
      A = SpdMatrix::from_triplets(n, t);
      spectrum = SpectralInfo::from_extremes(2.0 * laplace_eig(1, g), 2.0 * laplace_eig(g, g));
      break;
    }
    case Family::integer_spd: {
      std::uniform_int_distribution<int> entry(-2, 2);
      std::vector<double> M(n * n);
      for (double& v : M) v = entry(gen);
      std::vector<double> values(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double s = (i == j) ? 1.0 : 0.0;
          for (std::size_t k = 0; k < n; ++k) s += M[k * n + i] * M[k * n + j];
          values[i * n + j] = s;
        }
      }
      A = SpdMatrix::dense(n, std::move(values));
      std::uniform_int_distribution<int> comp(-1, 1);
      DenseVector xs(n);
      for (std::size_t i = 0; i < n; ++i) xs[i] = comp(gen);
      x_star = xs;
      break;
    }
    case Family::dense_spd: {
      const std::vector<double> Q = random_orthogonal(n, gen);
      if (n == 1 && spec.kappa != 1.0) throw UsageError("dense-spd with n = 1 requires kappa = 1");
      const std::vector<double> lambda = spec.spread == GeneratorSpec::Spread::arithmetic
                                             ? arithmetic_spectrum(spec.kappa, n)
                                             : geometric_spectrum(spec.kappa, n);
      std::vector<double> values(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          double s = 0.0;
          for (std::size_t k = 0; k < n; ++k) s += Q[i * n + k] * lambda[k] * Q[j * n + k];
          values[i * n + j] = s;
          values[j * n + i] = s;
        }
      }
      std::vector<Triplet> t;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) t.push_back({i, j, values[i * n + j]});
      }
      A = SpdMatrix::from_triplets(n, t);
      spectrum = SpectralInfo::from_extremes(lambda.front(), lambda.back());
      x_star = random_uniform(n, gen);
      break;
    }
  }

  SpdMatrix matrix = A->rounded(m);
  if (spectrum) matrix = matrix.with_known_spectrum(*spectrum);
  const DenseVector xs = rounded(x_star.value_or(DenseVector(n, 1.0)), m);
  DenseVector b = extended_matvec(matrix, xs, m);
  return GeneratedProblem{CgProblem::zero_start(std::move(matrix), std::move(b), xs), spectrum, spec};
}

}  // namespace cglab
