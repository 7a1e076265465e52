#include "cglab/criteria.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "cglab/error.hpp"

namespace cglab {

std::string to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::ginsburg: return "ginsburg";
    case VerdictKind::stagnation: return "stagnation";
    case VerdictKind::relres: return "relres";
    case VerdictKind::recursive_collapse: return "recursive-collapse";
    case VerdictKind::exhausted: return "exhausted";
    case VerdictKind::breakdown: return "breakdown";
  }
  return "unknown";
}

VerdictKind verdict_kind_from_string(std::string_view text) {
  for (auto k : {VerdictKind::ginsburg, VerdictKind::stagnation, VerdictKind::relres,
                 VerdictKind::recursive_collapse, VerdictKind::exhausted, VerdictKind::breakdown}) {
    if (to_string(k) == text) return k;
  }
  throw UsageError("unknown verdict kind '" + std::string(text) + "'");
}

std::string to_string(GinsburgExponent e) {
  return e == GinsburgExponent::two_k_over_n ? "2k/n" : "(k/n)^2";
}

GinsburgExponent ginsburg_exponent_from_string(std::string_view text) {
  if (text == "2k/n") return GinsburgExponent::two_k_over_n;
  if (text == "(k/n)^2") return GinsburgExponent::k_over_n_squared;
  throw UsageError("unknown Ginsburg exponent '" + std::string(text) + "' (expected 2k/n or (k/n)^2)");
}

double ginsburg_factor(std::size_t k, std::size_t n, GinsburgExponent exponent) {
  if (n == 0) throw UsageError("ginsburg_check: n must be at least 1");
  const double t = static_cast<double>(k) / static_cast<double>(n);
  return exponent == GinsburgExponent::two_k_over_n ? std::exp(2.0 * t) : std::exp(t * t);
}

bool ginsburg_check(std::size_t k, std::size_t n, double rnorm, double gap, GinsburgExponent exponent) {
  return rnorm < ginsburg_factor(k, n, exponent) * gap;
}

bool stagnation_check(const DenseVector& x, const DenseVector& delta_x, double eps_m) {
  if (x.size() != delta_x.size()) throw UsageError("stagnation_check: dimension mismatch");
  if (!(eps_m > 0.0)) throw UsageError("stagnation_check: eps_m must be positive");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      if (delta_x[i] != 0.0) return false;
    } else if (!(std::abs(delta_x[i]) / std::abs(x[i]) < eps_m)) {
      return false;
    }
  }
  return true;
}

bool recursive_collapse_check(double rnorm_next, double rnorm, double eps_m) {
  return rnorm_next <= eps_m * rnorm;
}

bool relres_check(double snorm, double bnorm, double tol) {
  if (bnorm == 0.0) throw UsageError("relres_check: ||b|| is zero");
  return snorm / bnorm <= tol;
}

std::string Criterion::to_string() const {
  switch (kind) {
    case Kind::ginsburg: return "ginsburg";
    case Kind::stagnation: return "stagnation";
    case Kind::collapse: return "collapse";
    case Kind::relres: {
      std::ostringstream os;
      os.precision(17);
      os << "relres:" << tolerance;
      return os.str();
    }
  }
  return "unknown";
}

CriteriaSet CriteriaSet::parse(std::string_view text, GinsburgExponent exponent) {
  std::vector<Criterion> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    Criterion c;
    c.exponent = exponent;
    if (item == "ginsburg") {
      c.kind = Criterion::Kind::ginsburg;
    } else if (item == "stagnation") {
      c.kind = Criterion::Kind::stagnation;
    } else if (item == "collapse") {
      c.kind = Criterion::Kind::collapse;
    } else if (item.substr(0, 7) == "relres:") {
      c.kind = Criterion::Kind::relres;
      const auto num = item.substr(7);
      const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), c.tolerance);
      if (ec != std::errc{} || ptr != num.data() + num.size() || !(c.tolerance > 0.0)) {
        throw UsageError("relres tolerance must be a positive number, got '" + std::string(num) + "'");
      }
    } else {
      throw UsageError("unknown criterion '" + std::string(item) + "'");
    }
    out.push_back(c);
  }
  return CriteriaSet(std::move(out));
}

std::string CriteriaSet::to_string() const {
  std::string s;
  for (const auto& c : criteria_) {
    if (!s.empty()) s += ',';
    s += c.to_string();
  }
  return s;
}

std::optional<StoppingVerdict> CriteriaSet::evaluate(const CriterionContext& ctx) const {
  for (const auto& c : criteria_) {
    switch (c.kind) {
      case Criterion::Kind::ginsburg:
        if (std::isfinite(ctx.gap) && ginsburg_check(ctx.k, ctx.n, ctx.rnorm, ctx.gap, c.exponent)) {
          return StoppingVerdict{VerdictKind::ginsburg,
                                 ctx.k,
                                 {{"k", double(ctx.k)},
                                  {"n", double(ctx.n)},
                                  {"rnorm", ctx.rnorm},
                                  {"gap", ctx.gap},
                                  {"factor", ginsburg_factor(ctx.k, ctx.n, c.exponent)}}};
        }
        break;
      case Criterion::Kind::stagnation:
        if (ctx.x_prev && ctx.correction && stagnation_check(*ctx.x_prev, *ctx.correction, ctx.eps_m)) {
          double worst = 0.0;
          for (std::size_t i = 0; i < ctx.x_prev->size(); ++i) {
            const double xi = (*ctx.x_prev)[i];
            if (xi != 0.0) worst = std::max(worst, std::abs((*ctx.correction)[i]) / std::abs(xi));
          }
          return StoppingVerdict{VerdictKind::stagnation, ctx.k, {{"max_ratio", worst}, {"eps_m", ctx.eps_m}}};
        }
        break;
      case Criterion::Kind::relres:
        if (std::isfinite(ctx.snorm) && relres_check(ctx.snorm, ctx.bnorm, c.tolerance)) {
          return StoppingVerdict{VerdictKind::relres,
                                 ctx.k,
                                 {{"snorm", ctx.snorm},
                                  {"bnorm", ctx.bnorm},
                                  {"tol", c.tolerance},
                                  {"ratio", ctx.snorm / ctx.bnorm}}};
        }
        break;
      case Criterion::Kind::collapse:
        if (recursive_collapse_check(ctx.rnorm, ctx.rnorm_prev, ctx.eps_m)) {
          return StoppingVerdict{VerdictKind::recursive_collapse,
                                 ctx.k,
                                 {{"rnorm_next", ctx.rnorm}, {"rnorm", ctx.rnorm_prev}, {"eps_m", ctx.eps_m}}};
        }
        break;
    }
  }
  return std::nullopt;
}

}  // namespace cglab
