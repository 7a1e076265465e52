#include "cglab/cg.hpp"

#include <cmath>
#include <limits>

#include "cglab/error.hpp"

namespace cglab {

CgProblem::CgProblem(SpdMatrix A_, DenseVector b_, DenseVector x0_, std::optional<DenseVector> reference)
    : A(std::move(A_)), b(std::move(b_)), x0(std::move(x0_)), reference_solution(std::move(reference)) {
  if (b.size() != A.order() || x0.size() != A.order() ||
      (reference_solution && reference_solution->size() != A.order())) {
    throw UsageError("CgProblem: b, x0 and the reference solution must match the matrix order");
  }
}

CgProblem CgProblem::zero_start(SpdMatrix A, DenseVector b, std::optional<DenseVector> reference) {
  DenseVector x0(A.order());
  return CgProblem(std::move(A), std::move(b), std::move(x0), std::move(reference));
}

DenseVector true_residual(const SpdMatrix& A, const DenseVector& b, const DenseVector& x, const RoundingModel& m) {
  if (b.size() != A.order()) throw UsageError("true_residual: dimension mismatch");
  return subtract(b, matvec(A, x, m), m);
}

CgState cg_initial_state(const CgProblem& problem, const RoundingModel& m) {
  DenseVector x = rounded(problem.x0, m);
  DenseVector r = true_residual(problem.A, problem.b, x, m);
  const double rr = dot(r, r, m);
  return CgState{0, std::move(x), r, r, rr, 0.0, std::nullopt};
}

bool cg_converged(const CgState& state) {
  // Once (r, r) drops into the subnormal range its relative error is no
  // longer bounded by the unit roundoff and alpha, beta turn into noise.
  return state.rr < std::numeric_limits<double>::min();
}

CgState cg_step(const CgState& state, const SpdMatrix& A, const RoundingModel& m) {
  if (cg_converged(state)) throw UsageError("cg_step: (r, r) has underflowed");
  const std::size_t n = A.order();
  const DenseVector Ap = matvec(A, state.p, m);
  const double pAp = dot(state.p, Ap, m);
  if (!(pAp > 0.0)) {
    throw BreakdownError("matrix not positive definite or numerical breakdown: (p, Ap) = " + std::to_string(pAp),
                         pAp, static_cast<long>(state.k));
  }
  const double alpha = m.div(state.rr, pAp);

  CgState next{state.k + 1, state.x, state.r, state.p, 0.0, alpha, DenseVector(n)};
  DenseVector& correction = *next.correction;
  for (std::size_t i = 0; i < n; ++i) {
    correction[i] = m.mul(alpha, state.p[i]);
    next.x[i] = m.add(state.x[i], correction[i]);
    next.r[i] = m.sub(state.r[i], m.mul(alpha, Ap[i]));
  }
  next.rr = dot(next.r, next.r, m);
  const double beta = m.div(next.rr, state.rr);
  for (std::size_t i = 0; i < n; ++i) next.p[i] = m.add(next.r[i], m.mul(beta, state.p[i]));
  return next;
}

namespace {

struct Recorder {
  const CgProblem& problem;
  const RoundingModel& m;

  void fill_true_residual(CgTraceRecord& rec, const CgState& s) const {
    const DenseVector sk = true_residual(problem.A, problem.b, s.x, m);
    rec.snorm = norm2(sk);
    rec.gap = norm2(subtract(sk, s.r));
  }

  CgTraceRecord make(const CgState& s, const CgState* prev, bool with_true_residual) const {
    CgTraceRecord rec;
    rec.k = s.k;
    rec.alpha = s.alpha;
    rec.rnorm = norm2(s.r);
    if (with_true_residual) {
      fill_true_residual(rec, s);
    } else {
      rec.snorm = std::numeric_limits<double>::quiet_NaN();
      rec.gap = std::numeric_limits<double>::quiet_NaN();
    }
    if (problem.reference_solution) {
      const DenseVector e = subtract(*problem.reference_solution, s.x, m);
      rec.enorm2 = norm2(e);
      try {
        rec.enormA = norm_A(problem.A, e);
      } catch (const NotPositiveDefinite&) {
        rec.enormA.reset();
      }
    }
    if (prev) {
      const double prev_norm = norm2(prev->r);
      if (prev_norm > 0.0) rec.dr_ratio = norm2(subtract(prev->r, s.r)) / prev_norm;
    }
    return rec;
  }
};

}  // namespace

CgRunResult run_cg(const CgProblem& problem, const RoundingModel& m, const CriteriaSet& criteria,
                   const RunOptions& opts) {
  if (opts.max_iters < 1) throw UsageError("max_iters must be at least 1");
  const std::size_t every = opts.true_residual_every == 0 ? 1 : opts.true_residual_every;
  const Recorder recorder{problem, m};
  const double bnorm = norm2(problem.b);
  const double eps = m.unit_roundoff();

  CgState state = cg_initial_state(problem, m);
  CgTrace trace;
  trace.push_back(recorder.make(state, nullptr, true));
  // r_0 and s_0 are the same expression.
  trace.back().gap = 0.0;

  std::optional<StoppingVerdict> verdict;
  while (!verdict) {
    if (cg_converged(state)) {
      verdict = StoppingVerdict{VerdictKind::recursive_collapse,
                                state.k,
                                {{"rnorm_next", trace.back().rnorm},
                                 {"rnorm", trace.size() > 1 ? trace[trace.size() - 2].rnorm : trace.back().rnorm},
                                 {"eps_m", eps}}};
      break;
    }
    if (state.k >= opts.max_iters) {
      verdict = StoppingVerdict{VerdictKind::exhausted, state.k, {{"max_iters", double(opts.max_iters)}}};
      break;
    }
    std::optional<CgState> stepped;
    try {
      stepped = cg_step(state, problem.A, m);
    } catch (const BreakdownError& e) {
      verdict = StoppingVerdict{VerdictKind::breakdown, state.k, {{"pAp", e.pAp()}, {"k", double(state.k)}}};
      break;
    }
    CgState& next = *stepped;

    trace.push_back(recorder.make(next, &state, next.k % every == 0));
    const CgTraceRecord& rec = trace.back();
    CriterionContext ctx;
    ctx.k = rec.k;
    ctx.n = problem.order();
    ctx.rnorm = rec.rnorm;
    ctx.rnorm_prev = trace[trace.size() - 2].rnorm;
    ctx.snorm = rec.snorm;
    ctx.gap = rec.gap;
    ctx.bnorm = bnorm;
    ctx.eps_m = eps;
    ctx.x_prev = &state.x;
    ctx.correction = next.correction ? &*next.correction : nullptr;
    verdict = criteria.evaluate(ctx);
    state = std::move(next);
  }

  if (std::isnan(trace.back().snorm)) recorder.fill_true_residual(trace.back(), state);

  CgRunResult result{std::move(trace), std::move(*verdict), state.x, state.k};
  return result;
}

}  // namespace cglab
