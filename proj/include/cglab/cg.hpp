#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cglab/criteria.hpp"
#include "cglab/linalg.hpp"
#include "cglab/rounding.hpp"

namespace cglab {

struct CgProblem {
  SpdMatrix A;
  DenseVector b;
  DenseVector x0;
  /// Target of the finite-arithmetic iteration, when known.
  std::optional<DenseVector> reference_solution;

  CgProblem(SpdMatrix A, DenseVector b, DenseVector x0, std::optional<DenseVector> reference = std::nullopt);
  /// x0 = 0.
  static CgProblem zero_start(SpdMatrix A, DenseVector b, std::optional<DenseVector> reference = std::nullopt);

  std::size_t order() const { return A.order(); }
};

/// Diagnostics for iterate k. `alpha` is the step length that produced x_k
/// (0 at k = 0). snorm and gap are NaN on iterations where the true
/// residual was not recomputed (only possible with a cadence > 1).
struct CgTraceRecord {
  std::size_t k = 0;
  double alpha = 0.0;
  double rnorm = 0.0;
  double snorm = 0.0;
  double gap = 0.0;
  std::optional<double> enorm2;
  std::optional<double> enormA;
  std::optional<double> dr_ratio;  // ||r_{k-1} - r_k|| / ||r_{k-1}||, k >= 1

  friend bool operator==(const CgTraceRecord&, const CgTraceRecord&) = default;
};

using CgTrace = std::vector<CgTraceRecord>;

struct CgRunResult {
  CgTrace trace;
  StoppingVerdict verdict;
  DenseVector final_x;
  std::size_t stop_index = 0;
};

/// Iteration state. `rr` caches (r, r) in the model's arithmetic;
/// `alpha` and `correction` describe the step that produced this state.
struct CgState {
  std::size_t k = 0;
  DenseVector x;
  DenseVector r;
  DenseVector p;
  double rr = 0.0;
  double alpha = 0.0;
  std::optional<DenseVector> correction;
};

/// x_0, r_0 = p_0 = b - A x_0.
CgState cg_initial_state(const CgProblem& problem, const RoundingModel& m);

/// True when (r, r) is zero or subnormal: no further step is meaningful.
bool cg_converged(const CgState& state);

/// One Hestenes-Stiefel step, every operation routed through `m`.
/// Throws BreakdownError when (p, Ap) <= 0 and UsageError when called on a
/// converged state.
CgState cg_step(const CgState& state, const SpdMatrix& A, const RoundingModel& m);

/// b - A x evaluated from scratch.
DenseVector true_residual(const SpdMatrix& A, const DenseVector& b, const DenseVector& x, const RoundingModel& m);

struct RunOptions {
  std::size_t max_iters = 1000;
  /// Recompute the true residual every this many iterations (always at 0
  /// and at the final iterate).
  std::size_t true_residual_every = 1;
};

/// Runs CG until the first criterion fires, the residual becomes exactly
/// zero, the step breaks down, or max_iters steps have been taken. A
/// breakdown ends the run with a breakdown verdict rather than throwing.
CgRunResult run_cg(const CgProblem& problem, const RoundingModel& m, const CriteriaSet& criteria,
                   const RunOptions& opts);

}  // namespace cglab
