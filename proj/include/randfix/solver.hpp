#ifndef RANDFIX_SOLVER_HPP
#define RANDFIX_SOLVER_HPP

// Orbit iteration with the diagnostics needed to argue convergence from a
// finite trace: per-atom step sizes d_n, the windowed look-ahead a_n, tail
// estimates of their limits, cross-start agreement of the returned points,
// and cutoff tables for convergence in probability.

#include <vector>

#include "randfix/gauge.hpp"
#include "randfix/operators.hpp"
#include "randfix/prob_space.hpp"
#include "randfix/report.hpp"

namespace randfix {

// Tail sups of a geometric orbit stopped at tol land around tol^(3/4), so
// the tail estimates are compared against this looser zero-threshold.
inline constexpr double kDiagnosticTol = 1e-5;
inline constexpr double kDefaultTailFraction = 0.25;
inline constexpr int kDefaultWindow = 16;

enum class StopReason { converged, max_iter_reached };
const char* stop_reason_name(StopReason r);

// Record of one orbit. iterates holds x_0 .. x_{K+1} where K is the final
// loop index; the image of the returned point is kept so the last step row
// exists. steps(n, a) is the block distance between x_n and x_{n+1}, which
// for this iteration is simultaneously the residual of x_n, so the two
// exported columns share this storage. window_sup(n, a) is the largest
// block distance from x_n to the next `window` stored iterates.
struct IterationTrace {
    std::vector<FibrePoint> iterates;
    Eigen::MatrixXd steps;       // (K+1) x atoms
    Eigen::MatrixXd window_sup;  // (K+1) x atoms
    Eigen::VectorXd diam_bound;  // per atom: diameter of the domain region
    double tol = 0.0;
    int window = kDefaultWindow;
    int iterations = 0;
    StopReason stop = StopReason::converged;

    int rows() const { return static_cast<int>(steps.rows()); }
    int atom_count() const { return static_cast<int>(steps.cols()); }
};

struct FixedPointResult {
    FibrePoint z;
    L0Value residual;  // ||f(z) - z|| per atom
    int iterations = 0;
    IterationTrace trace;

    bool converged() const { return trace.stop == StopReason::converged; }
};

// Orbit x_{n+1} = f(x_n) from x0. A start whose own step is already at or
// below tol in every atom returns immediately with zero iterations.
// Otherwise the run is accepted at the first index n >= 1 whose step and the
// preceding step both sit at or below tol everywhere; the returned point is
// x_n, and the accepted step is exactly its residual, so the bound
// ||f(z) - z|| <= tol is certified by construction. Hitting max_iter first
// is a regular result carrying the trace, not an exception.
FixedPointResult picard_solve(const RandomOperator& f, const FibrePoint& x0, double tol,
                              int max_iter, int window = kDefaultWindow);

// Tail estimate of lim d_n over the trailing fraction of the trace; passes
// when the estimate sits at or below `tol` at every atom. A trace with a
// single step row has no tail to estimate from and comes back inconclusive.
StageResult adjacent_distance_check(const IterationTrace& trace,
                                    double tail_fraction = kDefaultTailFraction,
                                    double tol = kDiagnosticTol);

// Tail estimate of lim a_n, plus two structural relations on the whole
// trace: a_n >= d_n entrywise (the one-step term is part of the window) and
// a_n bounded by the domain diameter. Requires a trace with window >= 2.
StageResult cauchy_check(const IterationTrace& trace,
                         double tail_fraction = kDefaultTailFraction,
                         double tol = kDiagnosticTol);

// Runs the solver from every start and compares the returned points; passes
// when all agree within 10 * tol at every atom. Any non-convergent start
// makes the comparison inconclusive with that start flagged. Throws
// PreconditionError unless at least two distinct starts are given. The
// individual runs are handed back through `runs` when requested.
StageResult uniqueness_cross_check(const RandomOperator& f,
                                   const std::vector<FibrePoint>& starts, double tol,
                                   int max_iter, int window = kDefaultWindow,
                                   std::vector<FixedPointResult>* runs = nullptr);

struct CutoffRow {
    double epsilon = 0.0;
    double lambda = 0.0;
    int cutoff = 0;
    bool within_range = false;
};

// For each (epsilon, lambda), the first stored index from which every later
// iterate stays within epsilon of z on an atom set of probability at least
// 1 - lambda. Distances are recomputed from the stored iterates.
std::vector<CutoffRow> epsilon_lambda_report(const ProbSpace& space,
                                             const IterationTrace& trace, const FibrePoint& z,
                                             const std::vector<double>& epsilons,
                                             const std::vector<double>& lambdas);

// Entrywise audit of the two-step orbit inequality
//   d_{n+m+1} <= Psi_m(max{d_n, d_{n+1}})   for m >= 1
// on the orbit of x0 up to step index n_max, reporting the worst margin
// found (negative margin = violation).
StageResult orbit_inequality_audit(const RandomOperator& f, const FibrePoint& x0,
                                   const BoundSequence& B, int n_max, double slack = 1e-9);

}  // namespace randfix

#endif
