#ifndef RANDFIX_CHECKER_HPP
#define RANDFIX_CHECKER_HPP

// The certification layer: sampling-based verification of the iterated
// contraction condition against a bound sequence, the reduction from
// iteration-indexed gauge bounds to such a sequence, distance identities at
// fixed points, and the staged audit that strings every hypothesis check
// together in dependency order.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "randfix/gauge.hpp"
#include "randfix/operators.hpp"
#include "randfix/prob_space.hpp"
#include "randfix/quasi_metrics.hpp"
#include "randfix/report.hpp"
#include "randfix/solver.hpp"

namespace randfix {

inline constexpr double kContractionSlack = 1e-9;

// Checks L(f^n x, f^n y) <= Psi_n(U(x, y)) at every atom for 1 <= n <= n_max
// over seeded sample pairs from the domain; when every region is finite the
// pairs are enumerated exhaustively instead. Overshoots within the slack
// tolerance downgrade the verdict to probe-pass rather than fail. The
// sample stream is derived from (seed, sample_label), so two checks given
// the same label and seed see identical pairs.
CertificationReport verify_contraction(const RandomOperator& f, const BoundSequence& B,
                                       int sample_count, int n_max, std::uint64_t seed,
                                       std::string_view sample_label = "verify_contraction");

// Checks the direct iterated bound ||f^n x - f^n y|| <= psi_n(||x - y||)
// for 1 <= n <= n_max on the same kind of sample stream, under the label
// "kirk_samples" so the reduced-bound re-verification can reuse the pairs.
CertificationReport kirk_condition_check(const RandomOperator& f, const GaugeSequence& seq,
                                         int sample_count, int n_max, std::uint64_t seed);

// Index shift psi_{n+1} -> Psi_n, turning an iteration-indexed gauge family
// into a bound sequence constant across atoms. Every probed member must be
// nondecreasing on the grid (PreconditionError otherwise). The shift is
// exact for the supported families: a harmonic tail scale / (n + 1) stays
// harmonic, a geometric tail scale * ratio^n re-enters with its scale
// multiplied by one ratio factor.
BoundSequence kirk_reduce(const GaugeSequence& seq, int atoms,
                          const std::vector<double>& grid, int check_depth = 8);

// At certified fixed points all four operator distances collapse onto
// ||z1 - z2||; checked entrywise with a per-atom allowance of the two
// residuals plus 1e-12. Inputs whose residual exceeds residual_tol raise
// PreconditionError naming the worst atom.
StageResult fixed_point_metric_identities(const RandomOperator& f, const FibrePoint& z1,
                                          const FibrePoint& z2, double residual_tol);

// ---------------------------------------------------------------------------
// Scenario bundle and the staged audit

struct SolveConfig {
    FibrePoint x0;
    double tol = 1e-8;
    int max_iter = 10000;
    int window = kDefaultWindow;
    double tail_fraction = kDefaultTailFraction;
};

struct CertifyConfig {
    int sample_count = 500;
    int n_max = 20;
    std::uint64_t seed = 1;
    int grid_density = kDefaultGridDensity;
    // Shared by the (epsilon, lambda) cutoff tables and the uniform-
    // convergence certificates of the bound sequence.
    std::vector<double> epsilons{0.5, 0.25, 0.1};
    std::vector<double> lambdas{0.1, 0.01};
};

// Everything one scenario file describes, in validated in-memory form.
struct ScenarioBundle {
    ProbSpace space;
    std::shared_ptr<const FibreSet> set;
    RandomOperator f;
    GaugeSpec psi;
    BoundSequence bounds;
    std::optional<GaugeSequence> kirk;
    SolveConfig solve;
    CertifyConfig certify;
    std::string name;
    std::string hash;
};

// Runs the hypothesis checks in dependency order: essential bound, norm
// axioms, masking compatibility, splicing compatibility, continuity probe,
// gauge hypotheses, majorant properties, uniform convergence of the bounds,
// and finally the contraction condition itself. The first failing stage
// halts the pipeline; the stages behind it are reported inconclusive. A
// stage that throws is reported as failed with the exception text.
CertificationReport full_hypothesis_audit(const ScenarioBundle& sc);

}  // namespace randfix

#endif
