#include "randfix/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace randfix {

const char* stop_reason_name(StopReason r) {
    return r == StopReason::converged ? "converged" : "max_iter_reached";
}

namespace {

IterationTrace build_trace(const RandomOperator& f, std::vector<FibrePoint> iterates,
                           const std::vector<Eigen::VectorXd>& step_rows, double tol,
                           int window, int iterations, StopReason stop) {
    IterationTrace trace;
    const int rows = static_cast<int>(step_rows.size());
    const int atoms = f.domain().atoms();

    trace.steps.resize(rows, atoms);
    for (int n = 0; n < rows; ++n) trace.steps.row(n) = step_rows[n].transpose();

    // a_n starts from its own one-step term, copied bitwise from the step
    // row, so a_n >= d_n holds exactly and not just within rounding.
    trace.window_sup = trace.steps;
    const int last = static_cast<int>(iterates.size()) - 1;
    for (int n = 0; n < rows; ++n) {
        const int reach = std::min(window, last - n);
        for (int p = 2; p <= reach; ++p) {
            const Eigen::VectorXd d = block_distance(iterates[n], iterates[n + p]).values();
            trace.window_sup.row(n) = trace.window_sup.row(n).cwiseMax(d.transpose());
        }
    }

    trace.diam_bound.resize(atoms);
    for (int a = 0; a < atoms; ++a)
        trace.diam_bound[a] = region_diameter(f.domain().region(a));

    trace.iterates = std::move(iterates);
    trace.tol = tol;
    trace.window = window;
    trace.iterations = iterations;
    trace.stop = stop;
    return trace;
}

}  // namespace

FixedPointResult picard_solve(const RandomOperator& f, const FibrePoint& x0, double tol,
                              int max_iter, int window) {
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw DomainError("solver tolerance must be finite and positive");
    if (max_iter < 0) throw DomainError("max_iter must be nonnegative");
    if (window < 1) throw DomainError("window must be at least 1");
    require_member(f.domain(), x0);

    std::vector<FibrePoint> xs;
    xs.reserve(16);
    xs.push_back(x0);
    xs.push_back(apply(f, x0));

    std::vector<Eigen::VectorXd> steps;
    steps.push_back(block_distance(xs[0], xs[1]).values());

    int accepted = -1;
    if (steps[0].maxCoeff() <= tol) {
        accepted = 0;
    } else {
        for (int n = 1; n <= max_iter; ++n) {
            xs.push_back(apply(f, xs[n]));
            steps.push_back(block_distance(xs[n], xs[n + 1]).values());
            if (steps[n - 1].maxCoeff() <= tol && steps[n].maxCoeff() <= tol) {
                accepted = n;
                break;
            }
        }
    }

    const bool converged = accepted >= 0;
    const int K = converged ? accepted : static_cast<int>(steps.size()) - 1;

    FixedPointResult result;
    result.z = xs[K];
    result.residual = L0Value(steps[K]);
    result.iterations = K;
    result.trace =
        build_trace(f, std::move(xs), steps, tol, window, K,
                    converged ? StopReason::converged : StopReason::max_iter_reached);
    return result;
}

StageResult adjacent_distance_check(const IterationTrace& trace, double tail_fraction,
                                    double tol) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw DomainError("tail fraction must lie in (0, 1)");
    StageResult stage;
    stage.id = "adjacent_distance_check";

    const int rows = trace.rows();
    if (rows < 2) {
        stage.verdict = Verdict::inconclusive;
        stage.note("trace too short for a tail estimate");
        return stage;
    }

    const int w = std::max(1, static_cast<int>(std::floor(rows * tail_fraction)));
    const Eigen::RowVectorXd r_hat = trace.steps.bottomRows(w).colwise().maxCoeff();
    for (int a = 0; a < trace.atom_count(); ++a)
        if (r_hat[a] > tol)
            stage.fail_with({"adjacent_tail", a, -1, rows - w, r_hat[a], tol, tol});

    nlohmann::json per_atom = nlohmann::json::array();
    for (int a = 0; a < trace.atom_count(); ++a) per_atom.push_back(r_hat[a]);
    stage.details = {{"r_hat", per_atom}, {"tail_rows", w}, {"tol", tol}};
    return stage;
}

StageResult cauchy_check(const IterationTrace& trace, double tail_fraction, double tol) {
    if (trace.window < 2)
        throw PreconditionError("cauchy check needs a trace recorded with window >= 2");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw DomainError("tail fraction must lie in (0, 1)");
    StageResult stage;
    stage.id = "cauchy_check";

    const int rows = trace.rows();
    const int atoms = trace.atom_count();
    for (int n = 0; n < rows; ++n) {
        for (int a = 0; a < atoms; ++a) {
            if (trace.window_sup(n, a) < trace.steps(n, a))
                stage.fail_with({"window_below_step", a, -1, n, trace.window_sup(n, a),
                                 trace.steps(n, a), 0.0});
            if (trace.window_sup(n, a) > trace.diam_bound[a] + 1e-9)
                stage.fail_with({"window_exceeds_diameter", a, -1, n, trace.window_sup(n, a),
                                 trace.diam_bound[a], 1e-9});
        }
    }

    const int w = std::max(1, static_cast<int>(std::floor(rows * tail_fraction)));
    const Eigen::RowVectorXd L_hat = trace.window_sup.bottomRows(w).colwise().maxCoeff();
    for (int a = 0; a < atoms; ++a)
        if (L_hat[a] > tol)
            stage.fail_with({"cauchy_tail", a, -1, rows - w, L_hat[a], tol, tol});

    nlohmann::json per_atom = nlohmann::json::array();
    for (int a = 0; a < atoms; ++a) per_atom.push_back(L_hat[a]);
    stage.details = {{"L_hat", per_atom}, {"tail_rows", w}, {"tol", tol},
                     {"window", trace.window}};
    return stage;
}

StageResult uniqueness_cross_check(const RandomOperator& f,
                                   const std::vector<FibrePoint>& starts, double tol,
                                   int max_iter, int window,
                                   std::vector<FixedPointResult>* runs) {
    if (starts.size() < 2)
        throw PreconditionError("uniqueness cross-check needs at least two starts");
    bool distinct = false;
    for (std::size_t i = 0; i + 1 < starts.size() && !distinct; ++i)
        for (std::size_t j = i + 1; j < starts.size() && !distinct; ++j)
            distinct = block_distance(starts[i], starts[j]).max() > 0.0;
    if (!distinct)
        throw PreconditionError("uniqueness cross-check needs at least two distinct starts");

    StageResult stage;
    stage.id = "uniqueness_cross_check";

    std::vector<FixedPointResult> local;
    std::vector<FixedPointResult>& results = runs ? *runs : local;
    results.clear();
    nlohmann::json iteration_counts = nlohmann::json::array();
    bool all_converged = true;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        results.push_back(picard_solve(f, starts[k], tol, max_iter, window));
        iteration_counts.push_back(results.back().iterations);
        if (!results.back().converged()) {
            all_converged = false;
            stage.note("start " + std::to_string(k) + " did not converge within max_iter");
        }
    }

    const int atoms = f.domain().atoms();
    Eigen::VectorXd spread = Eigen::VectorXd::Zero(atoms);
    if (all_converged) {
        for (std::size_t i = 0; i + 1 < results.size(); ++i)
            for (std::size_t j = i + 1; j < results.size(); ++j)
                spread = spread.cwiseMax(
                    block_distance(results[i].z, results[j].z).values());
        const double agree = 10.0 * tol;
        for (int a = 0; a < atoms; ++a)
            if (spread[a] > agree)
                stage.fail_with({"fixed_point_spread", a, -1, -1, spread[a], agree, agree});
    } else {
        stage.verdict = Verdict::inconclusive;
    }

    nlohmann::json per_atom = nlohmann::json::array();
    for (int a = 0; a < atoms; ++a) per_atom.push_back(spread[a]);
    stage.details = {{"starts", starts.size()},
                     {"iterations", iteration_counts},
                     {"spread", per_atom},
                     {"agreement_tol", 10.0 * tol}};
    return stage;
}

std::vector<CutoffRow> epsilon_lambda_report(const ProbSpace& space,
                                             const IterationTrace& trace, const FibrePoint& z,
                                             const std::vector<double>& epsilons,
                                             const std::vector<double>& lambdas) {
    if (trace.iterates.empty()) throw PreconditionError("trace holds no iterates");
    if (space.atom_count() != z.atoms())
        throw ShapeError("probability space and point disagree on atom count");
    for (double e : epsilons)
        if (!(e > 0.0)) throw DomainError("epsilons must be positive");
    for (double l : lambdas)
        if (!(l >= 0.0 && l < 1.0)) throw DomainError("lambdas must lie in [0, 1)");

    std::vector<L0Value> dists;
    dists.reserve(trace.iterates.size());
    for (const FibrePoint& x : trace.iterates) dists.push_back(block_distance(x, z));

    std::vector<CutoffRow> rows;
    rows.reserve(epsilons.size() * lambdas.size());
    for (double eps : epsilons)
        for (double lam : lambdas) {
            const ConvergenceScan scan = converges_in_probability(space, dists, eps, lam);
            rows.push_back({eps, lam, scan.cutoff, scan.verdict});
        }
    return rows;
}

StageResult orbit_inequality_audit(const RandomOperator& f, const FibrePoint& x0,
                                   const BoundSequence& B, int n_max, double slack) {
    if (n_max < 2) throw DomainError("orbit audit needs depth at least 2");
    if (B.atoms() != f.domain().atoms())
        throw ShapeError("bound sequence and operator disagree on atom count");
    require_member(f.domain(), x0);

    const int atoms = f.domain().atoms();
    Eigen::MatrixXd d(n_max + 1, atoms);
    FibrePoint x = x0;
    for (int n = 0; n <= n_max; ++n) {
        const FibrePoint next = apply(f, x);
        d.row(n) = block_distance(x, next).values().transpose();
        x = next;
    }

    StageResult stage;
    stage.id = "orbit_inequality_audit";
    const std::size_t report_cap = 32;
    std::size_t suppressed = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    long long checked = 0;
    for (int n = 0; n + 2 <= n_max; ++n) {
        for (int m = 1; n + m + 1 <= n_max; ++m) {
            for (int a = 0; a < atoms; ++a) {
                const double t = std::max(d(n, a), d(n + 1, a));
                const double lhs = d(n + m + 1, a);
                const double rhs = B.evaluate(m, a, t);
                worst_margin = std::min(worst_margin, rhs - lhs);
                ++checked;
                if (lhs > rhs + slack) {
                    if (stage.violations.size() < report_cap)
                        stage.fail_with({"orbit_inequality", a, m, n, lhs, rhs, slack});
                    else {
                        stage.verdict = Verdict::fail;
                        ++suppressed;
                    }
                }
            }
        }
    }
    if (suppressed > 0)
        stage.note(std::to_string(suppressed) + " further violations suppressed");
    stage.details = {{"depth", n_max},
                     {"checked", checked},
                     {"worst_margin", worst_margin},
                     {"slack", slack}};
    return stage;
}

}  // namespace randfix
