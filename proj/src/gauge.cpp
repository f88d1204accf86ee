#include "randfix/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace randfix {

// ---------------------------------------------------------------------------
// GaugeSpec

GaugeSpec GaugeSpec::linear(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw DomainError("linear gauge slope must be finite and nonnegative");
    return GaugeSpec(LinearGauge{alpha});
}

GaugeSpec GaugeSpec::rational() { return GaugeSpec(RationalGauge{}); }

GaugeSpec GaugeSpec::capped(double alpha, double cap) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw DomainError("capped gauge slope must be finite and nonnegative");
    if (!(cap > 0.0) || !std::isfinite(cap))
        throw DomainError("capped gauge cap must be finite and positive");
    return GaugeSpec(CappedGauge{alpha, cap});
}

GaugeSpec GaugeSpec::piecewise(std::vector<double> knot_t, std::vector<double> knot_v,
                               bool step) {
    if (knot_t.empty() || knot_t.size() != knot_v.size())
        throw ShapeError("piecewise gauge needs matching, nonempty knot lists");
    if (knot_t.front() != 0.0)
        throw DomainError("piecewise gauge must anchor its first knot at t = 0");
    for (std::size_t i = 0; i < knot_t.size(); ++i) {
        if (!std::isfinite(knot_t[i]) || !std::isfinite(knot_v[i]))
            throw DomainError("piecewise gauge knot is not finite");
        if (knot_v[i] < 0.0) throw DomainError("piecewise gauge value is negative");
        if (i > 0 && knot_t[i] < knot_t[i - 1])
            throw DomainError("piecewise gauge abscissas must be nondecreasing");
    }
    return GaugeSpec(PiecewiseGauge{std::move(knot_t), std::move(knot_v), step});
}

double GaugeSpec::operator()(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("gauges are defined on [0, inf)");
    return std::visit(
        [t](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LinearGauge>) {
                return g.alpha * t;
            } else if constexpr (std::is_same_v<T, RationalGauge>) {
                return t / (1.0 + t);
            } else if constexpr (std::is_same_v<T, CappedGauge>) {
                return std::min(g.alpha * t, g.cap);
            } else {
                // Last knot with abscissa <= t; ties resolved to the
                // rightmost, so jump points evaluate to their right value.
                const auto& ts = g.knot_t;
                const auto& vs = g.knot_v;
                const std::size_t after =
                    std::upper_bound(ts.begin(), ts.end(), t) - ts.begin();
                const std::size_t i = after - 1;  // ts.front() == 0 <= t
                if (after == ts.size() || ts[i] == t || g.step) return vs[i];
                const double span = ts[after] - ts[i];
                const double w = (t - ts[i]) / span;
                return vs[i] + w * (vs[after] - vs[i]);
            }
        },
        family_);
}

const char* GaugeSpec::family() const {
    struct Namer {
        const char* operator()(const LinearGauge&) const { return "linear"; }
        const char* operator()(const RationalGauge&) const { return "rational"; }
        const char* operator()(const CappedGauge&) const { return "capped"; }
        const char* operator()(const PiecewiseGauge&) const { return "piecewise"; }
    };
    return std::visit(Namer{}, family_);
}

// ---------------------------------------------------------------------------
// Grid checks

namespace {

void require_positive_increasing(const std::vector<double>& grid) {
    if (grid.empty()) throw PreconditionError("grid must be nonempty");
    double prev = 0.0;
    for (double t : grid) {
        if (!(t > prev))
            throw PreconditionError("grid must be strictly increasing and positive");
        prev = t;
    }
}

}  // namespace

std::vector<double> uniform_grid(double hi, int count) {
    if (!(hi > 0.0) || !std::isfinite(hi))
        throw DomainError("grid endpoint must be finite and positive");
    if (count < 1) throw PreconditionError("grid needs at least one point");
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i)
        grid[i] = hi * static_cast<double>(i + 1) / static_cast<double>(count);
    return grid;
}

StageResult verify_gauge(const GaugeSpec& psi, const std::vector<double>& grid, double tol,
                         int probe_depth, double probe_tol) {
    require_positive_increasing(grid);
    StageResult stage;
    stage.id = "verify_gauge";

    const double at_zero = psi(0.0);
    if (std::abs(at_zero) > tol)
        stage.fail_with({"zero_value", -1, -1, -1, at_zero, 0.0, tol});

    const std::size_t report_cap = 32;  // keep reports bounded on mass failures
    std::size_t suppressed = 0;
    double prev_value = at_zero;
    const double probe_step = std::ldexp(1.0, -probe_depth);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const double v = psi(t);
        auto record = [&](const char* check, double left, double right) {
            if (stage.violations.size() < report_cap)
                stage.fail_with({check, -1, static_cast<std::int64_t>(i), -1, left, right, tol});
            else {
                stage.verdict = Verdict::fail;
                ++suppressed;
            }
        };
        if (v < -tol) record("nonnegative", v, 0.0);
        if (v < prev_value - tol) record("nondecreasing", v, prev_value);
        if (v >= t - tol) record("below_identity", v, t);
        const double right = psi(t + probe_step);
        if (right > v + probe_tol) record("right_probe", right, v);
        prev_value = v;
    }

    if (suppressed > 0)
        stage.note(std::to_string(suppressed) + " further violations suppressed");
    if (stage.verdict == Verdict::pass) {
        stage.verdict = Verdict::probe_pass;
        stage.note("semicontinuity checked by dyadic probes only");
    }
    stage.details = {{"grid_points", grid.size()},
                     {"probe_depth", probe_depth},
                     {"probe_tol", probe_tol}};
    return stage;
}

double majorant(const GaugeSpec& psi, double t, int grid_density) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("majorant argument must be finite and nonnegative");
    if (grid_density < 2) throw PreconditionError("grid density must be at least 2");
    if (t == 0.0) return psi(0.0);

    const int n = grid_density;
    double best = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < n; ++i) {
        const double s = t * static_cast<double>(i) / static_cast<double>(n - 1);
        const double v = psi(s);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    // One refinement pass: re-grid the bracket around the arg-max at the
    // same density. Keeps endpoint evaluations, so nondecreasing gauges
    // still come out exact at s = t.
    const double lo = t * static_cast<double>(std::max(best_i - 1, 0)) / (n - 1);
    const double hi = t * static_cast<double>(std::min(best_i + 1, n - 1)) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double s = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        best = std::max(best, psi(s));
    }
    return best;
}

StageResult verify_majorant_props(const GaugeSpec& psi, const std::vector<double>& grid,
                                  int grid_density, double tol, int probe_depth,
                                  double probe_tol) {
    require_positive_increasing(grid);
    StageResult stage;
    stage.id = "verify_majorant_props";

    const double g_zero = majorant(psi, 0.0, grid_density);
    if (std::abs(g_zero) > tol)
        stage.fail_with({"zero_value", -1, -1, -1, g_zero, 0.0, tol});

    const std::size_t report_cap = 32;
    std::size_t suppressed = 0;
    const double probe_step = std::ldexp(1.0, -probe_depth);
    double prev = g_zero;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const double g = majorant(psi, t, grid_density);
        auto record = [&](const char* check, double left, double right) {
            if (stage.violations.size() < report_cap)
                stage.fail_with({check, -1, static_cast<std::int64_t>(i), -1, left, right, tol});
            else {
                stage.verdict = Verdict::fail;
                ++suppressed;
            }
        };
        if (g < prev - tol) record("nondecreasing", g, prev);
        if (g < psi(t) - tol) record("dominates_gauge", g, psi(t));
        if (g >= t - tol) record("below_identity", g, t);
        const double right = majorant(psi, t + probe_step, grid_density);
        if (right > g + probe_tol) record("right_probe", right, g);
        prev = g;
    }

    if (suppressed > 0)
        stage.note(std::to_string(suppressed) + " further violations suppressed");
    if (stage.verdict == Verdict::pass) {
        stage.verdict = Verdict::probe_pass;
        stage.note("right-continuity checked by dyadic probes only");
    }
    stage.details = {{"grid_points", grid.size()},
                     {"grid_density", grid_density},
                     {"probe_depth", probe_depth}};
    return stage;
}

StageResult limsup_exchange_oracle(const std::vector<double>& seq, const GaugeSpec& psi,
                                   double tail_fraction, int grid_density, double tol) {
    if (seq.empty()) throw PreconditionError("sequence must be nonempty");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw DomainError("tail fraction must lie in (0, 1]");
    for (double a : seq)
        if (!(a >= 0.0) || !std::isfinite(a))
            throw DomainError("sequence entries must be finite and nonnegative");

    const std::size_t window = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(seq.size() * tail_fraction)));
    const std::size_t from = seq.size() - window;

    double lhs = 0.0;  // tail-sup of g(a_n)
    double arg = 0.0;  // tail-sup of a_n
    for (std::size_t i = from; i < seq.size(); ++i) {
        lhs = std::max(lhs, majorant(psi, seq[i], grid_density));
        arg = std::max(arg, seq[i]);
    }
    const double rhs = majorant(psi, arg, grid_density);

    StageResult stage;
    stage.id = "limsup_exchange_oracle";
    if (lhs > rhs + tol)
        stage.fail_with({"limsup_exchange", -1, -1, -1, lhs, rhs, tol});
    stage.details = {{"length", seq.size()},
                     {"window", window},
                     {"tail_sup_of_g", lhs},
                     {"g_of_tail_sup", rhs}};
    return stage;
}

// ---------------------------------------------------------------------------
// DecaySchedule / BoundSequence

DecaySchedule::DecaySchedule(Kind k, Eigen::VectorXd scale, Eigen::VectorXd ratio)
    : kind_(k), scale_(std::move(scale)), ratio_(std::move(ratio)) {
    if (scale_.size() == 0) throw ShapeError("schedule needs at least one atom");
    for (Eigen::Index a = 0; a < scale_.size(); ++a)
        if (!(scale_[a] >= 0.0) || !std::isfinite(scale_[a]))
            throw DomainError("schedule scale must be finite and nonnegative");
    if (kind_ == Kind::geometric) {
        if (ratio_.size() != scale_.size())
            throw ShapeError("geometric schedule needs one ratio per atom");
        for (Eigen::Index a = 0; a < ratio_.size(); ++a)
            if (!(ratio_[a] >= 0.0 && ratio_[a] < 1.0))
                throw DomainError("geometric ratio must lie in [0, 1)");
    }
}

DecaySchedule DecaySchedule::none(int atoms) {
    return DecaySchedule(Kind::zero, Eigen::VectorXd::Zero(atoms), Eigen::VectorXd());
}

DecaySchedule DecaySchedule::harmonic(Eigen::VectorXd scale) {
    return DecaySchedule(Kind::harmonic, std::move(scale), Eigen::VectorXd());
}

DecaySchedule DecaySchedule::geometric(Eigen::VectorXd scale, Eigen::VectorXd ratio) {
    return DecaySchedule(Kind::geometric, std::move(scale), std::move(ratio));
}

double DecaySchedule::value(int n, int atom) const {
    if (n < 0) throw DomainError("schedule index must be nonnegative");
    if (atom < 0 || atom >= atoms()) throw ShapeError("schedule atom out of range");
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::harmonic: return scale_[atom] / static_cast<double>(n + 1);
        case Kind::geometric: return scale_[atom] * std::pow(ratio_[atom], n);
    }
    return 0.0;
}

BoundSequence::BoundSequence(GaugeSpec base, Perturbation mode, DecaySchedule schedule)
    : base_(std::move(base)), mode_(mode), schedule_(std::move(schedule)) {}

double BoundSequence::evaluate(int n, int atom, double t) const {
    const double c = schedule_.value(n, atom);
    const double v = base_(t);
    return mode_ == Perturbation::additive ? v + c : (1.0 + c) * v;
}

double evaluate_bound(const BoundSequence& B, int n, int atom, double t) {
    return B.evaluate(n, atom, t);
}

StageResult local_uniform_convergence_check(const BoundSequence& B, double interval_sup,
                                            const std::vector<double>& epsilons, int n_max,
                                            int grid_density, double tol,
                                            std::vector<UniformConvergenceRow>* rows) {
    if (!(interval_sup > 0.0)) throw DomainError("interval supremum must be positive");
    if (n_max < 0) throw DomainError("n_max must be nonnegative");
    if (epsilons.empty()) throw PreconditionError("need at least one epsilon");
    for (double e : epsilons)
        if (!(e > 0.0)) throw DomainError("epsilons must be positive");

    StageResult stage;
    stage.id = "local_uniform_convergence_check";

    std::vector<double> grid(grid_density);
    for (int i = 0; i < grid_density; ++i)
        grid[i] = interval_sup * static_cast<double>(i) / static_cast<double>(grid_density - 1);

    // Deviation from the base gauge, uniform over the grid and the atoms.
    auto deviation = [&](int n) {
        double worst = 0.0;
        for (int atom = 0; atom < B.atoms(); ++atom) {
            double prev = -std::numeric_limits<double>::infinity();
            for (double t : grid) {
                const double v = B.evaluate(n, atom, t);
                if (v < prev - tol)
                    throw PreconditionError(
                        "bound sequence is not nondecreasing on the grid at n = " +
                        std::to_string(n));
                prev = v;
                worst = std::max(worst, std::abs(v - B.base()(t)));
            }
        }
        return worst;
    };

    std::vector<double> sorted = epsilons;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    nlohmann::json table = nlohmann::json::array();
    std::size_t next = 0;
    std::vector<UniformConvergenceRow> found(sorted.size());
    double last_dev = 0.0;
    for (int n = 0; n <= n_max && next < sorted.size(); ++n) {
        last_dev = deviation(n);
        while (next < sorted.size() && last_dev <= sorted[next] + tol) {
            found[next] = {sorted[next], n};
            ++next;
        }
    }
    for (std::size_t k = next; k < sorted.size(); ++k) {
        found[k] = {sorted[k], -1};
        stage.fail_with({"uniform_convergence", -1, -1, n_max, last_dev, sorted[k], tol});
    }
    for (const auto& row : found)
        table.push_back({{"epsilon", row.epsilon}, {"n", row.n}});

    stage.details = {{"interval_sup", interval_sup},
                     {"n_max", n_max},
                     {"grid_density", grid_density},
                     {"certified", table}};
    if (rows) *rows = std::move(found);
    return stage;
}

// ---------------------------------------------------------------------------
// GaugeSequence

GaugeSequence::GaugeSequence(GaugeSpec limit, Kind kind, double scale, double ratio)
    : limit_(std::move(limit)), kind_(kind), scale_(scale), ratio_(ratio) {
    if (!(scale_ >= 0.0) || !std::isfinite(scale_))
        throw DomainError("gauge sequence scale must be finite and nonnegative");
    if (kind_ == Kind::additive_geometric && !(ratio_ >= 0.0 && ratio_ < 1.0))
        throw DomainError("gauge sequence ratio must lie in [0, 1)");
}

double GaugeSequence::evaluate(int n, double t) const {
    if (n < 1) throw DomainError("gauge sequences are indexed from n = 1");
    switch (kind_) {
        case Kind::constant: return limit_(t);
        case Kind::additive_harmonic: return limit_(t) + scale_ / static_cast<double>(n);
        case Kind::additive_geometric: return limit_(t) + scale_ * std::pow(ratio_, n);
    }
    return limit_(t);
}

}  // namespace randfix
