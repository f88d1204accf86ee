#ifndef RANDFIX_GAUGE_HPP
#define RANDFIX_GAUGE_HPP

// Comparison gauges and the machinery built on top of them: grid-based
// hypothesis checks, the running-supremum majorant, iteration-indexed bound
// sequences with decaying perturbations, and the tail-sup exchange oracle.
// Construction is permissive on purpose; whether a gauge actually satisfies
// the contraction-comparison hypotheses is decided by verify_gauge, so that
// deliberately broken gauges can be built and certified red.

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "randfix/prob_space.hpp"
#include "randfix/report.hpp"

namespace randfix {

inline constexpr double kGaugeCompareTol = 1e-9;  // absolute, for gauge inequalities
inline constexpr double kRightProbeTol = 1e-6;    // dyadic right-probe budget
inline constexpr int kRightProbeDepth = 20;       // probes at t + 2^-k, k up to this
inline constexpr int kDefaultGridDensity = 1024;

struct LinearGauge {
    double alpha = 0.5;  // t -> alpha * t
};

struct RationalGauge {};  // t -> t / (1 + t)

struct CappedGauge {
    double alpha = 0.5;  // t -> min(alpha * t, cap)
    double cap = 1.0;
};

// Knots (t_i, v_i) with t_0 = 0. In step mode the value is v_i on
// [t_i, t_{i+1}); in ramp mode values interpolate linearly between knots.
// A repeated abscissa encodes a jump, and evaluation at the jump point takes
// the rightmost knot's value, keeping evaluation right-continuous there.
struct PiecewiseGauge {
    std::vector<double> knot_t;
    std::vector<double> knot_v;
    bool step = false;
};

class GaugeSpec {
  public:
    static GaugeSpec linear(double alpha);
    static GaugeSpec rational();
    static GaugeSpec capped(double alpha, double cap);
    static GaugeSpec piecewise(std::vector<double> knot_t, std::vector<double> knot_v,
                               bool step);

    double operator()(double t) const;
    const char* family() const;

  private:
    using Family = std::variant<LinearGauge, RationalGauge, CappedGauge, PiecewiseGauge>;
    explicit GaugeSpec(Family f) : family_(std::move(f)) {}
    Family family_;
};

// Uniformly spaced strictly positive abscissas ending at hi:
// hi * (i + 1) / count for i = 0 .. count - 1.
std::vector<double> uniform_grid(double hi, int count);

// Grid-based audit of the comparison-gauge hypotheses on an increasing grid
// of positive abscissas: nonnegativity, monotonicity between neighbours,
// psi(t) < t, psi(0) = 0, and a dyadic right-probe at each grid point. The
// probe contributes evidence only, so a clean run reports probe-pass.
StageResult verify_gauge(const GaugeSpec& psi, const std::vector<double>& grid,
                         double tol = kGaugeCompareTol, int probe_depth = kRightProbeDepth,
                         double probe_tol = kRightProbeTol);

// Running supremum sup_{0<=s<=t} psi(s), computed over a uniform grid of
// grid_density points on [0, t] and refined once by re-gridding around the
// arg-max. Exact for nondecreasing gauges (the grid contains t itself).
double majorant(const GaugeSpec& psi, double t, int grid_density = kDefaultGridDensity);

// Checks the majorant's advertised properties over the given grid:
// nondecreasing, value 0 at 0, bounded by the identity with strict gap off
// zero, and right-continuity via dyadic probes.
StageResult verify_majorant_props(const GaugeSpec& psi, const std::vector<double>& grid,
                                  int grid_density = kDefaultGridDensity,
                                  double tol = kGaugeCompareTol,
                                  int probe_depth = kRightProbeDepth,
                                  double probe_tol = kRightProbeTol);

// Tail-sup form of the exchange inequality sup g(a_n) <= g(sup a_n) over the
// trailing window of a nonnegative sequence.
StageResult limsup_exchange_oracle(const std::vector<double>& seq, const GaugeSpec& psi,
                                   double tail_fraction = 0.25,
                                   int grid_density = kDefaultGridDensity,
                                   double tol = kGaugeCompareTol);

// ---------------------------------------------------------------------------
// Iteration-indexed bounds

// Per-atom decay schedule c_n -> 0, indexed from n = 0.
class DecaySchedule {
  public:
    enum class Kind { zero, harmonic, geometric };

    static DecaySchedule none(int atoms);
    // c_n = scale / (n + 1)
    static DecaySchedule harmonic(Eigen::VectorXd scale);
    // c_n = scale * ratio^n
    static DecaySchedule geometric(Eigen::VectorXd scale, Eigen::VectorXd ratio);

    double value(int n, int atom) const;
    Kind kind() const { return kind_; }
    int atoms() const { return static_cast<int>(scale_.size()); }
    const Eigen::VectorXd& scale() const { return scale_; }
    const Eigen::VectorXd& ratio() const { return ratio_; }

  private:
    DecaySchedule(Kind k, Eigen::VectorXd scale, Eigen::VectorXd ratio);
    Kind kind_;
    Eigen::VectorXd scale_;
    Eigen::VectorXd ratio_;
};

enum class Perturbation { additive, multiplicative };

// The sequence of comparison bounds an orbit is audited against: a base
// gauge perturbed per atom by a decaying schedule, either added on top or
// applied as a factor (1 + c_n).
class BoundSequence {
  public:
    BoundSequence(GaugeSpec base, Perturbation mode, DecaySchedule schedule);

    double evaluate(int n, int atom, double t) const;
    const GaugeSpec& base() const { return base_; }
    Perturbation mode() const { return mode_; }
    const DecaySchedule& schedule() const { return schedule_; }
    int atoms() const { return schedule_.atoms(); }

  private:
    GaugeSpec base_;
    Perturbation mode_;
    DecaySchedule schedule_;
};

double evaluate_bound(const BoundSequence& B, int n, int atom, double t);

struct UniformConvergenceRow {
    double epsilon = 0.0;
    int n = -1;  // certified index, or -1 when none exists up to n_max
};

// For each requested epsilon, the smallest n with
//   sup_{t in grid on [0, D]} |Psi_n(atom, t) - psi(t)| <= epsilon
// simultaneously at every atom. Missing certificates fail the stage. Every
// probed Psi_n must be nondecreasing on the grid; a violation there is an
// invalid-sequence error, not a stage failure.
StageResult local_uniform_convergence_check(const BoundSequence& B, double interval_sup,
                                            const std::vector<double>& epsilons, int n_max,
                                            int grid_density = kDefaultGridDensity,
                                            double tol = kGaugeCompareTol,
                                            std::vector<UniformConvergenceRow>* rows = nullptr);

// ---------------------------------------------------------------------------
// Indexed gauge families (n >= 1) converging to a limit gauge

class GaugeSequence {
  public:
    enum class Kind { constant, additive_harmonic, additive_geometric };

    GaugeSequence(GaugeSpec limit, Kind kind, double scale, double ratio);

    double evaluate(int n, double t) const;  // n >= 1
    const GaugeSpec& limit() const { return limit_; }
    Kind kind() const { return kind_; }
    double scale() const { return scale_; }
    double ratio() const { return ratio_; }

  private:
    GaugeSpec limit_;
    Kind kind_;
    double scale_;
    double ratio_;
};

}  // namespace randfix

#endif
