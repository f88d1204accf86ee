#ifndef RANDFIX_OPERATORS_HPP
#define RANDFIX_OPERATORS_HPP

// The operator catalog. Every operator is defined fibre-first: a family of
// per-atom maps acting on the blocks of a section, sharing a fibre set as
// domain. apply() re-checks that images stay inside the domain, so a map
// that leaks out of its region is caught at the first offending call.

#include <memory>
#include <variant>
#include <vector>

#include "randfix/fibre.hpp"
#include "randfix/report.hpp"
#include "randfix/sampling.hpp"

namespace randfix {

struct ScaleParams {
    Eigen::VectorXd alpha;  // one factor per atom, each in [0, 1)
};

struct ShiftedScaleParams {
    Eigen::VectorXd alpha;
    Eigen::MatrixXd targets;  // row a: the point atom a contracts toward
};

struct AffineParams {
    std::vector<Eigen::MatrixXd> maps;  // one d x d matrix per atom
    Eigen::MatrixXd offsets;            // row a: offset at atom a
};

struct AntipodeParams {};

struct TableParams {
    std::vector<std::vector<int>> image_index;  // per atom: image of region point i
};

class RandomOperator {
  public:
    static RandomOperator scale(std::shared_ptr<const FibreSet> domain, Eigen::VectorXd alpha);
    static RandomOperator shifted_scale(std::shared_ptr<const FibreSet> domain,
                                        Eigen::VectorXd alpha, Eigen::MatrixXd targets);
    static RandomOperator affine(std::shared_ptr<const FibreSet> domain,
                                 std::vector<Eigen::MatrixXd> maps, Eigen::MatrixXd offsets);
    static RandomOperator antipode(std::shared_ptr<const FibreSet> domain);
    static RandomOperator table(std::shared_ptr<const FibreSet> domain,
                                std::vector<std::vector<int>> image_index);

    const FibreSet& domain() const { return *domain_; }
    std::shared_ptr<const FibreSet> domain_ptr() const { return domain_; }
    const char* family() const;

    // The raw per-atom map, without the domain re-checks of apply().
    Eigen::VectorXd fibre_apply(int atom, const Eigen::VectorXd& v) const;

  private:
    using Params =
        std::variant<ScaleParams, ShiftedScaleParams, AffineParams, AntipodeParams, TableParams>;
    RandomOperator(std::shared_ptr<const FibreSet> domain, Params params);
    void spot_check_self_map() const;

    std::shared_ptr<const FibreSet> domain_;
    Params params_;
};

// Applies the operator blockwise. The input must belong to the domain
// (MembershipError otherwise) and the image is re-checked (SelfMapError).
FibrePoint apply(const RandomOperator& f, const FibrePoint& x);

// n-fold composition; n = 0 returns x unchanged.
FibrePoint iterate(const RandomOperator& f, const FibrePoint& x, int n);

// Compatibility of the operator with masking by an event: masking the input
// and masking the output commute. When the zero section is declared in the
// domain and fixed by the operator the comparison runs unmasked; otherwise
// both sides are masked consistently (or the check is skipped entirely when
// the zero section is not in the domain), and the report says which mode ran.
StageResult check_local_property(const RandomOperator& f,
                                 const std::vector<FibrePoint>& samples,
                                 const std::vector<AtomEvent>& events,
                                 double tol = 1e-9);

// Compatibility with splicing along partitions: applying the operator to a
// spliced section equals splicing the per-piece images.
StageResult check_sigma_compat(const RandomOperator& f, const ProbSpace& space,
                               const std::vector<std::vector<AtomEvent>>& partitions,
                               const std::vector<std::vector<FibrePoint>>& point_lists,
                               double tol = 1e-9);

// Samples perturbations of `base` at the given decreasing radii and watches
// whether image displacement shrinks with the radius. A sampling probe, so
// success is reported as probe-pass; atoms where the displacement refuses to
// shrink are failures. Regions too sparse to perturb pass vacuously.
StageResult fibre_continuity_probe(const RandomOperator& f, const FibrePoint& base,
                                   const std::vector<double>& radii, Rng& rng,
                                   int directions = 8);

}  // namespace randfix

#endif
