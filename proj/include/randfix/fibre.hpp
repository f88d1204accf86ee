#ifndef RANDFIX_FIBRE_HPP
#define RANDFIX_FIBRE_HPP

// Sections of a product of per-atom Euclidean blocks, the module norm taking
// a section to its blockwise length, and region descriptors for the sets the
// operators act on. A FibrePoint stores one d-dimensional block per atom as
// a row of a dense matrix, so "the value of x at atom a" is x.block(a).

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "randfix/prob_space.hpp"
#include "randfix/report.hpp"

namespace randfix {

inline constexpr double kMembershipTol = 1e-10;

class FibrePoint {
  public:
    FibrePoint() = default;
    FibrePoint(int atoms, int dim) : coords_(Eigen::MatrixXd::Zero(atoms, dim)) {}
    explicit FibrePoint(Eigen::MatrixXd coords);

    static FibrePoint zero(int atoms, int dim) { return FibrePoint(atoms, dim); }

    int atoms() const { return static_cast<int>(coords_.rows()); }
    int dim() const { return static_cast<int>(coords_.cols()); }

    Eigen::MatrixXd::ConstRowXpr block(int atom) const { return coords_.row(atom); }
    Eigen::MatrixXd::RowXpr block(int atom) { return coords_.row(atom); }
    const Eigen::MatrixXd& coords() const { return coords_; }
    Eigen::MatrixXd& coords() { return coords_; }

  private:
    Eigen::MatrixXd coords_;
};

// Blockwise Euclidean length, one entry per atom.
L0Value random_norm(const FibrePoint& x);

// Blockwise distance between two sections.
L0Value block_distance(const FibrePoint& x, const FibrePoint& y);

FibrePoint add(const FibrePoint& x, const FibrePoint& y);
FibrePoint subtract(const FibrePoint& x, const FibrePoint& y);

// Module action of a measurable scalar: block a is scaled by xi[a].
FibrePoint scalar_mul(const L0Value& xi, const FibrePoint& x);

// Keep x's blocks on `event`, zero blocks elsewhere.
FibrePoint mask_point(const FibrePoint& x, const AtomEvent& event);

// ---------------------------------------------------------------------------
// Regions

struct BallRegion {
    Eigen::VectorXd center;
    double radius = 0.0;
};

struct BoxRegion {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

struct FiniteRegion {
    std::vector<Eigen::VectorXd> points;
};

using Region = std::variant<BallRegion, BoxRegion, FiniteRegion>;

bool region_contains(const Region& region, const Eigen::VectorXd& v, double tol = kMembershipTol);
Eigen::VectorXd region_project(const Region& region, const Eigen::VectorXd& v);
// Largest block length attainable inside the region.
double region_outer_radius(const Region& region);
// Largest pairwise distance attainable inside the region.
double region_diameter(const Region& region);
bool region_is_finite(const Region& region);

// The set the orbit lives in: one region per atom plus the declared essential
// bound on block lengths. `theta_declared` records whether the scenario
// promises the zero section belongs to the set; masking-based checks need it.
class FibreSet {
  public:
    FibreSet(int dim, std::vector<Region> regions, double essential_bound, bool theta_declared);

    int dim() const { return dim_; }
    int atoms() const { return static_cast<int>(regions_.size()); }
    const Region& region(int atom) const { return regions_[atom]; }
    double essential_bound() const { return essential_bound_; }
    bool theta_declared() const { return theta_declared_; }

    bool all_regions_finite() const;

  private:
    int dim_;
    std::vector<Region> regions_;
    double essential_bound_;
    bool theta_declared_;
};

struct MembershipReport {
    bool ok = true;
    std::vector<int> failed_atoms;
};

MembershipReport membership(const FibreSet& set, const FibrePoint& x,
                            double tol = kMembershipTol);

// Throws MembershipError naming the first offending atom.
void require_member(const FibreSet& set, const FibrePoint& x, double tol = kMembershipTol);

// Blockwise nearest-point projection into the set's regions.
FibrePoint project(const FibreSet& set, const FibrePoint& x);

struct EssentialBoundReport {
    bool ok = true;
    int worst_atom = -1;
    double worst_radius = 0.0;
};

// Checks that every region sits inside the ball of radius essential_bound()
// about the origin of its block.
EssentialBoundReport essential_bound_check(const FibreSet& set);

// Splice points along a partition: the result takes points[k]'s block on
// every atom of partition[k]. All inputs and the result must belong to the
// set; the result is returned after that re-check.
FibrePoint sigma_mix_points(const FibreSet& set, const ProbSpace& space,
                            const std::vector<AtomEvent>& partition,
                            const std::vector<FibrePoint>& points);

// Samples-driven audit of the norm: definiteness, absolute homogeneity under
// the provided measurable scalars, and the triangle inequality over sample
// pairs. Violations are reported with atom index and magnitude.
StageResult check_norm_axioms(const ProbSpace& space,
                              const std::vector<FibrePoint>& samples,
                              const std::vector<L0Value>& scalars,
                              double tol = 1e-9);

}  // namespace randfix

#endif
