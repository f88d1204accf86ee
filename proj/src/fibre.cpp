#include "randfix/fibre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace randfix {

FibrePoint::FibrePoint(Eigen::MatrixXd coords) : coords_(std::move(coords)) {
    if (!coords_.allFinite())
        throw DomainError("fibre point has a non-finite coordinate");
}

L0Value random_norm(const FibrePoint& x) {
    return L0Value(x.coords().rowwise().norm());
}

L0Value block_distance(const FibrePoint& x, const FibrePoint& y) {
    if (x.atoms() != y.atoms() || x.dim() != y.dim())
        throw ShapeError("fibre points have mismatched shapes");
    return L0Value((x.coords() - y.coords()).rowwise().norm());
}

FibrePoint add(const FibrePoint& x, const FibrePoint& y) {
    if (x.atoms() != y.atoms() || x.dim() != y.dim())
        throw ShapeError("fibre points have mismatched shapes");
    return FibrePoint(x.coords() + y.coords());
}

FibrePoint subtract(const FibrePoint& x, const FibrePoint& y) {
    if (x.atoms() != y.atoms() || x.dim() != y.dim())
        throw ShapeError("fibre points have mismatched shapes");
    return FibrePoint(x.coords() - y.coords());
}

FibrePoint scalar_mul(const L0Value& xi, const FibrePoint& x) {
    if (xi.atoms() != x.atoms())
        throw ShapeError("scalar does not span the point's atoms");
    return FibrePoint(xi.values().asDiagonal() * x.coords());
}

FibrePoint mask_point(const FibrePoint& x, const AtomEvent& event) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.atoms(), x.dim());
    for (int atom : event.members()) {
        if (atom < 0 || atom >= x.atoms())
            throw InvalidEventError("mask references atom " + std::to_string(atom) +
                                    " outside the point's span");
        out.row(atom) = x.block(atom);
    }
    return FibrePoint(std::move(out));
}

// ---------------------------------------------------------------------------
// Regions

bool region_contains(const Region& region, const Eigen::VectorXd& v, double tol) {
    return std::visit(
        [&](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, BallRegion>) {
                return (v - r.center).norm() <= r.radius + tol;
            } else if constexpr (std::is_same_v<T, BoxRegion>) {
                return (v.array() >= r.lo.array() - tol).all() &&
                       (v.array() <= r.hi.array() + tol).all();
            } else {
                for (const Eigen::VectorXd& p : r.points)
                    if ((v - p).norm() <= tol) return true;
                return false;
            }
        },
        region);
}

Eigen::VectorXd region_project(const Region& region, const Eigen::VectorXd& v) {
    return std::visit(
        [&](const auto& r) -> Eigen::VectorXd {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, BallRegion>) {
                Eigen::VectorXd delta = v - r.center;
                const double len = delta.norm();
                if (len <= r.radius) return v;
                return r.center + delta * (r.radius / len);
            } else if constexpr (std::is_same_v<T, BoxRegion>) {
                return v.cwiseMax(r.lo).cwiseMin(r.hi);
            } else {
                double best = std::numeric_limits<double>::infinity();
                const Eigen::VectorXd* arg = nullptr;
                for (const Eigen::VectorXd& p : r.points) {
                    const double dist = (v - p).norm();
                    if (dist < best) {
                        best = dist;
                        arg = &p;
                    }
                }
                return *arg;
            }
        },
        region);
}

double region_outer_radius(const Region& region) {
    return std::visit(
        [](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, BallRegion>) {
                return r.center.norm() + r.radius;
            } else if constexpr (std::is_same_v<T, BoxRegion>) {
                return r.lo.cwiseAbs().cwiseMax(r.hi.cwiseAbs()).norm();
            } else {
                double worst = 0.0;
                for (const Eigen::VectorXd& p : r.points) worst = std::max(worst, p.norm());
                return worst;
            }
        },
        region);
}

double region_diameter(const Region& region) {
    return std::visit(
        [](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, BallRegion>) {
                return 2.0 * r.radius;
            } else if constexpr (std::is_same_v<T, BoxRegion>) {
                return (r.hi - r.lo).norm();
            } else {
                double worst = 0.0;
                for (std::size_t i = 0; i < r.points.size(); ++i)
                    for (std::size_t j = i + 1; j < r.points.size(); ++j)
                        worst = std::max(worst, (r.points[i] - r.points[j]).norm());
                return worst;
            }
        },
        region);
}

bool region_is_finite(const Region& region) {
    return std::holds_alternative<FiniteRegion>(region);
}

namespace {

void validate_region(const Region& region, int dim, int atom) {
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            const std::string where = "region at atom " + std::to_string(atom);
            if constexpr (std::is_same_v<T, BallRegion>) {
                if (r.center.size() != dim) throw ShapeError(where + ": center has wrong dimension");
                if (!(r.radius >= 0.0) || !std::isfinite(r.radius))
                    throw DomainError(where + ": radius must be a finite nonnegative number");
            } else if constexpr (std::is_same_v<T, BoxRegion>) {
                if (r.lo.size() != dim || r.hi.size() != dim)
                    throw ShapeError(where + ": corner has wrong dimension");
                if (!(r.lo.array() <= r.hi.array()).all())
                    throw DomainError(where + ": lower corner exceeds upper corner");
            } else {
                if (r.points.empty()) throw DomainError(where + ": finite region is empty");
                for (const Eigen::VectorXd& p : r.points)
                    if (p.size() != dim) throw ShapeError(where + ": point has wrong dimension");
            }
        },
        region);
}

}  // namespace

FibreSet::FibreSet(int dim, std::vector<Region> regions, double essential_bound,
                   bool theta_declared)
    : dim_(dim),
      regions_(std::move(regions)),
      essential_bound_(essential_bound),
      theta_declared_(theta_declared) {
    if (dim_ < 1) throw DomainError("fibre dimension must be at least 1");
    if (regions_.empty()) throw DomainError("fibre set needs one region per atom");
    if (!(essential_bound_ > 0.0) || !std::isfinite(essential_bound_))
        throw DomainError("essential bound must be a finite positive number");
    for (int atom = 0; atom < atoms(); ++atom) validate_region(regions_[atom], dim_, atom);
    if (theta_declared_) {
        const FibrePoint theta = FibrePoint::zero(atoms(), dim_);
        MembershipReport rep = membership(*this, theta);
        if (!rep.ok)
            throw MembershipError("zero section declared inside the set but atom " +
                                      std::to_string(rep.failed_atoms.front()) +
                                      "'s region excludes it",
                                  rep.failed_atoms.front());
    }
}

bool FibreSet::all_regions_finite() const {
    return std::all_of(regions_.begin(), regions_.end(), region_is_finite);
}

MembershipReport membership(const FibreSet& set, const FibrePoint& x, double tol) {
    if (x.atoms() != set.atoms() || x.dim() != set.dim())
        throw ShapeError("point shape does not match the fibre set");
    MembershipReport report;
    for (int atom = 0; atom < set.atoms(); ++atom) {
        if (!region_contains(set.region(atom), x.block(atom), tol)) {
            report.ok = false;
            report.failed_atoms.push_back(atom);
        }
    }
    return report;
}

void require_member(const FibreSet& set, const FibrePoint& x, double tol) {
    MembershipReport report = membership(set, x, tol);
    if (!report.ok)
        throw MembershipError("point lies outside its region at atom " +
                                  std::to_string(report.failed_atoms.front()),
                              report.failed_atoms.front());
}

FibrePoint project(const FibreSet& set, const FibrePoint& x) {
    if (x.atoms() != set.atoms() || x.dim() != set.dim())
        throw ShapeError("point shape does not match the fibre set");
    FibrePoint out(set.atoms(), set.dim());
    for (int atom = 0; atom < set.atoms(); ++atom)
        out.block(atom) = region_project(set.region(atom), x.block(atom));
    return out;
}

EssentialBoundReport essential_bound_check(const FibreSet& set) {
    EssentialBoundReport report;
    double worst = -1.0;
    for (int atom = 0; atom < set.atoms(); ++atom) {
        const double radius = region_outer_radius(set.region(atom));
        if (radius > worst) {
            worst = radius;
            report.worst_atom = atom;
            report.worst_radius = radius;
        }
    }
    report.ok = worst <= set.essential_bound() + kMembershipTol;
    return report;
}

FibrePoint sigma_mix_points(const FibreSet& set, const ProbSpace& space,
                            const std::vector<AtomEvent>& partition,
                            const std::vector<FibrePoint>& points) {
    if (space.atom_count() != set.atoms())
        throw ShapeError("space and fibre set disagree on the atom count");
    if (partition.size() != points.size())
        throw PartitionError("partition has " + std::to_string(partition.size()) +
                             " events but " + std::to_string(points.size()) + " points");
    require_partition(space, partition);
    for (const FibrePoint& p : points) require_member(set, p);

    FibrePoint out(set.atoms(), set.dim());
    for (std::size_t k = 0; k < partition.size(); ++k)
        for (int atom : partition[k].members()) out.block(atom) = points[k].block(atom);
    require_member(set, out);
    return out;
}

StageResult check_norm_axioms(const ProbSpace& space,
                              const std::vector<FibrePoint>& samples,
                              const std::vector<L0Value>& scalars,
                              double tol) {
    StageResult stage;
    stage.id = "check_norm_axioms";

    long definiteness = 0, homogeneity = 0, triangle = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const FibrePoint& x = samples[i];
        if (x.atoms() != space.atom_count())
            throw ShapeError("sample does not span the space");
        const L0Value nx = random_norm(x);

        // Definiteness, both directions, atom by atom.
        for (int atom = 0; atom < x.atoms(); ++atom) {
            const bool zero_block = x.block(atom).norm() <= tol;
            const bool zero_norm = nx[atom] <= tol;
            if (zero_block != zero_norm) {
                stage.fail_with({"definiteness", atom, static_cast<std::int64_t>(i), -1,
                                 nx[atom], 0.0, tol});
            }
            ++definiteness;
        }

        // Absolute homogeneity under each provided scalar.
        for (const L0Value& xi : scalars) {
            const L0Value scaled = random_norm(scalar_mul(xi, x));
            for (int atom = 0; atom < x.atoms(); ++atom) {
                const double want = std::abs(xi[atom]) * nx[atom];
                if (std::abs(scaled[atom] - want) > tol * (1.0 + want)) {
                    stage.fail_with({"homogeneity", atom, static_cast<std::int64_t>(i), -1,
                                     scaled[atom], want, tol});
                }
                ++homogeneity;
            }
        }

        // Triangle inequality against the next sample, cyclically.
        const FibrePoint& y = samples[(i + 1) % samples.size()];
        const L0Value ny = random_norm(y);
        const L0Value nsum = random_norm(add(x, y));
        for (int atom = 0; atom < x.atoms(); ++atom) {
            if (nsum[atom] > nx[atom] + ny[atom] + tol) {
                stage.fail_with({"triangle", atom, static_cast<std::int64_t>(i), -1,
                                 nsum[atom], nx[atom] + ny[atom], tol});
            }
            ++triangle;
        }
    }

    stage.details = {{"samples", samples.size()},
                     {"definiteness_checks", definiteness},
                     {"homogeneity_checks", homogeneity},
                     {"triangle_checks", triangle}};
    return stage;
}

}  // namespace randfix
