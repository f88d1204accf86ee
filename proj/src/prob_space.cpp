#include "randfix/prob_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace randfix {

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

ProbSpace::ProbSpace(Eigen::VectorXd weights) : weights_(std::move(weights)) {
    if (weights_.size() == 0)
        throw DomainError("probability space needs at least one atom");
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_[i]) || weights_[i] <= 0.0)
            throw DomainError("atom weight " + std::to_string(i) + " is not strictly positive");
    }
    const double sum = weights_.sum();
    if (std::abs(sum - 1.0) > kWeightSumTol)
        throw DomainError("weights sum to " + format_double(sum) + ", expected 1");
    weights_ /= sum;
}

AtomEvent::AtomEvent(std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    auto dup = std::adjacent_find(members_.begin(), members_.end());
    if (dup != members_.end())
        throw InvalidEventError("event lists atom " + std::to_string(*dup) + " twice");
    if (!members_.empty() && members_.front() < 0)
        throw InvalidEventError("event lists negative atom index");
}

bool AtomEvent::contains(int atom) const {
    return std::binary_search(members_.begin(), members_.end(), atom);
}

L0Value::L0Value(Eigen::VectorXd values) : values_(std::move(values)) {
    if (!values_.allFinite())
        throw DomainError("measurable value has a non-finite entry");
}

L0Value L0Value::constant(int atoms, double value) {
    return L0Value(Eigen::VectorXd::Constant(atoms, value));
}

bool approx_equal(const L0Value& a, const L0Value& b, double tol) {
    if (a.atoms() != b.atoms())
        throw ShapeError("comparing values over different atom counts");
    return ((a.values() - b.values()).array().abs() <= tol).all();
}

namespace {

void require_same_atoms(const L0Value& a, const L0Value& b) {
    if (a.atoms() != b.atoms())
        throw ShapeError("values live on different atom counts");
}

}  // namespace

L0Value value_min(const L0Value& a, const L0Value& b) {
    require_same_atoms(a, b);
    return L0Value(a.values().cwiseMin(b.values()));
}

L0Value value_max(const L0Value& a, const L0Value& b) {
    require_same_atoms(a, b);
    return L0Value(a.values().cwiseMax(b.values()));
}

L0Value value_add(const L0Value& a, const L0Value& b) {
    require_same_atoms(a, b);
    return L0Value(a.values() + b.values());
}

double probability(const ProbSpace& space, const AtomEvent& event) {
    double p = 0.0;
    for (int atom : event.members()) {
        if (atom < 0 || atom >= space.atom_count())
            throw InvalidEventError("event references atom " + std::to_string(atom) +
                                    " outside a space of " +
                                    std::to_string(space.atom_count()) + " atoms");
        p += space.weight(atom);
    }
    return p;
}

void require_partition(const ProbSpace& space, const std::vector<AtomEvent>& events) {
    std::vector<int> seen(space.atom_count(), 0);
    for (const AtomEvent& event : events) {
        for (int atom : event.members()) {
            if (atom < 0 || atom >= space.atom_count())
                throw InvalidEventError("partition references atom " + std::to_string(atom) +
                                        " outside the space");
            seen[atom] += 1;
        }
    }
    for (int atom = 0; atom < space.atom_count(); ++atom) {
        if (seen[atom] == 0)
            throw PartitionError("atom " + std::to_string(atom) + " is covered by no event");
        if (seen[atom] > 1)
            throw PartitionError("atom " + std::to_string(atom) + " is covered " +
                                 std::to_string(seen[atom]) + " times");
    }
}

L0Value indicator_mix(const ProbSpace& space,
                      const std::vector<AtomEvent>& partition,
                      const std::vector<L0Value>& values) {
    if (partition.size() != values.size())
        throw PartitionError("partition has " + std::to_string(partition.size()) +
                             " events but " + std::to_string(values.size()) + " values");
    require_partition(space, partition);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space.atom_count());
    for (std::size_t k = 0; k < partition.size(); ++k) {
        if (values[k].atoms() != space.atom_count())
            throw ShapeError("value " + std::to_string(k) + " does not span the space");
        for (int atom : partition[k].members())
            out[atom] = values[k][atom];
    }
    return L0Value(std::move(out));
}

L0Value mask_value(const L0Value& value, const AtomEvent& event) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(value.atoms());
    for (int atom : event.members()) {
        if (atom < 0 || atom >= value.atoms())
            throw InvalidEventError("mask references atom " + std::to_string(atom) +
                                    " outside the value's span");
        out[atom] = value[atom];
    }
    return L0Value(std::move(out));
}

ConvergenceScan converges_in_probability(const ProbSpace& space,
                                         const std::vector<L0Value>& distances,
                                         double epsilon, double lambda) {
    if (!(epsilon > 0.0))
        throw DomainError("epsilon must be positive");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw DomainError("lambda must lie in (0, 1)");

    ConvergenceScan scan;
    scan.pass.reserve(distances.size());
    for (const L0Value& dist : distances) {
        if (dist.atoms() != space.atom_count())
            throw ShapeError("distance entry does not span the space");
        if (!dist.nonnegative())
            throw DomainError("distance entry is negative at some atom");
        double p = 0.0;
        for (int atom = 0; atom < space.atom_count(); ++atom)
            if (dist[atom] < epsilon) p += space.weight(atom);
        scan.pass.push_back(p >= 1.0 - lambda);
    }

    int cutoff = 0;
    for (int n = 0; n < static_cast<int>(scan.pass.size()); ++n)
        if (!scan.pass[n]) cutoff = n + 1;
    scan.cutoff = cutoff;
    scan.verdict = cutoff < static_cast<int>(scan.pass.size()) ||
                   (scan.pass.empty() && cutoff == 0);
    return scan;
}

}  // namespace randfix
