#ifndef RANDFIX_PROB_SPACE_HPP
#define RANDFIX_PROB_SPACE_HPP

// Finite probability space with atomic weights, measurable-function values
// attached per atom, and convergence-in-probability bookkeeping. Everything
// downstream (fibre sets, operators, solver diagnostics) indexes atoms the
// way this module defines them: 0..atom_count()-1.

#include <Eigen/Dense>
#include <vector>

#include "randfix/errors.hpp"

namespace randfix {

inline constexpr double kWeightSumTol = 1e-12;   // |sum - 1| accepted before normalizing
inline constexpr double kValueEqTol = 1e-10;     // default entrywise equality tolerance

// Finite atomic probability space. Weights are strictly positive and are
// renormalized at construction when their sum is within kWeightSumTol of 1;
// anything further off is rejected.
class ProbSpace {
  public:
    explicit ProbSpace(Eigen::VectorXd weights);

    int atom_count() const { return static_cast<int>(weights_.size()); }
    double weight(int atom) const { return weights_[atom]; }
    const Eigen::VectorXd& weights() const { return weights_; }

  private:
    Eigen::VectorXd weights_;
};

// A measurable set: a subset of atom indices, kept sorted and duplicate-free.
class AtomEvent {
  public:
    AtomEvent() = default;
    explicit AtomEvent(std::vector<int> members);

    const std::vector<int>& members() const { return members_; }
    bool contains(int atom) const;
    std::size_t size() const { return members_.size(); }

  private:
    std::vector<int> members_;
};

// A real-valued measurable function on the space: one finite value per atom.
class L0Value {
  public:
    L0Value() = default;
    explicit L0Value(Eigen::VectorXd values);
    static L0Value constant(int atoms, double value);
    static L0Value zero(int atoms) { return constant(atoms, 0.0); }

    int atoms() const { return static_cast<int>(values_.size()); }
    double operator[](int atom) const { return values_[atom]; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::VectorXd& values() { return values_; }

    bool nonnegative(double tol = 0.0) const { return (values_.array() >= -tol).all(); }
    double max() const { return values_.maxCoeff(); }

  private:
    Eigen::VectorXd values_;
};

bool approx_equal(const L0Value& a, const L0Value& b, double tol = kValueEqTol);

// Entrywise lattice operations; shapes must agree.
L0Value value_min(const L0Value& a, const L0Value& b);
L0Value value_max(const L0Value& a, const L0Value& b);
L0Value value_add(const L0Value& a, const L0Value& b);

// P(event) under the atomic measure. Atoms out of range raise
// InvalidEventError.
double probability(const ProbSpace& space, const AtomEvent& event);

// Glue per-event values into one function: the result takes values[k]'s entry
// at every atom of partition[k]. The events must partition the atom set
// exactly (no gaps, no overlaps) and every value must span the whole space.
L0Value indicator_mix(const ProbSpace& space,
                      const std::vector<AtomEvent>& partition,
                      const std::vector<L0Value>& values);

// Keep a value on `event`, zero elsewhere.
L0Value mask_value(const L0Value& value, const AtomEvent& event);

// Verifies that the events form a partition of the space; throws
// PartitionError otherwise. Used by indicator_mix and the operator checks.
void require_partition(const ProbSpace& space, const std::vector<AtomEvent>& events);

struct ConvergenceScan {
    std::vector<bool> pass;  // one entry per index of the distance sequence
    int cutoff = 0;          // smallest index from which every entry passes
    bool verdict = false;    // true iff such a cutoff exists in range
};

// Scans a sequence of distance functions for convergence in probability:
// index n passes when P({atoms with distance < epsilon}) >= 1 - lambda.
// The cutoff is the first index after the last failure; when the tail itself
// fails there is no cutoff and the verdict is false.
ConvergenceScan converges_in_probability(const ProbSpace& space,
                                         const std::vector<L0Value>& distances,
                                         double epsilon, double lambda);

}  // namespace randfix

#endif
