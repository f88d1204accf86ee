#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "randfix/errors.hpp"
#include "randfix/prob_space.hpp"
#include "randfix/sampling.hpp"

using namespace randfix;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

L0Value val(std::initializer_list<double> xs) { return L0Value(vec(xs)); }

}  // namespace

TEST_CASE("weights are validated and renormalized") {
    ProbSpace space(vec({0.2, 0.3, 0.5}));
    CHECK(space.atom_count() == 3);
    CHECK(space.weight(0) == 0.2);
    CHECK(space.weight(2) == 0.5);

    SUBCASE("drift within the tolerance is scaled back to sum 1") {
        ProbSpace drifted(vec({0.25, 0.25, 0.25, 0.25 + 4e-13}));
        CHECK(drifted.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("a clearly wrong sum is rejected with the sum in the message") {
        CHECK_THROWS_WITH_AS(ProbSpace(vec({0.5, 0.6})), "weights sum to 1.1, expected 1",
                             DomainError);
    }
    SUBCASE("nonpositive weights are rejected") {
        CHECK_THROWS_AS(ProbSpace(vec({1.0, 0.0})), DomainError);
        CHECK_THROWS_AS(ProbSpace(vec({1.5, -0.5})), DomainError);
    }
    SUBCASE("an empty space is rejected") {
        CHECK_THROWS_AS(ProbSpace(Eigen::VectorXd()), DomainError);
    }
}

TEST_CASE("events are sorted, deduplicated, and range checked against the space") {
    AtomEvent e(std::vector<int>{2, 0});
    CHECK(e.members() == std::vector<int>{0, 2});
    CHECK(e.contains(0));
    CHECK(!e.contains(1));
    CHECK_THROWS_AS(AtomEvent(std::vector<int>{-1}), InvalidEventError);
    CHECK_THROWS_AS(AtomEvent(std::vector<int>{2, 0, 2}), InvalidEventError);

    ProbSpace space(vec({0.2, 0.3, 0.5}));
    CHECK(probability(space, AtomEvent({0, 2})) == doctest::Approx(0.7));
    CHECK(probability(space, AtomEvent(std::vector<int>{})) == 0.0);
    CHECK(probability(space, AtomEvent({0, 1, 2})) == doctest::Approx(1.0));
    CHECK_THROWS_AS(probability(space, AtomEvent({3})), InvalidEventError);
}

TEST_CASE("indicator_mix splices per-event values into one function") {
    ProbSpace space(vec({0.5, 0.5}));
    std::vector<AtomEvent> partition{AtomEvent({0}), AtomEvent({1})};
    std::vector<L0Value> values{val({3, 9}), val({7, 4})};

    L0Value mixed = indicator_mix(space, partition, values);
    CHECK(mixed[0] == 3.0);
    CHECK(mixed[1] == 4.0);

    SUBCASE("identical pieces mix to themselves") {
        std::vector<L0Value> same{val({2, 5}), val({2, 5})};
        L0Value m = indicator_mix(space, partition, same);
        CHECK(m[0] == 2.0);
        CHECK(m[1] == 5.0);
    }
    SUBCASE("the trivial partition returns its single value") {
        L0Value m = indicator_mix(space, {AtomEvent({0, 1})}, {val({6, 8})});
        CHECK(m[0] == 6.0);
        CHECK(m[1] == 8.0);
    }
    SUBCASE("overlaps and gaps are rejected") {
        CHECK_THROWS_AS(
            indicator_mix(space, {AtomEvent({0}), AtomEvent({0, 1})}, values),
            PartitionError);
        CHECK_THROWS_AS(indicator_mix(space, {AtomEvent({0})}, {val({3, 9})}),
                        PartitionError);
    }
    SUBCASE("values must span the whole space") {
        CHECK_THROWS_AS(indicator_mix(space, partition, {val({3}), val({7, 4})}),
                        ShapeError);
    }
    SUBCASE("the mix does not depend on the order of the pieces") {
        ProbSpace big(vec({0.1, 0.2, 0.3, 0.25, 0.15}));
        Rng rng(421);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<AtomEvent> parts = sample_partition(big.atom_count(), rng);
            std::vector<L0Value> vals;
            for (std::size_t k = 0; k < parts.size(); ++k) {
                Eigen::VectorXd v(big.atom_count());
                for (int a = 0; a < big.atom_count(); ++a) v[a] = rng.uniform(-5.0, 5.0);
                vals.emplace_back(v);
            }
            L0Value forward = indicator_mix(big, parts, vals);
            std::vector<AtomEvent> rev_parts(parts.rbegin(), parts.rend());
            std::vector<L0Value> rev_vals(vals.rbegin(), vals.rend());
            L0Value backward = indicator_mix(big, rev_parts, rev_vals);
            CHECK(forward.values() == backward.values());
        }
    }
}

TEST_CASE("mask_value keeps the event and zeroes the complement") {
    L0Value v = val({3, -2, 7});
    L0Value masked = mask_value(v, AtomEvent({0, 2}));
    CHECK(masked[0] == 3.0);
    CHECK(masked[1] == 0.0);
    CHECK(masked[2] == 7.0);
    CHECK_THROWS_AS(mask_value(v, AtomEvent({5})), InvalidEventError);
}

TEST_CASE("lattice operations act entrywise") {
    L0Value a = val({1, 4, 2});
    L0Value b = val({3, 0, 2});
    CHECK(value_min(a, b).values() == vec({1, 0, 2}));
    CHECK(value_max(a, b).values() == vec({3, 4, 2}));
    CHECK(value_add(a, b).values() == vec({4, 4, 4}));
    CHECK_THROWS_AS(value_min(a, val({1, 2})), ShapeError);
    CHECK(val({0, 1, 0}).nonnegative());
    CHECK(!val({0, -1, 0}).nonnegative());
    CHECK(val({0, -1e-12, 0}).nonnegative(1e-10));
    CHECK(a.max() == 4.0);
}

TEST_CASE("convergence scan finds the first index with a passing tail") {
    SUBCASE("identically zero distances pass from the start") {
        ProbSpace space(vec({0.5, 0.5}));
        std::vector<L0Value> dists(4, L0Value::zero(2));
        ConvergenceScan scan = converges_in_probability(space, dists, 0.1, 0.01);
        CHECK(scan.verdict);
        CHECK(scan.cutoff == 0);
        for (bool p : scan.pass) CHECK(p);
    }
    SUBCASE("halving distances on one atom cross epsilon = 0.1 at index 4") {
        ProbSpace space(vec({1.0}));
        std::vector<L0Value> dists;
        double d = 1.0;
        for (int n = 0; n < 10; ++n, d *= 0.5) dists.push_back(val({d}));
        ConvergenceScan scan = converges_in_probability(space, dists, 0.1, 0.01);
        CHECK(scan.verdict);
        CHECK(scan.cutoff == 4);
        CHECK(!scan.pass[3]);
        CHECK(scan.pass[4]);
    }
    SUBCASE("a stuck atom is tolerated exactly when lambda covers its mass") {
        ProbSpace space(vec({0.5, 0.5}));
        std::vector<L0Value> dists(6, val({0.0, 1.0}));
        ConvergenceScan loose = converges_in_probability(space, dists, 0.5, 0.6);
        CHECK(loose.verdict);
        CHECK(loose.cutoff == 0);
        ConvergenceScan tight = converges_in_probability(space, dists, 0.5, 0.4);
        CHECK(!tight.verdict);
    }
    SUBCASE("the cutoff is the first index after the last failure") {
        ProbSpace space(vec({1.0}));
        std::vector<L0Value> dists{val({1}), val({0}), val({1}), val({0}), val({0})};
        ConvergenceScan scan = converges_in_probability(space, dists, 0.5, 0.5);
        CHECK(scan.verdict);
        CHECK(scan.cutoff == 3);
    }
    SUBCASE("parameters outside their ranges are rejected") {
        ProbSpace space(vec({1.0}));
        std::vector<L0Value> dists{val({0})};
        CHECK_THROWS_AS(converges_in_probability(space, dists, 0.0, 0.5), DomainError);
        CHECK_THROWS_AS(converges_in_probability(space, dists, 0.1, 1.0), DomainError);
        CHECK_THROWS_AS(converges_in_probability(space, {val({-1})}, 0.1, 0.5),
                        DomainError);
    }
}
