#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "randfix/errors.hpp"
#include "randfix/fibre.hpp"
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

FibrePoint point2x2(double a0, double a1, double b0, double b1) {
    Eigen::MatrixXd m(2, 2);
    m << a0, a1, b0, b1;
    return FibrePoint(m);
}

FibreSet ball_set(int atoms, int dim, double radius, double bound) {
    std::vector<Region> regions(atoms, BallRegion{Eigen::VectorXd::Zero(dim), radius});
    return FibreSet(dim, std::move(regions), bound, true);
}

}  // namespace

TEST_CASE("the module norm is the blockwise Euclidean length") {
    FibrePoint x = point2x2(3, 4, 0, 1);
    L0Value n = random_norm(x);
    CHECK(n[0] == 5.0);
    CHECK(n[1] == 1.0);

    FibrePoint y = point2x2(0, 0, 3, 1);
    L0Value d = block_distance(x, y);
    CHECK(d[0] == 5.0);
    CHECK(d[1] == 3.0);

    CHECK_THROWS_AS(block_distance(x, FibrePoint(1, 2)), ShapeError);
    Eigen::MatrixXd bad(1, 1);
    bad << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(FibrePoint{bad}, DomainError);
}

TEST_CASE("scalar action scales block norms by the absolute scalar") {
    Rng rng(97);
    for (int trial = 0; trial < 25; ++trial) {
        Eigen::MatrixXd m(3, 2);
        for (int a = 0; a < 3; ++a)
            for (int j = 0; j < 2; ++j) m(a, j) = rng.uniform(-4.0, 4.0);
        FibrePoint x(m);
        Eigen::VectorXd xi(3);
        for (int a = 0; a < 3; ++a) xi[a] = rng.uniform(-3.0, 3.0);
        L0Value scaled = random_norm(scalar_mul(L0Value(xi), x));
        L0Value plain = random_norm(x);
        for (int a = 0; a < 3; ++a)
            CHECK(scaled[a] == doctest::Approx(std::abs(xi[a]) * plain[a]).epsilon(1e-14));
    }
    CHECK_THROWS_AS(scalar_mul(L0Value(vec({1.0})), point2x2(1, 2, 3, 4)), ShapeError);
}

TEST_CASE("masking a point masks its norm exactly") {
    FibrePoint x = point2x2(3, 4, 1, 1);
    AtomEvent ev({1});
    FibrePoint masked = mask_point(x, ev);
    CHECK(masked.block(0).norm() == 0.0);
    CHECK(masked.block(1) == x.block(1));
    // both sides are computed from identical coordinates, so equality is exact
    CHECK(random_norm(masked).values() == mask_value(random_norm(x), ev).values());
}

TEST_CASE("regions answer membership, projection, and size queries") {
    SUBCASE("box projection clamps coordinates") {
        BoxRegion box{vec({-1.0}), vec({1.0})};
        CHECK(region_project(box, vec({3.0})) == vec({1.0}));
        CHECK(region_project(box, vec({-2.5})) == vec({-1.0}));
        CHECK(region_contains(box, vec({0.3})));
        CHECK(!region_contains(box, vec({1.1})));
        CHECK(region_contains(box, vec({1.0 + 1e-11})));
        CHECK(region_outer_radius(box) == 1.0);
        CHECK(region_diameter(box) == 2.0);
    }
    SUBCASE("ball projection rescales radially") {
        BallRegion ball{vec({0.0, 0.0}), 2.0};
        Eigen::VectorXd p = region_project(ball, vec({3.0, 4.0}));
        CHECK(p[0] == doctest::Approx(1.2).epsilon(1e-15));
        CHECK(p[1] == doctest::Approx(1.6).epsilon(1e-15));
        CHECK(region_project(ball, vec({0.5, 0.5})) == vec({0.5, 0.5}));
        CHECK(region_outer_radius(ball) == 2.0);
        CHECK(region_diameter(ball) == 4.0);
        BallRegion off{vec({1.0, 0.0}), 2.0};
        CHECK(region_outer_radius(off) == 3.0);
    }
    SUBCASE("finite regions project to the nearest listed point, lowest index on ties") {
        FiniteRegion fin{{vec({0.0}), vec({2.0})}};
        CHECK(region_project(fin, vec({1.0})) == vec({0.0}));
        CHECK(region_project(fin, vec({1.7})) == vec({2.0}));
        CHECK(region_contains(fin, vec({2.0})));
        CHECK(!region_contains(fin, vec({1.0})));
        CHECK(region_outer_radius(fin) == 2.0);
        CHECK(region_diameter(fin) == 2.0);
        CHECK(region_is_finite(Region(fin)));
        CHECK(!region_is_finite(Region(BallRegion{vec({0.0}), 1.0})));
    }
    SUBCASE("projection into convex regions is idempotent and nonexpansive") {
        Rng rng(55);
        std::vector<Region> regions{Region(BallRegion{vec({0.5, -0.5}), 1.5}),
                                    Region(BoxRegion{vec({-1.0, -2.0}), vec({2.0, 0.5})})};
        for (const Region& r : regions) {
            for (int trial = 0; trial < 40; ++trial) {
                Eigen::VectorXd u(2), v(2);
                for (int j = 0; j < 2; ++j) {
                    u[j] = rng.uniform(-5.0, 5.0);
                    v[j] = rng.uniform(-5.0, 5.0);
                }
                Eigen::VectorXd pu = region_project(r, u);
                Eigen::VectorXd pv = region_project(r, v);
                CHECK(region_contains(r, pu));
                CHECK((region_project(r, pu) - pu).norm() <= 1e-12);
                CHECK((pu - pv).norm() <= (u - v).norm() + 1e-12);
            }
        }
    }
}

TEST_CASE("fibre sets validate their construction data") {
    CHECK_THROWS_AS(FibreSet(0, {Region(BallRegion{vec({}), 1.0})}, 1.0, false),
                    DomainError);
    CHECK_THROWS_AS(FibreSet(1, {}, 1.0, false), DomainError);
    CHECK_THROWS_AS(
        FibreSet(1, {Region(BallRegion{vec({0.0}), 1.0})}, 0.0, false), DomainError);
    // declaring the zero section requires every region to actually contain it
    CHECK_THROWS_AS(
        FibreSet(1, {Region(BoxRegion{vec({0.5}), vec({1.0})})}, 1.0, true),
        MembershipError);
    FibreSet ok(1, {Region(BoxRegion{vec({0.5}), vec({1.0})})}, 1.0, false);
    CHECK(!ok.theta_declared());
    CHECK(ok.atoms() == 1);
}

TEST_CASE("membership and projection act blockwise on sections") {
    FibreSet set = ball_set(2, 2, 2.0, 2.0);
    FibrePoint inside = point2x2(1, 0, 0, 1);
    CHECK(membership(set, inside).ok);
    CHECK_NOTHROW(require_member(set, inside));

    FibrePoint outside = point2x2(3, 4, 0, 1);
    MembershipReport rep = membership(set, outside);
    CHECK(!rep.ok);
    CHECK(rep.failed_atoms == std::vector<int>{0});
    try {
        require_member(set, outside);
        CHECK(false);
    } catch (const MembershipError& e) {
        CHECK(e.atom == 0);
    }

    FibrePoint proj = project(set, outside);
    CHECK(proj.block(0)[0] == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(proj.block(0)[1] == doctest::Approx(1.6).epsilon(1e-15));
    CHECK(proj.block(1) == outside.block(1));
}

TEST_CASE("the essential bound check reports the worst atom") {
    std::vector<Region> regions{Region(BallRegion{vec({0.0}), 0.5}),
                                Region(BallRegion{vec({0.0}), 0.9}),
                                Region(BallRegion{vec({0.0}), 1.0})};
    FibreSet tight(1, regions, 0.95, true);
    EssentialBoundReport bad = essential_bound_check(tight);
    CHECK(!bad.ok);
    CHECK(bad.worst_atom == 2);
    CHECK(bad.worst_radius == 1.0);

    FibreSet wide(1, regions, 1.0, true);
    EssentialBoundReport good = essential_bound_check(wide);
    CHECK(good.ok);
    CHECK(good.worst_radius == 1.0);
}

TEST_CASE("sigma_mix_points splices sections and keeps them in the set") {
    ProbSpace space(vec({0.5, 0.5}));
    FibreSet set = ball_set(2, 1, 2.0, 2.0);
    Eigen::MatrixXd mx(2, 1), my(2, 1);
    mx << 1.0, 1.0;
    my << -2.0, 0.5;
    FibrePoint x(mx), y(my);

    FibrePoint mixed = sigma_mix_points(set, space, {AtomEvent({0}), AtomEvent({1})}, {x, y});
    CHECK(mixed.block(0)[0] == 1.0);
    CHECK(mixed.block(1)[0] == 0.5);
    CHECK(membership(set, mixed).ok);

    Eigen::MatrixXd far(2, 1);
    far << 5.0, 0.0;
    CHECK_THROWS_AS(
        sigma_mix_points(set, space, {AtomEvent({0}), AtomEvent({1})}, {FibrePoint(far), y}),
        MembershipError);
    CHECK_THROWS_AS(sigma_mix_points(set, space, {AtomEvent({0})}, {x}), PartitionError);
}

TEST_CASE("sampled sections satisfy the norm axioms") {
    ProbSpace space(vec({0.3, 0.3, 0.4}));
    FibreSet set = ball_set(3, 2, 2.0, 2.0);
    Rng rng(42);
    std::vector<FibrePoint> samples = sample_points(set, 100, rng);
    std::vector<L0Value> scalars;
    for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd xi(3);
        for (int a = 0; a < 3; ++a) xi[a] = rng.uniform(-2.0, 2.0);
        scalars.emplace_back(xi);
    }
    StageResult res = check_norm_axioms(space, samples, scalars);
    CHECK(res.ok());
    CHECK(res.violations.empty());
    for (const FibrePoint& s : samples) CHECK(membership(set, s).ok);
}
