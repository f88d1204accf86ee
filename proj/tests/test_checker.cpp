#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "randfix/checker.hpp"
#include "randfix/errors.hpp"
#include "randfix/fibre.hpp"
#include "randfix/gauge.hpp"
#include "randfix/operators.hpp"
#include "randfix/prob_space.hpp"
#include "randfix/quasi_metrics.hpp"
#include "randfix/sampling.hpp"
#include "randfix/solver.hpp"

using namespace randfix;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

FibrePoint column(std::initializer_list<double> xs) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) m(i++, 0) = x;
    return FibrePoint(m);
}

std::shared_ptr<const FibreSet> ball_domain(int atoms, double radius) {
    std::vector<Region> regions(atoms, Region(BallRegion{vec({0.0}), radius}));
    return std::make_shared<const FibreSet>(1, std::move(regions), radius, true);
}

std::shared_ptr<const FibreSet> pm_one_domain(int atoms) {
    FiniteRegion r{{vec({-1.0}), vec({1.0})}};
    std::vector<Region> regions(atoms, Region(r));
    return std::make_shared<const FibreSet>(1, std::move(regions), 1.0, false);
}

BoundSequence harmonic_bounds(int atoms) {
    return BoundSequence(GaugeSpec::linear(0.5), Perturbation::additive,
                         DecaySchedule::harmonic(Eigen::VectorXd::Ones(atoms)));
}

bool has_note(const StageResult& s, const char* text) {
    for (const std::string& n : s.notes)
        if (n.find(text) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("verify_contraction passes a genuine contraction on sampled pairs") {
    auto dom = ball_domain(2, 2.0);
    RandomOperator f = RandomOperator::scale(dom, vec({0.5, 0.25}));
    CertificationReport rep = verify_contraction(f, harmonic_bounds(2), 500, 20, 1);

    CHECK(rep.ok());
    CHECK(rep.overall == Verdict::pass);
    REQUIRE(rep.stages.size() == 1);
    const StageResult& s = rep.stages[0];
    CHECK(s.id == "verify_contraction");
    CHECK(s.details.at("mode").get<std::string>() == "sampled");
    CHECK(s.details.at("pairs").get<int>() == 500);
    CHECK(s.details.at("worst_margin").get<double>() > 0.0);
    CHECK(s.details.at("sample_label").get<std::string>() == "verify_contraction");

    // same seed, same verdicts, bit for bit
    CertificationReport again = verify_contraction(f, harmonic_bounds(2), 500, 20, 1);
    CHECK(to_json(rep).dump() == to_json(again).dump());
}

TEST_CASE("finite domains are enumerated exhaustively and caught violating") {
    auto dom = pm_one_domain(2);
    RandomOperator f = RandomOperator::antipode(dom);
    CertificationReport rep = verify_contraction(f, harmonic_bounds(2), 500, 8, 1);

    CHECK(!rep.ok());
    CHECK(rep.first_failure == "verify_contraction");
    const StageResult& s = rep.stages[0];
    CHECK(s.details.at("mode").get<std::string>() == "exhaustive");
    // 4 sections give 10 unordered pairs including the diagonal
    CHECK(s.details.at("pairs").get<int>() == 10);
    CHECK(has_note(s, "exhaustive: 4 sections"));

    REQUIRE(!s.violations.empty());
    const Violation& v = s.violations[0];
    CHECK(v.check == "contraction");
    CHECK(v.atom >= 0);
    CHECK(v.sample >= 1);  // the diagonal pair at ordinal 0 cannot violate
    CHECK(v.n == 1);
    CHECK(v.left == 2.0);
    CHECK(v.right == 1.5);
}

TEST_CASE("overshoots within the slack downgrade to probe-pass instead of failing") {
    FiniteRegion r{{vec({0.0}), vec({1.0})}};
    auto dom = std::make_shared<const FibreSet>(
        1, std::vector<Region>{Region(r)}, 1.0, true);
    RandomOperator ident = RandomOperator::table(dom, {{0, 1}});
    // the image distance of the pair {0, 1} is exactly 1; a slope one
    // half-ulp under the identity leaves an overshoot inside the slack
    BoundSequence grazing(GaugeSpec::linear(1.0 - 5e-10), Perturbation::additive,
                          DecaySchedule::none(1));
    CertificationReport rep = verify_contraction(ident, grazing, 5, 3, 1);
    CHECK(rep.overall == Verdict::probe_pass);
    CHECK(rep.ok());
    CHECK(has_note(rep.stages[0], "overshoots within the slack"));
    CHECK(rep.stages[0].violations.empty());
}

TEST_CASE("the direct iterated bound is checked on the kirk sample stream") {
    auto dom = ball_domain(1, 2.0);
    GaugeSequence seq(GaugeSpec::linear(0.5), GaugeSequence::Kind::additive_harmonic, 1.0,
                      0.0);

    SUBCASE("a contraction satisfies every indexed bound") {
        RandomOperator f = RandomOperator::scale(dom, vec({0.5}));
        CertificationReport rep = kirk_condition_check(f, seq, 200, 8, 11);
        CHECK(rep.ok());
        CHECK(rep.stages[0].id == "kirk_condition_check");
        CHECK(rep.stages[0].details.at("sample_label").get<std::string>() ==
              "kirk_samples");
    }
    SUBCASE("a distance-preserving map violates the bound once the tail decays") {
        RandomOperator anti = RandomOperator::antipode(pm_one_domain(1));
        CertificationReport rep = kirk_condition_check(anti, seq, 200, 8, 11);
        CHECK(!rep.ok());
        REQUIRE(!rep.stages[0].violations.empty());
        const Violation& v = rep.stages[0].violations[0];
        // psi_1(2) = 2 still holds with equality; n = 2 is the first break
        CHECK(v.n == 2);
        CHECK(v.left == 2.0);
        CHECK(v.right == 1.5);
    }
}

TEST_CASE("kirk_reduce shifts the index by one, exactly") {
    GaugeSpec half = GaugeSpec::linear(0.5);
    std::vector<double> grid = uniform_grid(4.0, 32);

    SUBCASE("harmonic tails stay harmonic") {
        GaugeSequence seq(half, GaugeSequence::Kind::additive_harmonic, 1.0, 0.0);
        BoundSequence B = kirk_reduce(seq, 2, grid);
        CHECK(B.atoms() == 2);
        CHECK(B.schedule().kind() == DecaySchedule::Kind::harmonic);
        CHECK(evaluate_bound(B, 0, 0, 1.0) == 1.5);
        for (int n = 0; n <= 8; ++n)
            for (double t : grid)
                for (int a = 0; a < 2; ++a)
                    CHECK(evaluate_bound(B, n, a, t) == seq.evaluate(n + 1, t));
    }
    SUBCASE("geometric tails re-enter with one ratio factor absorbed") {
        GaugeSequence seq(half, GaugeSequence::Kind::additive_geometric, 0.3, 0.5);
        BoundSequence B = kirk_reduce(seq, 1, grid);
        CHECK(B.schedule().kind() == DecaySchedule::Kind::geometric);
        CHECK(B.schedule().scale()[0] == doctest::Approx(0.15).epsilon(1e-15));
        CHECK(B.schedule().ratio()[0] == 0.5);
        for (int n = 0; n <= 8; ++n)
            CHECK(evaluate_bound(B, n, 0, 2.0) == seq.evaluate(n + 1, 2.0));
    }
    SUBCASE("constant families reduce to the bare gauge") {
        GaugeSequence seq(half, GaugeSequence::Kind::constant, 0.0, 0.0);
        BoundSequence B = kirk_reduce(seq, 1, grid);
        CHECK(B.schedule().kind() == DecaySchedule::Kind::zero);
        for (double t : grid) CHECK(evaluate_bound(B, 3, 0, t) == half(t));
    }
    SUBCASE("members must be nondecreasing on the probe grid") {
        GaugeSpec jump =
            GaugeSpec::piecewise({0.0, 1.0, 1.0, 2.0}, {0.0, 0.6, 0.3, 0.3}, false);
        GaugeSequence seq(jump, GaugeSequence::Kind::additive_harmonic, 1.0, 0.0);
        CHECK_THROWS_AS(kirk_reduce(seq, 1, uniform_grid(2.0, 64)), PreconditionError);
    }
}

TEST_CASE("the reduction chain holds link by link on sampled pairs") {
    auto dom = ball_domain(1, 2.0);
    RandomOperator f = RandomOperator::scale(dom, vec({0.5}));
    GaugeSequence seq(GaugeSpec::linear(0.5), GaugeSequence::Kind::additive_harmonic, 1.0,
                      0.0);
    BoundSequence B = kirk_reduce(seq, 1, uniform_grid(4.0, 32));

    Rng rng(derive_subseed(11, "kirk_samples"));
    for (int k = 0; k < 50; ++k) {
        FibrePoint x = sample_point(*dom, rng);
        FibrePoint y = sample_point(*dom, rng);
        double base_dist = block_distance(x, y)[0];
        double upper = u_metric(f, x, y)[0];
        for (int n = 1; n <= 6; ++n) {
            FibrePoint fx = iterate(f, x, n);
            FibrePoint fy = iterate(f, y, n);
            double switched = l_metric(f, fx, fy)[0];
            double image = block_distance(apply(f, fx), apply(f, fy))[0];
            CHECK(switched <= image + 1e-12);
            CHECK(image <= seq.evaluate(n + 1, base_dist) + 1e-12);
            CHECK(seq.evaluate(n + 1, base_dist) <= evaluate_bound(B, n, 0, upper) + 1e-12);
        }
    }
}

TEST_CASE("distances collapse at certified fixed points") {
    auto dom = ball_domain(1, 2.0);
    RandomOperator f = RandomOperator::scale(dom, vec({0.5}));

    SUBCASE("a single fixed point compares to itself at distance zero") {
        FibrePoint z = column({0.0});
        StageResult s = fixed_point_metric_identities(f, z, z, 1e-8);
        CHECK(s.verdict == Verdict::pass);
        CHECK(s.details.at("distance")[0].get<double>() == 0.0);
    }
    SUBCASE("two independently solved points satisfy the identities") {
        FixedPointResult a = picard_solve(f, column({1.0}), 1e-8, 200);
        FixedPointResult b = picard_solve(f, column({-1.0}), 1e-8, 200);
        StageResult s = fixed_point_metric_identities(f, a.z, b.z, 1e-8);
        CHECK(s.verdict == Verdict::pass);
    }
    SUBCASE("the identities hold even when the fixed point is not unique") {
        FiniteRegion r{{vec({0.0}), vec({1.0})}};
        auto two = std::make_shared<const FibreSet>(
            1, std::vector<Region>{Region(r)}, 1.0, true);
        RandomOperator ident = RandomOperator::table(two, {{0, 1}});
        StageResult s =
            fixed_point_metric_identities(ident, column({0.0}), column({1.0}), 1e-8);
        CHECK(s.verdict == Verdict::pass);
        CHECK(s.details.at("distance")[0].get<double>() == 1.0);

        // and the contraction certificate for the same operator fails on them
        BoundSequence plain(GaugeSpec::linear(0.5), Perturbation::additive,
                            DecaySchedule::none(1));
        CertificationReport rep = verify_contraction(ident, plain, 5, 2, 1);
        CHECK(!rep.ok());
    }
    SUBCASE("points that are not fixed are rejected up front") {
        CHECK_THROWS_AS(
            fixed_point_metric_identities(f, column({1.0}), column({0.0}), 1e-8),
            PreconditionError);
        CHECK_THROWS_AS(
            fixed_point_metric_identities(f, column({0.0}), column({0.0}), 0.0),
            DomainError);
    }
}

TEST_CASE("the staged audit runs hypothesis checks in dependency order") {
    ProbSpace space(vec({0.6, 0.4}));
    auto dom = ball_domain(2, 2.0);

    ScenarioBundle sc{space,
                      dom,
                      RandomOperator::scale(dom, vec({0.5, 0.25})),
                      GaugeSpec::linear(0.5),
                      harmonic_bounds(2),
                      std::nullopt,
                      SolveConfig{column({1.0, 1.0}), 1e-8, 200, kDefaultWindow,
                                  kDefaultTailFraction},
                      CertifyConfig{200, 10, 5, 256, {0.5, 0.25, 0.1}, {0.1, 0.01}},
                      "audit_fixture",
                      "0000000000000000"};

    SUBCASE("a sound scenario certifies green in the documented order") {
        CertificationReport rep = full_hypothesis_audit(sc);
        CHECK(rep.ok());
        std::vector<std::string> want{
            "essential_bound_check",  "check_norm_axioms",
            "check_local_property",   "check_sigma_compat",
            "fibre_continuity_probe", "verify_gauge",
            "verify_majorant_props",  "local_uniform_convergence_check",
            "verify_contraction"};
        REQUIRE(rep.stages.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) CHECK(rep.stages[i].id == want[i]);
    }
    SUBCASE("the first failing stage halts the pipeline") {
        ScenarioBundle broken = sc;
        std::vector<Region> regions(2, Region(BallRegion{vec({0.0}), 2.0}));
        broken.set = std::make_shared<const FibreSet>(1, std::move(regions), 0.5, true);
        broken.f = RandomOperator::scale(broken.set, vec({0.5, 0.25}));
        CertificationReport rep = full_hypothesis_audit(broken);
        CHECK(!rep.ok());
        CHECK(rep.first_failure == "essential_bound_check");
        bool saw_skip = false;
        for (const StageResult& s : rep.stages)
            if (s.verdict == Verdict::inconclusive) saw_skip |= has_note(s, "skipped");
        CHECK(saw_skip);
    }
}
