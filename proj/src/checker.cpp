#include "randfix/checker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "randfix/sampling.hpp"

namespace randfix {

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct PairSet {
    std::vector<PointPair> pairs;
    bool exhaustive = false;
    std::size_t sections = 0;
};

// Exhaustive unordered pairs when the whole set is small enough to
// enumerate; seeded sampling otherwise. The quantities checked against the
// pairs are symmetric in (x, y), so unordered pairs cover everything.
PairSet make_pairs(const FibreSet& set, int sample_count, std::uint64_t seed,
                   std::string_view label) {
    PairSet out;
    if (set.all_regions_finite()) {
        std::vector<FibrePoint> pts;
        bool enumerated = true;
        try {
            pts = enumerate_sections(set);
        } catch (const PreconditionError&) {
            enumerated = false;  // too many sections; fall back to sampling
        }
        if (enumerated && pts.size() * (pts.size() + 1) / 2 <= 200000) {
            out.exhaustive = true;
            out.sections = pts.size();
            for (std::size_t i = 0; i < pts.size(); ++i)
                for (std::size_t j = i; j < pts.size(); ++j)
                    out.pairs.emplace_back(pts[i], pts[j]);
            return out;
        }
    }
    Rng rng(derive_subseed(seed, label));
    out.pairs.reserve(sample_count);
    for (int k = 0; k < sample_count; ++k) {
        FibrePoint x = sample_point(set, rng);
        FibrePoint y = sample_point(set, rng);
        out.pairs.emplace_back(std::move(x), std::move(y));
    }
    return out;
}

void describe_pairs(StageResult& stage, const PairSet& ps, int n_max, std::uint64_t seed,
                    std::string_view label) {
    if (ps.exhaustive)
        stage.note("exhaustive: " + std::to_string(ps.sections) + " sections, " +
                   std::to_string(ps.pairs.size()) + " pairs");
    else
        stage.note("sampled: " + std::to_string(ps.pairs.size()) + " pairs");
    stage.details = {{"mode", ps.exhaustive ? "exhaustive" : "sampled"},
                     {"pairs", ps.pairs.size()},
                     {"n_max", n_max},
                     {"seed", seed},
                     {"sample_label", std::string(label)}};
}

StageResult contraction_stage(const RandomOperator& f, const BoundSequence& B,
                              int sample_count, int n_max, std::uint64_t seed,
                              std::string_view label) {
    if (sample_count < 1) throw PreconditionError("need at least one sample pair");
    if (n_max < 1) throw DomainError("contraction check depth must be at least 1");
    if (B.atoms() != f.domain().atoms())
        throw ShapeError("bound sequence and operator disagree on atom count");

    StageResult stage;
    stage.id = "verify_contraction";
    const PairSet ps = make_pairs(f.domain(), sample_count, seed, label);
    const int atoms = f.domain().atoms();
    const std::size_t report_cap = 32;
    std::size_t suppressed = 0;
    std::size_t grazes = 0;
    double worst_margin = std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < ps.pairs.size(); ++k) {
        const FibrePoint& x = ps.pairs[k].first;
        const FibrePoint& y = ps.pairs[k].second;
        const L0Value U = u_metric(f, x, y);
        FibrePoint xi = x;
        FibrePoint yi = y;
        for (int n = 1; n <= n_max; ++n) {
            xi = apply(f, xi);
            yi = apply(f, yi);
            const L0Value L = l_metric(f, xi, yi);
            for (int a = 0; a < atoms; ++a) {
                const double bound = B.evaluate(n, a, U[a]);
                worst_margin = std::min(worst_margin, bound - L[a]);
                if (L[a] > bound + kContractionSlack) {
                    if (stage.violations.size() < report_cap)
                        stage.fail_with({"contraction", a, static_cast<std::int64_t>(k), n,
                                         L[a], bound, kContractionSlack});
                    else {
                        stage.verdict = Verdict::fail;
                        ++suppressed;
                    }
                } else if (L[a] > bound) {
                    ++grazes;
                }
            }
        }
    }

    if (suppressed > 0)
        stage.note(std::to_string(suppressed) + " further violations suppressed");
    if (grazes > 0) {
        stage.note(std::to_string(grazes) + " overshoots within the slack tolerance");
        if (stage.verdict == Verdict::pass) stage.verdict = Verdict::probe_pass;
    }
    describe_pairs(stage, ps, n_max, seed, label);
    stage.details["worst_margin"] = worst_margin;
    return stage;
}

StageResult kirk_stage(const RandomOperator& f, const GaugeSequence& seq, int sample_count,
                       int n_max, std::uint64_t seed) {
    if (sample_count < 1) throw PreconditionError("need at least one sample pair");
    if (n_max < 1) throw DomainError("kirk check depth must be at least 1");

    StageResult stage;
    stage.id = "kirk_condition_check";
    const PairSet ps = make_pairs(f.domain(), sample_count, seed, "kirk_samples");
    const int atoms = f.domain().atoms();
    const std::size_t report_cap = 32;
    std::size_t suppressed = 0;
    std::size_t grazes = 0;
    double worst_margin = std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < ps.pairs.size(); ++k) {
        const FibrePoint& x = ps.pairs[k].first;
        const FibrePoint& y = ps.pairs[k].second;
        const L0Value d0 = block_distance(x, y);
        FibrePoint xi = x;
        FibrePoint yi = y;
        for (int n = 1; n <= n_max; ++n) {
            xi = apply(f, xi);
            yi = apply(f, yi);
            const L0Value dn = block_distance(xi, yi);
            for (int a = 0; a < atoms; ++a) {
                const double bound = seq.evaluate(n, d0[a]);
                worst_margin = std::min(worst_margin, bound - dn[a]);
                if (dn[a] > bound + kContractionSlack) {
                    if (stage.violations.size() < report_cap)
                        stage.fail_with({"kirk_bound", a, static_cast<std::int64_t>(k), n,
                                         dn[a], bound, kContractionSlack});
                    else {
                        stage.verdict = Verdict::fail;
                        ++suppressed;
                    }
                } else if (dn[a] > bound) {
                    ++grazes;
                }
            }
        }
    }

    if (suppressed > 0)
        stage.note(std::to_string(suppressed) + " further violations suppressed");
    if (grazes > 0) {
        stage.note(std::to_string(grazes) + " overshoots within the slack tolerance");
        if (stage.verdict == Verdict::pass) stage.verdict = Verdict::probe_pass;
    }
    describe_pairs(stage, ps, n_max, seed, "kirk_samples");
    stage.details["worst_margin"] = worst_margin;
    return stage;
}

CertificationReport wrap_stage(StageResult stage, std::uint64_t seed) {
    CertificationReport report;
    report.seed = seed;
    report.push(std::move(stage));
    return report;
}

}  // namespace

CertificationReport verify_contraction(const RandomOperator& f, const BoundSequence& B,
                                       int sample_count, int n_max, std::uint64_t seed,
                                       std::string_view sample_label) {
    return wrap_stage(contraction_stage(f, B, sample_count, n_max, seed, sample_label), seed);
}

CertificationReport kirk_condition_check(const RandomOperator& f, const GaugeSequence& seq,
                                         int sample_count, int n_max, std::uint64_t seed) {
    return wrap_stage(kirk_stage(f, seq, sample_count, n_max, seed), seed);
}

BoundSequence kirk_reduce(const GaugeSequence& seq, int atoms,
                          const std::vector<double>& grid, int check_depth) {
    if (atoms < 1) throw ShapeError("need at least one atom");
    if (check_depth < 1) throw DomainError("check depth must be at least 1");
    for (int n = 1; n <= check_depth; ++n) {
        double prev = -std::numeric_limits<double>::infinity();
        for (double t : grid) {
            const double v = seq.evaluate(n, t);
            if (v < prev - 1e-12)
                throw PreconditionError("gauge sequence member " + std::to_string(n) +
                                        " is not nondecreasing on the grid");
            prev = v;
        }
    }

    switch (seq.kind()) {
        case GaugeSequence::Kind::constant:
            return BoundSequence(seq.limit(), Perturbation::additive,
                                 DecaySchedule::none(atoms));
        case GaugeSequence::Kind::additive_harmonic:
            // psi_{n+1} adds scale / (n + 1): a harmonic schedule verbatim.
            return BoundSequence(
                seq.limit(), Perturbation::additive,
                DecaySchedule::harmonic(Eigen::VectorXd::Constant(atoms, seq.scale())));
        case GaugeSequence::Kind::additive_geometric:
            // psi_{n+1} adds scale * ratio^(n+1) = (scale * ratio) * ratio^n.
            return BoundSequence(
                seq.limit(), Perturbation::additive,
                DecaySchedule::geometric(
                    Eigen::VectorXd::Constant(atoms, seq.scale() * seq.ratio()),
                    Eigen::VectorXd::Constant(atoms, seq.ratio())));
    }
    throw DomainError("unknown gauge sequence kind");
}

StageResult fixed_point_metric_identities(const RandomOperator& f, const FibrePoint& z1,
                                          const FibrePoint& z2, double residual_tol) {
    if (!(residual_tol > 0.0))
        throw DomainError("residual tolerance must be positive");

    const L0Value r1 = block_distance(z1, apply(f, z1));
    const L0Value r2 = block_distance(z2, apply(f, z2));
    for (int a = 0; a < r1.atoms(); ++a) {
        if (r1[a] > residual_tol)
            throw PreconditionError("first point is not fixed: residual " + fmt_g(r1[a]) +
                                    " at atom " + std::to_string(a) + " exceeds " +
                                    fmt_g(residual_tol));
        if (r2[a] > residual_tol)
            throw PreconditionError("second point is not fixed: residual " + fmt_g(r2[a]) +
                                    " at atom " + std::to_string(a) + " exceeds " +
                                    fmt_g(residual_tol));
    }

    StageResult stage;
    stage.id = "fixed_point_metric_identities";
    const L0Value base = block_distance(z1, z2);
    const L0Value P = p_metric(f, z1, z2);
    const L0Value L = l_metric(f, z1, z2);
    const L0Value U = u_metric(f, z1, z2);
    for (int a = 0; a < base.atoms(); ++a) {
        const double allow = r1[a] + r2[a] + 1e-12;
        if (std::abs(P[a] - base[a]) > allow)
            stage.fail_with({"p_identity", a, -1, -1, P[a], base[a], allow});
        if (std::abs(L[a] - base[a]) > allow)
            stage.fail_with({"l_identity", a, -1, -1, L[a], base[a], allow});
        if (std::abs(U[a] - base[a]) > allow)
            stage.fail_with({"u_identity", a, -1, -1, U[a], base[a], allow});
    }

    nlohmann::json dist = nlohmann::json::array();
    for (int a = 0; a < base.atoms(); ++a) dist.push_back(base[a]);
    stage.details = {{"distance", dist},
                     {"residual_1", r1.max()},
                     {"residual_2", r2.max()},
                     {"residual_tol", residual_tol}};
    return stage;
}

CertificationReport full_hypothesis_audit(const ScenarioBundle& sc) {
    CertificationReport report;
    report.scenario = sc.name;
    report.scenario_hash = sc.hash;
    report.seed = sc.certify.seed;

    bool halted = false;
    auto run = [&](const char* id, auto&& make) {
        StageResult stage;
        if (halted) {
            stage.id = id;
            stage.verdict = Verdict::inconclusive;
            stage.note("skipped: earlier stage failed");
        } else {
            try {
                stage = make();
            } catch (const std::exception& e) {
                stage = StageResult{};
                stage.id = id;
                stage.verdict = Verdict::fail;
                stage.note(std::string("stage aborted: ") + e.what());
            }
            if (stage.verdict == Verdict::fail) halted = true;
        }
        report.push(std::move(stage));
    };

    const int sample_n = 50;

    run("essential_bound_check", [&] {
        StageResult s;
        s.id = "essential_bound_check";
        const EssentialBoundReport rep = essential_bound_check(*sc.set);
        if (!rep.ok)
            s.fail_with({"essential_bound", rep.worst_atom, -1, -1, rep.worst_radius,
                         sc.set->essential_bound(), 0.0});
        s.details = {{"declared_bound", sc.set->essential_bound()},
                     {"worst_atom", rep.worst_atom},
                     {"worst_radius", rep.worst_radius}};
        return s;
    });

    run("check_norm_axioms", [&] {
        Rng rng(derive_subseed(sc.certify.seed, "check_norm_axioms"));
        const std::vector<FibrePoint> samples = sample_points(*sc.set, sample_n, rng);
        std::vector<L0Value> scalars;
        for (int k = 0; k < 8; ++k) {
            Eigen::VectorXd v(sc.space.atom_count());
            for (Eigen::Index a = 0; a < v.size(); ++a) v[a] = rng.uniform(-2.0, 2.0);
            scalars.push_back(L0Value(std::move(v)));
        }
        return check_norm_axioms(sc.space, samples, scalars);
    });

    run("check_local_property", [&] {
        Rng rng(derive_subseed(sc.certify.seed, "check_local_property"));
        const std::vector<FibrePoint> samples = sample_points(*sc.set, sample_n, rng);
        std::vector<AtomEvent> events;
        events.reserve(sample_n);
        for (int k = 0; k < sample_n; ++k)
            events.push_back(sample_event(sc.space.atom_count(), rng));
        return check_local_property(sc.f, samples, events);
    });

    run("check_sigma_compat", [&] {
        Rng rng(derive_subseed(sc.certify.seed, "check_sigma_compat"));
        std::vector<std::vector<AtomEvent>> partitions;
        std::vector<std::vector<FibrePoint>> lists;
        for (int k = 0; k < sample_n; ++k) {
            std::vector<AtomEvent> part = sample_partition(sc.space.atom_count(), rng);
            lists.push_back(sample_points(*sc.set, static_cast<int>(part.size()), rng));
            partitions.push_back(std::move(part));
        }
        return check_sigma_compat(sc.f, sc.space, partitions, lists);
    });

    run("fibre_continuity_probe", [&] {
        Rng rng(derive_subseed(sc.certify.seed, "fibre_continuity_probe"));
        return fibre_continuity_probe(sc.f, sc.solve.x0, {1e-1, 1e-2, 1e-3}, rng);
    });

    const double interval_hi = 2.0 * sc.set->essential_bound();
    const std::vector<double> grid = uniform_grid(interval_hi, sc.certify.grid_density);

    run("verify_gauge", [&] { return verify_gauge(sc.psi, grid); });

    run("verify_majorant_props",
        [&] { return verify_majorant_props(sc.psi, grid, sc.certify.grid_density); });

    run("local_uniform_convergence_check", [&] {
        return local_uniform_convergence_check(sc.bounds, interval_hi, sc.certify.epsilons,
                                               sc.certify.n_max, sc.certify.grid_density);
    });

    run("verify_contraction", [&] {
        return contraction_stage(sc.f, sc.bounds, sc.certify.sample_count, sc.certify.n_max,
                                 sc.certify.seed, "verify_contraction");
    });

    return report;
}

}  // namespace randfix
