#include "randfix/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <utility>

#include "randfix/quasi_metrics.hpp"
#include "randfix/sampling.hpp"

namespace randfix {

namespace {

std::string join(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

void write_report(const CertificationReport& rep, const std::string& path) {
    write_file_atomic(path, to_json(rep).dump(2) + "\n");
}

CertificationReport make_report(const ScenarioBundle& b, const char* command) {
    CertificationReport rep;
    rep.scenario = b.name;
    rep.scenario_hash = b.hash;
    rep.seed = b.certify.seed;
    rep.command = command;
    return rep;
}

// Runs one certify stage, converting an escaped exception into a failed
// stage instead of killing the whole command.
void guarded(CertificationReport& rep, const std::string& id,
             const std::function<StageResult()>& fn) {
    StageResult stage;
    try {
        stage = fn();
    } catch (const std::exception& e) {
        stage = StageResult{};
        stage.id = id;
        stage.verdict = Verdict::fail;
        stage.note(std::string("stage aborted: ") + e.what());
    }
    if (stage.id.empty()) stage.id = id;
    rep.push(std::move(stage));
}

std::vector<PointPair> seeded_pairs(const FibreSet& set, int count, std::uint64_t seed,
                                    std::string_view label) {
    Rng rng(derive_subseed(seed, label));
    std::vector<PointPair> pairs;
    pairs.reserve(count);
    for (int i = 0; i < count; ++i) {
        FibrePoint x = sample_point(set, rng);
        FibrePoint y = sample_point(set, rng);
        pairs.emplace_back(std::move(x), std::move(y));
    }
    return pairs;
}

nlohmann::json point_rows(const FibrePoint& p) {
    nlohmann::json rows = nlohmann::json::array();
    for (int a = 0; a < p.atoms(); ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < p.dim(); ++j) row.push_back(p.block(a)[j]);
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json value_entries(const L0Value& v) {
    nlohmann::json out = nlohmann::json::array();
    for (int a = 0; a < v.atoms(); ++a) out.push_back(v[a]);
    return out;
}

std::string render_trace_csv(const IterationTrace& tr, const FibrePoint& z) {
    std::string out = "n,atom_id,d_n,a_n_window,residual_n,dist_to_z\n";
    char buf[160];
    for (int n = 0; n < tr.rows(); ++n) {
        const L0Value dist = block_distance(tr.iterates[n], z);
        for (int a = 0; a < tr.atom_count(); ++a) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", n, a,
                          tr.steps(n, a), tr.window_sup(n, a), tr.steps(n, a), dist[a]);
            out += buf;
        }
    }
    return out;
}

StageResult solve_stage_result(const FixedPointResult& run, const SolveConfig& cfg) {
    StageResult stage;
    stage.id = "picard_solve";
    stage.verdict = run.converged() ? Verdict::pass : Verdict::fail;
    stage.details["iterations"] = run.iterations;
    stage.details["stop"] = stop_reason_name(run.trace.stop);
    stage.details["tol"] = cfg.tol;
    stage.details["max_iter"] = cfg.max_iter;
    stage.details["window"] = cfg.window;
    stage.details["z"] = point_rows(run.z);
    stage.details["residual"] = value_entries(run.residual);
    stage.details["residual_max"] = run.residual.max();
    if (!run.converged())
        stage.note("orbit did not settle within max_iter; the trace is still recorded");
    return stage;
}

StageResult epsilon_lambda_stage(const ProbSpace& space, const IterationTrace& tr,
                                 const FibrePoint& z, const CertifyConfig& cfg) {
    StageResult stage;
    stage.id = "epsilon_lambda_report";
    const std::vector<CutoffRow> rows =
        epsilon_lambda_report(space, tr, z, cfg.epsilons, cfg.lambdas);
    nlohmann::json table = nlohmann::json::array();
    for (const CutoffRow& r : rows) {
        table.push_back({{"epsilon", r.epsilon},
                         {"lambda", r.lambda},
                         {"cutoff", r.cutoff},
                         {"within_range", r.within_range}});
        if (!r.within_range) {
            Violation v;
            v.check = "cutoff_missing";
            v.left = r.epsilon;
            v.right = r.lambda;
            v.n = r.cutoff;
            stage.fail_with(v);
        }
    }
    stage.details["table"] = std::move(table);
    if (stage.verdict == Verdict::fail)
        stage.note("no stored index keeps the later iterates within epsilon");
    return stage;
}

// Sampled starts for the cross-check: the scenario start plus draws from the
// domain, kept only when distinct from the starts already collected.
std::vector<FibrePoint> gather_starts(const ScenarioBundle& b, int want) {
    Rng rng(derive_subseed(b.certify.seed, "uniqueness_starts"));
    std::vector<FibrePoint> starts{b.solve.x0};
    int attempts = 0;
    while (static_cast<int>(starts.size()) < want && attempts < 64) {
        ++attempts;
        FibrePoint cand = sample_point(*b.set, rng);
        bool dup = false;
        for (const FibrePoint& s : starts)
            if (block_distance(cand, s).max() <= 1e-12) {
                dup = true;
                break;
            }
        if (!dup) starts.push_back(std::move(cand));
    }
    return starts;
}

StageResult adjacent_switch_stage(const RandomOperator& f, const IterationTrace& tr) {
    StageResult stage;
    stage.id = "orbit_adjacent_switch";
    const int pairs = std::min(tr.rows() - 1, 2000);
    if (pairs < 1) {
        stage.verdict = Verdict::inconclusive;
        stage.note("trace has no adjacent pair with a recorded next step");
        return stage;
    }
    double worst = 0.0;
    for (int n = 0; n < pairs; ++n) {
        const L0Value lower = l_metric(f, tr.iterates[n], tr.iterates[n + 1]);
        for (int a = 0; a < tr.atom_count(); ++a) {
            const double diff = std::abs(lower[a] - tr.steps(n + 1, a));
            worst = std::max(worst, diff);
            if (diff > 1e-12) {
                Violation v;
                v.check = "adjacent_switch";
                v.atom = a;
                v.sample = n;
                v.left = lower[a];
                v.right = tr.steps(n + 1, a);
                v.slack = 1e-12;
                stage.fail_with(v);
            }
        }
    }
    stage.details["pairs_checked"] = pairs;
    stage.details["max_abs_diff"] = worst;
    if (pairs < tr.rows() - 1) stage.note("long trace; switch audit capped at 2000 pairs");
    return stage;
}

StageResult limsup_orbit_stage(const ScenarioBundle& b, const IterationTrace& tr) {
    StageResult stage;
    stage.id = "limsup_exchange_orbit";
    nlohmann::json per_atom = nlohmann::json::array();
    for (int a = 0; a < tr.atom_count(); ++a) {
        std::vector<double> seq(tr.rows());
        for (int n = 0; n < tr.rows(); ++n) seq[n] = tr.steps(n, a);
        StageResult sub = limsup_exchange_oracle(seq, b.psi, b.solve.tail_fraction,
                                                 b.certify.grid_density);
        for (Violation v : sub.violations) {
            v.atom = a;
            stage.fail_with(std::move(v));
        }
        if (sub.verdict == Verdict::fail) stage.verdict = Verdict::fail;
        sub.details["atom"] = a;
        per_atom.push_back(sub.details);
    }
    stage.details["per_atom"] = std::move(per_atom);
    stage.note("orbit step sequences d_n, per atom");
    return stage;
}

StageResult limsup_synthetic_stage(const ScenarioBundle& b) {
    StageResult stage;
    stage.id = "limsup_exchange_synthetic";
    const GaugeSpec half = GaugeSpec::linear(0.5);

    std::vector<double> constant(64, 0.7);
    std::vector<double> alternating(256);
    for (std::size_t n = 0; n < alternating.size(); ++n)
        alternating[n] = 1.0 + (n % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(n + 2);
    std::vector<double> dyadic(64);
    for (std::size_t n = 0; n < dyadic.size(); ++n)
        dyadic[n] = std::pow(2.0, -static_cast<double>(n));

    const std::pair<const char*, const std::vector<double>*> probes[] = {
        {"constant", &constant}, {"alternating", &alternating}, {"dyadic", &dyadic}};
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& [label, seq] : probes) {
        StageResult sub =
            limsup_exchange_oracle(*seq, half, 0.25, b.certify.grid_density);
        for (Violation v : sub.violations) stage.fail_with(std::move(v));
        if (sub.verdict == Verdict::fail) stage.verdict = Verdict::fail;
        sub.details["sequence"] = label;
        runs.push_back(sub.details);
    }
    stage.details["sequences"] = std::move(runs);
    return stage;
}

}  // namespace

std::string resolve_out_dir(const std::string& flag_value) {
    std::string dir = flag_value;
    if (dir.empty()) {
        const char* env = std::getenv("RANDFIX_OUT_DIR");
        if (env != nullptr && *env != '\0') dir = env;
    }
    if (dir.empty()) dir = ".";
    std::filesystem::create_directories(dir);
    return dir;
}

int cmd_validate(const Scenario& sc, const std::string& out_dir) {
    const ScenarioBundle b = sc.bundle();
    CertificationReport rep = full_hypothesis_audit(b);
    rep.command = "validate";
    write_report(rep, join(out_dir, b.name + "_validate.json"));
    return rep.ok() ? kExitOk : kExitCertFail;
}

int cmd_solve(const Scenario& sc, const std::string& out_dir) {
    const ScenarioBundle b = sc.bundle();
    CertificationReport rep = make_report(b, "solve");

    const FixedPointResult run =
        picard_solve(b.f, b.solve.x0, b.solve.tol, b.solve.max_iter, b.solve.window);
    rep.push(solve_stage_result(run, b.solve));

    guarded(rep, "adjacent_distance_check",
            [&] { return adjacent_distance_check(run.trace, b.solve.tail_fraction); });
    guarded(rep, "cauchy_check",
            [&] { return cauchy_check(run.trace, b.solve.tail_fraction); });
    guarded(rep, "epsilon_lambda_report",
            [&] { return epsilon_lambda_stage(b.space, run.trace, run.z, b.certify); });

    const std::vector<FibrePoint> starts = gather_starts(b, 3);
    std::vector<FixedPointResult> runs;
    if (starts.size() >= 2) {
        guarded(rep, "uniqueness_cross_check", [&] {
            StageResult s = uniqueness_cross_check(b.f, starts, b.solve.tol,
                                                   b.solve.max_iter, b.solve.window, &runs);
            s.details["start_count"] = starts.size();
            return s;
        });
    } else {
        StageResult s;
        s.id = "uniqueness_cross_check";
        s.verdict = Verdict::inconclusive;
        s.note("domain too small to draw a second distinct start");
        rep.push(std::move(s));
    }

    guarded(rep, "fixed_point_metric_identities", [&] {
        std::vector<const FixedPointResult*> settled;
        for (const FixedPointResult& r : runs)
            if (r.converged()) settled.push_back(&r);
        if (settled.size() < 2) {
            StageResult s;
            s.id = "fixed_point_metric_identities";
            s.verdict = Verdict::inconclusive;
            s.note("needs two converged runs to compare");
            return s;
        }
        return fixed_point_metric_identities(b.f, settled[0]->z, settled[1]->z, b.solve.tol);
    });

    write_report(rep, join(out_dir, b.name + "_solve.json"));
    write_file_atomic(join(out_dir, b.name + "_trace.csv"),
                      render_trace_csv(run.trace, run.z));
    return run.converged() ? kExitOk : kExitNoConverge;
}

int cmd_certify(const Scenario& sc, const std::string& out_dir) {
    const ScenarioBundle b = sc.bundle();
    CertificationReport rep = make_report(b, "certify");

    const std::vector<double> grid =
        uniform_grid(2.0 * b.set->essential_bound(), b.certify.grid_density);

    guarded(rep, "verify_gauge", [&] { return verify_gauge(b.psi, grid); });
    guarded(rep, "verify_majorant_props",
            [&] { return verify_majorant_props(b.psi, grid, b.certify.grid_density); });

    const FixedPointResult run =
        picard_solve(b.f, b.solve.x0, b.solve.tol, b.solve.max_iter, b.solve.window);
    guarded(rep, "limsup_exchange_orbit", [&] { return limsup_orbit_stage(b, run.trace); });
    guarded(rep, "limsup_exchange_synthetic", [&] { return limsup_synthetic_stage(b); });

    guarded(rep, "basic_comparisons", [&] {
        const auto pairs = seeded_pairs(*b.set, b.certify.sample_count, b.certify.seed,
                                        "quasi_metric_pairs");
        StageResult s = basic_comparisons(b.f, pairs);
        s.details["pairs"] = pairs.size();
        return s;
    });
    guarded(rep, "safe_estimate_oracle", [&] {
        const auto pairs = seeded_pairs(*b.set, 200, b.certify.seed, "safe_estimate_pairs");
        StageResult s = safe_estimate_oracle(b.f, pairs);
        s.details["pairs"] = pairs.size();
        return s;
    });

    guarded(rep, "orbit_adjacent_switch", [&] { return adjacent_switch_stage(b.f, run.trace); });
    guarded(rep, "orbit_inequality_audit", [&] {
        return orbit_inequality_audit(b.f, b.solve.x0, b.bounds,
                                      std::max(2, b.certify.n_max));
    });

    if (b.kirk.has_value()) {
        guarded(rep, "kirk_condition_check", [&] {
            CertificationReport sub =
                kirk_condition_check(b.f, *b.kirk, b.certify.sample_count,
                                     b.certify.n_max + 1, b.certify.seed);
            StageResult s = sub.stages.at(0);
            s.note("depth n_max + 1, so the reduced bounds inherit full depth");
            return s;
        });
        try {
            const BoundSequence reduced =
                kirk_reduce(*b.kirk, b.space.atom_count(), grid);
            StageResult red;
            red.id = "kirk_reduce";
            red.details["mode"] =
                reduced.mode() == Perturbation::additive ? "additive" : "multiplicative";
            rep.push(std::move(red));

            guarded(rep, "kirk_uniform_convergence", [&] {
                StageResult s = local_uniform_convergence_check(
                    reduced, 2.0 * b.set->essential_bound(), b.certify.epsilons,
                    b.certify.n_max, b.certify.grid_density);
                s.id = "kirk_uniform_convergence";
                return s;
            });
            guarded(rep, "kirk_reduced_contraction", [&] {
                CertificationReport sub =
                    verify_contraction(b.f, reduced, b.certify.sample_count,
                                       b.certify.n_max, b.certify.seed, "kirk_samples");
                StageResult s = sub.stages.at(0);
                s.id = "kirk_reduced_contraction";
                s.note("re-verification of the reduced bounds on the kirk sample pairs");
                return s;
            });
        } catch (const std::exception& e) {
            StageResult red;
            red.id = "kirk_reduce";
            red.verdict = Verdict::fail;
            red.note(std::string("stage aborted: ") + e.what());
            rep.push(std::move(red));
        }
    }

    write_report(rep, join(out_dir, b.name + "_certify.json"));
    return rep.ok() ? kExitOk : kExitCertFail;
}

int cmd_report(const std::vector<std::string>& paths, std::ostream& out) {
    if (paths.empty()) {
        out << "report: needs at least one report file\n";
        return kExitUsage;
    }
    struct Row {
        std::string scenario, command, stage, verdict;
    };
    std::vector<Row> rows;
    for (const std::string& path : paths) {
        std::ifstream in(path);
        if (!in) {
            out << "report: cannot open " << path << "\n";
            return kExitData;
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error&) {
            out << "report: " << path << " is not valid JSON\n";
            return kExitData;
        }
        if (!doc.is_object() || !doc.contains("scenario") || !doc["scenario"].is_string() ||
            !doc.contains("stages") || !doc["stages"].is_array()) {
            out << "report: " << path << " is not a certification report\n";
            return kExitData;
        }
        const std::string scenario = doc["scenario"].get<std::string>();
        const std::string command = doc.value("command", std::string("?"));
        for (const nlohmann::json& stage : doc["stages"]) {
            if (!stage.is_object() || !stage.contains("id") || !stage["id"].is_string() ||
                !stage.contains("verdict") || !stage["verdict"].is_string()) {
                out << "report: " << path << " has a malformed stage entry\n";
                return kExitData;
            }
            rows.push_back({scenario, command, stage["id"].get<std::string>(),
                            stage["verdict"].get<std::string>()});
        }
    }

    std::size_t w_scen = 8, w_cmd = 7, w_stage = 5;
    for (const Row& r : rows) {
        w_scen = std::max(w_scen, r.scenario.size());
        w_cmd = std::max(w_cmd, r.command.size());
        w_stage = std::max(w_stage, r.stage.size());
    }
    const auto pad = [&out](const std::string& text, std::size_t width) {
        out << text;
        for (std::size_t i = text.size(); i < width + 2; ++i) out << ' ';
    };
    pad("scenario", w_scen);
    pad("command", w_cmd);
    pad("stage", w_stage);
    out << "verdict\n";
    int fails = 0, probes = 0, inconclusive = 0;
    for (const Row& r : rows) {
        pad(r.scenario, w_scen);
        pad(r.command, w_cmd);
        pad(r.stage, w_stage);
        out << r.verdict << "\n";
        if (r.verdict == "fail") ++fails;
        if (r.verdict == "probe-pass") ++probes;
        if (r.verdict == "inconclusive") ++inconclusive;
    }
    out << rows.size() << " stages: " << rows.size() - fails - probes - inconclusive
        << " pass, " << probes << " probe-pass, " << inconclusive << " inconclusive, "
        << fails << " fail\n";
    for (const Row& r : rows)
        if (r.verdict == "fail")
            out << "failing: " << r.scenario << " / " << r.command << " / " << r.stage
                << "\n";
    return fails == 0 ? kExitOk : kExitCertFail;
}

}  // namespace randfix
