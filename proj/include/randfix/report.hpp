#ifndef RANDFIX_REPORT_HPP
#define RANDFIX_REPORT_HPP

// Result containers shared by every check in the library. A check never
// throws on a mathematical violation; it returns one of these with the
// offending samples recorded so the verdict can be replayed from the seed.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace randfix {

enum class Verdict { pass, probe_pass, inconclusive, fail };

const char* verdict_name(Verdict v);

// One concrete counterexample: which check tripped, where, and the two
// sides of the inequality that failed.
struct Violation {
    std::string check;
    int atom = -1;
    std::int64_t sample = -1;  // pair / sample ordinal within the stage
    int n = -1;                // iteration index when relevant
    double left = 0.0;
    double right = 0.0;
    double slack = 0.0;
};

struct StageResult {
    std::string id;
    Verdict verdict = Verdict::pass;
    std::vector<std::string> notes;
    std::vector<Violation> violations;
    nlohmann::json details;  // stage-specific numbers (counts, extrema, ...)

    bool ok() const { return verdict == Verdict::pass || verdict == Verdict::probe_pass; }
    void fail_with(Violation v);
    void note(std::string text) { notes.push_back(std::move(text)); }
};

struct CertificationReport {
    std::string scenario;
    std::string scenario_hash;
    std::uint64_t seed = 0;
    std::string command;
    std::vector<StageResult> stages;
    Verdict overall = Verdict::pass;
    std::string first_failure;  // empty when everything passed

    void push(StageResult stage);
    bool ok() const { return overall == Verdict::pass || overall == Verdict::probe_pass; }
    const StageResult* find(const std::string& id) const;
};

nlohmann::json to_json(const Violation& v);
nlohmann::json to_json(const StageResult& s);
nlohmann::json to_json(const CertificationReport& r);

// Writes `text` to `path` through a temporary file and a rename, so readers
// never observe a half-written report.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace randfix

#endif
