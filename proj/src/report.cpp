#include "randfix/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace randfix {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::probe_pass: return "probe-pass";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::fail: return "fail";
    }
    return "unknown";
}

void StageResult::fail_with(Violation v) {
    verdict = Verdict::fail;
    violations.push_back(std::move(v));
}

void CertificationReport::push(StageResult stage) {
    if (stage.verdict == Verdict::fail && first_failure.empty())
        first_failure = stage.id;
    // A probe downgrade never hides a hard failure, and inconclusive stages
    // leave the aggregate untouched.
    switch (stage.verdict) {
        case Verdict::fail:
            overall = Verdict::fail;
            break;
        case Verdict::probe_pass:
            if (overall == Verdict::pass) overall = Verdict::probe_pass;
            break;
        default:
            break;
    }
    stages.push_back(std::move(stage));
}

const StageResult* CertificationReport::find(const std::string& id) const {
    for (const StageResult& s : stages)
        if (s.id == id) return &s;
    return nullptr;
}

nlohmann::json to_json(const Violation& v) {
    return nlohmann::json{{"check", v.check}, {"atom", v.atom},   {"sample", v.sample},
                          {"n", v.n},         {"left", v.left},   {"right", v.right},
                          {"slack", v.slack}};
}

nlohmann::json to_json(const StageResult& s) {
    nlohmann::json j;
    j["id"] = s.id;
    j["verdict"] = verdict_name(s.verdict);
    j["notes"] = s.notes;
    nlohmann::json viols = nlohmann::json::array();
    for (const Violation& v : s.violations) viols.push_back(to_json(v));
    j["violations"] = viols;
    j["details"] = s.details.is_null() ? nlohmann::json::object() : s.details;
    return j;
}

nlohmann::json to_json(const CertificationReport& r) {
    nlohmann::json j;
    j["scenario"] = r.scenario;
    j["scenario_hash"] = r.scenario_hash;
    j["seed"] = r.seed;
    j["command"] = r.command;
    nlohmann::json stages = nlohmann::json::array();
    for (const StageResult& s : r.stages) stages.push_back(to_json(s));
    j["stages"] = stages;
    j["verdict"] = verdict_name(r.overall);
    j["first_failure"] = r.first_failure;
    return j;
}

void write_file_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot move " + tmp + " into place");
}

}  // namespace randfix
