#ifndef RANDFIX_SCENARIO_HPP
#define RANDFIX_SCENARIO_HPP

// Scenario files: one JSON document bundling the space, the fibre set, the
// operator, the gauge, the bound sequence, and the solve/certify knobs.
// Loading validates strictly (unknown keys are errors), expands the
// shorthand broadcasts, and fills documented defaults, so the in-memory
// document is canonical: serializing and reloading reproduces it exactly,
// and its hash identifies the scenario in every report.

#include <json.hpp>
#include <string>

#include "randfix/checker.hpp"

namespace randfix {

class Scenario {
  public:
    static Scenario load(const std::string& path);
    // `origin` names the source in error messages (a path, or "<memory>").
    static Scenario from_json(nlohmann::json doc, const std::string& origin);

    const nlohmann::json& doc() const { return doc_; }
    std::string name() const;
    // Compact dump with sorted keys; the round-trip identity is on this form.
    std::string canonical_text() const;
    // FNV-1a of the canonical text, as 16 hex digits.
    std::string hash() const;

    // Builds the typed objects. All construction-time validation has
    // already run at load, so this does not fail on a loaded scenario.
    ScenarioBundle bundle() const;

  private:
    explicit Scenario(nlohmann::json doc) : doc_(std::move(doc)) {}
    nlohmann::json doc_;
};

}  // namespace randfix

#endif
