#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "randfix/errors.hpp"
#include "randfix/scenario.hpp"

using namespace randfix;
using nlohmann::json;

namespace {

const std::string kScenarioDir = std::string(RANDFIX_SOURCE_DIR) + "/scenarios";
const std::string kFixtureDir = std::string(RANDFIX_SOURCE_DIR) + "/tests/fixtures";

// minimal valid document to mutate in the error-path cases
json base_doc() {
    return json::parse(R"({
      "name": "inline",
      "space": { "weights": [0.5, 0.5] },
      "fibre": {
        "dim": 1,
        "bound": 2.0,
        "theta_in_set": true,
        "regions": { "type": "ball", "center": [0.0], "radius": 2.0 }
      },
      "operator": { "family": "scale", "alpha": 0.5 },
      "gauge": { "id": "half", "family": "linear", "alpha": 0.5 },
      "bounds": {
        "base": "half",
        "mode": "additive",
        "schedule": { "kind": "harmonic", "scale": 1.0 }
      },
      "solve": { "x0": 1.0 }
    })");
}

}  // namespace

TEST_CASE("a scenario file loads into a fully validated bundle") {
    Scenario sc = Scenario::load(kScenarioDir + "/scale_basic.json");
    CHECK(sc.name() == "scale_basic");
    CHECK(sc.hash().size() == 16);
    CHECK(sc.hash().find_first_not_of("0123456789abcdef") == std::string::npos);

    ScenarioBundle b = sc.bundle();
    CHECK(b.space.atom_count() == 2);
    CHECK(b.space.weight(0) == 0.7);
    CHECK(b.set->dim() == 1);
    CHECK(b.set->atoms() == 2);
    CHECK(b.set->essential_bound() == 2.0);
    CHECK(std::string(b.f.family()) == "scale");
    CHECK(!b.kirk.has_value());
    CHECK(b.name == "scale_basic");
    CHECK(b.hash == sc.hash());

    SUBCASE("documented defaults are filled into the document") {
        CHECK(b.solve.tol == 1e-8);
        CHECK(b.solve.max_iter == 10000);
        CHECK(b.solve.window == 16);
        CHECK(b.solve.tail_fraction == 0.25);
        CHECK(b.certify.sample_count == 500);
        CHECK(b.certify.n_max == 20);
        CHECK(b.certify.seed == 7);
        CHECK(b.certify.grid_density == 1024);
        CHECK(b.certify.epsilons == std::vector<double>{0.5, 0.25, 0.1});
        CHECK(b.certify.lambdas == std::vector<double>{0.1, 0.01});
    }
    SUBCASE("shorthand broadcasts expand in the canonical document") {
        // alpha was written per atom; x0 was a scalar and covers both atoms
        const json& doc = sc.doc();
        CHECK(doc.at("solve").at("x0").size() == 2);
        CHECK(doc.at("solve").at("x0")[0][0].get<double>() == 1.0);
        CHECK(doc.at("fibre").at("regions").is_array());
        CHECK(doc.at("fibre").at("regions").size() == 2);
    }
}

TEST_CASE("canonical text round-trips through load for the whole corpus") {
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(kScenarioDir)) {
        if (entry.path().extension() != ".json") continue;
        ++seen;
        Scenario first = Scenario::load(entry.path().string());
        Scenario second = Scenario::from_json(json::parse(first.canonical_text()),
                                              entry.path().filename().string());
        CHECK(first.canonical_text() == second.canonical_text());
        CHECK(first.hash() == second.hash());
    }
    CHECK(seen == 10);
}

TEST_CASE("load errors carry their kind and field path") {
    SUBCASE("rejected invariants point at the offending value") {
        try {
            Scenario::load(kFixtureDir + "/bad_weights.json");
            CHECK(false);
        } catch (const ScenarioError& e) {
            CHECK(e.kind == ScenarioError::Kind::invariant);
            CHECK(std::string(e.what()).find("weights sum to 1.1") != std::string::npos);
        }
    }
    SUBCASE("a bounds.base referencing an undeclared gauge is a schema error") {
        try {
            Scenario::load(kFixtureDir + "/bad_gauge_ref.json");
            CHECK(false);
        } catch (const ScenarioError& e) {
            CHECK(e.kind == ScenarioError::Kind::schema);
            CHECK(e.path == "bounds.base");
        }
    }
    SUBCASE("malformed JSON is a parse error") {
        try {
            Scenario::load(kFixtureDir + "/truncated.json");
            CHECK(false);
        } catch (const ScenarioError& e) {
            CHECK(e.kind == ScenarioError::Kind::parse);
        }
    }
    SUBCASE("a missing file is a parse error, not a crash") {
        CHECK_THROWS_AS(Scenario::load(kFixtureDir + "/does_not_exist.json"),
                        ScenarioError);
    }
}

TEST_CASE("unknown keys are rejected with their dotted path") {
    json doc = base_doc();
    doc["fibre"]["extra"] = 1;
    try {
        Scenario::from_json(doc, "<memory>");
        CHECK(false);
    } catch (const ScenarioError& e) {
        CHECK(e.kind == ScenarioError::Kind::schema);
        CHECK(e.path == "fibre.extra");
    }
}

TEST_CASE("schema violations name the field that broke") {
    SUBCASE("missing required key") {
        json doc = base_doc();
        doc.erase("operator");
        try {
            Scenario::from_json(doc, "<memory>");
            CHECK(false);
        } catch (const ScenarioError& e) {
            CHECK(e.kind == ScenarioError::Kind::schema);
            CHECK(e.path == "operator");
        }
    }
    SUBCASE("wrong type") {
        json doc = base_doc();
        doc["solve"]["tol"] = "tight";
        CHECK_THROWS_AS(Scenario::from_json(doc, "<memory>"), ScenarioError);
    }
    SUBCASE("a start outside the fibre set fails at load, not at solve time") {
        json doc = base_doc();
        doc["solve"]["x0"] = 5.0;
        try {
            Scenario::from_json(doc, "<memory>");
            CHECK(false);
        } catch (const ScenarioError& e) {
            CHECK(e.kind == ScenarioError::Kind::invariant);
        }
    }
}

TEST_CASE("scalar shorthands and per-atom forms load to the same scenario") {
    json scalar = base_doc();
    json expanded = base_doc();
    expanded["operator"]["alpha"] = {0.5, 0.5};
    expanded["solve"]["x0"] = {{1.0}, {1.0}};
    Scenario a = Scenario::from_json(scalar, "<memory>");
    Scenario b = Scenario::from_json(expanded, "<memory>");
    CHECK(a.canonical_text() == b.canonical_text());
    CHECK(a.hash() == b.hash());
}

TEST_CASE("the hash is stable across key order and whitespace") {
    json doc = base_doc();
    // reserialize with shuffled insertion order: nlohmann sorts object keys,
    // so a reordered but equal document parses to the same canonical form
    json reordered;
    reordered["solve"] = doc["solve"];
    reordered["bounds"] = doc["bounds"];
    reordered["gauge"] = doc["gauge"];
    reordered["operator"] = doc["operator"];
    reordered["fibre"] = doc["fibre"];
    reordered["space"] = doc["space"];
    reordered["name"] = doc["name"];
    Scenario a = Scenario::from_json(doc, "<memory>");
    Scenario b = Scenario::from_json(reordered, "<memory>");
    CHECK(a.hash() == b.hash());
}

TEST_CASE("kirk blocks build an indexed gauge family") {
    json doc = base_doc();
    doc["kirk"] = {{"limit", "half"}, {"kind", "additive_harmonic"}, {"scale", 1.0}};
    Scenario sc = Scenario::from_json(doc, "<memory>");
    ScenarioBundle b = sc.bundle();
    REQUIRE(b.kirk.has_value());
    CHECK(b.kirk->kind() == GaugeSequence::Kind::additive_harmonic);
    CHECK(b.kirk->evaluate(1, 1.0) == 1.5);

    SUBCASE("the limit must reference the declared gauge") {
        doc["kirk"]["limit"] = "ghost";
        try {
            Scenario::from_json(doc, "<memory>");
            CHECK(false);
        } catch (const ScenarioError& e) {
            CHECK(e.kind == ScenarioError::Kind::schema);
            CHECK(e.path == "kirk.limit");
        }
    }
}
