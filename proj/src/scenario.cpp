#include "randfix/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <string_view>
#include <utility>

namespace randfix {

using nlohmann::json;

namespace {

using Kind = ScenarioError::Kind;

std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
    throw ScenarioError(Kind::schema, path, msg);
}

const json& require_key(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(join_path(path, key), "missing required field");
    return *it;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) schema_error(join_path(path, item.key()), "unknown key");
    }
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) schema_error(path, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_error(path, "expected an integer");
    return v.get<int>();
}

std::uint64_t as_seed(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_error(path, "expected a nonnegative integer");
    if (!v.is_number_unsigned() && v.get<long long>() < 0)
        schema_error(path, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) schema_error(path, "expected a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string() || v.get<std::string>().empty())
        schema_error(path, "expected a nonempty string");
    return v.get<std::string>();
}

void require_numbers(const json& v, const std::string& path, int expect = -1) {
    if (!v.is_array()) schema_error(path, "expected an array of numbers");
    if (expect >= 0 && static_cast<int>(v.size()) != expect)
        schema_error(path, "expected " + std::to_string(expect) + " entries, got " +
                               std::to_string(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        as_number(v[i], path + "[" + std::to_string(i) + "]");
}

// Scalar broadcast to one entry per atom; an explicit array must already
// have exactly one entry per atom.
json per_atom_numbers(const json& v, const std::string& path, int atoms) {
    if (v.is_number()) return json::array_t(atoms, v);
    require_numbers(v, path, atoms);
    return v;
}

// One row of `dim` numbers broadcast to every atom, or explicit rows.
json per_atom_rows(const json& v, const std::string& path, int atoms, int dim) {
    if (!v.is_array() || v.empty()) schema_error(path, "expected a coordinate array");
    if (v[0].is_number()) {
        require_numbers(v, path, dim);
        return json::array_t(atoms, v);
    }
    if (static_cast<int>(v.size()) != atoms)
        schema_error(path, "expected one row per atom (" + std::to_string(atoms) + ")");
    for (std::size_t a = 0; a < v.size(); ++a)
        require_numbers(v[a], path + "[" + std::to_string(a) + "]", dim);
    return v;
}

json normalize_matrix(const json& v, const std::string& path, int dim) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
        schema_error(path, "expected " + std::to_string(dim) + " rows");
    for (std::size_t r = 0; r < v.size(); ++r)
        require_numbers(v[r], path + "[" + std::to_string(r) + "]", dim);
    return v;
}

json normalize_region(const json& r, const std::string& path, int dim) {
    const std::string type = as_string(require_key(r, path, "type"), join_path(path, "type"));
    json out;
    out["type"] = type;
    if (type == "ball") {
        check_keys(r, path, {"type", "center", "radius"});
        require_numbers(require_key(r, path, "center"), join_path(path, "center"), dim);
        const double radius = as_number(require_key(r, path, "radius"), join_path(path, "radius"));
        if (!(radius >= 0.0)) schema_error(join_path(path, "radius"), "must be nonnegative");
        out["center"] = r["center"];
        out["radius"] = r["radius"];
    } else if (type == "box") {
        check_keys(r, path, {"type", "lo", "hi"});
        require_numbers(require_key(r, path, "lo"), join_path(path, "lo"), dim);
        require_numbers(require_key(r, path, "hi"), join_path(path, "hi"), dim);
        for (int i = 0; i < dim; ++i)
            if (r["lo"][i].get<double>() > r["hi"][i].get<double>())
                schema_error(join_path(path, "lo"), "exceeds hi in coordinate " +
                                                        std::to_string(i));
        out["lo"] = r["lo"];
        out["hi"] = r["hi"];
    } else if (type == "finite") {
        check_keys(r, path, {"type", "points"});
        const json& pts = require_key(r, path, "points");
        if (!pts.is_array() || pts.empty())
            schema_error(join_path(path, "points"), "expected a nonempty array");
        for (std::size_t i = 0; i < pts.size(); ++i)
            require_numbers(pts[i], join_path(path, "points") + "[" + std::to_string(i) + "]",
                            dim);
        out["points"] = pts;
    } else {
        schema_error(join_path(path, "type"), "unknown region type '" + type + "'");
    }
    return out;
}

json normalize_operator(const json& op, int atoms, int dim) {
    const std::string family =
        as_string(require_key(op, "operator", "family"), "operator.family");
    json out;
    out["family"] = family;
    if (family == "scale") {
        check_keys(op, "operator", {"family", "alpha"});
        out["alpha"] = per_atom_numbers(require_key(op, "operator", "alpha"),
                                        "operator.alpha", atoms);
    } else if (family == "shifted_scale") {
        check_keys(op, "operator", {"family", "alpha", "targets"});
        out["alpha"] = per_atom_numbers(require_key(op, "operator", "alpha"),
                                        "operator.alpha", atoms);
        out["targets"] = per_atom_rows(require_key(op, "operator", "targets"),
                                       "operator.targets", atoms, dim);
    } else if (family == "affine") {
        check_keys(op, "operator", {"family", "maps", "offsets"});
        const json& maps = require_key(op, "operator", "maps");
        if (!maps.is_array() || maps.empty())
            schema_error("operator.maps", "expected a matrix or one matrix per atom");
        json norm_maps = json::array();
        if (maps[0].is_array() && !maps[0].empty() && maps[0][0].is_number()) {
            const json m = normalize_matrix(maps, "operator.maps", dim);
            for (int a = 0; a < atoms; ++a) norm_maps.push_back(m);
        } else {
            if (static_cast<int>(maps.size()) != atoms)
                schema_error("operator.maps", "expected one matrix per atom");
            for (std::size_t a = 0; a < maps.size(); ++a)
                norm_maps.push_back(normalize_matrix(
                    maps[a], "operator.maps[" + std::to_string(a) + "]", dim));
        }
        out["maps"] = std::move(norm_maps);
        out["offsets"] = per_atom_rows(require_key(op, "operator", "offsets"),
                                       "operator.offsets", atoms, dim);
    } else if (family == "antipode") {
        check_keys(op, "operator", {"family"});
    } else if (family == "table") {
        check_keys(op, "operator", {"family", "images"});
        const json& images = require_key(op, "operator", "images");
        if (!images.is_array() || images.empty())
            schema_error("operator.images", "expected an index array");
        json norm = json::array();
        if (images[0].is_number()) {
            for (std::size_t i = 0; i < images.size(); ++i)
                as_int(images[i], "operator.images[" + std::to_string(i) + "]");
            for (int a = 0; a < atoms; ++a) norm.push_back(images);
        } else {
            if (static_cast<int>(images.size()) != atoms)
                schema_error("operator.images", "expected one index array per atom");
            for (std::size_t a = 0; a < images.size(); ++a) {
                const std::string p = "operator.images[" + std::to_string(a) + "]";
                if (!images[a].is_array()) schema_error(p, "expected an index array");
                for (std::size_t i = 0; i < images[a].size(); ++i)
                    as_int(images[a][i], p + "[" + std::to_string(i) + "]");
            }
            norm = images;
        }
        out["images"] = std::move(norm);
    } else {
        schema_error("operator.family", "unknown operator family '" + family + "'");
    }
    return out;
}

json normalize_gauge(const json& g) {
    const std::string id = as_string(require_key(g, "gauge", "id"), "gauge.id");
    const std::string family = as_string(require_key(g, "gauge", "family"), "gauge.family");
    json out;
    out["id"] = id;
    out["family"] = family;
    if (family == "linear") {
        check_keys(g, "gauge", {"id", "family", "alpha"});
        out["alpha"] = as_number(require_key(g, "gauge", "alpha"), "gauge.alpha");
    } else if (family == "rational") {
        check_keys(g, "gauge", {"id", "family"});
    } else if (family == "capped") {
        check_keys(g, "gauge", {"id", "family", "alpha", "cap"});
        out["alpha"] = as_number(require_key(g, "gauge", "alpha"), "gauge.alpha");
        out["cap"] = as_number(require_key(g, "gauge", "cap"), "gauge.cap");
    } else if (family == "piecewise") {
        check_keys(g, "gauge", {"id", "family", "knots_t", "knots_v", "step"});
        require_numbers(require_key(g, "gauge", "knots_t"), "gauge.knots_t");
        require_numbers(require_key(g, "gauge", "knots_v"), "gauge.knots_v");
        out["knots_t"] = g["knots_t"];
        out["knots_v"] = g["knots_v"];
        out["step"] = g.contains("step") ? as_bool(g["step"], "gauge.step") : false;
    } else {
        schema_error("gauge.family", "unknown gauge family '" + family + "'");
    }
    return out;
}

json normalize_schedule(const json& s, int atoms) {
    const std::string kind =
        as_string(require_key(s, "bounds.schedule", "kind"), "bounds.schedule.kind");
    json out;
    out["kind"] = kind;
    if (kind == "zero") {
        check_keys(s, "bounds.schedule", {"kind"});
    } else if (kind == "harmonic") {
        check_keys(s, "bounds.schedule", {"kind", "scale"});
        out["scale"] = per_atom_numbers(require_key(s, "bounds.schedule", "scale"),
                                        "bounds.schedule.scale", atoms);
    } else if (kind == "geometric") {
        check_keys(s, "bounds.schedule", {"kind", "scale", "ratio"});
        out["scale"] = per_atom_numbers(require_key(s, "bounds.schedule", "scale"),
                                        "bounds.schedule.scale", atoms);
        out["ratio"] = per_atom_numbers(require_key(s, "bounds.schedule", "ratio"),
                                        "bounds.schedule.ratio", atoms);
    } else {
        schema_error("bounds.schedule.kind", "unknown schedule kind '" + kind + "'");
    }
    return out;
}

json normalize_bounds(const json& b, const std::string& gauge_id, int atoms) {
    check_keys(b, "bounds", {"base", "mode", "schedule"});
    const std::string base = as_string(require_key(b, "bounds", "base"), "bounds.base");
    if (base != gauge_id)
        schema_error("bounds.base", "references undeclared gauge '" + base + "'");
    const std::string mode = as_string(require_key(b, "bounds", "mode"), "bounds.mode");
    if (mode != "additive" && mode != "multiplicative")
        schema_error("bounds.mode", "expected 'additive' or 'multiplicative'");
    json out;
    out["base"] = base;
    out["mode"] = mode;
    out["schedule"] = normalize_schedule(require_key(b, "bounds", "schedule"), atoms);
    return out;
}

json normalize_kirk(const json& k, const std::string& gauge_id) {
    check_keys(k, "kirk", {"limit", "kind", "scale", "ratio"});
    const std::string limit = as_string(require_key(k, "kirk", "limit"), "kirk.limit");
    if (limit != gauge_id)
        schema_error("kirk.limit", "references undeclared gauge '" + limit + "'");
    const std::string kind = as_string(require_key(k, "kirk", "kind"), "kirk.kind");
    json out;
    out["limit"] = limit;
    out["kind"] = kind;
    if (kind == "constant") {
        out["scale"] = 0.0;
        out["ratio"] = 0.0;
    } else if (kind == "additive_harmonic") {
        out["scale"] = as_number(require_key(k, "kirk", "scale"), "kirk.scale");
        out["ratio"] = 0.0;
    } else if (kind == "additive_geometric") {
        out["scale"] = as_number(require_key(k, "kirk", "scale"), "kirk.scale");
        out["ratio"] = as_number(require_key(k, "kirk", "ratio"), "kirk.ratio");
    } else {
        schema_error("kirk.kind", "unknown sequence kind '" + kind + "'");
    }
    return out;
}

json normalize_solve(const json& s, int atoms, int dim) {
    check_keys(s, "solve", {"x0", "tol", "max_iter", "window", "tail_fraction"});
    json out;
    const json& x0 = require_key(s, "solve", "x0");
    if (x0.is_number() && dim == 1) {
        out["x0"] = json::array_t(atoms, json::array({x0}));
    } else {
        out["x0"] = per_atom_rows(x0, "solve.x0", atoms, dim);
    }
    const double tol = s.contains("tol") ? as_number(s["tol"], "solve.tol") : 1e-8;
    if (!(tol > 0.0)) schema_error("solve.tol", "must be positive");
    const int max_iter =
        s.contains("max_iter") ? as_int(s["max_iter"], "solve.max_iter") : 10000;
    if (max_iter < 0) schema_error("solve.max_iter", "must be nonnegative");
    const int window = s.contains("window") ? as_int(s["window"], "solve.window") : 16;
    if (window < 1) schema_error("solve.window", "must be at least 1");
    const double tail = s.contains("tail_fraction")
                            ? as_number(s["tail_fraction"], "solve.tail_fraction")
                            : 0.25;
    if (!(tail > 0.0 && tail < 1.0)) schema_error("solve.tail_fraction", "must lie in (0, 1)");
    out["tol"] = tol;
    out["max_iter"] = max_iter;
    out["window"] = window;
    out["tail_fraction"] = tail;
    return out;
}

json normalize_certify(const json& c) {
    check_keys(c, "certify",
               {"sample_count", "n_max", "seed", "grid_density", "epsilons", "lambdas"});
    json out;
    const int samples =
        c.contains("sample_count") ? as_int(c["sample_count"], "certify.sample_count") : 500;
    if (samples < 1) schema_error("certify.sample_count", "must be at least 1");
    const int n_max = c.contains("n_max") ? as_int(c["n_max"], "certify.n_max") : 20;
    if (n_max < 1) schema_error("certify.n_max", "must be at least 1");
    const int density =
        c.contains("grid_density") ? as_int(c["grid_density"], "certify.grid_density") : 1024;
    if (density < 2) schema_error("certify.grid_density", "must be at least 2");
    out["sample_count"] = samples;
    out["n_max"] = n_max;
    out["seed"] = c.contains("seed") ? as_seed(c["seed"], "certify.seed") : 1u;
    out["grid_density"] = density;
    json eps = c.contains("epsilons") ? c["epsilons"] : json::array({0.5, 0.25, 0.1});
    require_numbers(eps, "certify.epsilons");
    if (eps.empty()) schema_error("certify.epsilons", "needs at least one entry");
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (!(eps[i].get<double>() > 0.0))
            schema_error("certify.epsilons[" + std::to_string(i) + "]", "must be positive");
    json lam = c.contains("lambdas") ? c["lambdas"] : json::array({0.1, 0.01});
    require_numbers(lam, "certify.lambdas");
    if (lam.empty()) schema_error("certify.lambdas", "needs at least one entry");
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const double v = lam[i].get<double>();
        if (!(v >= 0.0 && v < 1.0))
            schema_error("certify.lambdas[" + std::to_string(i) + "]", "must lie in [0, 1)");
    }
    out["epsilons"] = std::move(eps);
    out["lambdas"] = std::move(lam);
    return out;
}

json normalize(const json& doc) {
    check_keys(doc, "",
               {"name", "space", "fibre", "operator", "gauge", "bounds", "kirk", "solve",
                "certify"});
    json out;
    out["name"] = as_string(require_key(doc, "", "name"), "name");

    const json& space = require_key(doc, "", "space");
    check_keys(space, "space", {"weights"});
    const json& weights = require_key(space, "space", "weights");
    require_numbers(weights, "space.weights");
    if (weights.empty()) schema_error("space.weights", "needs at least one atom");
    out["space"] = {{"weights", weights}};
    const int atoms = static_cast<int>(weights.size());

    const json& fibre = require_key(doc, "", "fibre");
    check_keys(fibre, "fibre", {"dim", "bound", "theta_in_set", "regions"});
    const int dim = as_int(require_key(fibre, "fibre", "dim"), "fibre.dim");
    if (dim < 1) schema_error("fibre.dim", "must be at least 1");
    const double bound = as_number(require_key(fibre, "fibre", "bound"), "fibre.bound");
    if (!(bound > 0.0)) schema_error("fibre.bound", "must be positive");
    json regions = json::array();
    const json& reg = require_key(fibre, "fibre", "regions");
    if (reg.is_object()) {
        const json norm = normalize_region(reg, "fibre.regions", dim);
        for (int a = 0; a < atoms; ++a) regions.push_back(norm);
    } else if (reg.is_array() && static_cast<int>(reg.size()) == atoms) {
        for (int a = 0; a < atoms; ++a)
            regions.push_back(
                normalize_region(reg[a], "fibre.regions[" + std::to_string(a) + "]", dim));
    } else {
        schema_error("fibre.regions", "expected one region or one per atom");
    }
    out["fibre"] = {{"dim", dim},
                    {"bound", bound},
                    {"theta_in_set", fibre.contains("theta_in_set")
                                         ? as_bool(fibre["theta_in_set"], "fibre.theta_in_set")
                                         : false},
                    {"regions", std::move(regions)}};

    out["operator"] = normalize_operator(require_key(doc, "", "operator"), atoms, dim);
    out["gauge"] = normalize_gauge(require_key(doc, "", "gauge"));
    const std::string gauge_id = out["gauge"]["id"].get<std::string>();
    out["bounds"] = normalize_bounds(require_key(doc, "", "bounds"), gauge_id, atoms);
    if (doc.contains("kirk")) out["kirk"] = normalize_kirk(doc["kirk"], gauge_id);
    out["solve"] = normalize_solve(require_key(doc, "", "solve"), atoms, dim);
    out["certify"] = normalize_certify(doc.contains("certify") ? doc["certify"]
                                                               : json::object());
    return out;
}

Eigen::VectorXd to_vector(const json& arr) {
    Eigen::VectorXd out(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) out[i] = arr[i].get<double>();
    return out;
}

Eigen::MatrixXd to_rows(const json& rows) {
    const int n = static_cast<int>(rows.size());
    const int d = static_cast<int>(rows[0].size());
    Eigen::MatrixXd out(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) out(i, j) = rows[i][j].get<double>();
    return out;
}

Region to_region(const json& r, int dim) {
    const std::string type = r["type"].get<std::string>();
    if (type == "ball") return BallRegion{to_vector(r["center"]), r["radius"].get<double>()};
    if (type == "box") return BoxRegion{to_vector(r["lo"]), to_vector(r["hi"])};
    FiniteRegion fin;
    for (const json& p : r["points"]) fin.points.push_back(to_vector(p));
    return fin;
}

GaugeSpec to_gauge(const json& g) {
    const std::string family = g["family"].get<std::string>();
    if (family == "linear") return GaugeSpec::linear(g["alpha"].get<double>());
    if (family == "rational") return GaugeSpec::rational();
    if (family == "capped")
        return GaugeSpec::capped(g["alpha"].get<double>(), g["cap"].get<double>());
    std::vector<double> kt, kv;
    for (const json& t : g["knots_t"]) kt.push_back(t.get<double>());
    for (const json& v : g["knots_v"]) kv.push_back(v.get<double>());
    return GaugeSpec::piecewise(std::move(kt), std::move(kv), g["step"].get<bool>());
}

RandomOperator to_operator(const json& op, std::shared_ptr<const FibreSet> set) {
    const std::string family = op["family"].get<std::string>();
    if (family == "scale") return RandomOperator::scale(std::move(set), to_vector(op["alpha"]));
    if (family == "shifted_scale")
        return RandomOperator::shifted_scale(std::move(set), to_vector(op["alpha"]),
                                             to_rows(op["targets"]));
    if (family == "affine") {
        std::vector<Eigen::MatrixXd> maps;
        for (const json& m : op["maps"]) maps.push_back(to_rows(m));
        return RandomOperator::affine(std::move(set), std::move(maps),
                                      to_rows(op["offsets"]));
    }
    if (family == "antipode") return RandomOperator::antipode(std::move(set));
    std::vector<std::vector<int>> images;
    for (const json& row : op["images"]) {
        std::vector<int> idx;
        for (const json& i : row) idx.push_back(i.get<int>());
        images.push_back(std::move(idx));
    }
    return RandomOperator::table(std::move(set), std::move(images));
}

DecaySchedule to_schedule(const json& s) {
    const std::string kind = s["kind"].get<std::string>();
    if (kind == "zero") return DecaySchedule::none(1);  // resized by caller
    if (kind == "harmonic") return DecaySchedule::harmonic(to_vector(s["scale"]));
    return DecaySchedule::geometric(to_vector(s["scale"]), to_vector(s["ratio"]));
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(Kind::parse, path, "cannot open file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(Kind::parse, path, e.what());
    }
    return from_json(std::move(doc), path);
}

Scenario Scenario::from_json(json doc, const std::string& origin) {
    Scenario sc(normalize(doc));
    try {
        sc.bundle();  // flush construction-time invariant violations now
    } catch (const ScenarioError&) {
        throw;
    } catch (const Error& e) {
        throw ScenarioError(Kind::invariant, origin, e.what());
    }
    return sc;
}

std::string Scenario::name() const { return doc_["name"].get<std::string>(); }

std::string Scenario::canonical_text() const { return doc_.dump(); }

std::string Scenario::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical_text())));
    return buf;
}

ScenarioBundle Scenario::bundle() const {
    const json& d = doc_;
    ProbSpace space(to_vector(d["space"]["weights"]));
    const int atoms = space.atom_count();
    const int dim = d["fibre"]["dim"].get<int>();

    std::vector<Region> regions;
    regions.reserve(atoms);
    for (const json& r : d["fibre"]["regions"]) regions.push_back(to_region(r, dim));
    auto set = std::make_shared<const FibreSet>(dim, std::move(regions),
                                                d["fibre"]["bound"].get<double>(),
                                                d["fibre"]["theta_in_set"].get<bool>());

    RandomOperator f = to_operator(d["operator"], set);
    GaugeSpec psi = to_gauge(d["gauge"]);

    const json& sched = d["bounds"]["schedule"];
    DecaySchedule schedule = sched["kind"].get<std::string>() == "zero"
                                 ? DecaySchedule::none(atoms)
                                 : to_schedule(sched);
    const Perturbation mode = d["bounds"]["mode"].get<std::string>() == "additive"
                                  ? Perturbation::additive
                                  : Perturbation::multiplicative;
    BoundSequence bounds(psi, mode, std::move(schedule));

    std::optional<GaugeSequence> kirk;
    if (d.contains("kirk")) {
        const json& k = d["kirk"];
        const std::string kind = k["kind"].get<std::string>();
        GaugeSequence::Kind gk = GaugeSequence::Kind::constant;
        if (kind == "additive_harmonic") gk = GaugeSequence::Kind::additive_harmonic;
        if (kind == "additive_geometric") gk = GaugeSequence::Kind::additive_geometric;
        kirk.emplace(psi, gk, k["scale"].get<double>(), k["ratio"].get<double>());
    }

    SolveConfig solve;
    solve.x0 = FibrePoint(to_rows(d["solve"]["x0"]));
    solve.tol = d["solve"]["tol"].get<double>();
    solve.max_iter = d["solve"]["max_iter"].get<int>();
    solve.window = d["solve"]["window"].get<int>();
    solve.tail_fraction = d["solve"]["tail_fraction"].get<double>();
    require_member(*set, solve.x0);

    CertifyConfig certify;
    certify.sample_count = d["certify"]["sample_count"].get<int>();
    certify.n_max = d["certify"]["n_max"].get<int>();
    certify.seed = d["certify"]["seed"].get<std::uint64_t>();
    certify.grid_density = d["certify"]["grid_density"].get<int>();
    certify.epsilons.clear();
    for (const json& e : d["certify"]["epsilons"]) certify.epsilons.push_back(e.get<double>());
    certify.lambdas.clear();
    for (const json& l : d["certify"]["lambdas"]) certify.lambdas.push_back(l.get<double>());

    return ScenarioBundle{std::move(space), set,          std::move(f),
                          std::move(psi),   std::move(bounds), std::move(kirk),
                          std::move(solve), std::move(certify), name(),
                          hash()};
}

}  // namespace randfix
