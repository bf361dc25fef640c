#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cvloss::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) fail(where, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, _] : obj.items())
        if (!allowed.count(k)) fail(where, "unknown key '" + k + "'");
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where, "expected a finite number");
    return d;
}

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Mat matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of rows");
    const std::size_t n = v.size();
    Mat out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = number_list(v[i], where + "[" + std::to_string(i) + "]");
        if (row.size() != n) fail(where, "matrix must be square");
        for (std::size_t j = 0; j < n; ++j) out(i, j) = row[j];
    }
    return out;
}

PhaseSpaceVector mode_vector(const json& v, int modes, const std::string& where) {
    const auto c = number_list(v, where);
    if (static_cast<int>(c.size()) != 2 * modes)
        fail(where, "expected " + std::to_string(2 * modes) + " phase-space coordinates");
    Vec coords(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) coords[i] = c[i];
    if (!(coords.norm() > 0.0)) fail(where, "mode vector must be non-zero");
    return PhaseSpaceVector(Vec(coords / coords.norm()));
}

PhaseSpaceVector vertex_superposition(const json& v, int modes, const std::string& where) {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of vertex numbers");
    std::vector<int> idx;
    for (const auto& e : v) {
        if (!e.is_number_integer()) fail(where, "vertex numbers must be integers");
        const int k = e.get<int>();
        if (k < 1 || k > modes) fail(where, "vertex number out of range 1.." + std::to_string(modes));
        idx.push_back(k - 1);
    }
    if (std::set<int>(idx.begin(), idx.end()).size() != idx.size()) fail(where, "duplicate vertex numbers");
    return PhaseSpaceVector::superposition(modes, idx);
}

PhaseSpaceVector parse_subtraction(const json& v, int modes, const std::string& where) {
    allow_keys(v, where, {"vertex", "mode"});
    if (v.contains("vertex") == v.contains("mode")) fail(where, "give exactly one of 'vertex' or 'mode'");
    if (v.contains("vertex")) return vertex_superposition(json::array({v["vertex"]}), modes, where + ".vertex");
    return mode_vector(v["mode"], modes, where + ".mode");
}

LossChannel parse_loss(const json& v, int modes, const std::string& where) {
    if (v.is_object()) {
        allow_keys(v, where, {"uniform"});
        if (!v.contains("uniform")) fail(where, "expected 'uniform' rate or a list of loss modes");
        const double rate = number(v["uniform"], where + ".uniform");
        if (rate < 0.0) fail(where + ".uniform", "rate must be >= 0");
        return LossChannel::uniform(modes, rate);
    }
    if (!v.is_array()) fail(where, "expected a list of loss modes");
    std::vector<LossMode> entries;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        const json& e = v[i];
        allow_keys(e, w, {"vertices", "mode", "rate"});
        if (e.contains("vertices") == e.contains("mode")) fail(w, "give exactly one of 'vertices' or 'mode'");
        if (!e.contains("rate")) fail(w, "missing 'rate'");
        const double rate = number(e["rate"], w + ".rate");
        if (rate < 0.0) fail(w + ".rate", "rate must be >= 0");
        PhaseSpaceVector h = e.contains("vertices") ? vertex_superposition(e["vertices"], modes, w + ".vertices")
                                                    : mode_vector(e["mode"], modes, w + ".mode");
        entries.push_back({std::move(h), rate});
    }
    try {
        return LossChannel(modes, std::move(entries));
    } catch (const NonOrthogonalLossModes& ex) {
        fail(where, ex.what());
    }
}

System parse_inline(const json& v) {
    const std::string where = "scenario";
    allow_keys(v, where, {"label", "graph", "covariance", "squeezed_thermal", "subtraction", "loss"});
    const int sources = v.contains("graph") + v.contains("covariance") + v.contains("squeezed_thermal");
    if (sources != 1) fail(where, "give exactly one of 'graph', 'covariance' or 'squeezed_thermal'");
    if (!v.contains("subtraction")) fail(where, "missing 'subtraction'");
    if (!v.contains("loss")) fail(where, "missing 'loss'");

    std::optional<GraphSpec> graph;
    std::optional<GaussianState> state;
    try {
        if (v.contains("graph")) {
            const json& g = v["graph"];
            allow_keys(g, where + ".graph", {"adjacency", "squeezing_db"});
            if (!g.contains("adjacency") || !g.contains("squeezing_db"))
                fail(where + ".graph", "needs 'adjacency' and 'squeezing_db'");
            Mat a = matrix(g["adjacency"], where + ".graph.adjacency");
            std::vector<double> db;
            if (g["squeezing_db"].is_number()) {
                db.assign(a.rows(), number(g["squeezing_db"], where + ".graph.squeezing_db"));
            } else {
                db = number_list(g["squeezing_db"], where + ".graph.squeezing_db");
            }
            graph.emplace(std::move(a), std::move(db));
            state.emplace(graph_cov(*graph));
        } else if (v.contains("covariance")) {
            state.emplace(validate_covariance(matrix(v["covariance"], where + ".covariance")));
        } else {
            const json& st = v["squeezed_thermal"];
            allow_keys(st, where + ".squeezed_thermal", {"s_db", "n"});
            const double s = squeezing_factor(number(st.value("s_db", json(0.0)), where + ".squeezed_thermal.s_db"));
            const double n = number(st.value("n", json(1.0)), where + ".squeezed_thermal.n");
            if (n < 1.0) fail(where + ".squeezed_thermal.n", "thermal variance must be >= 1");
            Mat cov = Mat::Zero(2, 2);
            cov(0, 0) = n * s;
            cov(1, 1) = n / s;
            state.emplace(validate_covariance(cov));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& ex) {
        fail(where, ex.what());
    }
    const int m = state->mode_count();
    PhaseSpaceVector g = parse_subtraction(v["subtraction"], m, where + ".subtraction");
    LossChannel channel = parse_loss(v["loss"], m, where + ".loss");
    std::string label = "inline";
    if (v.contains("label")) {
        if (!v["label"].is_string()) fail(where + ".label", "expected a string");
        label = v["label"].get<std::string>();
    }
    return System{label, std::nullopt, std::move(graph), std::move(*state), std::move(g), std::move(channel)};
}

System parse_named(const std::string& name) {
    Scenario sc;
    try {
        sc = parse_scenario(name);
    } catch (const Error& ex) {
        fail("scenario", ex.what());
    }
    ScenarioSetup setup = reference_scenario(sc);
    GaussianState state = graph_cov(setup.graph);
    return System{name, sc, std::move(setup.graph), std::move(state), std::move(setup.subtraction_mode),
                  std::move(setup.channel)};
}

std::vector<double> parse_xi(const json& v) {
    std::vector<double> out;
    if (v.is_array()) {
        out = number_list(v, "xi");
    } else if (v.is_object()) {
        allow_keys(v, "xi", {"start", "stop", "step"});
        if (!v.contains("start") || !v.contains("stop") || !v.contains("step"))
            fail("xi", "range needs 'start', 'stop' and 'step'");
        const double a = number(v["start"], "xi.start");
        const double b = number(v["stop"], "xi.stop");
        const double h = number(v["step"], "xi.step");
        if (!(h > 0.0)) fail("xi.step", "must be > 0");
        if (b < a) fail("xi", "stop must be >= start");
        const auto count = static_cast<long>(std::floor((b - a) / h + 1e-9));
        if (count > 100000) fail("xi", "range has too many points");
        for (long k = 0; k <= count; ++k) out.push_back(a + k * h);
    } else {
        fail("xi", "expected a list or a {start, stop, step} range");
    }
    for (double x : out)
        if (x < 0.0) fail("xi", "loss strengths must be >= 0");
    return out;
}

}  // namespace

Order parse_order(const std::string& s) {
    if (s == "subtract-first") return Order::subtract_first;
    if (s == "lose-first") return Order::lose_first;
    if (s == "both") return Order::both;
    throw ConfigError("order: expected subtract-first, lose-first or both, got '" + s + "'");
}

std::string order_name(Order o) {
    switch (o) {
        case Order::subtract_first: return "subtract-first";
        case Order::lose_first: return "lose-first";
        case Order::both: return "both";
    }
    return "unknown";
}

RunConfig parse_config(const json& doc) {
    RunConfig cfg;
    cfg.source = doc;
    allow_keys(doc, "config", {"scenario", "order", "xi", "grid", "single_mode", "threshold", "oracle"});

    if (doc.contains("scenario")) {
        const json& s = doc["scenario"];
        if (s.is_string()) {
            cfg.system = parse_named(s.get<std::string>());
        } else {
            cfg.system = parse_inline(s);
        }
    }
    if (doc.contains("order")) {
        if (!doc["order"].is_string()) fail("order", "expected a string");
        cfg.order = parse_order(doc["order"].get<std::string>());
    }
    if (doc.contains("xi")) cfg.xi = parse_xi(doc["xi"]);
    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        allow_keys(g, "grid", {"radius", "step"});
        if (g.contains("radius")) cfg.grid.radius = number(g["radius"], "grid.radius");
        if (g.contains("step")) cfg.grid.step = number(g["step"], "grid.step");
        if (!(cfg.grid.radius > 0.0)) fail("grid.radius", "must be > 0");
        if (!(cfg.grid.step > 0.0)) fail("grid.step", "must be > 0");
        if (cfg.grid.radius / cfg.grid.step > 2000.0) fail("grid", "too many points per axis");
    }
    if (doc.contains("single_mode")) {
        const json& s = doc["single_mode"];
        allow_keys(s, "single_mode", {"s_db", "n", "gamma", "step"});
        if (s.contains("s_db")) cfg.single_mode.s_db = number_list(s["s_db"], "single_mode.s_db");
        if (s.contains("n")) cfg.single_mode.n = number(s["n"], "single_mode.n");
        if (s.contains("gamma")) cfg.single_mode.gamma = number(s["gamma"], "single_mode.gamma");
        if (s.contains("step")) cfg.single_mode.step = number(s["step"], "single_mode.step");
        if (cfg.single_mode.n < 1.0) fail("single_mode.n", "thermal variance must be >= 1");
        if (!(cfg.single_mode.gamma > 0.0)) fail("single_mode.gamma", "must be > 0");
        if (!(cfg.single_mode.step > 0.0) || cfg.single_mode.step > 1.0)
            fail("single_mode.step", "must lie in (0, 1]");
    }
    if (doc.contains("threshold")) {
        const json& t = doc["threshold"];
        allow_keys(t, "threshold", {"xi_max", "tolerance"});
        if (t.contains("xi_max")) cfg.threshold.xi_max = number(t["xi_max"], "threshold.xi_max");
        if (t.contains("tolerance")) cfg.threshold.tolerance = number(t["tolerance"], "threshold.tolerance");
        if (!(cfg.threshold.xi_max > 0.0)) fail("threshold.xi_max", "must be > 0");
        if (!(cfg.threshold.tolerance > 0.0)) fail("threshold.tolerance", "must be > 0");
    }
    if (doc.contains("oracle")) {
        const json& o = doc["oracle"];
        allow_keys(o, "oracle", {"suite", "cutoff"});
        if (o.contains("suite")) {
            if (!o["suite"].is_string()) fail("oracle.suite", "expected a string");
            cfg.oracle.suite = o["suite"].get<std::string>();
            if (cfg.oracle.suite != "default" && cfg.oracle.suite != "xi0")
                fail("oracle.suite", "expected 'default' or 'xi0'");
        }
        if (o.contains("cutoff")) {
            if (!o["cutoff"].is_number_integer() || o["cutoff"].get<int>() < 1)
                fail("oracle.cutoff", "expected a positive integer");
            cfg.oracle.cutoff = o["cutoff"].get<int>();
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) return parse_config(json::object());
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& ex) {
        throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
    }
    return parse_config(doc);
}

std::vector<double> parse_xi_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("--xi: cannot parse '" + item + "'");
        }
        if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos)
            throw ConfigError("--xi: cannot parse '" + item + "'");
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("--xi: values must be finite and >= 0");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("--xi: empty list");
    return out;
}

const System& require_system(const RunConfig& cfg, const char* command) {
    if (!cfg.system) throw ConfigError(std::string(command) + " needs a 'scenario' in the config");
    return *cfg.system;
}

}  // namespace cvloss::cli
