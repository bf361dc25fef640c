#include "commands.hpp"

#include "oracle_suite.hpp"
#include "output.hpp"
#include "parallel.hpp"

#include "cvloss/subtraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cvloss::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<Order> orders_for(Order o) {
    if (o == Order::both) return {Order::subtract_first, Order::lose_first};
    return {o};
}

SubtractedState prepare(const System& sys, const DecayGenerator& gen, Order order, LossStrength xi) {
    if (order == Order::lose_first) return lose_then_subtract(sys.state, gen, xi, sys.subtraction_mode);
    return subtract_then_lose(sys.state, sys.subtraction_mode, gen, xi);
}

std::vector<std::string> coordinate_names(int m, const std::string& prefix) {
    std::vector<std::string> names;
    for (int j = 1; j <= m; ++j) names.push_back(prefix + "x" + std::to_string(j));
    for (int j = 1; j <= m; ++j) names.push_back(prefix + "p" + std::to_string(j));
    return names;
}

json system_json(const System& sys) {
    json loss = json::array();
    for (const auto& e : sys.channel.entries()) loss.push_back({{"mode", to_json(e.mode.coords())}, {"rate", e.rate}});
    json j = {{"label", sys.label},
              {"modes", sys.state.mode_count()},
              {"covariance", to_json(sys.state.covariance())},
              {"subtraction_mode", to_json(sys.subtraction_mode.coords())},
              {"loss_modes", std::move(loss)}};
    if (sys.graph) {
        j["adjacency"] = to_json(sys.graph->adjacency());
        j["squeezing_db"] = sys.graph->squeezing_db();
    }
    return j;
}

json witness_json(const NegativityWitness& w) {
    return {{"lhs", w.lhs},
            {"threshold", w.threshold},
            {"lifted_lhs", w.lifted_lhs},
            {"lifted_rhs", w.lifted_rhs},
            {"gap", w.gap},
            {"negative", w.negative}};
}

double plane_angle(const PhaseSpaceVector& v, const PhaseSpaceVector& mode) {
    const double c = std::min(1.0, (mode_projector(mode) * v.coords()).norm());
    return std::acos(c);
}

std::vector<double> ticks(const Grid& g) {
    const long n = std::lround(2.0 * g.radius / g.step);
    std::vector<double> t;
    for (long i = 0; i <= n; ++i) t.push_back(-g.radius + static_cast<double>(i) * g.step);
    return t;
}

double lhs_at(const System& sys, const DecayGenerator& gen, Order order, double xi) {
    try {
        return negativity_witness(prepare(sys, gen, order, LossStrength(xi))).lhs;
    } catch (const VacuumSubtraction&) {
        return 0.0;
    }
}

}  // namespace

Crossing single_mode_crossing(double s_db, double n, double gamma, double tolerance) {
    const double s = squeezing_factor(s_db);
    Mat v = Mat::Zero(2, 2);
    v(0, 0) = n * s;
    v(1, 1) = n / s;
    const GaussianState state = validate_covariance(v);
    const PhaseSpaceVector g = PhaseSpaceVector::x_axis(1, 0);
    const DecayGenerator gen = build_decay_generator(LossChannel::single(g, gamma));
    auto negative = [&](double y) {
        const double xi = y > 0.0 ? -0.5 * std::log(y) : std::numeric_limits<double>::infinity();
        return negativity_witness(subtract_then_lose(state, g, gen, LossStrength(xi))).negative;
    };
    if (!negative(1.0)) return {"never negative", 0.0};
    if (negative(0.0)) return {"always negative", 0.0};
    // Largest y below which the state stops being negative.
    constexpr int scan = 1000;
    double hi = 1.0;
    double lo = 0.0;
    for (int k = scan - 1; k >= 0; --k) {
        const double y = static_cast<double>(k) / scan;
        if (!negative(y)) {
            lo = y;
            hi = static_cast<double>(k + 1) / scan;
            break;
        }
    }
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (negative(mid) ? hi : lo) = mid;
    }
    return {"crossing", 0.5 * (lo + hi)};
}

ThresholdResult find_threshold(const System& sys, Order order, double xi_max, double tolerance) {
    const DecayGenerator gen = build_decay_generator(sys.channel);
    auto negative = [&](double xi) { return lhs_at(sys, gen, order, xi) > 2.0; };
    auto fill = [&](ThresholdResult r) {
        if (r.status == "crossing") {
            const auto w = negativity_witness(prepare(sys, gen, order, LossStrength(r.xi_star)));
            r.lhs = w.lhs;
            r.lifted_lhs = w.lifted_lhs;
            r.lifted_rhs = w.lifted_rhs;
        }
        return r;
    };
    constexpr int scan = 2000;
    std::vector<char> neg(scan + 1);
    for (int k = 0; k <= scan; ++k) neg[k] = negative(xi_max * k / scan);
    if (std::none_of(neg.begin(), neg.end(), [](char c) { return c; })) return {"never negative", 0, 0, 0, 0};
    if (std::all_of(neg.begin(), neg.end(), [](char c) { return c; }))
        return {"always negative in range", 0, 0, 0, 0};
    int k = 0;
    while (k < scan && !(neg[k] && !neg[k + 1])) ++k;
    if (k == scan) return {"never negative", 0, 0, 0, 0};
    double lo = xi_max * k / scan;
    double hi = xi_max * (k + 1) / scan;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (negative(mid) ? lo : hi) = mid;
    }
    return fill({"crossing", 0.5 * (lo + hi), 0, 0, 0});
}

CommandResult single_mode_sweep(const RunConfig& cfg, const fs::path& out) {
    const auto& sm = cfg.single_mode;
    const long steps = std::lround(1.0 / sm.step);
    CsvWriter sweep(out / "single_mode_sweep.csv", {"s_db", "n", "exp_minus_2xi", "W_origin", "negative_flag"});
    CsvWriter crossings(out / "threshold_crossings.csv", {"s_db", "n", "status", "crossing_exp_minus_2xi"});
    const PhaseSpaceVector g = PhaseSpaceVector::x_axis(1, 0);
    const DecayGenerator gen = build_decay_generator(LossChannel::single(g, sm.gamma));
    json rows = json::array();
    for (double db : sm.s_db) {
        const double s = squeezing_factor(db);
        Mat v = Mat::Zero(2, 2);
        v(0, 0) = sm.n * s;
        v(1, 1) = sm.n / s;
        const GaussianState state = validate_covariance(v);
        std::vector<double> w(steps + 1);
        std::vector<char> neg(steps + 1);
        parallel_for(static_cast<std::size_t>(steps + 1), [&](std::size_t k) {
            const double y = std::min(1.0, static_cast<double>(k) * sm.step);
            const double xi = y > 0.0 ? -0.5 * std::log(y) : std::numeric_limits<double>::infinity();
            const auto st = subtract_then_lose(state, g, gen, LossStrength(xi));
            w[k] = st.wigner(Vec::Zero(2));
            neg[k] = negativity_witness(st).negative;
        });
        for (long k = 0; k <= steps; ++k) {
            sweep.field(db).field(sm.n).field(std::min(1.0, static_cast<double>(k) * sm.step)).field(w[k]);
            sweep.field(neg[k] ? 1 : 0).end_row();
        }
        const Crossing c = single_mode_crossing(db, sm.n, sm.gamma);
        crossings.field(db).field(sm.n).field(c.status);
        if (c.status == "crossing") {
            crossings.field(c.exp_minus_2xi);
        } else {
            crossings.field(std::string());
        }
        crossings.end_row();
        json row = {{"s_db", db}, {"n", sm.n}, {"status", c.status}};
        row["crossing_exp_minus_2xi"] = c.status == "crossing" ? json(c.exp_minus_2xi) : json(nullptr);
        rows.push_back(std::move(row));
    }
    return {{{"gamma", sm.gamma},
             {"step", sm.step},
             {"files", {"single_mode_sweep.csv", "threshold_crossings.csv"}},
             {"crossings", std::move(rows)}},
            exit_ok};
}

CommandResult graph_demo(const RunConfig& cfg, const fs::path& out) {
    const System& sys = require_system(cfg, "graph-demo");
    const DecayGenerator gen = build_decay_generator(sys.channel);
    const int m = sys.state.mode_count();
    std::vector<Order> orders = orders_for(cfg.order);
    if (sys.scenario == Scenario::overlapping) orders = {Order::subtract_first, Order::lose_first};

    struct Run {
        Order order;
        std::size_t xi_index;
        SubtractedState state;
    };
    std::vector<Run> runs;
    for (Order o : orders)
        for (std::size_t i = 0; i < cfg.xi.size(); ++i) runs.push_back({o, i, prepare(sys, gen, o, LossStrength(cfg.xi[i]))});

    struct Cell {
        KurtosisMinimum kurtosis;
        std::vector<double> grid;
    };
    const std::vector<double> t = ticks(cfg.grid);
    std::vector<Cell> cells(runs.size() * m);
    parallel_for(cells.size(), [&](std::size_t c) {
        const Run& run = runs[c / m];
        const int vertex[] = {static_cast<int>(c % m)};
        const PolyGaussianWigner w = marginal(run.state, vertex);
        Cell& cell = cells[c];
        cell.kurtosis = min_excess_kurtosis(w, PhaseSpaceVector::x_axis(1, 0));
        cell.grid.reserve(t.size() * t.size());
        Vec beta(2);
        for (double x : t) {
            for (double p : t) {
                beta << x, p;
                cell.grid.push_back(w(beta));
            }
        }
    });

    CsvWriter kurt(out / "kurtosis.csv", {"order", "xi", "vertex", "kappa_min", "theta"});
    CsvWriter wit(out / "witness.csv",
                  {"order", "xi", "lhs", "threshold", "lifted_lhs", "lifted_rhs", "gap", "negative", "W_origin"});
    std::vector<std::string> mode_header{"order", "xi", "scale"};
    for (auto& n : coordinate_names(m, "g_")) mode_header.push_back(n);
    CsvWriter modes(out / "modes.csv", mode_header);

    json run_docs = json::array();
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const Run& run = runs[r];
        const std::string oname = order_name(run.order);
        const double xi = cfg.xi[run.xi_index];
        const NegativityWitness w = negativity_witness(run.state);
        const double w0 = run.state.wigner(Vec::Zero(2 * m));
        const double scale = run.order == Order::subtract_first
                                 ? tilde_mode(sys.subtraction_mode, gen, LossStrength(xi)).scale
                                 : 1.0;
        wit.field(oname).field(xi).field(w.lhs).field(w.threshold).field(w.lifted_lhs).field(w.lifted_rhs);
        wit.field(w.gap).field(w.negative ? 1 : 0).field(w0).end_row();
        modes.field(oname).field(xi).field(scale);
        for (int i = 0; i < 2 * m; ++i) modes.field(run.state.mode[i]);
        modes.end_row();

        json vertices = json::array();
        for (int v = 0; v < m; ++v) {
            const Cell& cell = cells[r * m + v];
            const std::string file =
                "wigner_" + oname + "_xi" + std::to_string(run.xi_index) + "_vertex" + std::to_string(v + 1) + ".csv";
            CsvWriter grid(out / file, {"x", "p", "W"});
            std::size_t idx = 0;
            for (double x : t)
                for (double p : t) grid.field(x).field(p).field(cell.grid[idx++]).end_row();
            kurt.field(oname).field(xi).field(v + 1).field(cell.kurtosis.kappa).field(cell.kurtosis.theta).end_row();
            vertices.push_back({{"vertex", v + 1},
                                {"kappa_min", cell.kurtosis.kappa},
                                {"theta", cell.kurtosis.theta},
                                {"grid_file", file}});
        }
        run_docs.push_back({{"order", oname},
                            {"xi", xi},
                            {"covariance", to_json(run.state.base.covariance())},
                            {"a_matrix", to_json(run.state.a)},
                            {"mode", to_json(run.state.mode.coords())},
                            {"scale", scale},
                            {"witness", witness_json(w)},
                            {"W_origin", w0},
                            {"vertices", std::move(vertices)}});
    }
    return {{{"system", system_json(sys)},
             {"xi", cfg.xi},
             {"grid", {{"radius", cfg.grid.radius}, {"step", cfg.grid.step}, {"points_per_axis", t.size()}}},
             {"runs", std::move(run_docs)}},
            exit_ok};
}

CommandResult negativity_threshold(const RunConfig& cfg, const fs::path& out) {
    const System& sys = require_system(cfg, "negativity-threshold");
    CsvWriter csv(out / "threshold.csv",
                  {"order", "status", "xi_star", "exp_minus_xi", "exp_minus_2xi", "lhs", "lifted_lhs", "lifted_rhs"});
    json docs = json::array();
    for (Order o : orders_for(cfg.order)) {
        const ThresholdResult r = find_threshold(sys, o, cfg.threshold.xi_max, cfg.threshold.tolerance);
        const bool found = r.status == "crossing";
        csv.field(order_name(o)).field(r.status);
        if (found) {
            csv.field(r.xi_star).field(std::exp(-r.xi_star)).field(std::exp(-2.0 * r.xi_star));
            csv.field(r.lhs).field(r.lifted_lhs).field(r.lifted_rhs);
        } else {
            for (int i = 0; i < 6; ++i) csv.field(std::string());
        }
        csv.end_row();
        json d = {{"order", order_name(o)}, {"status", r.status}};
        if (found) {
            d["xi_star"] = r.xi_star;
            d["exp_minus_xi"] = std::exp(-r.xi_star);
            d["exp_minus_2xi"] = std::exp(-2.0 * r.xi_star);
            d["lhs"] = r.lhs;
            d["lifted_lhs"] = r.lifted_lhs;
            d["lifted_rhs"] = r.lifted_rhs;
        }
        docs.push_back(std::move(d));
    }
    return {{{"system", system_json(sys)},
             {"xi_max", cfg.threshold.xi_max},
             {"tolerance", cfg.threshold.tolerance},
             {"thresholds", std::move(docs)}},
            exit_ok};
}

CommandResult subtract_map(const RunConfig& cfg, const fs::path& out) {
    const System& sys = require_system(cfg, "subtract-map");
    const DecayGenerator gen = build_decay_generator(sys.channel);
    const int m = sys.state.mode_count();
    const LossMode* dominant = nullptr;
    for (const auto& e : sys.channel.entries())
        if (!dominant || e.rate > dominant->rate) dominant = &e;

    std::vector<std::string> header{"xi", "scale", "angle_to_g", "angle_to_loss_mode"};
    for (auto& n : coordinate_names(m, "g_")) header.push_back(n);
    CsvWriter csv(out / "subtract_map.csv", header);
    json rows = json::array();
    for (double xi : cfg.xi) {
        const TildeMode t = tilde_mode(sys.subtraction_mode, gen, LossStrength(xi));
        const double to_g = plane_angle(t.mode, sys.subtraction_mode);
        const double to_d = dominant ? plane_angle(t.mode, dominant->mode) : std::numeric_limits<double>::quiet_NaN();
        csv.field(xi).field(t.scale).field(to_g).field(to_d);
        for (int i = 0; i < 2 * m; ++i) csv.field(t.mode[i]);
        csv.end_row();
        json row = {{"xi", xi}, {"scale", t.scale}, {"angle_to_g", to_g}, {"mode", to_json(t.mode.coords())}};
        row["angle_to_loss_mode"] = dominant ? json(to_d) : json(nullptr);
        rows.push_back(std::move(row));
    }
    json res = {{"system", system_json(sys)}, {"map", std::move(rows)}};
    res["dominant_loss_mode"] = dominant ? to_json(dominant->mode.coords()) : json(nullptr);
    return {std::move(res), exit_ok};
}

CommandResult oracle_check(const RunConfig& cfg, const fs::path& out) {
    OracleSuiteOptions opt;
    opt.identity_channel_only = cfg.oracle.suite == "xi0";
    opt.cutoff = cfg.oracle.cutoff;
    if (opt.cutoff && *opt.cutoff > 80) throw ConfigError("oracle.cutoff: at most 80 for the two-mode checks");
    const OracleSuiteReport report = run_oracle_suite(opt);
    json doc = report.to_json();
    doc["suite"] = cfg.oracle.suite;
    write_json(out / "oracle_report.json", doc);
    const int code = report.inconclusive() ? exit_inconclusive : (report.all_passed() ? exit_ok : exit_numerical);
    return {std::move(doc), code};
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"single-mode-sweep", "graph-demo", "negativity-threshold",
                                                "subtract-map", "oracle-check"};
    return names;
}

int run_command(const std::string& name, const RunConfig& cfg, const fs::path& out) {
    prepare_output(out);
    CommandResult r;
    if (name == "single-mode-sweep") {
        r = single_mode_sweep(cfg, out);
    } else if (name == "graph-demo") {
        r = graph_demo(cfg, out);
    } else if (name == "negativity-threshold") {
        r = negativity_threshold(cfg, out);
    } else if (name == "subtract-map") {
        r = subtract_map(cfg, out);
    } else if (name == "oracle-check") {
        r = oracle_check(cfg, out);
    } else {
        throw ConfigError("unknown command '" + name + "'");
    }
    const json record = {{"artifact", "cvloss"},
                         {"version", k_artifact_version},
                         {"command", name},
                         {"config", cfg.source},
                         {"order", order_name(cfg.order)},
                         {"exit_code", r.exit_code},
                         {"results", std::move(r.results)}};
    write_json(out / "run.json", record);
    return r.exit_code;
}

}  // namespace cvloss::cli
