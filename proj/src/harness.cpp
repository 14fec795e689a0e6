#include "rogd/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "rogd/errors.hpp"
#include "rogd/kernels.hpp"
#include "rogd/rng.hpp"
#include "rogd/svg.hpp"

namespace fs = std::filesystem;

namespace rogd {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + v);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad seed value for '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: bad boolean value for '" + key + "': " + v);
}

}  // namespace

FilterVariant RunConfig::filter_variant() const {
    if (filter == "literal") return FilterVariant::literal;
    if (filter == "relative") return FilterVariant::relative;
    throw ConfigError("config: filter must be 'literal' or 'relative', got '" + filter + "'");
}

AdversaryStrategy::Kind RunConfig::strategy_kind() const {
    if (strategy == "constant") return AdversaryStrategy::Kind::constant;
    if (strategy == "uniform") return AdversaryStrategy::Kind::uniform_random;
    if (strategy == "conflicting") return AdversaryStrategy::Kind::conflicting;
    if (strategy == "tracking") return AdversaryStrategy::Kind::tracking_offset;
    throw ConfigError("config: unknown strategy '" + strategy + "'");
}

StreamConfig::Kind RunConfig::stream_kind() const {
    if (stream == "sensor") return StreamConfig::Kind::sensor;
    if (stream == "quadratic") return StreamConfig::Kind::synthetic_quadratic;
    if (stream == "piecewise") return StreamConfig::Kind::synthetic_piecewise;
    throw ConfigError("config: unknown stream '" + stream + "'");
}

void RunConfig::set_key(const std::string& key, const std::string& value) {
    if (key == "graph") {
        graph = value;
    } else if (key == "n") {
        n = parse_int(key, value);
    } else if (key == "F") {
        F = parse_int(key, value);
    } else if (key == "adversaries") {
        adversaries = parse_int(key, value);
    } else if (key == "strategy") {
        strategy = value;
    } else if (key == "strategy_const") {
        strategy_const = parse_double(key, value);
    } else if (key == "strategy_lo") {
        strategy_lo = parse_double(key, value);
    } else if (key == "strategy_hi") {
        strategy_hi = parse_double(key, value);
    } else if (key == "strategy_offset") {
        strategy_offset = parse_double(key, value);
    } else if (key == "value_cap") {
        value_cap = parse_double(key, value);
    } else if (key == "stream") {
        stream = value;
    } else if (key == "sigma") {
        sigma = parse_double(key, value);
    } else if (key == "true_x") {
        if (value != "auto") parse_double(key, value);
        true_x = value;
    } else if (key == "K1") {
        K1 = parse_double(key, value);
    } else if (key == "K2") {
        K2 = parse_double(key, value);
    } else if (key == "h_min") {
        h_min = parse_double(key, value);
    } else if (key == "rho_floor") {
        rho_floor = parse_double(key, value);
    } else if (key == "T") {
        T = parse_int(key, value);
    } else if (key == "seed") {
        seed = parse_u64(key, value);
    } else if (key == "filter") {
        filter = value;
    } else if (key == "out") {
        out = value;
    } else if (key == "x0_range") {
        x0_range = parse_double(key, value);
    } else if (key == "force") {
        force = parse_bool(key, value);
    } else if (key == "records") {
        records = parse_bool(key, value);
    } else if (key == "reduced_budget") {
        reduced_budget = parse_int(key, value);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::as_pairs() const {
    std::vector<std::pair<std::string, std::string>> p;
    p.emplace_back("graph", graph);
    p.emplace_back("n", std::to_string(n));
    p.emplace_back("F", std::to_string(F));
    p.emplace_back("adversaries", std::to_string(adversaries));
    p.emplace_back("strategy", strategy);
    p.emplace_back("strategy_const", format_g17(strategy_const));
    p.emplace_back("strategy_lo", format_g17(strategy_lo));
    p.emplace_back("strategy_hi", format_g17(strategy_hi));
    p.emplace_back("strategy_offset", format_g17(strategy_offset));
    p.emplace_back("value_cap", format_g17(value_cap));
    p.emplace_back("stream", stream);
    p.emplace_back("sigma", format_g17(sigma));
    p.emplace_back("true_x", true_x);
    p.emplace_back("K1", format_g17(K1));
    p.emplace_back("K2", format_g17(K2));
    p.emplace_back("h_min", format_g17(h_min));
    p.emplace_back("rho_floor", format_g17(rho_floor));
    p.emplace_back("T", std::to_string(T));
    p.emplace_back("seed", std::to_string(seed));
    p.emplace_back("filter", filter);
    p.emplace_back("out", out);
    p.emplace_back("x0_range", format_g17(x0_range));
    p.emplace_back("force", force ? "true" : "false");
    p.emplace_back("records", records ? "true" : "false");
    p.emplace_back("reduced_budget", std::to_string(reduced_budget));
    return p;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not 'key = value': " + line);
        }
        cfg.set_key(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

namespace {

double resolve_true_x(const RunConfig& cfg) {
    if (cfg.true_x == "auto") {
        return RngStream(cfg.seed, StreamPurpose::true_value).uniform(-5.0, 5.0, 0);
    }
    return parse_double("true_x", cfg.true_x);
}

CostFunction cost_at(const Experiment& e, int agent, int round) {
    if (e.cfg.stream_kind() == StreamConfig::Kind::sensor) {
        return sensor_cost(e.model, agent, round, e.cfg.K1);
    }
    return synthetic_stream(e.stream_cfg, agent, round);
}

}  // namespace

Experiment simulate_experiment(const RunConfig& cfg) {
    Experiment e;
    e.cfg = cfg;
    if (cfg.T < 1) throw ConfigError("config: T must be >= 1");
    if (cfg.n < 2) throw ConfigError("config: need at least two agents");
    if (cfg.F < 0) throw ConfigError("config: F must be >= 0");

    if (cfg.graph == "generate") {
        e.graph = build_robust_graph(cfg.n, 2 * cfg.F + 1, cfg.seed);
        e.placement = cfg.adversaries > 0
                          ? place_adversaries(e.graph, cfg.adversaries, cfg.F, cfg.seed)
                          : AdversaryPlacement{{}, cfg.F};
    } else {
        auto [g, p] = load_graph_file(cfg.graph);
        e.graph = std::move(g);
        e.placement = std::move(p);
    }
    e.ridx = RegularIndex::build(e.graph.vertex_count(), e.placement);
    if (e.ridx.size() == 0) throw ConfigError("config: no regular agents");

    e.assumptions = check_assumptions(e.graph, e.placement);
    if (!e.assumptions.ok() && !cfg.force) {
        throw AssumptionFailure("assumption check failed:\n" + e.assumptions.summary());
    }

    e.realized_true_x = resolve_true_x(cfg);
    e.stream_cfg.kind = cfg.stream_kind();
    e.stream_cfg.K1 = cfg.K1;
    e.stream_cfg.K2 = cfg.K2;
    e.stream_cfg.seed = cfg.seed;
    e.stream_cfg.rho_floor = cfg.rho_floor;
    if (e.stream_cfg.kind == StreamConfig::Kind::sensor) {
        e.model = SensorModel::create(e.graph.vertex_count(), e.realized_true_x, cfg.sigma,
                                      cfg.seed, cfg.h_min);
        std::tie(e.L, e.rho) = stream_constants(e.stream_cfg, e.model, e.ridx.vertices);
    } else {
        e.stream_cfg.rho = 1.0;
        std::tie(e.L, e.rho) = stream_constants(e.stream_cfg);
    }

    StrategyMap strategies;
    for (int v : e.placement.adversaries) {
        AdversaryStrategy s;
        s.kind = cfg.strategy_kind();
        s.constant_value = cfg.strategy_const;
        s.lo = cfg.strategy_lo;
        s.hi = cfg.strategy_hi;
        s.offset = cfg.strategy_offset;
        s.cap = cfg.value_cap;
        s.seed = derive_seed(cfg.seed, StreamPurpose::adversary, static_cast<std::uint64_t>(v));
        strategies[v] = s;
    }

    const int nverts = e.graph.vertex_count();
    std::vector<double> states(static_cast<std::size_t>(nverts), 0.0);
    const RngStream init(cfg.seed, StreamPurpose::init_states);
    for (int v : e.ridx.vertices) {
        states[static_cast<std::size_t>(v)] =
            init.uniform(-cfg.x0_range, cfg.x0_range, static_cast<std::uint64_t>(v));
    }

    const FilterVariant variant = cfg.filter_variant();
    e.records.reserve(static_cast<std::size_t>(cfg.T) + 1);
    std::vector<double> gradients(static_cast<std::size_t>(nverts), 0.0);
    for (int t = 0; t <= cfg.T; ++t) {
        std::fill(gradients.begin(), gradients.end(), 0.0);
        if (t >= 1) {
            for (int v : e.ridx.vertices) {
                gradients[static_cast<std::size_t>(v)] =
                    cost_at(e, v, t).gradient(states[static_cast<std::size_t>(v)]);
            }
        }
        const double eta = t == 0 ? 0.0 : step_size(t, e.rho);
        e.records.push_back(
            run_round(e.graph, e.placement, states, strategies, gradients, eta, t, variant));
        states = e.records.back().states_after;
        for (int v : e.ridx.vertices) {
            if (std::fabs(states[static_cast<std::size_t>(v)]) > cfg.K1) ++e.k1_exceedances;
        }
    }
    return e;
}

void analyze_experiment(Experiment& e) {
    const RunConfig& cfg = e.cfg;
    const FilterVariant variant = cfg.filter_variant();
    const int T = cfg.T;
    const int R = e.ridx.size();

    e.mats.clear();
    e.mats.reserve(e.records.size());
    e.max_row_sum_error = 0.0;
    e.min_matrix_entry = 0.0;
    e.matrix_structure_ok = true;
    e.equivalence_error = 0.0;
    std::vector<double> xr(static_cast<std::size_t>(R));
    std::vector<double> mx(static_cast<std::size_t>(R));
    for (const RoundRecord& rec : e.records) {
        e.mats.push_back(build_M(e.placement, e.ridx, rec, variant));
        const EquivalentMatrix& em = e.mats.back();
        const MatrixDiagnostics diag =
            validate_equivalent_matrix(em, e.graph, e.placement, e.ridx, variant);
        e.max_row_sum_error = std::max(e.max_row_sum_error, diag.max_row_sum_error);
        e.min_matrix_entry = std::min(e.min_matrix_entry, diag.min_entry);
        if (!diag.sparsity_ok || !diag.diagonal_ok) e.matrix_structure_ok = false;

        for (int r = 0; r < R; ++r) {
            xr[static_cast<std::size_t>(r)] = rec.states_before[static_cast<std::size_t>(
                e.ridx.vertices[static_cast<std::size_t>(r)])];
        }
        kernels::matvec(em.m.a.data(), xr.data(), mx.data(), R, R);
        for (int r = 0; r < R; ++r) {
            const int v = e.ridx.vertices[static_cast<std::size_t>(r)];
            const double predicted = mx[static_cast<std::size_t>(r)] -
                                     rec.eta * rec.gradients[static_cast<std::size_t>(v)];
            const double actual = rec.states_after[static_cast<std::size_t>(v)];
            e.equivalence_error =
                std::max(e.equivalence_error, std::fabs(predicted - actual));
        }
    }

    e.q = estimate_q_all(e.mats, T);
    e.trace = consensus_trace(e.records, e.q, e.ridx);
    e.theta = estimate_theta(e.mats);

    e.schedule.alpha.clear();
    e.schedule.alpha.reserve(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
        e.schedule.alpha.push_back(e.q[static_cast<std::size_t>(t + 1)].q);
    }

    e.costs.resize(T, R);
    e.costs.edge = cfg.K1;
    for (int t = 1; t <= T; ++t) {
        for (int r = 0; r < R; ++r) {
            e.costs.set(t, r, cost_at(e, e.ridx.vertices[static_cast<std::size_t>(r)], t));
        }
    }
    e.regret_states = Matrix(T, R);
    for (int t = 1; t <= T; ++t) {
        const auto& src = e.records[static_cast<std::size_t>(t)].states_before;
        for (int r = 0; r < R; ++r) {
            e.regret_states.at(t - 1, r) =
                src[static_cast<std::size_t>(e.ridx.vertices[static_cast<std::size_t>(r)])];
        }
    }

    RegretReport& rep = e.report;
    rep.z_star = solve_z_star(e.costs, e.schedule, cfg.K1);
    rep.network = network_regret(e.regret_states, e.costs, e.schedule, rep.z_star);
    rep.agent_series = Matrix(T, R);
    for (int r = 0; r < R; ++r) {
        const std::vector<double> series =
            agent_regret(r, e.regret_states, e.costs, e.schedule, rep.z_star);
        for (int t = 1; t <= T; ++t) rep.agent_series.at(t - 1, r) = series[static_cast<std::size_t>(t - 1)];
    }
    rep.agent_min.assign(static_cast<std::size_t>(T), 0.0);
    rep.agent_max.assign(static_cast<std::size_t>(T), 0.0);
    for (int t = 1; t <= T; ++t) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int r = 0; r < R; ++r) {
            lo = std::min(lo, rep.agent_series.at(t - 1, r));
            hi = std::max(hi, rep.agent_series.at(t - 1, r));
        }
        rep.agent_min[static_cast<std::size_t>(t - 1)] = lo;
        rep.agent_max[static_cast<std::size_t>(t - 1)] = hi;
    }

    double min_alpha = std::numeric_limits<double>::infinity();
    for (const auto& row : e.schedule.alpha) {
        for (double v : row) {
            if (v > 0.0) min_alpha = std::min(min_alpha, v);
        }
    }
    rep.beta = std::isfinite(min_alpha) ? 0.5 * min_alpha : 0.0;
    rep.gamma_count = rep.beta > 0.0 ? alpha_quality(e.schedule, rep.beta) : 0;

    // Bound constants from the fitted decay, inflated by a 10x safety factor;
    // reported alongside the measurements, never asserted.
    double c_use = 10.0 * e.theta.C_hat;
    double theta_use = e.theta.theta_hat;
    if (!e.theta.ok || !(c_use > 0.0)) {
        c_use = 1.0;
        theta_use = 0.0;
    }
    double sum_x0 = 0.0;
    for (int v : e.ridx.vertices) {
        sum_x0 += std::fabs(e.records.front().states_before[static_cast<std::size_t>(v)]);
    }
    rep.C1 = c_use / (1.0 - theta_use) * sum_x0;
    rep.C2 = 2.0 * e.L / e.rho +
             static_cast<double>(R) * c_use * e.L / (e.rho * (1.0 - theta_use));
    rep.y0_dist = std::fabs(e.trace.y_direct.front() - rep.z_star);
    rep.bounds = theoretical_bounds(e.L, e.rho, rep.C1, rep.C2, rep.y0_dist);
    rep.bound_series.assign(static_cast<std::size_t>(T), 0.0);
    for (int t = 1; t <= T; ++t) {
        rep.bound_series[static_cast<std::size_t>(t - 1)] = rep.bounds.network_bound(t);
    }

    if (e.stream_cfg.kind == StreamConfig::Kind::sensor) {
        std::vector<int> all(static_cast<std::size_t>(e.graph.vertex_count()));
        for (int v = 0; v < e.graph.vertex_count(); ++v) all[static_cast<std::size_t>(v)] = v;
        rep.offline_all = offline_optimum(e.model, T, all);
        rep.offline_regular = offline_optimum(e.model, T, e.ridx.vertices);
    }

    int gamma = e.ridx.size();
    for (const ReducedGraph& rg :
         enumerate_reduced_graphs(e.graph, e.placement, cfg.reduced_budget, cfg.seed)) {
        gamma = std::min(gamma, static_cast<int>(rg.vertices.size()));
    }
    e.gamma_hat = gamma;
}

Experiment run_experiment(const RunConfig& cfg) {
    Experiment e = simulate_experiment(cfg);
    analyze_experiment(e);
    return e;
}

namespace {

void write_states_csv(std::ostream& out, const Experiment& e) {
    out << "t,agent,value\n";
    const int T = e.cfg.T;
    for (int t = 0; t <= T + 1; ++t) {
        const auto& src = t <= T ? e.records[static_cast<std::size_t>(t)].states_before
                                 : e.records.back().states_after;
        for (int v : e.ridx.vertices) {
            out << t << "," << v << "," << format_g17(src[static_cast<std::size_t>(v)]) << "\n";
        }
    }
}

void write_regret_csv(std::ostream& out, const Experiment& e) {
    out << "t,network,agent_min,agent_max,bound\n";
    for (int t = 1; t <= e.cfg.T; ++t) {
        const std::size_t i = static_cast<std::size_t>(t - 1);
        out << t << "," << format_g17(e.report.network[i]) << ","
            << format_g17(e.report.agent_min[i]) << "," << format_g17(e.report.agent_max[i])
            << "," << format_g17(e.report.bound_series[i]) << "\n";
    }
}

void write_analysis_csv(std::ostream& out, const Experiment& e) {
    out << "s,t_end,row_spread,q_min,q_max,q_positive\n";
    for (const WeightEstimate& est : e.q) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        int positive = 0;
        for (double v : est.q) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            if (v > 1e-12) ++positive;
        }
        out << est.anchor << "," << est.horizon << "," << format_g17(est.row_spread) << ","
            << format_g17(lo) << "," << format_g17(hi) << "," << positive << "\n";
    }
}

void write_consensus_csv(std::ostream& out, const Experiment& e) {
    out << "t,y_direct,y_recursive,max_abs_deviation\n";
    for (std::size_t t = 0; t < e.trace.y_direct.size(); ++t) {
        out << t << "," << format_g17(e.trace.y_direct[t]) << ","
            << format_g17(e.trace.y_recursive[t]) << ","
            << format_g17(e.trace.max_abs_deviation[t]) << "\n";
    }
}

void emit_standard_plots(const std::string& dir, const std::vector<double>& network,
                         const std::vector<double>& agent_min,
                         const std::vector<double>& agent_max,
                         const std::vector<double>& deviation, bool log_x) {
    std::vector<double> t_axis(network.size());
    for (std::size_t i = 0; i < network.size(); ++i) t_axis[i] = static_cast<double>(i + 1);
    const auto averaged = [&](const std::vector<double>& series) {
        std::vector<double> out(series.size());
        for (std::size_t i = 0; i < series.size(); ++i) {
            out[i] = series[i] / static_cast<double>(i + 1);
        }
        return out;
    };
    svg::PlotOptions regret_opts;
    regret_opts.title = "Regret averaged over time";
    regret_opts.x_label = "T";
    regret_opts.y_label = "Reg(T)/T";
    regret_opts.log_x = log_x;
    svg::emit_plot({{"network regret / T", t_axis, averaged(network)},
                    {"max agent regret / T", t_axis, averaged(agent_max)},
                    {"min agent regret / T", t_axis, averaged(agent_min)}},
                   dir + "/regret_avg.svg", regret_opts);

    std::vector<double> dev_axis(deviation.size());
    for (std::size_t i = 0; i < deviation.size(); ++i) dev_axis[i] = static_cast<double>(i);
    svg::PlotOptions dev_opts;
    dev_opts.title = "Distance to the consensus surrogate";
    dev_opts.x_label = "t";
    dev_opts.y_label = "max_i |x_i(t) - y(t)|";
    dev_opts.log_x = log_x;
    svg::emit_plot({{"max deviation", dev_axis, deviation}}, dir + "/consensus_dev.svg",
                   dev_opts);
}

}  // namespace

void write_manifest(std::ostream& out, const Experiment& e, double wallclock_sec) {
    out << "version = " << kVersion << "\n";
    out << "wallclock_sec = " << wallclock_sec << "\n";
    out << "kernels_backend = " << kernels::backend_name() << "\n";
    for (const auto& [k, v] : e.cfg.as_pairs()) out << "cfg." << k << " = " << v << "\n";
    out << "realized.R = " << e.ridx.size() << "\n";
    out << "realized.true_x = " << format_g17(e.realized_true_x) << "\n";
    out << "realized.rho = " << format_g17(e.rho) << "\n";
    out << "realized.L = " << format_g17(e.L) << "\n";
    out << "realized.kappa = " << format_g17(e.graph.min_weight()) << "\n";
    out << "realized.gamma_hat = " << e.gamma_hat << "\n";
    out << "realized.gamma_hat_note = lower-bound estimate from "
        << e.cfg.reduced_budget << " sampled reduced graphs\n";
    out << "realized.theta_fit_ok = " << (e.theta.ok ? "true" : "false") << "\n";
    out << "realized.C_hat = " << format_g17(e.theta.C_hat) << "\n";
    out << "realized.theta_hat = " << format_g17(e.theta.theta_hat) << "\n";
    out << "realized.C1 = " << format_g17(e.report.C1) << "\n";
    out << "realized.C2 = " << format_g17(e.report.C2) << "\n";
    out << "realized.z_star = " << format_g17(e.report.z_star) << "\n";
    out << "realized.y0_dist = " << format_g17(e.report.y0_dist) << "\n";
    out << "realized.beta = " << format_g17(e.report.beta) << "\n";
    out << "realized.gamma_count = " << e.report.gamma_count << "\n";
    out << "realized.A1 = " << format_g17(e.report.bounds.A1) << "\n";
    out << "realized.A2 = " << format_g17(e.report.bounds.A2) << "\n";
    out << "realized.A3 = " << format_g17(e.report.bounds.A3) << "\n";
    out << "realized.B1 = " << format_g17(e.report.bounds.B1) << "\n";
    out << "realized.B2 = " << format_g17(e.report.bounds.B2) << "\n";
    out << "realized.B3 = " << format_g17(e.report.bounds.B3) << "\n";
    if (e.stream_cfg.kind == StreamConfig::Kind::sensor) {
        out << "realized.offline_optimum_all = " << format_g17(e.report.offline_all) << "\n";
        out << "realized.offline_optimum_regular = " << format_g17(e.report.offline_regular)
            << "\n";
        std::ostringstream gains;
        for (std::size_t i = 0; i < e.model.gains.size(); ++i) {
            if (i > 0) gains << " ";
            gains << format_g17(e.model.gains[i]);
        }
        out << "realized.H = " << gains.str() << "\n";
    }
    out << "realized.equivalence_error = " << format_g17(e.equivalence_error) << "\n";
    out << "realized.row_sum_error = " << format_g17(e.max_row_sum_error) << "\n";
    out << "realized.min_matrix_entry = " << format_g17(e.min_matrix_entry) << "\n";
    out << "realized.matrix_structure_ok = " << (e.matrix_structure_ok ? "true" : "false")
        << "\n";
    out << "realized.k1_exceedances = " << e.k1_exceedances << "\n";
    out << "realized.assumption_robustness = "
        << (e.assumptions.robustness == Verdict::pass
                ? "pass"
                : e.assumptions.robustness == Verdict::fail ? "fail" : "unverified")
        << "\n";
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

RunConfig config_from_manifest(const std::map<std::string, std::string>& manifest) {
    RunConfig cfg;
    for (const auto& [k, v] : manifest) {
        if (k.rfind("cfg.", 0) == 0) cfg.set_key(k.substr(4), v);
    }
    return cfg;
}

void write_records_csv(std::ostream& out, const std::vector<RoundRecord>& records) {
    out << "kind,t,i,j,value\n";
    if (records.empty()) return;
    const auto& x0 = records.front().states_before;
    for (std::size_t v = 0; v < x0.size(); ++v) {
        out << "x0,0," << v << ",-1," << format_g17(x0[v]) << "\n";
    }
    for (const RoundRecord& rec : records) {
        out << "eta," << rec.round << ",-1,-1," << format_g17(rec.eta) << "\n";
        for (const Transmission& t : rec.transmissions) {
            out << "tx," << rec.round << "," << t.sender << "," << t.receiver << ","
                << format_g17(t.value) << "\n";
        }
        for (std::size_t v = 0; v < rec.gradients.size(); ++v) {
            if (rec.gradients[v] != 0.0) {
                out << "grad," << rec.round << "," << v << ",-1,"
                    << format_g17(rec.gradients[v]) << "\n";
            }
        }
    }
}

std::vector<RoundRecord> read_records_csv(std::istream& in, int n) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("records.csv: empty file");
    std::vector<RoundRecord> records;
    std::vector<double> x0(static_cast<std::size_t>(n), 0.0);
    const auto record_for = [&](int t) -> RoundRecord& {
        if (t == static_cast<int>(records.size())) {
            records.emplace_back();
            records.back().round = t;
            records.back().gradients.assign(static_cast<std::size_t>(n), 0.0);
        }
        if (t >= static_cast<int>(records.size())) {
            throw ConfigError("records.csv: rounds out of order");
        }
        return records[static_cast<std::size_t>(t)];
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<std::string, 5> fields;
        std::size_t start = 0;
        for (int f = 0; f < 5; ++f) {
            const auto comma = line.find(',', start);
            if (comma == std::string::npos && f < 4) {
                throw ConfigError("records.csv: bad line: " + line);
            }
            fields[static_cast<std::size_t>(f)] =
                f < 4 ? line.substr(start, comma - start) : line.substr(start);
            start = comma + 1;
        }
        const std::string& kind = fields[0];
        const int t = parse_int("t", fields[1]);
        const int i = parse_int("i", fields[2]);
        const int j = parse_int("j", fields[3]);
        const double value = parse_double("value", fields[4]);
        if (kind == "x0") {
            if (i < 0 || i >= n) throw ConfigError("records.csv: x0 agent out of range");
            x0[static_cast<std::size_t>(i)] = value;
        } else if (kind == "eta") {
            record_for(t).eta = value;
        } else if (kind == "tx") {
            record_for(t).transmissions.push_back({i, j, value});
        } else if (kind == "grad") {
            record_for(t).gradients[static_cast<std::size_t>(i)] = value;
        } else {
            throw ConfigError("records.csv: unknown kind '" + kind + "'");
        }
    }
    if (!records.empty()) records.front().states_before = x0;
    return records;
}

void write_outputs(const Experiment& e, const std::string& dir) {
    fs::create_directories(dir);
    const auto open = [&](const std::string& name) {
        std::ofstream out(dir + "/" + name);
        if (!out) throw ConfigError("cannot open for writing: " + dir + "/" + name);
        return out;
    };
    {
        auto out = open("states.csv");
        write_states_csv(out, e);
    }
    {
        auto out = open("regret.csv");
        write_regret_csv(out, e);
    }
    {
        auto out = open("analysis.csv");
        write_analysis_csv(out, e);
    }
    {
        auto out = open("consensus.csv");
        write_consensus_csv(out, e);
    }
    {
        auto out = open("graph.txt");
        save_graph(out, e.graph, e.placement);
    }
    if (e.cfg.records) {
        auto out = open("records.csv");
        write_records_csv(out, e.records);
    }
    emit_standard_plots(dir, e.report.network, e.report.agent_min, e.report.agent_max,
                        e.trace.max_abs_deviation, false);
}

namespace {

std::vector<std::vector<double>> read_csv_columns(const std::string& path, int expected_cols) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty");
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(expected_cols));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t start = 0;
        for (int f = 0; f < expected_cols; ++f) {
            const auto comma = line.find(',', start);
            const std::string field = comma == std::string::npos
                                          ? line.substr(start)
                                          : line.substr(start, comma - start);
            cols[static_cast<std::size_t>(f)].push_back(parse_double("csv", field));
            start = comma == std::string::npos ? line.size() : comma + 1;
        }
    }
    return cols;
}

}  // namespace

void plot_outputs(const std::string& dir, bool log_x) {
    const auto regret = read_csv_columns(dir + "/regret.csv", 5);
    const auto consensus = read_csv_columns(dir + "/consensus.csv", 4);
    emit_standard_plots(dir, regret[1], regret[2], regret[3], consensus[3], log_x);
}

Experiment load_run(const std::string& dir) {
    const auto manifest = read_manifest(dir + "/manifest.txt");
    Experiment e;
    e.cfg = config_from_manifest(manifest);
    e.cfg.out = dir;

    auto [g, p] = load_graph_file(dir + "/graph.txt");
    e.graph = std::move(g);
    e.placement = std::move(p);
    e.ridx = RegularIndex::build(e.graph.vertex_count(), e.placement);
    e.assumptions = check_assumptions(e.graph, e.placement);

    e.realized_true_x = resolve_true_x(e.cfg);
    e.stream_cfg.kind = e.cfg.stream_kind();
    e.stream_cfg.K1 = e.cfg.K1;
    e.stream_cfg.K2 = e.cfg.K2;
    e.stream_cfg.seed = e.cfg.seed;
    e.stream_cfg.rho_floor = e.cfg.rho_floor;
    if (e.stream_cfg.kind == StreamConfig::Kind::sensor) {
        e.model = SensorModel::create(e.graph.vertex_count(), e.realized_true_x, e.cfg.sigma,
                                      e.cfg.seed, e.cfg.h_min);
        std::tie(e.L, e.rho) = stream_constants(e.stream_cfg, e.model, e.ridx.vertices);
    } else {
        e.stream_cfg.rho = 1.0;
        std::tie(e.L, e.rho) = stream_constants(e.stream_cfg);
    }

    std::ifstream rin(dir + "/records.csv");
    if (!rin) {
        throw ConfigError("run directory has no records.csv (was the run made with records = "
                          "false?): " + dir);
    }
    e.records = read_records_csv(rin, e.graph.vertex_count());
    if (static_cast<int>(e.records.size()) != e.cfg.T + 1) {
        throw ConfigError("records.csv does not cover rounds 0..T");
    }
    const FilterVariant variant = e.cfg.filter_variant();
    for (std::size_t t = 0; t < e.records.size(); ++t) {
        if (t > 0) e.records[t].states_before = e.records[t - 1].states_after;
        complete_round(e.graph, e.placement, e.records[t], variant);
    }
    for (const RoundRecord& rec : e.records) {
        for (int v : e.ridx.vertices) {
            if (std::fabs(rec.states_after[static_cast<std::size_t>(v)]) > e.cfg.K1) {
                ++e.k1_exceedances;
            }
        }
    }
    analyze_experiment(e);
    return e;
}

}  // namespace rogd
