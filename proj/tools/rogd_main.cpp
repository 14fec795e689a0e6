// Command-line front end: graph generation/certification, experiment runs,
// post-hoc analysis, plotting, and byte-exact replay verification.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rogd/errors.hpp"
#include "rogd/harness.hpp"
#include "rogd/kernels.hpp"

namespace fs = std::filesystem;

namespace {

struct GraphGenArgs {
    int n = 30;
    int F = 2;
    int adversaries = 0;
    int target_r = -1;  // default 2F+1
    std::uint64_t seed = 1;
    std::string out;
};

struct RunArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::string seed;
    std::string out;
    bool force = false;
};

rogd::RunConfig resolve_config(const RunArgs& args) {
    rogd::RunConfig cfg = rogd::RunConfig::from_file(args.config);
    for (const std::string& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw rogd::ConfigError("--set expects key=value, got '" + kv + "'");
        }
        cfg.set_key(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!args.seed.empty()) cfg.set_key("seed", args.seed);
    if (!args.out.empty()) cfg.set_key("out", args.out);
    if (args.force) cfg.force = true;
    return cfg;
}

int do_run(const rogd::RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    rogd::Experiment e = rogd::run_experiment(cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rogd::write_outputs(e, cfg.out);
    {
        std::ofstream mf(cfg.out + "/manifest.txt");
        if (!mf) throw rogd::ConfigError("cannot write manifest in " + cfg.out);
        rogd::write_manifest(mf, e, secs);
    }
    std::cout << "run complete: T=" << cfg.T << " R=" << e.ridx.size()
              << " adversaries=" << e.placement.adversaries.size() << "\n";
    std::cout << "  z* = " << e.report.z_star
              << ", network regret(T) = " << e.report.network.back()
              << ", regret(T)/T = " << e.report.network.back() / cfg.T << "\n";
    std::cout << "  equivalence error = " << e.equivalence_error
              << ", theta_hat = " << e.theta.theta_hat << " (fit "
              << (e.theta.ok ? "ok" : "failed") << ")\n";
    std::cout << "  outputs in " << cfg.out << " [kernels: " << rogd::kernels::backend_name()
              << ", " << secs << " s]\n";
    return 0;
}

bool files_identical(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary);
    std::ifstream fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    return ca == cb;
}

int do_replay(const std::string& dir) {
    const auto manifest = rogd::read_manifest(dir + "/manifest.txt");
    rogd::RunConfig cfg = rogd::config_from_manifest(manifest);
    const std::string tmp = dir + "/replay_tmp";
    cfg.out = tmp;
    rogd::Experiment e = rogd::run_experiment(cfg);
    rogd::write_outputs(e, tmp);

    std::vector<std::string> names = {"states.csv",   "regret.csv",       "analysis.csv",
                                      "consensus.csv", "graph.txt",        "regret_avg.svg",
                                      "consensus_dev.svg"};
    if (cfg.records) names.push_back("records.csv");
    bool all_ok = true;
    for (const std::string& name : names) {
        const bool same = files_identical(fs::path(dir) / name, fs::path(tmp) / name);
        std::cout << (same ? "  match   " : "  MISMATCH") << "  " << name << "\n";
        all_ok = all_ok && same;
    }
    fs::remove_all(tmp);
    std::cout << (all_ok ? "replay: outputs are byte-identical\n"
                         : "replay: outputs differ\n");
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Byzantine-resilient online distributed gradient descent simulator"};
    app.require_subcommand(1);

    // graph gen | graph check
    CLI::App* graph = app.add_subcommand("graph", "generate or certify communication graphs");
    graph->require_subcommand(1);
    GraphGenArgs gen_args;
    CLI::App* gen = graph->add_subcommand("gen", "grow a (2F+1)-robust graph");
    gen->add_option("--n", gen_args.n, "number of vertices")->required();
    gen->add_option("--F", gen_args.F, "adversary budget per neighborhood");
    gen->add_option("--adversaries", gen_args.adversaries, "adversaries to place (F-local)");
    gen->add_option("--target-r", gen_args.target_r, "override the target robustness (2F+1)");
    gen->add_option("--seed", gen_args.seed, "construction seed");
    gen->add_option("--out", gen_args.out, "output graph file")->required();

    std::string check_path;
    CLI::App* check = graph->add_subcommand("check", "run the assumption diagnostics");
    check->add_option("file", check_path, "graph file")->required();

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "execute an experiment end to end");
    run->add_option("--config", run_args.config, "run configuration file")->required();
    run->add_option("--set", run_args.overrides, "override a config key (key=value)");
    run->add_option("--seed", run_args.seed, "override the global seed");
    run->add_option("--out", run_args.out, "override the output directory");
    run->add_flag("--force", run_args.force, "run even if the assumption check fails");

    std::string analyze_dir;
    int dump_matrix_round = -1;
    CLI::App* analyze = app.add_subcommand("analyze", "recompute analysis from recorded rounds");
    analyze->add_option("--run", analyze_dir, "run output directory")->required();
    analyze->add_option("--dump-matrix", dump_matrix_round,
                        "also export M(t) for this round as matrix_<t>.csv");

    std::string plot_dir;
    bool plot_logx = false;
    CLI::App* plot = app.add_subcommand("plot", "regenerate SVG plots from CSV outputs");
    plot->add_option("--run", plot_dir, "run output directory")->required();
    plot->add_flag("--log-x", plot_logx, "logarithmic horizontal axis");

    std::string replay_dir;
    CLI::App* replay = app.add_subcommand("replay", "re-run from the manifest and compare bytes");
    replay->add_option("--run", replay_dir, "run output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            const int r = gen_args.target_r > 0 ? gen_args.target_r : 2 * gen_args.F + 1;
            rogd::Graph g = rogd::build_robust_graph(gen_args.n, r, gen_args.seed);
            rogd::AdversaryPlacement p{{}, gen_args.F};
            if (gen_args.adversaries > 0) {
                p = rogd::place_adversaries(g, gen_args.adversaries, gen_args.F, gen_args.seed);
            }
            rogd::save_graph_file(gen_args.out, g, p);
            std::cout << "wrote " << gen_args.out << " (n=" << gen_args.n << ", target r=" << r
                      << ", adversaries=" << p.adversaries.size() << ")\n";
            return 0;
        }
        if (check->parsed()) {
            auto [g, p] = rogd::load_graph_file(check_path);
            const rogd::AssumptionReport rep = rogd::check_assumptions(g, p);
            std::cout << rep.summary();
            return rep.ok() ? 0 : 1;
        }
        if (run->parsed()) return do_run(resolve_config(run_args));
        if (analyze->parsed()) {
            rogd::Experiment e = rogd::load_run(analyze_dir);
            rogd::write_outputs(e, analyze_dir);
            std::ofstream mf(analyze_dir + "/manifest.txt");
            rogd::write_manifest(mf, e, 0.0);
            if (dump_matrix_round >= 0) {
                if (dump_matrix_round >= static_cast<int>(e.mats.size())) {
                    throw rogd::ConfigError("--dump-matrix: round out of range");
                }
                const rogd::Matrix& m = e.mats[static_cast<std::size_t>(dump_matrix_round)].m;
                std::ofstream mo(analyze_dir + "/matrix_" + std::to_string(dump_matrix_round) +
                                 ".csv");
                for (int i = 0; i < m.rows; ++i) {
                    for (int j = 0; j < m.cols; ++j) {
                        mo << (j > 0 ? "," : "") << rogd::format_g17(m.at(i, j));
                    }
                    mo << "\n";
                }
            }
            std::cout << "analysis refreshed in " << analyze_dir << "\n";
            return 0;
        }
        if (plot->parsed()) {
            rogd::plot_outputs(plot_dir, plot_logx);
            std::cout << "plots refreshed in " << plot_dir << "\n";
            return 0;
        }
        if (replay->parsed()) return do_replay(replay_dir);
    } catch (const rogd::AssumptionFailure& e) {
        std::cerr << "assumption failure: " << e.what() << "\n";
        return 1;
    } catch (const rogd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
