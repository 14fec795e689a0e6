#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rogd/costs.hpp"
#include "rogd/equivalence.hpp"
#include "rogd/graph.hpp"
#include "rogd/protocol.hpp"
#include "rogd/regret.hpp"

namespace rogd {

inline constexpr const char* kVersion = "0.1.0";

// Resolved run configuration. Serializes to/from line-oriented "key = value"
// text; the manifest stores the same keys under a "cfg." prefix so a run can
// be replayed byte-for-byte.
struct RunConfig {
    // Graph: grow one ((2F+1)-robust) or load an edge-list file.
    std::string graph = "generate";
    int n = 30;
    int F = 2;
    int adversaries = 4;
    std::uint64_t graph_seed_salt = 0;  // folded into the graph stream

    // Adversary behavior: constant | uniform | conflicting | tracking.
    std::string strategy = "uniform";
    double strategy_const = 0.0;
    double strategy_lo = -10.0;
    double strategy_hi = 10.0;
    double strategy_offset = 0.0;
    double value_cap = 1e6;

    // Cost stream: sensor | quadratic | piecewise.
    std::string stream = "sensor";
    double sigma = 1.0;
    std::string true_x = "auto";  // "auto" draws from the seed
    double K1 = 100.0;
    double K2 = 10.0;
    double h_min = 0.1;
    double rho_floor = 1e-9;

    int T = 1000;
    std::uint64_t seed = 1;
    std::string filter = "literal";  // literal | relative
    std::string out = "out";
    double x0_range = 10.0;
    bool force = false;    // run even if the assumption check fails
    bool records = true;   // write records.csv
    int reduced_budget = 200;

    FilterVariant filter_variant() const;
    AdversaryStrategy::Kind strategy_kind() const;
    StreamConfig::Kind stream_kind() const;

    static RunConfig from_file(const std::string& path);
    void set_key(const std::string& key, const std::string& value);
    std::vector<std::pair<std::string, std::string>> as_pairs() const;
};

struct RegretReport {
    double z_star = 0.0;
    std::vector<double> network;   // cumulative, t = 1..T
    Matrix agent_series;           // T x R, cumulative per regular rank
    std::vector<double> agent_min;
    std::vector<double> agent_max;
    double beta = 0.0;
    int gamma_count = 0;
    double C1 = 0.0;
    double C2 = 0.0;
    BoundConstants bounds;
    std::vector<double> bound_series;  // network bound evaluated at each t
    double y0_dist = 0.0;
    double offline_all = 0.0;      // sensor stream only
    double offline_regular = 0.0;
};

// A full run: simulation records plus every derived analysis artifact.
struct Experiment {
    RunConfig cfg;
    Graph graph;
    AdversaryPlacement placement;
    RegularIndex ridx;
    AssumptionReport assumptions;
    SensorModel model;       // meaningful for the sensor stream
    StreamConfig stream_cfg;
    double realized_true_x = 0.0;
    double L = 0.0;
    double rho = 0.0;

    std::vector<RoundRecord> records;       // rounds 0..T
    std::vector<EquivalentMatrix> mats;     // M(0)..M(T)
    std::vector<WeightEstimate> q;          // anchors 0..T+1
    ConsensusTrace trace;
    ThetaFit theta;
    WeightSchedule schedule;                // alpha(t) = q(t+1)
    CostTable costs;
    Matrix regret_states;                   // x at (t-1, rank), t = 1..T
    RegretReport report;

    int gamma_hat = 0;        // min sampled reduced-graph size
    int k1_exceedances = 0;   // states observed outside B(0, K1)
    double equivalence_error = 0.0;   // max |M x - eta g - x_next|
    double max_row_sum_error = 0.0;
    double min_matrix_entry = 0.0;
    bool matrix_structure_ok = true;  // sparsity + diagonal floor on every round
};

// Build graph/placement/costs, run rounds 0..T, then run the full analysis.
Experiment run_experiment(const RunConfig& cfg);

// Set up everything and run the simulation only (records populated).
Experiment simulate_experiment(const RunConfig& cfg);

// Derive matrices, weights, consensus trace, and the regret report from the
// records already present in `e`.
void analyze_experiment(Experiment& e);

// Write states.csv, regret.csv, analysis.csv, consensus.csv, graph.txt,
// manifest.txt, the SVG plots, and (if configured) records.csv.
void write_outputs(const Experiment& e, const std::string& dir);

// Emit the two standard plots from an output directory's CSVs.
void plot_outputs(const std::string& dir, bool log_x);

// Reload a run directory (manifest + graph + records) and recompute the
// analysis artifacts, rewriting the analysis outputs.
Experiment load_run(const std::string& dir);

// Manifest and records round-trip helpers.
void write_manifest(std::ostream& out, const Experiment& e, double wallclock_sec);
std::map<std::string, std::string> read_manifest(const std::string& path);
RunConfig config_from_manifest(const std::map<std::string, std::string>& manifest);
void write_records_csv(std::ostream& out, const std::vector<RoundRecord>& records);
// Returns partially-populated records (round, eta, transmissions, gradients,
// plus states_before on the first round).
std::vector<RoundRecord> read_records_csv(std::istream& in, int n);

std::string format_g17(double v);

}  // namespace rogd
