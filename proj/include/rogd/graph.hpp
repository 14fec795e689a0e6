#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace rogd {

// Static undirected weighted graph. Edges are stored symmetrically, self
// loops are rejected, and every weight must be positive (the smallest one is
// the kappa reported by assumption checks).
class Graph {
  public:
    Graph() = default;
    explicit Graph(int n);

    static Graph complete(int n);
    static Graph cycle(int n);
    static Graph path(int n);

    void add_edge(int i, int j, double weight = 1.0);
    bool has_edge(int i, int j) const;
    double weight(int i, int j) const;

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(weights_.size()); }
    const std::vector<int>& neighbors(int v) const;
    int degree(int v) const;

    // Smallest stored weight (kappa); 0 for an edgeless graph.
    double min_weight() const;
    bool is_connected() const;

    // Undirected edges as (i, j) with i < j, ordered lexicographically.
    std::vector<std::pair<int, int>> edges() const;

  private:
    void check_vertex(int v) const;

    int n_ = 0;
    std::vector<std::vector<int>> adj_;                // sorted neighbor lists
    std::map<std::pair<int, int>, double> weights_;    // key (min, max)
};

// Fixed adversarial vertex set under the F-local model.
struct AdversaryPlacement {
    std::vector<int> adversaries;  // sorted, unique
    int F = 0;

    bool is_adversarial(int v) const;
    std::vector<int> regular_vertices(int n) const;
    int regular_count(int n) const;
    // True iff every regular vertex has at most F adversarial neighbors.
    bool f_local(const Graph& g) const;
};

// Mapping between vertex ids and dense indices over the regular agents.
struct RegularIndex {
    std::vector<int> vertices;  // rank -> vertex id, ascending
    std::vector<int> rank_of;   // vertex id -> rank, -1 for adversarial

    static RegularIndex build(int n, const AdversaryPlacement& placement);
    int size() const { return static_cast<int>(vertices.size()); }
    int rank(int v) const { return rank_of[static_cast<std::size_t>(v)]; }
};

inline constexpr int kDefaultExhaustiveLimit = 14;

// True iff some vertex of `subset` has at least r neighbors outside it.
bool is_r_reachable(const Graph& g, const std::vector<int>& subset, int r);

// Exhaustive check over all disjoint nonempty subset pairs. Exponential in
// the vertex count; refuses graphs larger than `exhaustive_limit`.
bool is_r_robust(const Graph& g, int r, int exhaustive_limit = kDefaultExhaustiveLimit);

// Largest r for which is_r_robust holds; 0 if the graph is not even 1-robust.
int max_robustness(const Graph& g, int exhaustive_limit = kDefaultExhaustiveLimit);

// Grow an r-robust graph on n vertices: complete core on 2r+1 vertices, then
// preferential attachment of r edges per new vertex. Deterministic per seed;
// all weights 1.
Graph build_robust_graph(int n, int target_r, std::uint64_t seed);

// Subgraph over the regular vertices with up to F extra edges removed per
// vertex (Lemma-style reduced graph).
struct ReducedGraph {
    std::vector<int> vertices;                  // regular vertex ids
    std::vector<std::pair<int, int>> edges;     // surviving edges, i < j
    bool connected() const;
};

// All reduced graphs when their number is at most `budget`, otherwise a
// seeded random sample of size `budget`. Duplicates are collapsed in the
// exhaustive case.
std::vector<ReducedGraph> enumerate_reduced_graphs(const Graph& g,
                                                   const AdversaryPlacement& placement,
                                                   int budget, std::uint64_t seed = 0);

enum class Verdict { pass, fail, unverified };

// Clause-by-clause diagnostic for the communication-model assumptions.
struct AssumptionReport {
    bool undirected = false;
    Verdict robustness = Verdict::unverified;  // (2F+1)-robust
    int required_robustness = 0;
    bool f_local = false;
    bool kappa_positive = false;
    double kappa = 0.0;
    bool min_degree = false;  // every regular vertex has >= 2F+1 neighbors
    int worst_regular_degree = 0;

    // No clause definitely failed (robustness may still be unverified).
    bool ok() const {
        return undirected && f_local && kappa_positive && min_degree &&
               robustness != Verdict::fail;
    }
    std::string summary() const;
};

AssumptionReport check_assumptions(const Graph& g, const AdversaryPlacement& placement,
                                   int exhaustive_limit = kDefaultExhaustiveLimit);

// Seeded randomized greedy search for an F-local adversarial set of the given
// size. Throws ConfigError when no placement is found.
AdversaryPlacement place_adversaries(const Graph& g, int count, int F, std::uint64_t seed,
                                     int max_restarts = 400);

// Plain-text format: "N F", one "i j weight" line per edge, then "A: ...".
void save_graph(std::ostream& out, const Graph& g, const AdversaryPlacement& placement);
std::pair<Graph, AdversaryPlacement> load_graph(std::istream& in);
void save_graph_file(const std::string& path, const Graph& g,
                     const AdversaryPlacement& placement);
std::pair<Graph, AdversaryPlacement> load_graph_file(const std::string& path);

}  // namespace rogd
