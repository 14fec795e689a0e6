#include "rogd/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rogd/errors.hpp"
#include "rogd/rng.hpp"

namespace rogd {

Graph::Graph(int n) : n_(n), adj_(static_cast<std::size_t>(std::max(n, 0))) {
    if (n < 1) throw std::invalid_argument("Graph: vertex count must be positive");
}

Graph Graph::complete(int n) {
    Graph g(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    }
    return g;
}

Graph Graph::cycle(int n) {
    if (n < 3) throw std::invalid_argument("Graph::cycle: need n >= 3");
    Graph g(n);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

Graph Graph::path(int n) {
    Graph g(n);
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}

void Graph::check_vertex(int v) const {
    if (v < 0 || v >= n_) throw std::invalid_argument("Graph: vertex out of range");
}

void Graph::add_edge(int i, int j, double weight) {
    check_vertex(i);
    check_vertex(j);
    if (i == j) throw std::invalid_argument("Graph: self loops are not allowed");
    if (!(weight > 0.0) || !std::isfinite(weight)) {
        throw std::invalid_argument("Graph: edge weight must be positive and finite");
    }
    const auto key = std::minmax(i, j);
    if (weights_.contains({key.first, key.second})) {
        throw std::invalid_argument("Graph: duplicate edge");
    }
    weights_[{key.first, key.second}] = weight;
    adj_[static_cast<std::size_t>(i)].insert(
        std::lower_bound(adj_[i].begin(), adj_[i].end(), j), j);
    adj_[static_cast<std::size_t>(j)].insert(
        std::lower_bound(adj_[j].begin(), adj_[j].end(), i), i);
}

bool Graph::has_edge(int i, int j) const {
    check_vertex(i);
    check_vertex(j);
    const auto key = std::minmax(i, j);
    return weights_.contains({key.first, key.second});
}

double Graph::weight(int i, int j) const {
    const auto key = std::minmax(i, j);
    const auto it = weights_.find({key.first, key.second});
    if (it == weights_.end()) throw std::invalid_argument("Graph: no such edge");
    return it->second;
}

const std::vector<int>& Graph::neighbors(int v) const {
    check_vertex(v);
    return adj_[static_cast<std::size_t>(v)];
}

int Graph::degree(int v) const { return static_cast<int>(neighbors(v).size()); }

double Graph::min_weight() const {
    double m = 0.0;
    bool first = true;
    for (const auto& [edge, w] : weights_) {
        if (first || w < m) m = w;
        first = false;
    }
    return m;
}

bool Graph::is_connected() const {
    if (n_ <= 1) return true;
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : adj_[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(u)]) {
                seen[static_cast<std::size_t>(u)] = 1;
                ++visited;
                stack.push_back(u);
            }
        }
    }
    return visited == n_;
}

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(weights_.size());
    for (const auto& [edge, w] : weights_) out.push_back(edge);
    return out;
}

bool AdversaryPlacement::is_adversarial(int v) const {
    return std::binary_search(adversaries.begin(), adversaries.end(), v);
}

std::vector<int> AdversaryPlacement::regular_vertices(int n) const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n) - adversaries.size());
    for (int v = 0; v < n; ++v) {
        if (!is_adversarial(v)) out.push_back(v);
    }
    return out;
}

int AdversaryPlacement::regular_count(int n) const {
    return n - static_cast<int>(adversaries.size());
}

bool AdversaryPlacement::f_local(const Graph& g) const {
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (is_adversarial(v)) continue;
        int count = 0;
        for (int u : g.neighbors(v)) {
            if (is_adversarial(u)) ++count;
        }
        if (count > F) return false;
    }
    return true;
}

RegularIndex RegularIndex::build(int n, const AdversaryPlacement& placement) {
    RegularIndex idx;
    idx.vertices = placement.regular_vertices(n);
    idx.rank_of.assign(static_cast<std::size_t>(n), -1);
    for (int r = 0; r < static_cast<int>(idx.vertices.size()); ++r) {
        idx.rank_of[static_cast<std::size_t>(idx.vertices[r])] = r;
    }
    return idx;
}

bool is_r_reachable(const Graph& g, const std::vector<int>& subset, int r) {
    if (subset.empty()) throw std::invalid_argument("is_r_reachable: empty subset");
    if (r < 1) throw std::invalid_argument("is_r_reachable: r must be positive");
    std::vector<char> in_subset(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v : subset) {
        if (v < 0 || v >= g.vertex_count()) {
            throw std::invalid_argument("is_r_reachable: vertex out of range");
        }
        in_subset[static_cast<std::size_t>(v)] = 1;
    }
    for (int v : subset) {
        int outside = 0;
        for (int u : g.neighbors(v)) {
            if (!in_subset[static_cast<std::size_t>(u)]) ++outside;
        }
        if (outside >= r) return true;
    }
    return false;
}

namespace {

// Adjacency bitmasks for the exhaustive robustness check (n <= limit <= 30).
std::vector<std::uint32_t> adjacency_masks(const Graph& g) {
    std::vector<std::uint32_t> masks(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v = 0; v < g.vertex_count(); ++v) {
        for (int u : g.neighbors(v)) masks[static_cast<std::size_t>(v)] |= 1u << u;
    }
    return masks;
}

}  // namespace

bool is_r_robust(const Graph& g, int r, int exhaustive_limit) {
    if (r < 1) throw std::invalid_argument("is_r_robust: r must be positive");
    const int n = g.vertex_count();
    if (exhaustive_limit > 20) exhaustive_limit = 20;  // 3^20 partitions is already minutes
    if (n > exhaustive_limit) {
        throw SizeLimitError("is_r_robust: graph exceeds the exhaustive size limit (" +
                             std::to_string(n) + " > " + std::to_string(exhaustive_limit) + ")");
    }
    const auto adj = adjacency_masks(g);
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);

    // A subset is "bad" if it is not r-reachable. The graph fails iff two
    // disjoint bad subsets exist.
    std::vector<char> bad(static_cast<std::size_t>(full) + 1, 0);
    std::vector<std::uint32_t> bad_sets;
    for (std::uint32_t s = 1; s <= full; ++s) {
        bool reachable = false;
        for (std::uint32_t rest = s; rest != 0; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            if (std::popcount(adj[static_cast<std::size_t>(v)] & ~s & full) >= r) {
                reachable = true;
                break;
            }
        }
        if (!reachable) {
            bad[s] = 1;
            bad_sets.push_back(s);
        }
    }
    for (std::uint32_t s : bad_sets) {
        const std::uint32_t comp = full & ~s;
        for (std::uint32_t sub = comp; sub != 0; sub = (sub - 1) & comp) {
            if (bad[sub]) return false;
        }
    }
    return true;
}

int max_robustness(const Graph& g, int exhaustive_limit) {
    const int upper = (g.vertex_count() + 1) / 2;
    int best = 0;
    for (int r = 1; r <= upper; ++r) {
        if (is_r_robust(g, r, exhaustive_limit)) {
            best = r;
        } else {
            break;
        }
    }
    return best;
}

Graph build_robust_graph(int n, int target_r, std::uint64_t seed) {
    if (target_r < 1) throw std::invalid_argument("build_robust_graph: target_r must be positive");
    const int core = 2 * target_r + 1;
    if (n < core) {
        throw std::invalid_argument(
            "build_robust_graph: need n >= 2r+1 (complete core of " + std::to_string(core) +
            " vertices)");
    }
    Graph g(n);
    for (int i = 0; i < core; ++i) {
        for (int j = i + 1; j < core; ++j) g.add_edge(i, j);
    }
    SeqRng rng(seed, StreamPurpose::graph);
    std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < core; ++i) degree[static_cast<std::size_t>(i)] = core - 1;

    for (int v = core; v < n; ++v) {
        // Preferential attachment: target_r distinct existing vertices, each
        // drawn with probability proportional to current degree. Cumulative
        // sums walk vertices in index order, which fixes tie-breaking.
        std::vector<double> w(degree.begin(), degree.begin() + v);
        for (int pick = 0; pick < target_r; ++pick) {
            double total = 0.0;
            for (double x : w) total += x;
            const double u = rng.next_uniform01() * total;
            double cum = 0.0;
            int chosen = -1;
            for (int cand = 0; cand < v; ++cand) {
                cum += w[static_cast<std::size_t>(cand)];
                if (u < cum) {
                    chosen = cand;
                    break;
                }
            }
            if (chosen < 0) {  // u landed on the last positive-weight vertex
                for (int cand = v - 1; cand >= 0; --cand) {
                    if (w[static_cast<std::size_t>(cand)] > 0.0) {
                        chosen = cand;
                        break;
                    }
                }
            }
            g.add_edge(v, chosen);
            w[static_cast<std::size_t>(chosen)] = 0.0;
            degree[static_cast<std::size_t>(chosen)] += 1.0;
            degree[static_cast<std::size_t>(v)] += 1.0;
        }
    }
    return g;
}

bool ReducedGraph::connected() const {
    if (vertices.empty()) return false;
    std::map<int, std::vector<int>> adj;
    for (int v : vertices) adj[v];
    for (const auto& [i, j] : edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::set<int> seen{vertices.front()};
    std::vector<int> stack{vertices.front()};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : adj[v]) {
            if (seen.insert(u).second) stack.push_back(u);
        }
    }
    return seen.size() == vertices.size();
}

namespace {

// Enumerate all subsets of size <= F of {0, ..., m-1} as index vectors.
std::vector<std::vector<int>> small_subsets(int m, int F) {
    std::vector<std::vector<int>> out{{}};
    std::vector<int> combo;
    const auto recurse = [&](auto&& self, int start, int remaining) -> void {
        if (remaining == 0) return;
        for (int i = start; i < m; ++i) {
            combo.push_back(i);
            out.push_back(combo);
            self(self, i + 1, remaining - 1);
            combo.pop_back();
        }
    };
    recurse(recurse, 0, F);
    return out;
}

}  // namespace

std::vector<ReducedGraph> enumerate_reduced_graphs(const Graph& g,
                                                   const AdversaryPlacement& placement,
                                                   int budget, std::uint64_t seed) {
    if (budget < 1) throw std::invalid_argument("enumerate_reduced_graphs: budget must be >= 1");
    const std::vector<int> regulars = placement.regular_vertices(g.vertex_count());

    // Edges of the regular-agent subgraph, plus per-vertex incident lists.
    std::vector<std::pair<int, int>> redges;
    for (const auto& [i, j] : g.edges()) {
        if (!placement.is_adversarial(i) && !placement.is_adversarial(j)) {
            redges.emplace_back(i, j);
        }
    }
    std::map<int, std::vector<int>> incident;  // vertex -> edge indices
    for (int v : regulars) incident[v];
    for (int e = 0; e < static_cast<int>(redges.size()); ++e) {
        incident[redges[static_cast<std::size_t>(e)].first].push_back(e);
        incident[redges[static_cast<std::size_t>(e)].second].push_back(e);
    }

    // Per-vertex deletion choices: subsets of incident edges of size <= F.
    std::vector<std::vector<std::vector<int>>> choices;  // vertex -> choice -> edge ids
    choices.reserve(regulars.size());
    for (int v : regulars) {
        const auto& inc = incident[v];
        std::vector<std::vector<int>> per_vertex;
        for (const auto& subset : small_subsets(static_cast<int>(inc.size()), placement.F)) {
            std::vector<int> ids;
            ids.reserve(subset.size());
            for (int k : subset) ids.push_back(inc[static_cast<std::size_t>(k)]);
            per_vertex.push_back(std::move(ids));
        }
        choices.push_back(std::move(per_vertex));
    }

    double total = 1.0;
    for (const auto& c : choices) {
        total *= static_cast<double>(c.size());
        if (total > 1e15) break;
    }
    const bool exhaustive = total <= static_cast<double>(budget);

    const auto materialize = [&](const std::vector<std::size_t>& pick) {
        std::vector<char> removed(redges.size(), 0);
        for (std::size_t v = 0; v < choices.size(); ++v) {
            for (int e : choices[v][pick[v]]) removed[static_cast<std::size_t>(e)] = 1;
        }
        ReducedGraph rg;
        rg.vertices = regulars;
        for (std::size_t e = 0; e < redges.size(); ++e) {
            if (!removed[e]) rg.edges.push_back(redges[e]);
        }
        return rg;
    };

    std::vector<ReducedGraph> out;
    if (exhaustive) {
        std::set<std::vector<std::pair<int, int>>> seen;
        std::vector<std::size_t> pick(choices.size(), 0);
        while (true) {
            ReducedGraph rg = materialize(pick);
            if (seen.insert(rg.edges).second) out.push_back(std::move(rg));
            std::size_t d = 0;
            while (d < pick.size()) {
                if (++pick[d] < choices[d].size()) break;
                pick[d] = 0;
                ++d;
            }
            if (d == pick.size()) break;
        }
    } else {
        SeqRng rng(seed, StreamPurpose::reduced_sample);
        for (int s = 0; s < budget; ++s) {
            std::vector<std::size_t> pick(choices.size());
            for (std::size_t v = 0; v < choices.size(); ++v) {
                pick[v] = rng.next_bounded(choices[v].size());
            }
            out.push_back(materialize(pick));
        }
    }
    return out;
}

std::string AssumptionReport::summary() const {
    auto flag = [](bool b) { return b ? "pass" : "FAIL"; };
    std::ostringstream os;
    os << "undirected: " << flag(undirected) << "\n";
    os << "(2F+1)-robust (r=" << required_robustness << "): "
       << (robustness == Verdict::pass ? "pass"
                                       : robustness == Verdict::fail ? "FAIL" : "unverified")
       << "\n";
    os << "F-local adversary set: " << flag(f_local) << "\n";
    os << "kappa-bounded weights (kappa=" << kappa << "): " << flag(kappa_positive) << "\n";
    os << "regular degrees >= 2F+1 (min=" << worst_regular_degree << "): " << flag(min_degree)
       << "\n";
    return os.str();
}

AssumptionReport check_assumptions(const Graph& g, const AdversaryPlacement& placement,
                                   int exhaustive_limit) {
    AssumptionReport rep;
    rep.undirected = true;  // enforced by the Graph representation
    rep.required_robustness = 2 * placement.F + 1;
    if (g.vertex_count() <= exhaustive_limit) {
        rep.robustness = is_r_robust(g, rep.required_robustness, exhaustive_limit)
                             ? Verdict::pass
                             : Verdict::fail;
    } else {
        rep.robustness = Verdict::unverified;
    }
    rep.f_local = placement.f_local(g);
    rep.kappa = g.min_weight();
    rep.kappa_positive = g.edge_count() > 0 && rep.kappa > 0.0;

    rep.min_degree = true;
    rep.worst_regular_degree = std::numeric_limits<int>::max();
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (placement.is_adversarial(v)) continue;
        rep.worst_regular_degree = std::min(rep.worst_regular_degree, g.degree(v));
    }
    if (rep.worst_regular_degree == std::numeric_limits<int>::max()) {
        rep.worst_regular_degree = 0;
    }
    if (rep.worst_regular_degree < rep.required_robustness) rep.min_degree = false;
    return rep;
}

AdversaryPlacement place_adversaries(const Graph& g, int count, int F, std::uint64_t seed,
                                     int max_restarts) {
    if (count < 0) throw std::invalid_argument("place_adversaries: negative count");
    if (F < 0) throw std::invalid_argument("place_adversaries: negative F");
    if (count > g.vertex_count()) {
        throw std::invalid_argument("place_adversaries: more adversaries than vertices");
    }
    const int n = g.vertex_count();
    for (int attempt = 0; attempt < max_restarts; ++attempt) {
        SeqRng rng(seed, StreamPurpose::placement, static_cast<std::uint64_t>(attempt));
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) order[static_cast<std::size_t>(v)] = v;
        rng.shuffle(order);
        // Odd attempts bias toward low-degree vertices, which touch fewer
        // regular neighborhoods.
        if (attempt % 2 == 1) {
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return g.degree(a) < g.degree(b); });
        }
        std::vector<int> load(static_cast<std::size_t>(n), 0);  // adversarial neighbors
        std::vector<char> chosen(static_cast<std::size_t>(n), 0);
        int placed = 0;
        for (int v : order) {
            if (placed == count) break;
            bool feasible = true;
            for (int u : g.neighbors(v)) {
                if (!chosen[static_cast<std::size_t>(u)] &&
                    load[static_cast<std::size_t>(u)] + 1 > F) {
                    feasible = false;
                    break;
                }
            }
            if (!feasible) continue;
            chosen[static_cast<std::size_t>(v)] = 1;
            ++placed;
            for (int u : g.neighbors(v)) ++load[static_cast<std::size_t>(u)];
        }
        if (placed == count) {
            AdversaryPlacement p;
            p.F = F;
            for (int v = 0; v < n; ++v) {
                if (chosen[static_cast<std::size_t>(v)]) p.adversaries.push_back(v);
            }
            if (p.f_local(g)) return p;
        }
    }
    throw ConfigError("place_adversaries: no F-local placement of " + std::to_string(count) +
                      " adversaries found (F=" + std::to_string(F) + ")");
}

void save_graph(std::ostream& out, const Graph& g, const AdversaryPlacement& placement) {
    out << g.vertex_count() << " " << placement.F << "\n";
    char buf[64];
    for (const auto& [i, j] : g.edges()) {
        std::snprintf(buf, sizeof(buf), "%.17g", g.weight(i, j));
        out << i << " " << j << " " << buf << "\n";
    }
    out << "A:";
    for (int v : placement.adversaries) out << " " << v;
    out << "\n";
}

std::pair<Graph, AdversaryPlacement> load_graph(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("graph file: missing header line");
    std::istringstream header(line);
    int n = 0;
    int F = 0;
    if (!(header >> n >> F) || n < 1 || F < 0) {
        throw ConfigError("graph file: header must be \"N F\"");
    }
    Graph g(n);
    AdversaryPlacement placement;
    placement.F = F;
    bool saw_adversaries = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("A:", 0) == 0) {
            std::istringstream as(line.substr(2));
            int v = 0;
            while (as >> v) {
                if (v < 0 || v >= n) throw ConfigError("graph file: adversary out of range");
                placement.adversaries.push_back(v);
            }
            std::sort(placement.adversaries.begin(), placement.adversaries.end());
            placement.adversaries.erase(
                std::unique(placement.adversaries.begin(), placement.adversaries.end()),
                placement.adversaries.end());
            saw_adversaries = true;
            continue;
        }
        std::istringstream es(line);
        int i = 0;
        int j = 0;
        double w = 1.0;
        if (!(es >> i >> j >> w)) throw ConfigError("graph file: bad edge line: " + line);
        g.add_edge(i, j, w);
    }
    if (!saw_adversaries) throw ConfigError("graph file: missing \"A:\" line");
    return {std::move(g), std::move(placement)};
}

void save_graph_file(const std::string& path, const Graph& g,
                     const AdversaryPlacement& placement) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    save_graph(out, g, placement);
}

std::pair<Graph, AdversaryPlacement> load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open graph file: " + path);
    return load_graph(in);
}

}  // namespace rogd
