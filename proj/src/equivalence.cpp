#include "rogd/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "rogd/errors.hpp"

namespace rogd {

namespace {

struct Bracket {
    bool found = false;
    int vertex = -1;
    double value = 0.0;
};

// Regular member of `candidates` whose transmitted value is closest to v_a
// from above (side=+1) or below (side=-1). Ties go to the smaller id.
Bracket closest_regular(const std::vector<int>& candidates,
                        const std::map<int, double>& value_of,
                        const AdversaryPlacement& placement, double v_a, int side) {
    Bracket best;
    for (int u : candidates) {
        if (placement.is_adversarial(u)) continue;
        const double x = value_of.at(u);
        if (side > 0 && x < v_a) continue;
        if (side < 0 && x > v_a) continue;
        const bool better =
            !best.found || (side > 0 ? x < best.value : x > best.value) ||
            (x == best.value && u < best.vertex);
        if (better) best = {true, u, x};
    }
    return best;
}

}  // namespace

std::vector<double> build_equivalent_row(const AdversaryPlacement& placement,
                                         const RegularIndex& ridx, const RoundRecord& record,
                                         int agent, FilterVariant variant) {
    if (placement.is_adversarial(agent)) {
        throw std::invalid_argument("build_equivalent_row: agent is adversarial");
    }
    const FilterOutcome& outcome = record.filter_for(agent);
    std::map<int, double> value_of;
    for (const Transmission& t : record.transmissions) {
        if (t.receiver == agent) value_of[t.sender] = t.value;
    }
    value_of[agent] = record.states_before[static_cast<std::size_t>(agent)];

    const double w = 1.0 / static_cast<double>(outcome.kept.size());
    std::vector<double> row(static_cast<std::size_t>(ridx.size()), 0.0);
    for (int j : outcome.kept) {
        if (!placement.is_adversarial(j)) {
            row[static_cast<std::size_t>(ridx.rank(j))] += w;
            continue;
        }
        // Surviving adversarial value: write it as a convex combination of
        // the closest regular values in the removed sets (plus the agent's
        // own value in the relative variant, where a side can be empty).
        const double v_a = value_of.at(j);
        std::vector<int> upper = outcome.removed_top;
        std::vector<int> lower = outcome.removed_bottom;
        if (variant == FilterVariant::relative) {
            upper.push_back(agent);
            lower.push_back(agent);
        }
        const Bracket up = closest_regular(upper, value_of, placement, v_a, +1);
        const Bracket lo = closest_regular(lower, value_of, placement, v_a, -1);
        if (!up.found || !lo.found) {
            throw AdversaryBudgetViolation(
                "build_equivalent_row: no regular bracket for a surviving adversarial value "
                "(agent " + std::to_string(agent) + ", sender " + std::to_string(j) +
                "); the F-local assumption is violated");
        }
        double lambda = 1.0;
        if (up.value != lo.value) lambda = (up.value - v_a) / (up.value - lo.value);
        row[static_cast<std::size_t>(ridx.rank(lo.vertex))] += lambda * w;
        row[static_cast<std::size_t>(ridx.rank(up.vertex))] += (1.0 - lambda) * w;
    }
    return row;
}

EquivalentMatrix build_M(const AdversaryPlacement& placement, const RegularIndex& ridx,
                         const RoundRecord& record, FilterVariant variant) {
    EquivalentMatrix em;
    em.round = record.round;
    em.m = Matrix(ridx.size(), ridx.size());
    for (int r = 0; r < ridx.size(); ++r) {
        const std::vector<double> row =
            build_equivalent_row(placement, ridx, record, ridx.vertices[r], variant);
        std::copy(row.begin(), row.end(), em.m.row(r));
    }
    return em;
}

MatrixDiagnostics validate_equivalent_matrix(const EquivalentMatrix& em, const Graph& g,
                                             const AdversaryPlacement& placement,
                                             const RegularIndex& ridx, FilterVariant variant) {
    MatrixDiagnostics d;
    d.max_row_sum_error = em.m.row_stochasticity_error();
    d.min_entry = em.m.min_entry();
    for (int i = 0; i < em.m.rows; ++i) {
        const int vi = ridx.vertices[static_cast<std::size_t>(i)];
        const int deg = g.degree(vi);
        const double floor = variant == FilterVariant::literal
                                 ? 1.0 / static_cast<double>(deg - 2 * placement.F + 1)
                                 : 1.0 / static_cast<double>(deg + 1);
        if (em.m.at(i, i) < floor) d.diagonal_ok = false;
        for (int j = 0; j < em.m.cols; ++j) {
            if (em.m.at(i, j) == 0.0) continue;
            const int vj = ridx.vertices[static_cast<std::size_t>(j)];
            if (vi != vj && !g.has_edge(vi, vj)) d.sparsity_ok = false;
        }
    }
    return d;
}

namespace {

int matrix_index(std::span<const EquivalentMatrix> matrices, int round) {
    if (matrices.empty()) throw std::invalid_argument("phi_product: no matrices");
    const int first = matrices.front().round;
    const int idx = round - first;
    if (idx < 0 || idx >= static_cast<int>(matrices.size()) ||
        matrices[static_cast<std::size_t>(idx)].round != round) {
        throw std::invalid_argument("phi_product: round " + std::to_string(round) +
                                    " is not recorded");
    }
    return idx;
}

}  // namespace

Matrix phi_product(std::span<const EquivalentMatrix> matrices, int s, int t) {
    if (s > t) throw std::invalid_argument("phi_product: need s <= t");
    Matrix p = matrices[static_cast<std::size_t>(matrix_index(matrices, s))].m;
    for (int k = s + 1; k <= t; ++k) {
        p = matrices[static_cast<std::size_t>(matrix_index(matrices, k))].m.mul(p);
    }
    return p;
}

namespace {

WeightEstimate summarize(const Matrix& phi, int s, int t_end) {
    WeightEstimate est;
    est.anchor = s;
    est.horizon = t_end;
    est.row_spread = phi.column_spread();
    est.q.assign(static_cast<std::size_t>(phi.cols), 0.0);
    for (int i = 0; i < phi.rows; ++i) {
        for (int j = 0; j < phi.cols; ++j) est.q[static_cast<std::size_t>(j)] += phi.at(i, j);
    }
    for (double& v : est.q) v /= static_cast<double>(phi.rows);
    return est;
}

}  // namespace

WeightEstimate estimate_q(std::span<const EquivalentMatrix> matrices, int s, int t_end) {
    if (t_end < s) throw std::invalid_argument("estimate_q: need t_end >= s");
    return summarize(phi_product(matrices, s, t_end), s, t_end);
}

std::vector<WeightEstimate> estimate_q_all(std::span<const EquivalentMatrix> matrices,
                                           int t_end) {
    if (matrices.empty()) throw std::invalid_argument("estimate_q_all: no matrices");
    const int first = matrices.front().round;
    (void)matrix_index(matrices, t_end);
    const int r = matrices.front().m.rows;

    std::vector<WeightEstimate> out(static_cast<std::size_t>(t_end - first + 2));
    // Past the horizon the product is empty: Phi = I, i.e. a uniform row
    // average with full spread.
    Matrix p = Matrix::identity(r);
    out[static_cast<std::size_t>(t_end + 1 - first)] = summarize(p, t_end + 1, t_end);
    for (int s = t_end; s >= first; --s) {
        p = p.mul(matrices[static_cast<std::size_t>(matrix_index(matrices, s))].m);
        out[static_cast<std::size_t>(s - first)] = summarize(p, s, t_end);
    }
    return out;
}

ConsensusTrace consensus_trace(std::span<const RoundRecord> records,
                               std::span<const WeightEstimate> q_estimates,
                               const RegularIndex& ridx) {
    if (records.empty()) throw std::invalid_argument("consensus_trace: no records");
    if (q_estimates.size() < records.size() + 1) {
        throw std::invalid_argument("consensus_trace: need q estimates through the final state");
    }
    const int steps = static_cast<int>(records.size());
    const int r = ridx.size();

    const auto regular_states = [&](int t) {
        std::vector<double> x(static_cast<std::size_t>(r));
        const auto& src = t < steps ? records[static_cast<std::size_t>(t)].states_before
                                    : records[static_cast<std::size_t>(steps - 1)].states_after;
        for (int i = 0; i < r; ++i) {
            x[static_cast<std::size_t>(i)] =
                src[static_cast<std::size_t>(ridx.vertices[static_cast<std::size_t>(i)])];
        }
        return x;
    };

    ConsensusTrace trace;
    trace.y_direct.resize(static_cast<std::size_t>(steps + 1));
    trace.y_recursive.resize(static_cast<std::size_t>(steps + 1));
    trace.max_abs_deviation.resize(static_cast<std::size_t>(steps + 1));
    for (int t = 0; t <= steps; ++t) {
        const std::vector<double> x = regular_states(t);
        const auto& q = q_estimates[static_cast<std::size_t>(t)].q;
        trace.y_direct[static_cast<std::size_t>(t)] = kernels::dot(q, x);
        double dev = 0.0;
        for (double xi : x) {
            dev = std::max(dev, std::fabs(xi - trace.y_direct[static_cast<std::size_t>(t)]));
        }
        trace.max_abs_deviation[static_cast<std::size_t>(t)] = dev;
    }
    trace.y_recursive[0] = trace.y_direct[0];
    for (int t = 0; t < steps; ++t) {
        const RoundRecord& rec = records[static_cast<std::size_t>(t)];
        std::vector<double> g(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) {
            g[static_cast<std::size_t>(i)] = rec.gradients[static_cast<std::size_t>(
                ridx.vertices[static_cast<std::size_t>(i)])];
        }
        trace.y_recursive[static_cast<std::size_t>(t + 1)] =
            trace.y_recursive[static_cast<std::size_t>(t)] -
            rec.eta * kernels::dot(q_estimates[static_cast<std::size_t>(t + 1)].q, g);
    }
    for (int t = 0; t <= steps; ++t) {
        trace.max_discrepancy =
            std::max(trace.max_discrepancy,
                     std::fabs(trace.y_direct[static_cast<std::size_t>(t)] -
                               trace.y_recursive[static_cast<std::size_t>(t)]));
    }
    return trace;
}

double zeta_bound(int k, double C, double theta, double L, int R,
                  const std::function<double(int)>& eta, std::span<const double> x0) {
    if (k < 1) throw std::invalid_argument("zeta_bound: k must be >= 1");
    if (!(C > 0.0)) throw std::invalid_argument("zeta_bound: C must be positive");
    if (theta < 0.0 || theta >= 1.0) {
        throw std::invalid_argument("zeta_bound: theta must lie in [0, 1)");
    }
    double sum_x0 = 0.0;
    for (double v : x0) sum_x0 += std::fabs(v);
    double value = C * std::pow(theta, k - 1) * sum_x0;
    double geom = 0.0;
    for (int r = 0; r <= k - 2; ++r) geom += eta(r) * std::pow(theta, k - r - 2);
    value += static_cast<double>(R) * C * L * geom;
    value += 2.0 * eta(k - 1) * L;
    return value;
}

ThetaFit estimate_theta(std::span<const EquivalentMatrix> matrices) {
    if (matrices.size() < 10) {
        throw std::invalid_argument("estimate_theta: need at least 10 recorded rounds");
    }
    // Spread of Phi(t, first) via the forward recursion.
    std::vector<double> spreads;
    spreads.reserve(matrices.size());
    Matrix p = matrices.front().m;
    spreads.push_back(p.column_spread());
    for (std::size_t i = 1; i < matrices.size(); ++i) {
        p = matrices[i].m.mul(p);
        spreads.push_back(p.column_spread());
    }

    std::vector<std::pair<double, double>> pts;  // (t, ln spread)
    for (std::size_t t = 0; t < spreads.size(); ++t) {
        if (spreads[t] > 1e-280) pts.emplace_back(static_cast<double>(t), std::log(spreads[t]));
    }
    ThetaFit fit;
    fit.points = static_cast<int>(pts.size());
    if (pts.size() < 3) {  // consensus essentially from the start
        fit.ok = true;
        fit.theta_hat = 0.0;
        fit.C_hat = spreads.front();
        fit.note = "spread vanished immediately; theta set to 0";
        return fit;
    }
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    const double mean_y = sy / n;
    for (const auto& [x, y] : pts) {
        const double pred = intercept + slope * x;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (slope >= 0.0) {
        fit.ok = false;
        fit.note = "row spread is not decaying";
        return fit;
    }
    fit.ok = true;
    fit.theta_hat = std::exp(slope);
    fit.C_hat = std::exp(intercept);
    return fit;
}

}  // namespace rogd
