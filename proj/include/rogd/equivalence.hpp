#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rogd/graph.hpp"
#include "rogd/matrix.hpp"
#include "rogd/protocol.hpp"

namespace rogd {

// Row-stochastic matrix over the regular agents that reproduces one round of
// the filtered update: x(t+1) = M(t) x(t) - eta(t) g(t).
struct EquivalentMatrix {
    Matrix m;      // R x R, regular-rank indexed
    int round = 0;
};

// One row of M(t): uniform weight on the surviving regular senders plus the
// agent itself; each surviving adversarial value is rewritten as a convex
// combination of its closest regular brackets in the removed sets.
std::vector<double> build_equivalent_row(const AdversaryPlacement& placement,
                                         const RegularIndex& ridx, const RoundRecord& record,
                                         int agent,
                                         FilterVariant variant = FilterVariant::literal);

EquivalentMatrix build_M(const AdversaryPlacement& placement, const RegularIndex& ridx,
                         const RoundRecord& record,
                         FilterVariant variant = FilterVariant::literal);

// Structural checks from the matrix-representation result. The diagonal
// floor is 1/(deg_i - 2F + 1) for the literal filter; the relative variant
// can keep more values, so its floor is 1/(deg_i + 1).
struct MatrixDiagnostics {
    double max_row_sum_error = 0.0;   // |row sum - 1|
    double min_entry = 0.0;           // most negative entry
    bool sparsity_ok = true;          // nonzero only on edges or the diagonal
    bool diagonal_ok = true;
};
MatrixDiagnostics validate_equivalent_matrix(const EquivalentMatrix& em, const Graph& g,
                                             const AdversaryPlacement& placement,
                                             const RegularIndex& ridx,
                                             FilterVariant variant = FilterVariant::literal);

// Phi(t, s) = M(t) * M(t-1) * ... * M(s). Matrices must cover every round in
// [s, t] (ascending, contiguous).
Matrix phi_product(std::span<const EquivalentMatrix> matrices, int s, int t);

// Finite-horizon estimate of the limiting stochastic vector q(s).
struct WeightEstimate {
    std::vector<double> q;      // column averages of Phi(horizon, anchor)
    int anchor = 0;             // s
    int horizon = 0;            // t_end
    double row_spread = 0.0;    // truncation diagnostic
};

WeightEstimate estimate_q(std::span<const EquivalentMatrix> matrices, int s, int t_end);

// q(s) for every anchor s in [first round, t_end + 1] in one backward sweep;
// the entry past the horizon is the uniform vector (empty product).
std::vector<WeightEstimate> estimate_q_all(std::span<const EquivalentMatrix> matrices,
                                           int t_end);

// Consensus surrogate y(t) computed two ways: the direct inner product
// <q(t), x(t)> and the gradient-driven recursion. Indices follow rounds,
// t = first round .. last round + 1.
struct ConsensusTrace {
    std::vector<double> y_direct;
    std::vector<double> y_recursive;
    std::vector<double> max_abs_deviation;  // max_i |x_i(t) - y(t)|
    double max_discrepancy = 0.0;           // max_t |y_direct - y_recursive|
};

ConsensusTrace consensus_trace(std::span<const RoundRecord> records,
                               std::span<const WeightEstimate> q_estimates,
                               const RegularIndex& ridx);

// zeta(k) = C theta^(k-1) sum_j|x_j(0)|
//         + R C L sum_{r=0}^{k-2} eta(r) theta^(k-r-2) + 2 eta(k-1) L.
double zeta_bound(int k, double C, double theta, double L, int R,
                  const std::function<double(int)>& eta, std::span<const double> x0);

// Geometric decay fit of the row spread of Phi(t, 0).
struct ThetaFit {
    bool ok = false;
    double C_hat = 0.0;
    double theta_hat = 0.0;
    double r_squared = 0.0;
    int points = 0;
    std::string note;
};

ThetaFit estimate_theta(std::span<const EquivalentMatrix> matrices);

}  // namespace rogd
