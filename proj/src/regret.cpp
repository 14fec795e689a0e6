#include "rogd/regret.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rogd/errors.hpp"
#include "rogd/kernels.hpp"

namespace rogd {

bool WeightSchedule::valid(double tol) const {
    for (const auto& row : alpha) {
        double sum = 0.0;
        for (double v : row) {
            if (v < 0.0 || v > 1.0) return false;
            sum += v;
        }
        if (std::fabs(sum - 1.0) > tol) return false;
    }
    return true;
}

void CostTable::resize(int T_, int R_) {
    T = T_;
    R = R_;
    const std::size_t n = static_cast<std::size_t>(T) * static_cast<std::size_t>(R);
    quad.assign(n, 0.0);
    center.assign(n, 0.0);
    abs_coef.assign(n, 0.0);
}

void CostTable::set(int t, int rank, const CostFunction& f) {
    const std::size_t i =
        static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(R) + static_cast<std::size_t>(rank);
    quad[i] = f.quad;
    center[i] = f.center;
    abs_coef[i] = f.abs_coef;
}

CostFunction CostTable::at(int t, int rank) const {
    const std::size_t i =
        static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(R) + static_cast<std::size_t>(rank);
    CostFunction f;
    f.quad = quad[i];
    f.center = center[i];
    f.abs_coef = abs_coef[i];
    f.edge = edge;
    f.round = t;
    f.owner = rank;
    return f;
}

double CostTable::value(int t, int rank, double x) const { return at(t, rank).value(x); }

bool CostTable::pure_quadratic() const {
    for (double b : abs_coef) {
        if (b != 0.0) return false;
    }
    return true;
}

std::span<const double> CostTable::quad_row(int t) const {
    return {quad.data() + static_cast<std::size_t>(t - 1) * R, static_cast<std::size_t>(R)};
}
std::span<const double> CostTable::center_row(int t) const {
    return {center.data() + static_cast<std::size_t>(t - 1) * R, static_cast<std::size_t>(R)};
}
std::span<const double> CostTable::abs_row(int t) const {
    return {abs_coef.data() + static_cast<std::size_t>(t - 1) * R, static_cast<std::size_t>(R)};
}

namespace {

void check_aligned(const CostTable& costs, const WeightSchedule& schedule) {
    if (schedule.horizon() != costs.T || schedule.agents() != costs.R) {
        throw std::invalid_argument("regret: schedule and cost table are misaligned");
    }
    if (costs.T < 1) throw std::invalid_argument("regret: need T >= 1");
}

double weighted_derivative(const CostTable& costs, const WeightSchedule& schedule, double x) {
    double d = 0.0;
    for (int t = 1; t <= costs.T; ++t) {
        const auto& w = schedule.alpha[static_cast<std::size_t>(t - 1)];
        for (int r = 0; r < costs.R; ++r) {
            d += w[static_cast<std::size_t>(r)] * costs.at(t, r).gradient(x);
        }
    }
    return d;
}

}  // namespace

double weighted_objective(const CostTable& costs, const WeightSchedule& schedule, double x) {
    check_aligned(costs, schedule);
    double total = 0.0;
    if (std::fabs(x) <= costs.edge) {  // every term is in its curved region
        for (int t = 1; t <= costs.T; ++t) {
            total += kernels::weighted_cost_sum(
                x, schedule.alpha[static_cast<std::size_t>(t - 1)], costs.quad_row(t),
                costs.center_row(t), costs.abs_row(t));
        }
        return total;
    }
    for (int t = 1; t <= costs.T; ++t) {
        const auto& w = schedule.alpha[static_cast<std::size_t>(t - 1)];
        for (int r = 0; r < costs.R; ++r) {
            total += w[static_cast<std::size_t>(r)] * costs.value(t, r, x);
        }
    }
    return total;
}

double solve_z_star_closed_form(const CostTable& costs, const WeightSchedule& schedule) {
    check_aligned(costs, schedule);
    if (!costs.pure_quadratic()) {
        throw std::invalid_argument("solve_z_star_closed_form: table has |.| terms");
    }
    double denom = 0.0;
    double numer = 0.0;
    for (int t = 1; t <= costs.T; ++t) {
        const kernels::QuadReduction r = kernels::quad_reduce(
            schedule.alpha[static_cast<std::size_t>(t - 1)], costs.quad_row(t),
            costs.center_row(t));
        denom += r.wq;
        numer += r.wqc;
    }
    if (denom <= 0.0) {
        throw DegenerateObjective("solve_z_star: weighted curvature mass is zero");
    }
    return numer / denom;
}

double solve_z_star_numeric(const CostTable& costs, const WeightSchedule& schedule, double K1,
                            double tol) {
    check_aligned(costs, schedule);
    if (!(K1 > 0.0)) throw std::invalid_argument("solve_z_star: K1 must be positive");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = -K1;
    double hi = K1;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = weighted_objective(costs, schedule, x1);
    double f2 = weighted_objective(costs, schedule, x2);
    while (hi - lo > 1e-6) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = weighted_objective(costs, schedule, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = weighted_objective(costs, schedule, x2);
        }
    }
    // Refine on the (nondecreasing) derivative; widen a touch so the sign
    // change is inside the bracket.
    double a = std::max(-K1, lo - 1e-5);
    double b = std::min(K1, hi + 1e-5);
    double da = weighted_derivative(costs, schedule, a);
    double db = weighted_derivative(costs, schedule, b);
    if (da >= 0.0) return a == -K1 && da > 0.0 ? -K1 : a;
    if (db <= 0.0) return b == K1 && db < 0.0 ? K1 : b;
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double mid = 0.5 * (a + b);
        if (weighted_derivative(costs, schedule, mid) < 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

double solve_z_star(const CostTable& costs, const WeightSchedule& schedule, double K1,
                    double tol) {
    if (costs.pure_quadratic()) {
        const double z = solve_z_star_closed_form(costs, schedule);
        // The closed form assumes every term is quadratic at z; fall back to
        // the bounded search if it lands in the linear tails.
        if (std::fabs(z) <= costs.edge) return z;
    }
    return solve_z_star_numeric(costs, schedule, K1, tol);
}

namespace {

// Per-round aggregates of the alpha-weighted objective: G_t(x) =
// 0.5*wq*x^2 - wqc*x + 0.5*wqcc (+ |.| terms handled separately).
struct RoundAggregates {
    std::vector<kernels::QuadReduction> agg;
    bool pure = true;
};

RoundAggregates aggregate_rounds(const CostTable& costs, const WeightSchedule& schedule) {
    RoundAggregates out;
    out.pure = costs.pure_quadratic();
    out.agg.resize(static_cast<std::size_t>(costs.T));
    for (int t = 1; t <= costs.T; ++t) {
        out.agg[static_cast<std::size_t>(t - 1)] = kernels::quad_reduce(
            schedule.alpha[static_cast<std::size_t>(t - 1)], costs.quad_row(t),
            costs.center_row(t));
    }
    return out;
}

double round_objective(const RoundAggregates& aggs, const CostTable& costs,
                       const WeightSchedule& schedule, int t, double x) {
    if (std::fabs(x) <= costs.edge) {
        if (aggs.pure) {
            const kernels::QuadReduction& r = aggs.agg[static_cast<std::size_t>(t - 1)];
            return 0.5 * r.wq * x * x - r.wqc * x + 0.5 * r.wqcc;
        }
        return kernels::weighted_cost_sum(x, schedule.alpha[static_cast<std::size_t>(t - 1)],
                                          costs.quad_row(t), costs.center_row(t),
                                          costs.abs_row(t));
    }
    // Outside the curved region the per-term linear tails matter.
    double total = 0.0;
    const auto& w = schedule.alpha[static_cast<std::size_t>(t - 1)];
    for (int r = 0; r < costs.R; ++r) {
        total += w[static_cast<std::size_t>(r)] * costs.value(t, r, x);
    }
    return total;
}

}  // namespace

std::vector<double> agent_regret(int rank, const Matrix& states, const CostTable& costs,
                                 const WeightSchedule& schedule, double z_star) {
    check_aligned(costs, schedule);
    if (states.rows != costs.T || states.cols != costs.R) {
        throw std::invalid_argument("agent_regret: state matrix is misaligned");
    }
    const RoundAggregates aggs = aggregate_rounds(costs, schedule);
    std::vector<double> series(static_cast<std::size_t>(costs.T));
    double cum = 0.0;
    for (int t = 1; t <= costs.T; ++t) {
        const double x = states.at(t - 1, rank);
        cum += round_objective(aggs, costs, schedule, t, x) -
               round_objective(aggs, costs, schedule, t, z_star);
        series[static_cast<std::size_t>(t - 1)] = cum;
    }
    return series;
}

std::vector<double> network_regret(const Matrix& states, const CostTable& costs,
                                   const WeightSchedule& schedule, double z_star) {
    check_aligned(costs, schedule);
    if (states.rows != costs.T || states.cols != costs.R) {
        throw std::invalid_argument("network_regret: state matrix is misaligned");
    }
    std::vector<double> series(static_cast<std::size_t>(costs.T));
    double cum = 0.0;
    for (int t = 1; t <= costs.T; ++t) {
        const auto& w = schedule.alpha[static_cast<std::size_t>(t - 1)];
        double inc = 0.0;
        for (int r = 0; r < costs.R; ++r) {
            inc += w[static_cast<std::size_t>(r)] *
                   (costs.value(t, r, states.at(t - 1, r)) - costs.value(t, r, z_star));
        }
        cum += inc;
        series[static_cast<std::size_t>(t - 1)] = cum;
    }
    return series;
}

int alpha_quality(const WeightSchedule& schedule, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("alpha_quality: beta must be positive");
    if (schedule.alpha.empty()) throw std::invalid_argument("alpha_quality: empty schedule");
    int worst = schedule.agents();
    for (const auto& row : schedule.alpha) {
        int count = 0;
        for (double v : row) {
            if (v >= beta) ++count;
        }
        worst = std::min(worst, count);
    }
    return worst;
}

double BoundConstants::network_bound(int T) const {
    const double u = 1.0 + std::log(static_cast<double>(T));
    return A1 + A2 * u + A3 * u * u;
}

double BoundConstants::agent_bound(int T) const {
    const double u = 1.0 + std::log(static_cast<double>(T));
    return B1 + B2 * u + B3 * u * u;
}

BoundConstants theoretical_bounds(double L, double rho, double C1, double C2, double y0_dist) {
    if (!(L > 0.0) || !(rho > 0.0) || C1 < 0.0 || C2 < 0.0 || y0_dist < 0.0) {
        throw std::invalid_argument("theoretical_bounds: constants out of range");
    }
    BoundConstants b;
    b.A1 = L * C1 + rho * C1 * y0_dist + 0.5 * rho * y0_dist * y0_dist;
    b.A2 = L * (C1 + C2) + L * L / (2.0 * rho) + (L + rho * C2) * y0_dist;
    b.A3 = L * L / (2.0 * rho) + L * C2;
    b.B1 = 3.0 * L * C1 + rho * C1 * y0_dist + 0.5 * rho * y0_dist * y0_dist;
    b.B2 = L * (C1 + 3.0 * C2) + L * L / (2.0 * rho) + (L + rho * C2) * y0_dist;
    b.B3 = b.A3;
    return b;
}

double offline_optimum(const SensorModel& model, int T, std::span<const int> agents) {
    if (T < 1) throw std::invalid_argument("offline_optimum: T must be >= 1");
    if (agents.empty()) throw std::invalid_argument("offline_optimum: empty agent set");
    double hh = 0.0;
    for (int i : agents) {
        const double h = model.gains[static_cast<std::size_t>(i)];
        hh += h * h;
    }
    if (hh <= 0.0) throw DegenerateObjective("offline_optimum: sum of H_i^2 is zero");
    double acc = 0.0;
    for (int t = 1; t <= T; ++t) {
        double hz = 0.0;
        for (int i : agents) {
            hz += model.gains[static_cast<std::size_t>(i)] * model.measurement(i, t);
        }
        acc += hz / hh;
    }
    return acc / static_cast<double>(T);
}

}  // namespace rogd
