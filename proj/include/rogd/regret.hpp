#pragma once

#include <limits>
#include <span>
#include <vector>

#include "rogd/costs.hpp"
#include "rogd/matrix.hpp"

namespace rogd {

// Per-round stochastic weight vectors alpha(t), t = 1..T, over regular ranks.
struct WeightSchedule {
    std::vector<std::vector<double>> alpha;  // alpha[t-1], length R

    int horizon() const { return static_cast<int>(alpha.size()); }
    int agents() const { return alpha.empty() ? 0 : static_cast<int>(alpha.front().size()); }
    // Entries in [0,1] and rows summing to 1 within tol.
    bool valid(double tol = 1e-10) const;
};

// Column-major-by-round table of the regular agents' cost functions,
// t = 1..T. Stored as coefficient arrays so reductions can vectorize; all
// entries share the linearization radius `edge` (see CostFunction).
struct CostTable {
    int T = 0;
    int R = 0;
    double edge = std::numeric_limits<double>::infinity();
    std::vector<double> quad;      // size T*R, row (t-1)
    std::vector<double> center;
    std::vector<double> abs_coef;

    void resize(int T_, int R_);
    void set(int t, int rank, const CostFunction& f);
    CostFunction at(int t, int rank) const;
    double value(int t, int rank, double x) const;
    bool pure_quadratic() const;
    std::span<const double> quad_row(int t) const;
    std::span<const double> center_row(int t) const;
    std::span<const double> abs_row(int t) const;
};

// Minimizer of F(x) = sum_t sum_j alpha_j(t) f_t^j(x). Pure quadratic tables
// use the closed form; otherwise golden-section search on [-K1, K1] refined
// by bisection on the derivative, to `tol` on x.
double solve_z_star(const CostTable& costs, const WeightSchedule& schedule, double K1,
                    double tol = 1e-10);
double solve_z_star_closed_form(const CostTable& costs, const WeightSchedule& schedule);
double solve_z_star_numeric(const CostTable& costs, const WeightSchedule& schedule, double K1,
                            double tol = 1e-10);

// Objective value F(x) of the schedule-weighted sum (for optimality checks).
double weighted_objective(const CostTable& costs, const WeightSchedule& schedule, double x);

// Cumulative prefix series Reg^j_{alpha, t}, t = 1..T, for the agent at the
// given regular rank. `states` holds x at rank r and round t in at(t-1, r).
std::vector<double> agent_regret(int rank, const Matrix& states, const CostTable& costs,
                                 const WeightSchedule& schedule, double z_star);

// Cumulative network regret (each agent evaluated at its own state).
std::vector<double> network_regret(const Matrix& states, const CostTable& costs,
                                   const WeightSchedule& schedule, double z_star);

// min over t of #{i : alpha_i(t) >= beta}.
int alpha_quality(const WeightSchedule& schedule, double beta);

// Regret bound constants; the network bound is A1 + A2 u + A3 u^2 with
// u = 1 + ln T, the agent bound uses B1..B3.
struct BoundConstants {
    double A1 = 0.0, A2 = 0.0, A3 = 0.0;
    double B1 = 0.0, B2 = 0.0, B3 = 0.0;
    double network_bound(int T) const;
    double agent_bound(int T) const;
};

BoundConstants theoretical_bounds(double L, double rho, double C1, double C2, double y0_dist);

// Offline least-squares optimum of the sensor experiment:
// x* = (1/T) sum_t (sum_i H_i^2)^-1 (sum_i H_i z_i(t)), either over every
// sensor or restricted to the regular ones.
double offline_optimum(const SensorModel& model, int T, std::span<const int> agents);

}  // namespace rogd
