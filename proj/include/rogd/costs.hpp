#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace rogd {

// Scalar cost of the form 0.5*quad*(x-center)^2 + abs_coef*|x-center| + offset
// on the ball |x| <= edge, continued linearly outside it. The linear tails
// keep every subgradient bounded (the model assumes bounded gradients with
// strong convexity only on the ball; a bare quadratic has neither). Covers
// the sensor least-squares cost (quad = H^2, center = z/H) and both synthetic
// stream kinds; rho_local is the curvature quad.
struct CostFunction {
    double quad = 1.0;
    double center = 0.0;
    double abs_coef = 0.0;
    double offset = 0.0;
    double edge = std::numeric_limits<double>::infinity();
    int round = 0;
    int owner = 0;

    // Linearization knots sit at +-edge, pushed out if the center is closer
    // than 1 to them so the minimum always stays in the curved region.
    double knot_hi() const { return std::max(edge, center + 1.0); }
    double knot_lo() const { return std::min(-edge, center - 1.0); }

    double value(double x) const {
        const double xc = std::clamp(x, knot_lo(), knot_hi());
        const double d = xc - center;
        const double base = 0.5 * quad * d * d + abs_coef * std::fabs(d) + offset;
        return base + raw_gradient(xc) * (x - xc);
    }
    // Subgradient; 0 is used at the kink of the |.| term.
    double gradient(double x) const {
        return raw_gradient(std::clamp(x, knot_lo(), knot_hi()));
    }
    double rho_local() const { return quad; }
    double argmin() const { return center; }

  private:
    double raw_gradient(double x) const {
        const double d = x - center;
        const double sgn = static_cast<double>(d > 0.0) - static_cast<double>(d < 0.0);
        return quad * d + abs_coef * sgn;
    }
};

// Linear sensors z_i(t) = H_i * x + v_i(t) with per-agent gains fixed at
// construction and Gaussian per-round noise, all counter-seeded.
struct SensorModel {
    double true_x = 0.0;
    double noise_sigma = 1.0;
    double h_min = 0.1;
    std::uint64_t seed = 0;
    std::vector<double> gains;  // H_i, one per vertex

    // Gains drawn from U(0,2); draws below h_min are redrawn (h_min <= 0
    // disables the floor).
    static SensorModel create(int n, double true_x, double sigma, std::uint64_t seed,
                              double h_min = 0.1);

    int agent_count() const { return static_cast<int>(gains.size()); }
    double measurement(int agent, int round) const;
};

// `edge` is the linearization radius (K1); infinite disables the tails.
CostFunction sensor_cost(const SensorModel& model, int agent, int round,
                         double edge = std::numeric_limits<double>::infinity());

struct StreamConfig {
    enum class Kind { sensor, synthetic_quadratic, synthetic_piecewise };
    Kind kind = Kind::sensor;
    double K1 = 100.0;  // strong convexity ball radius
    double K2 = 10.0;   // minimizer ball radius
    double rho = 1.0;   // curvature floor for synthetic streams
    std::uint64_t seed = 0;
    double rho_floor = 1e-9;  // reject configurations with smaller curvature
};

// Realized (L, rho) for a sensor stream: rho is the smallest regular-agent
// curvature, L bounds gradient magnitudes on B(0, K1) using a 99.9% quantile
// for the noise-inflated measurement.
std::pair<double, double> stream_constants(const StreamConfig& config, const SensorModel& model,
                                           std::span<const int> regulars);

// (L, rho) for synthetic streams, from the emitted coefficient ranges.
std::pair<double, double> stream_constants(const StreamConfig& config);

// eta(0) = 0, eta(t) = 1/(rho*t) for t >= 1.
double step_size(int t, double rho);

// Time-varying quadratic (optionally plus |.|) with minimizer K2*sin(t/10 +
// 0.3*agent); curvature drawn in [rho, 2*rho) per (agent, round).
CostFunction synthetic_stream(const StreamConfig& config, int agent, int round);

}  // namespace rogd
