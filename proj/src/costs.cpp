#include "rogd/costs.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "rogd/errors.hpp"
#include "rogd/rng.hpp"

namespace rogd {

namespace {

// Phi^-1(0.999), for the noise-inflated measurement bound.
constexpr double kNoiseQuantile999 = 3.090232306167813;

}  // namespace

SensorModel SensorModel::create(int n, double true_x, double sigma, std::uint64_t seed,
                                double h_min) {
    if (n < 1) throw std::invalid_argument("SensorModel: need at least one agent");
    if (sigma < 0.0) throw std::invalid_argument("SensorModel: sigma must be >= 0");
    if (h_min >= 2.0) throw std::invalid_argument("SensorModel: h_min must be below 2");
    SensorModel m;
    m.true_x = true_x;
    m.noise_sigma = sigma;
    m.h_min = h_min;
    m.seed = seed;
    m.gains.resize(static_cast<std::size_t>(n));
    const RngStream stream(seed, StreamPurpose::sensor_gains);
    for (int i = 0; i < n; ++i) {
        double h = 0.0;
        for (std::uint64_t attempt = 0;; ++attempt) {
            h = stream.uniform(0.0, 2.0, static_cast<std::uint64_t>(i), attempt);
            if (h >= h_min && h > 0.0) break;
        }
        m.gains[static_cast<std::size_t>(i)] = h;
    }
    return m;
}

double SensorModel::measurement(int agent, int round) const {
    const RngStream stream(seed, StreamPurpose::noise);
    const double v = noise_sigma * stream.gaussian(static_cast<std::uint64_t>(agent),
                                                   static_cast<std::uint64_t>(round));
    return gains[static_cast<std::size_t>(agent)] * true_x + v;
}

CostFunction sensor_cost(const SensorModel& model, int agent, int round, double edge) {
    const double h = model.gains[static_cast<std::size_t>(agent)];
    const double z = model.measurement(agent, round);
    CostFunction f;
    f.quad = h * h;       // 0.5*(z - H x)^2 = 0.5*H^2*(x - z/H)^2
    f.center = z / h;
    f.edge = edge;
    f.round = round;
    f.owner = agent;
    return f;
}

std::pair<double, double> stream_constants(const StreamConfig& config, const SensorModel& model,
                                           std::span<const int> regulars) {
    if (regulars.empty()) throw std::invalid_argument("stream_constants: no regular agents");
    double rho = std::numeric_limits<double>::infinity();
    for (int v : regulars) {
        const double h = model.gains[static_cast<std::size_t>(v)];
        rho = std::min(rho, h * h);
    }
    if (rho < config.rho_floor) {
        throw ConfigError("stream_constants: realized rho " + std::to_string(rho) +
                          " is below the configured floor");
    }
    double lipschitz = 0.0;
    for (int i = 0; i < model.agent_count(); ++i) {
        const double h = model.gains[static_cast<std::size_t>(i)];
        const double z_bound =
            std::fabs(h * model.true_x) + kNoiseQuantile999 * model.noise_sigma;
        lipschitz = std::max(lipschitz, h * (h * config.K1 + z_bound));
    }
    return {lipschitz, rho};
}

std::pair<double, double> stream_constants(const StreamConfig& config) {
    const double b = config.kind == StreamConfig::Kind::synthetic_piecewise
                         ? 0.1 * config.rho * config.K2
                         : 0.0;
    const double lipschitz = 2.0 * config.rho * (config.K1 + config.K2) + b;
    return {lipschitz, config.rho};
}

double step_size(int t, double rho) {
    if (rho <= 0.0) throw std::invalid_argument("step_size: rho must be positive");
    if (t < 0) throw std::invalid_argument("step_size: t must be >= 0");
    if (t == 0) return 0.0;
    return 1.0 / (rho * static_cast<double>(t));
}

CostFunction synthetic_stream(const StreamConfig& config, int agent, int round) {
    if (config.rho <= 0.0) throw std::invalid_argument("synthetic_stream: rho must be positive");
    const RngStream stream(config.seed, StreamPurpose::noise);
    CostFunction f;
    f.quad = config.rho * (1.0 + stream.uniform01(static_cast<std::uint64_t>(agent),
                                                  static_cast<std::uint64_t>(round)));
    f.center = config.K2 * std::sin(static_cast<double>(round) / 10.0 + 0.3 * agent);
    f.edge = config.K1;
    if (config.kind == StreamConfig::Kind::synthetic_piecewise) {
        f.abs_coef = 0.1 * config.rho * config.K2;
    }
    f.round = round;
    f.owner = agent;
    return f;
}

}  // namespace rogd
