#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rogd/errors.hpp"
#include "rogd/graph.hpp"

namespace rogd {

enum class AgentRole { regular, adversarial };

// One agent's scalar state at a given time.
struct AgentState {
    int id = 0;
    double value = 0.0;
    AgentRole role = AgentRole::regular;
};

// One directed message. Regular senders transmit their own state to every
// neighbor; Byzantine senders may put anything here, per receiver.
struct Transmission {
    int sender = 0;
    int receiver = 0;
    double value = 0.0;
};

// Result of the sort-and-trim step for one regular agent.
struct FilterOutcome {
    int agent = 0;
    std::vector<int> kept;            // J_i(t), includes the agent, sorted by id
    std::vector<int> removed_top;     // U_i(t), sorted by id
    std::vector<int> removed_bottom;  // L_i(t), sorted by id
};

// The algorithm box removes exactly F values at each end; the W-MSR prose
// variant only removes values strictly beyond the agent's own.
enum class FilterVariant { literal, relative };

struct AdversaryStrategy {
    enum class Kind { constant, uniform_random, conflicting, tracking_offset };
    Kind kind = Kind::uniform_random;
    double constant_value = 0.0;
    double lo = -10.0;
    double hi = 10.0;
    double offset = 0.0;
    std::uint64_t seed = 0;
    double cap = 1e6;  // transmitted magnitudes are clamped to [-cap, cap]
};

using StrategyMap = std::map<int, AdversaryStrategy>;

// Everything observed in one synchronous round t: broadcast values, filter
// outcomes, gradients, the step size, and the states on both sides.
struct RoundRecord {
    int round = 0;
    double eta = 0.0;
    std::vector<Transmission> transmissions;  // sender-major, receivers ascending
    std::vector<FilterOutcome> filters;       // one per regular agent, ascending ids
    std::vector<double> gradients;            // indexed by vertex, 0 for adversaries
    std::vector<double> states_before;        // indexed by vertex
    std::vector<double> states_after;

    // Messages received by `receiver`, as (sender, value), senders ascending.
    std::vector<Transmission> inbox(int receiver) const;
    const FilterOutcome& filter_for(int agent) const;
};

// Sort neighbor transmissions by (value, sender id), drop the extremes, keep
// the middle plus the agent itself. Throws ProtocolViolation when fewer than
// 2F+1 transmissions arrive.
FilterOutcome trim_filter(int agent, double own_value, std::span<const Transmission> inbox,
                          int F, FilterVariant variant = FilterVariant::literal);

// Average of the kept values minus eta * gradient. `value_of` maps a kept
// vertex id (the agent itself included) to the value that was received.
template <class ValueFn>
double regular_update(const FilterOutcome& outcome, ValueFn&& value_of, double gradient,
                      double eta) {
    if (!std::isfinite(gradient)) throw NumericError("regular_update: non-finite gradient");
    if (eta < 0.0) throw std::invalid_argument("regular_update: eta must be >= 0");
    double sum = 0.0;
    for (int v : outcome.kept) sum += value_of(v);
    return sum / static_cast<double>(outcome.kept.size()) - eta * gradient;
}

// One value per neighbor, deterministic in (strategy seed, round, receiver).
std::vector<Transmission> adversary_transmissions(const AdversaryStrategy& strategy, int sender,
                                                  std::span<const int> neighbors, int round,
                                                  std::span<const double> states,
                                                  const AdversaryPlacement& placement);

// Execute one synchronous round of the update law for every regular agent.
// `gradients` is indexed by vertex (entries for adversaries are ignored).
// States of adversarial vertices are carried through unchanged.
RoundRecord run_round(const Graph& g, const AdversaryPlacement& placement,
                      std::span<const double> states, const StrategyMap& strategies,
                      std::span<const double> gradients, double eta, int round,
                      FilterVariant variant = FilterVariant::literal);

// Fill filters and states_after of a record whose round, eta, states_before,
// gradients, and transmissions are already populated (replay/analysis path).
void complete_round(const Graph& g, const AdversaryPlacement& placement, RoundRecord& record,
                    FilterVariant variant = FilterVariant::literal);

// Recompute states_after from a record's transmissions/gradients/eta. Used by
// replay-style verification; bit-identical to the original run.
std::vector<double> replay_round(const Graph& g, const AdversaryPlacement& placement,
                                 const RoundRecord& record,
                                 FilterVariant variant = FilterVariant::literal);

}  // namespace rogd
