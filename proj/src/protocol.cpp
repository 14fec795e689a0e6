#include "rogd/protocol.hpp"

#include <algorithm>
#include <stdexcept>

#include "rogd/rng.hpp"

namespace rogd {

std::vector<Transmission> RoundRecord::inbox(int receiver) const {
    std::vector<Transmission> out;
    for (const Transmission& t : transmissions) {
        if (t.receiver == receiver) out.push_back(t);
    }
    return out;
}

const FilterOutcome& RoundRecord::filter_for(int agent) const {
    for (const FilterOutcome& f : filters) {
        if (f.agent == agent) return f;
    }
    throw std::invalid_argument("RoundRecord: no filter outcome for agent " +
                                std::to_string(agent));
}

FilterOutcome trim_filter(int agent, double own_value, std::span<const Transmission> inbox,
                          int F, FilterVariant variant) {
    if (F < 0) throw std::invalid_argument("trim_filter: F must be >= 0");
    const int n = static_cast<int>(inbox.size());
    if (n < 2 * F + 1) {
        throw ProtocolViolation("trim_filter: agent " + std::to_string(agent) + " has " +
                                std::to_string(n) + " neighbors, needs at least " +
                                std::to_string(2 * F + 1));
    }
    std::vector<int> order(inbox.size());
    for (std::size_t i = 0; i < inbox.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& ta = inbox[static_cast<std::size_t>(a)];
        const auto& tb = inbox[static_cast<std::size_t>(b)];
        if (ta.value != tb.value) return ta.value < tb.value;
        return ta.sender < tb.sender;
    });

    FilterOutcome out;
    out.agent = agent;
    int drop_low = F;
    int drop_high = F;
    if (variant == FilterVariant::relative) {
        int below = 0;
        int above = 0;
        for (const Transmission& t : inbox) {
            if (t.value < own_value) ++below;
            if (t.value > own_value) ++above;
        }
        drop_low = std::min(F, below);
        drop_high = std::min(F, above);
    }
    for (int k = 0; k < n; ++k) {
        const int sender = inbox[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])].sender;
        if (k < drop_low) {
            out.removed_bottom.push_back(sender);
        } else if (k >= n - drop_high) {
            out.removed_top.push_back(sender);
        } else {
            out.kept.push_back(sender);
        }
    }
    out.kept.push_back(agent);
    std::sort(out.kept.begin(), out.kept.end());
    std::sort(out.removed_top.begin(), out.removed_top.end());
    std::sort(out.removed_bottom.begin(), out.removed_bottom.end());
    return out;
}

std::vector<Transmission> adversary_transmissions(const AdversaryStrategy& strategy, int sender,
                                                  std::span<const int> neighbors, int round,
                                                  std::span<const double> states,
                                                  const AdversaryPlacement& placement) {
    const RngStream stream(strategy.seed, StreamPurpose::adversary);
    const auto clamp = [&](double v) {
        return std::clamp(v, -strategy.cap, strategy.cap);
    };
    std::vector<Transmission> out;
    out.reserve(neighbors.size());
    switch (strategy.kind) {
        case AdversaryStrategy::Kind::constant: {
            for (int u : neighbors) out.push_back({sender, u, clamp(strategy.constant_value)});
            break;
        }
        case AdversaryStrategy::Kind::uniform_random: {
            const double v = stream.uniform(strategy.lo, strategy.hi,
                                            static_cast<std::uint64_t>(round));
            for (int u : neighbors) out.push_back({sender, u, clamp(v)});
            break;
        }
        case AdversaryStrategy::Kind::conflicting: {
            for (int u : neighbors) {
                const double v = stream.uniform(strategy.lo, strategy.hi,
                                                static_cast<std::uint64_t>(round),
                                                static_cast<std::uint64_t>(u));
                out.push_back({sender, u, clamp(v)});
            }
            break;
        }
        case AdversaryStrategy::Kind::tracking_offset: {
            // Follow the mean of the regular neighborhood it can observe.
            double sum = 0.0;
            int count = 0;
            for (int u : neighbors) {
                if (!placement.is_adversarial(u)) {
                    sum += states[static_cast<std::size_t>(u)];
                    ++count;
                }
            }
            const double base = count > 0 ? sum / count : 0.0;
            for (int u : neighbors) out.push_back({sender, u, clamp(base + strategy.offset)});
            break;
        }
    }
    return out;
}

namespace {

std::vector<double> updated_states(const Graph& g, const AdversaryPlacement& placement,
                                   const RoundRecord& record, FilterVariant variant,
                                   std::vector<FilterOutcome>* filters_out) {
    const int n = g.vertex_count();
    // received[v] holds the value v got from each neighbor, aligned with
    // g.neighbors(v); transmissions are sender-major so scatter them once.
    std::vector<std::vector<Transmission>> inbox(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        inbox[static_cast<std::size_t>(v)].reserve(g.neighbors(v).size());
    }
    for (const Transmission& t : record.transmissions) {
        inbox[static_cast<std::size_t>(t.receiver)].push_back(t);
    }

    std::vector<double> next(record.states_before.begin(), record.states_before.end());
    for (int v = 0; v < n; ++v) {
        if (placement.is_adversarial(v)) continue;
        const double own = record.states_before[static_cast<std::size_t>(v)];
        FilterOutcome outcome =
            trim_filter(v, own, inbox[static_cast<std::size_t>(v)], placement.F, variant);
        // Map kept senders back to the values they transmitted.
        std::map<int, double> value_of;
        for (const Transmission& t : inbox[static_cast<std::size_t>(v)]) {
            value_of[t.sender] = t.value;
        }
        value_of[v] = own;
        next[static_cast<std::size_t>(v)] =
            regular_update(outcome, [&](int id) { return value_of.at(id); },
                           record.gradients[static_cast<std::size_t>(v)], record.eta);
        if (filters_out != nullptr) filters_out->push_back(std::move(outcome));
    }
    return next;
}

}  // namespace

RoundRecord run_round(const Graph& g, const AdversaryPlacement& placement,
                      std::span<const double> states, const StrategyMap& strategies,
                      std::span<const double> gradients, double eta, int round,
                      FilterVariant variant) {
    const int n = g.vertex_count();
    if (static_cast<int>(states.size()) != n || static_cast<int>(gradients.size()) != n) {
        throw std::invalid_argument("run_round: states/gradients must cover every vertex");
    }
    RoundRecord record;
    record.round = round;
    record.eta = eta;
    record.states_before.assign(states.begin(), states.end());
    record.gradients.assign(gradients.begin(), gradients.end());

    for (int v = 0; v < n; ++v) {
        const auto& nbrs = g.neighbors(v);
        if (placement.is_adversarial(v)) {
            const auto it = strategies.find(v);
            if (it == strategies.end()) {
                throw std::invalid_argument("run_round: adversary " + std::to_string(v) +
                                            " has no strategy");
            }
            auto sent = adversary_transmissions(it->second, v, nbrs, round, states, placement);
            record.transmissions.insert(record.transmissions.end(), sent.begin(), sent.end());
        } else {
            const double value = states[static_cast<std::size_t>(v)];
            for (int u : nbrs) record.transmissions.push_back({v, u, value});
        }
    }
    complete_round(g, placement, record, variant);
    return record;
}

void complete_round(const Graph& g, const AdversaryPlacement& placement, RoundRecord& record,
                    FilterVariant variant) {
    record.filters.clear();
    record.states_after = updated_states(g, placement, record, variant, &record.filters);
}

std::vector<double> replay_round(const Graph& g, const AdversaryPlacement& placement,
                                 const RoundRecord& record, FilterVariant variant) {
    return updated_states(g, placement, record, variant, nullptr);
}

}  // namespace rogd
