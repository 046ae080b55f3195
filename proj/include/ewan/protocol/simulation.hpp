#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ewan/energy/energy.hpp"
#include "ewan/protocol/host.hpp"
#include "ewan/protocol/params.hpp"
#include "ewan/protocol/state.hpp"
#include "ewan/radio/radio.hpp"
#include "ewan/scenario/scenario.hpp"

namespace ewan::protocol {

/// Node `node` is held off during [from, to).
struct ForcedOff {
    int node = 0;
    Time from{0};
    Time to{0};
};

/// Replaces the short-range path-loss matrix at `at`.
struct LinkChange {
    Time at{0};
    radio::LinkMatrix links_short;
};

struct SimOptions {
    std::vector<ForcedOff> forced_off;
    std::vector<LinkChange> link_changes;
    /// Gives every node effectively infinite storage, full from t = 0.
    bool unlimited_energy = false;
};

using CategoryEnergy = std::array<double, energy::kCategoryCount>;

struct RoundNodeRecord {
    int node = 0;
    bool received_schedule = false;
    /// Received the first schedule and was still powered after it.
    bool participated = false;
    int attempted = 0;
    int delivered = 0;
    bool contended = false;
    CategoryEnergy energy{};
};

struct RoundRecord {
    Vsn vsn = Vsn::multi_hop;
    std::int64_t index = 0;
    Time start{0};
    Duration duration{0};
    int slots = 0;
    bool sample_flag = false;
    std::vector<RoundNodeRecord> nodes;
    std::vector<int> dropped;
};

struct TransitionRecord {
    Time time{0};
    int node = 0;
    Vsn from = Vsn::off;
    BootPhase from_phase = BootPhase::none;
    Vsn to = Vsn::off;
    BootPhase to_phase = BootPhase::none;
    NodeEvent cause = NodeEvent::powered_up;
};

struct Delivery {
    Time time{0};
    int node = 0;
    Vsn vsn = Vsn::multi_hop;
    std::int64_t round = 0;
};

struct SyncAttempt {
    Time start{0};
    int node = 0;
    bool answered = false;
};

struct ActiveInterval {
    Time start{0};
    Time end{0};
};

struct NodeSummary {
    energy::EnergyLedger ledger;
    double e_cap_start = 0.0;
    double e_cap_end = 0.0;
    double capacity = 0.0;
    std::vector<ActiveInterval> active;
};

struct RunLog {
    ProtocolKind protocol = ProtocolKind::ewan;
    std::uint64_t seed = 0;
    Time horizon{0};
    Duration period{0};
    int n_nodes = 0;
    std::vector<RoundRecord> rounds;
    std::vector<TransitionRecord> transitions;
    std::vector<Delivery> deliveries;
    std::vector<SyncAttempt> syncs;
    /// Index 0 is the host and stays empty.
    std::vector<NodeSummary> nodes;

    /// Line-oriented rendering used for determinism checks.
    std::string events_text() const;
};

/// Runs one protocol over a scenario. Deterministic in (scenario, kind, seed).
RunLog simulate(const scenario::Scenario& scenario, ProtocolKind kind, std::uint64_t seed,
                const SimOptions& options = {});

}  // namespace ewan::protocol
