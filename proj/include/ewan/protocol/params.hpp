#pragma once

#include <string>

#include "ewan/energy/energy.hpp"
#include "ewan/sim/time.hpp"

namespace ewan::protocol {

using sim::Duration;
using sim::Time;

enum class ProtocolKind { ewan, single_hop, multi_hop, drb };

std::string to_string(ProtocolKind k);
ProtocolKind parse_protocol(const std::string& s);

inline bool has_multi_hop(ProtocolKind k) { return k != ProtocolKind::single_hop; }
inline bool has_single_hop(ProtocolKind k) { return k == ProtocolKind::ewan || k == ProtocolKind::single_hop; }
inline bool uses_sync(ProtocolKind k) { return k != ProtocolKind::multi_hop; }

struct ProtocolParams {
    Duration period = sim::seconds(300);
    Duration delta = sim::seconds(5);
    int p = 2;
    int m = 2;
    int max_slots_mh = 15;
    int max_slots_sh = 15;
    int flood_hops = 6;
    int flood_retx = 2;
    int sh_retx_node = 0;
    int sh_retx_host = 1;
    /// Single-hop members receive every data slot (node packet and host repeat).
    bool sh_listen_data = true;
    int data_payload = 20;
    Duration backoff_window = sim::seconds(60);
    /// Contention back-off: after the k-th unanswered request a node skips
    /// a uniform number of rounds in [0, 2^min(k, this) - 1].
    int contention_backoff_exp = 3;

    // Plumbing sizes and gaps.
    Duration flood_guard{500};
    Duration slot_gap{1000};
    Duration turnaround{1000};
    /// Idle time a node spends awake ahead of each round it takes part in.
    Duration round_wake{2000000};
    int schedule_header = 16;
    int contention_payload = 4;
    int sync_payload = 8;

    // Storage overrides for protocols that bootstrap expensively.
    double large_capacity = 6.0;
    double baseline_start_threshold = 5.0;

    /// Throws std::invalid_argument on inconsistent values.
    void validate() const;
};

/// Energy parameters a protocol actually runs with: DRB and the multi-hop
/// baseline use the large storage; the multi-hop baseline also starts late.
energy::EnergyParams effective_energy(ProtocolKind kind, const ProtocolParams& pp, energy::EnergyParams base);

}  // namespace ewan::protocol
