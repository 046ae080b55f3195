#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "ewan/protocol/params.hpp"
#include "ewan/protocol/state.hpp"

namespace ewan::protocol {

struct SlotAssignment {
    int slot = 0;
    int node = 0;
    bool operator==(const SlotAssignment&) const = default;
};

struct Schedule {
    Vsn vsn = Vsn::multi_hop;
    std::int64_t round_index = 0;
    Time round_start{0};
    std::vector<SlotAssignment> slots;
    bool contention_slot = true;
    /// Start of the other VSN's next round (cross-VSN timing).
    Time other_vsn_next_round{0};
    /// Single-hop schedules only: members listen to the next multi-hop round.
    bool sample_multi_hop = false;
    /// Nodes whose slot the host removed in this round (second schedule).
    std::vector<int> dropped;

    bool assigned(int node) const;
    int payload_bytes(const ProtocolParams& params) const;
};

/// Host bookkeeping of one VSN.
struct HostBook {
    struct Entry {
        int node = 0;
        int dataless_rounds = 0;
        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> assigned;
    /// Demands heard in contention slots, waiting for a free slot.
    std::deque<int> pending;

    bool has(int node) const;
};

/// Round timing the host plans with. Multi-hop rounds start at k*T and
/// single-hop rounds at k*T + delta_t.
struct RoundTiming {
    Duration period{sim::seconds(300)};
    Duration delta{sim::seconds(5)};
    bool multi_hop = true;
    bool single_hop = true;

    Time next_mh_after(Time t) const;  ///< first multi-hop start strictly after t
    Time next_sh_after(Time t) const;  ///< first single-hop start strictly after t
    std::int64_t mh_index(Time start) const { return start / period; }
    std::int64_t sh_index(Time start) const { return (start - delta) / period; }
};

/// Offsets relative to the request, both strictly positive.
struct SyncResponse {
    Duration tau1{0};  ///< until the next multi-hop round (single-hop baseline: next round)
    Duration tau2{0};  ///< until the single-hop round that follows it
};

/// Host side of the bootstrap exchange. Returns nothing while the host is
/// busy with a round. For the single-hop baseline tau1 == tau2 is the next
/// single-hop round.
std::optional<SyncResponse> host_handle_sync_request(Time now, const RoundTiming& timing, bool host_busy,
                                                     ProtocolKind kind = ProtocolKind::ewan);

/// Appends new demands in arrival order (deduplicated, deferred past the slot
/// limit) and emits the schedule of the given round.
Schedule host_build_schedule(HostBook& book, const std::vector<int>& new_demands, const ProtocolParams& params,
                             Vsn vsn, std::int64_t round_index, Time round_start, Time other_vsn_next_round);

/// Updates dataless counters after a round's data slots and drops nodes that
/// stayed silent for p rounds. Returns the dropped nodes.
std::vector<int> host_record_round(HostBook& book, const std::vector<int>& delivered_from,
                                   const ProtocolParams& params);

}  // namespace ewan::protocol
