#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "ewan/protocol/params.hpp"

namespace ewan::protocol {

enum class Vsn : std::uint8_t { off, charging, bootstrapping, multi_hop, single_hop };

/// Sub-state of a bootstrapping node.
enum class BootPhase : std::uint8_t {
    none,
    sync,      ///< exchanging (or about to retry) a sync request
    await_mh,  ///< synced, waiting for the multi-hop schedule slot
    await_sh,  ///< waiting for the single-hop schedule slot
    listen,    ///< idle listening on the multi-hop channel (no sync exchange)
};

enum class NodeEvent : std::uint8_t {
    powered_up,
    energy_start,
    energy_depleted,
    shutdown,
    sync_response,
    sync_failed,
    received_mh_schedule,
    received_sh_schedule,
    missed_schedule,
    sampled_mh_success,
    sampled_mh_failure,
};

std::string to_string(Vsn v);
std::string to_string(BootPhase b);
std::string to_string(NodeEvent e);

struct NodeState {
    Vsn vsn = Vsn::off;
    BootPhase phase = BootPhase::none;
    int missed_schedules = 0;
    /// Start times of the rounds the node is synchronised to.
    std::optional<Time> next_mh_round;
    std::optional<Time> next_sh_round;
    bool has_slot = false;
    int demand = 1;

    bool powered() const { return vsn != Vsn::off && vsn != Vsn::charging; }
    bool operator==(const NodeState&) const = default;
};

/// Raised for event/state pairs the protocol never produces.
class TransitionError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Pure state machine of one node for the given protocol.
NodeState node_transition(const NodeState& s, NodeEvent e, const ProtocolParams& params,
                          ProtocolKind kind = ProtocolKind::ewan);

}  // namespace ewan::protocol
