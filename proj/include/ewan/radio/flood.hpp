#pragma once

#include <span>
#include <vector>

#include "ewan/radio/radio.hpp"
#include "ewan/sim/random.hpp"
#include "ewan/sim/time.hpp"

namespace ewan::radio {

/// Synchronous-transmission flood parameters.
struct FloodShape {
    int hops = 6;
    int retransmissions = 2;
    sim::Duration guard = sim::Duration{500};

    int sub_slots() const { return hops + retransmissions; }
};

struct FloodInitiator {
    int node = 0;
    int packet = 0;
};

struct FloodNodeResult {
    bool participant = false;
    /// Packet held at the end of the flood; -1 when nothing was received.
    int packet = -1;
    /// 0 for initiators, 1-based sub-slot of first reception otherwise, -1 if none.
    int first_reception_slot = -1;
    int tx_count = 0;
    int listen_slots = 0;
    sim::Duration listen_time{0};
    sim::Duration tx_time{0};
    sim::Duration radio_on_time{0};

    bool received() const { return packet >= 0; }
};

struct FloodResult {
    sim::Duration sub_slot{0};
    sim::Duration duration{0};
    std::vector<FloodNodeResult> nodes;
};

/// Duration of one flood with the given payload.
sim::Duration flood_duration(const RadioConfig& config, int payload_bytes, const FloodShape& shape);

/// Runs one flood. In sub-slot k (1-based) every participant holding a
/// packet that it first obtained in a sub-slot below `hops` and that has
/// transmitted fewer than retransmissions + 1 times transmits; every other
/// participant without a packet listens. Initiators may carry distinct
/// packets (contention); identical packets combine constructively.
FloodResult simulate_flood(std::span<const FloodInitiator> initiators, const std::vector<bool>& participants,
                           const LinkMatrix& links, const RadioConfig& config, const FloodShape& shape,
                           int payload_bytes, const ReceptionModel& model, sim::RandomStream& stream);

/// Single-initiator convenience overload.
FloodResult simulate_flood(int initiator, int payload_bytes, const std::vector<bool>& participants,
                           const LinkMatrix& links, const RadioConfig& config, const FloodShape& shape,
                           const ReceptionModel& model, sim::RandomStream& stream);

}  // namespace ewan::radio
