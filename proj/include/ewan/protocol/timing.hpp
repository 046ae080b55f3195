#pragma once

#include "ewan/protocol/params.hpp"
#include "ewan/radio/flood.hpp"
#include "ewan/radio/radio.hpp"

namespace ewan::protocol {

/// Slot lengths of a multi-hop round with n data slots.
struct MhRoundTiming {
    Duration schedule{0};
    Duration data{0};
    Duration contention{0};
    Duration gap{0};
    int slots = 0;

    Duration total() const { return schedule + gap + slots * (data + gap) + contention + gap + schedule; }
};

/// Slot lengths of a single-hop round with n data slots. The schedule slot
/// holds the host transmission plus its retransmissions; a data slot holds
/// the node's transmission(s), a turnaround and the host repeat.
struct ShRoundTiming {
    Duration schedule_toa{0};
    Duration schedule{0};
    Duration data_toa{0};
    Duration data{0};
    Duration contention_toa{0};
    Duration contention{0};
    Duration gap{0};
    int slots = 0;

    Duration total() const { return schedule + gap + slots * (data + gap) + contention + gap + schedule; }
};

MhRoundTiming mh_round_timing(const radio::RadioConfig& config, const radio::FloodShape& shape,
                              const ProtocolParams& params, int slots);
ShRoundTiming sh_round_timing(const radio::RadioConfig& config, const ProtocolParams& params, int slots);

}  // namespace ewan::protocol
