#include "ewan/protocol/timing.hpp"

namespace ewan::protocol {

MhRoundTiming mh_round_timing(const radio::RadioConfig& config, const radio::FloodShape& shape,
                              const ProtocolParams& params, int slots) {
    MhRoundTiming t;
    t.slots = slots;
    t.gap = params.slot_gap;
    t.schedule = radio::flood_duration(config, params.schedule_header + slots, shape);
    t.data = radio::flood_duration(config, params.data_payload, shape);
    t.contention = radio::flood_duration(config, params.contention_payload, shape);
    return t;
}

ShRoundTiming sh_round_timing(const radio::RadioConfig& config, const ProtocolParams& params, int slots) {
    ShRoundTiming t;
    t.slots = slots;
    t.gap = params.slot_gap;
    t.schedule_toa = radio::time_on_air_us(config, params.schedule_header + slots);
    t.schedule = t.schedule_toa + params.sh_retx_host * (params.turnaround + t.schedule_toa);
    t.data_toa = radio::time_on_air_us(config, params.data_payload);
    t.data = (1 + params.sh_retx_node) * t.data_toa + params.sh_retx_node * params.turnaround + params.turnaround +
             t.data_toa;
    t.contention_toa = radio::time_on_air_us(config, params.contention_payload);
    t.contention = t.contention_toa;
    return t;
}

}  // namespace ewan::protocol
