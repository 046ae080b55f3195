#include "ewan/radio/flood.hpp"

#include <stdexcept>

namespace ewan::radio {

sim::Duration flood_duration(const RadioConfig& config, int payload_bytes, const FloodShape& shape) {
    return shape.sub_slots() * (time_on_air_us(config, payload_bytes) + shape.guard);
}

FloodResult simulate_flood(std::span<const FloodInitiator> initiators, const std::vector<bool>& participants,
                           const LinkMatrix& links, const RadioConfig& config, const FloodShape& shape,
                           int payload_bytes, const ReceptionModel& model, sim::RandomStream& stream) {
    const int n = links.size();
    if (static_cast<int>(participants.size()) != n) {
        throw std::invalid_argument("simulate_flood: participant mask size mismatch");
    }
    if (shape.hops < 1 || shape.retransmissions < 0) {
        throw std::invalid_argument("simulate_flood: need hops >= 1 and retransmissions >= 0");
    }

    ReceptionModel rx_model = model;
    rx_model.sensitivity_dbm = config.sensitivity_dbm;
    const sim::Duration toa = time_on_air_us(config, payload_bytes);
    const sim::Duration slot = toa + shape.guard;
    const int slots = shape.sub_slots();
    const int max_tx = shape.retransmissions + 1;

    FloodResult result;
    result.sub_slot = slot;
    result.duration = slots * slot;
    result.nodes.resize(static_cast<std::size_t>(n));
    auto& nodes = result.nodes;
    for (int i = 0; i < n; ++i) nodes[static_cast<std::size_t>(i)].participant = participants[static_cast<std::size_t>(i)];

    for (const auto& init : initiators) {
        auto& r = nodes.at(static_cast<std::size_t>(init.node));
        if (!r.participant) throw std::invalid_argument("simulate_flood: initiator is not a participant");
        r.packet = init.packet;
        r.first_reception_slot = 0;
    }

    // Listener state is only updated after the whole sub-slot is resolved.
    std::vector<int> received_now(static_cast<std::size_t>(n), -1);
    std::vector<bool> transmitting(static_cast<std::size_t>(n), false);
    std::vector<HeardTransmission> heard;
    heard.reserve(static_cast<std::size_t>(n));

    for (int k = 1; k <= slots; ++k) {
        for (int i = 0; i < n; ++i) {
            const auto& r = nodes[static_cast<std::size_t>(i)];
            transmitting[static_cast<std::size_t>(i)] =
                r.participant && r.received() && r.first_reception_slot < shape.hops && r.tx_count < max_tx;
        }
        for (int j = 0; j < n; ++j) {
            auto& listener = nodes[static_cast<std::size_t>(j)];
            received_now[static_cast<std::size_t>(j)] = -1;
            if (!listener.participant || listener.received()) continue;
            heard.clear();
            for (int i = 0; i < n; ++i) {
                if (!transmitting[static_cast<std::size_t>(i)]) continue;
                if (!links.in_range(i, j, config.tx_power_dbm, config.sensitivity_dbm)) continue;
                heard.push_back({nodes[static_cast<std::size_t>(i)].packet,
                                 received_power(config.tx_power_dbm, links.loss(i, j))});
            }
            listener.listen_slots += 1;
            if (heard.empty()) continue;
            if (auto got = resolve_concurrent(heard, rx_model, stream)) received_now[static_cast<std::size_t>(j)] = *got;
        }
        for (int i = 0; i < n; ++i) {
            auto& r = nodes[static_cast<std::size_t>(i)];
            if (transmitting[static_cast<std::size_t>(i)]) r.tx_count += 1;
            if (received_now[static_cast<std::size_t>(i)] >= 0) {
                r.packet = received_now[static_cast<std::size_t>(i)];
                r.first_reception_slot = k;
            }
        }
    }

    for (auto& r : nodes) {
        r.listen_time = r.listen_slots * slot;
        r.tx_time = r.tx_count * toa;
        r.radio_on_time = (r.listen_slots + r.tx_count) * slot;
    }
    return result;
}

FloodResult simulate_flood(int initiator, int payload_bytes, const std::vector<bool>& participants,
                           const LinkMatrix& links, const RadioConfig& config, const FloodShape& shape,
                           const ReceptionModel& model, sim::RandomStream& stream) {
    const FloodInitiator init{initiator, 0};
    return simulate_flood(std::span<const FloodInitiator>(&init, 1), participants, links, config, shape,
                          payload_bytes, model, stream);
}

}  // namespace ewan::radio
