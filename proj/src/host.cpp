#include "ewan/protocol/host.hpp"

#include <algorithm>

namespace ewan::protocol {

bool Schedule::assigned(int node) const {
    return std::any_of(slots.begin(), slots.end(), [&](const SlotAssignment& a) { return a.node == node; });
}

int Schedule::payload_bytes(const ProtocolParams& params) const {
    return params.schedule_header + static_cast<int>(slots.size());
}

bool HostBook::has(int node) const {
    return std::any_of(assigned.begin(), assigned.end(), [&](const Entry& e) { return e.node == node; });
}

Time RoundTiming::next_mh_after(Time t) const {
    const auto k = t < Time::zero() ? 0 : t / period + 1;
    return k * period;
}

Time RoundTiming::next_sh_after(Time t) const {
    if (t < delta) return delta;
    const auto k = (t - delta) / period + 1;
    return k * period + delta;
}

std::optional<SyncResponse> host_handle_sync_request(Time now, const RoundTiming& timing, bool host_busy,
                                                     ProtocolKind kind) {
    if (host_busy) return std::nullopt;
    if (kind == ProtocolKind::single_hop) {
        const Duration tau = timing.next_sh_after(now) - now;
        return SyncResponse{tau, tau};
    }
    const Time t1 = timing.next_mh_after(now);
    return SyncResponse{t1 - now, t1 + timing.delta - now};
}

Schedule host_build_schedule(HostBook& book, const std::vector<int>& new_demands, const ProtocolParams& params,
                             Vsn vsn, std::int64_t round_index, Time round_start, Time other_vsn_next_round) {
    if (vsn != Vsn::multi_hop && vsn != Vsn::single_hop) {
        throw std::invalid_argument("host_build_schedule: schedules exist only for the multi-hop and single-hop VSN");
    }
    for (int node : new_demands) {
        if (book.has(node)) continue;
        if (std::find(book.pending.begin(), book.pending.end(), node) != book.pending.end()) continue;
        book.pending.push_back(node);
    }
    const auto limit = static_cast<std::size_t>(vsn == Vsn::multi_hop ? params.max_slots_mh : params.max_slots_sh);
    while (book.assigned.size() < limit && !book.pending.empty()) {
        book.assigned.push_back({book.pending.front(), 0});
        book.pending.pop_front();
    }

    Schedule s;
    s.vsn = vsn;
    s.round_index = round_index;
    s.round_start = round_start;
    s.other_vsn_next_round = other_vsn_next_round;
    s.sample_multi_hop = vsn == Vsn::single_hop && round_index % params.m == 0;
    for (std::size_t i = 0; i < book.assigned.size(); ++i) {
        s.slots.push_back({static_cast<int>(i), book.assigned[i].node});
    }
    return s;
}

std::vector<int> host_record_round(HostBook& book, const std::vector<int>& delivered_from,
                                   const ProtocolParams& params) {
    std::vector<int> dropped;
    std::vector<HostBook::Entry> kept;
    kept.reserve(book.assigned.size());
    for (auto e : book.assigned) {
        const bool got = std::find(delivered_from.begin(), delivered_from.end(), e.node) != delivered_from.end();
        e.dataless_rounds = got ? 0 : e.dataless_rounds + 1;
        if (e.dataless_rounds >= params.p) {
            dropped.push_back(e.node);
        } else {
            kept.push_back(e);
        }
    }
    book.assigned = std::move(kept);
    return dropped;
}

}  // namespace ewan::protocol
