#include "ewan/protocol/state.hpp"

#include <algorithm>

namespace ewan::protocol {

std::string to_string(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::ewan: return "ewan";
        case ProtocolKind::single_hop: return "single_hop";
        case ProtocolKind::multi_hop: return "multi_hop";
        case ProtocolKind::drb: return "drb";
    }
    return "?";
}

ProtocolKind parse_protocol(const std::string& s) {
    if (s == "ewan") return ProtocolKind::ewan;
    if (s == "single_hop") return ProtocolKind::single_hop;
    if (s == "multi_hop") return ProtocolKind::multi_hop;
    if (s == "drb") return ProtocolKind::drb;
    throw std::invalid_argument("unknown protocol '" + s + "' (expected ewan, single_hop, multi_hop or drb)");
}

void ProtocolParams::validate() const {
    if (period <= Duration::zero()) throw std::invalid_argument("period T must be positive");
    if (delta <= Duration::zero() || delta >= period) throw std::invalid_argument("delta T must lie in (0, T)");
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (max_slots_mh < 0 || max_slots_sh < 0) throw std::invalid_argument("slot limits must be >= 0");
    if (max_slots_mh > 255 - schedule_header || max_slots_sh > 255 - schedule_header) {
        throw std::invalid_argument("slot limit does not fit a schedule packet");
    }
    if (flood_hops < 1 || flood_retx < 0) throw std::invalid_argument("flood needs hops >= 1 and retx >= 0");
    if (sh_retx_node < 0 || sh_retx_host < 0) throw std::invalid_argument("retransmission counts must be >= 0");
    if (data_payload < 0 || data_payload > 255) throw std::invalid_argument("data payload must be 0..255 bytes");
    if (backoff_window < Duration::zero()) throw std::invalid_argument("backoff window must be >= 0");
    if (contention_backoff_exp < 0 || contention_backoff_exp > 16) {
        throw std::invalid_argument("contention back-off exponent must be 0..16");
    }
    if (flood_guard < Duration::zero() || slot_gap < Duration::zero() || turnaround < Duration::zero()) {
        throw std::invalid_argument("guard, gap and turnaround must be >= 0");
    }
    if (large_capacity <= 0.0 || baseline_start_threshold <= 0.0 || baseline_start_threshold >= large_capacity) {
        throw std::invalid_argument("baseline threshold must lie in (0, large capacity)");
    }
}

energy::EnergyParams effective_energy(ProtocolKind kind, const ProtocolParams& pp, energy::EnergyParams base) {
    if (kind == ProtocolKind::drb || kind == ProtocolKind::multi_hop) {
        // Keep the nominal voltage and scale the capacitance with the capacity.
        base.capacitance *= pp.large_capacity / base.capacity;
        base.capacity = std::max(base.capacity, pp.large_capacity);
    }
    if (kind == ProtocolKind::multi_hop) base.start_threshold = pp.baseline_start_threshold;
    if (base.initial_energy > base.capacity) base.initial_energy = base.capacity;
    return base;
}

std::string to_string(Vsn v) {
    switch (v) {
        case Vsn::off: return "off";
        case Vsn::charging: return "charging";
        case Vsn::bootstrapping: return "bootstrapping";
        case Vsn::multi_hop: return "multi_hop";
        case Vsn::single_hop: return "single_hop";
    }
    return "?";
}

std::string to_string(BootPhase b) {
    switch (b) {
        case BootPhase::none: return "none";
        case BootPhase::sync: return "sync";
        case BootPhase::await_mh: return "await_mh";
        case BootPhase::await_sh: return "await_sh";
        case BootPhase::listen: return "listen";
    }
    return "?";
}

std::string to_string(NodeEvent e) {
    switch (e) {
        case NodeEvent::powered_up: return "powered_up";
        case NodeEvent::energy_start: return "energy_start";
        case NodeEvent::energy_depleted: return "energy_depleted";
        case NodeEvent::shutdown: return "shutdown";
        case NodeEvent::sync_response: return "sync_response";
        case NodeEvent::sync_failed: return "sync_failed";
        case NodeEvent::received_mh_schedule: return "received_mh_schedule";
        case NodeEvent::received_sh_schedule: return "received_sh_schedule";
        case NodeEvent::missed_schedule: return "missed_schedule";
        case NodeEvent::sampled_mh_success: return "sampled_mh_success";
        case NodeEvent::sampled_mh_failure: return "sampled_mh_failure";
    }
    return "?";
}

namespace {

[[noreturn]] void illegal(const NodeState& s, NodeEvent e, ProtocolKind kind) {
    throw TransitionError("illegal transition: " + to_string(kind) + " node in " + to_string(s.vsn) + "/" +
                          to_string(s.phase) + " got " + to_string(e));
}

NodeState enter(Vsn v, BootPhase phase = BootPhase::none) {
    NodeState n;
    n.vsn = v;
    n.phase = phase;
    return n;
}

NodeState member(Vsn v, const NodeState& from) {
    NodeState n = enter(v);
    n.demand = from.demand;
    n.next_mh_round = from.next_mh_round;
    n.next_sh_round = from.next_sh_round;
    return n;
}

NodeState bootstrap(const NodeState& from, BootPhase phase) {
    NodeState n = enter(Vsn::bootstrapping, phase);
    n.demand = from.demand;
    if (phase == BootPhase::await_sh) n.next_sh_round = from.next_sh_round;
    return n;
}

BootPhase first_boot_phase(ProtocolKind kind) {
    return kind == ProtocolKind::multi_hop ? BootPhase::listen : BootPhase::sync;
}

}  // namespace

NodeState node_transition(const NodeState& s, NodeEvent e, const ProtocolParams& params, ProtocolKind kind) {
    if (e == NodeEvent::energy_depleted || e == NodeEvent::shutdown) {
        if (s.vsn == Vsn::off) illegal(s, e, kind);
        NodeState n = enter(Vsn::off);
        n.demand = s.demand;
        return n;
    }

    switch (s.vsn) {
        case Vsn::off:
            if (e == NodeEvent::powered_up) {
                NodeState n = enter(Vsn::charging);
                n.demand = s.demand;
                return n;
            }
            break;

        case Vsn::charging:
            if (e == NodeEvent::energy_start) return bootstrap(s, first_boot_phase(kind));
            break;

        case Vsn::bootstrapping:
            switch (s.phase) {
                case BootPhase::sync:
                    if (e == NodeEvent::sync_failed) return s;
                    if (e == NodeEvent::sync_response) {
                        return bootstrap(s, kind == ProtocolKind::single_hop ? BootPhase::await_sh
                                                                             : BootPhase::await_mh);
                    }
                    break;
                case BootPhase::await_mh:
                    if (e == NodeEvent::received_mh_schedule) return member(Vsn::multi_hop, s);
                    if (e == NodeEvent::missed_schedule) {
                        return bootstrap(s, kind == ProtocolKind::ewan ? BootPhase::await_sh : BootPhase::sync);
                    }
                    break;
                case BootPhase::await_sh:
                    if (e == NodeEvent::received_sh_schedule) return member(Vsn::single_hop, s);
                    if (e == NodeEvent::missed_schedule) return bootstrap(s, BootPhase::sync);
                    break;
                case BootPhase::listen:
                    if (e == NodeEvent::received_mh_schedule) return member(Vsn::multi_hop, s);
                    if (e == NodeEvent::missed_schedule) return s;
                    break;
                case BootPhase::none:
                    break;
            }
            break;

        case Vsn::multi_hop:
            if (!has_multi_hop(kind)) break;
            if (e == NodeEvent::received_mh_schedule) {
                NodeState n = s;
                n.missed_schedules = 0;
                return n;
            }
            if (e == NodeEvent::missed_schedule) {
                NodeState n = s;
                n.missed_schedules += 1;
                if (n.missed_schedules < params.p) return n;
                switch (kind) {
                    case ProtocolKind::ewan: return bootstrap(s, BootPhase::await_sh);
                    case ProtocolKind::drb: return bootstrap(s, BootPhase::sync);
                    case ProtocolKind::multi_hop: return bootstrap(s, BootPhase::listen);
                    case ProtocolKind::single_hop: break;
                }
            }
            break;

        case Vsn::single_hop:
            if (!has_single_hop(kind)) break;
            if (e == NodeEvent::received_sh_schedule) {
                NodeState n = s;
                n.missed_schedules = 0;
                return n;
            }
            if (e == NodeEvent::missed_schedule) {
                NodeState n = s;
                n.missed_schedules += 1;
                if (n.missed_schedules < params.p) return n;
                return bootstrap(s, BootPhase::sync);
            }
            if (kind == ProtocolKind::ewan) {
                if (e == NodeEvent::sampled_mh_success) return member(Vsn::multi_hop, s);
                if (e == NodeEvent::sampled_mh_failure) return s;
            }
            break;
    }
    illegal(s, e, kind);
}

}  // namespace ewan::protocol
