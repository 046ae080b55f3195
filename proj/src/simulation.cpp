#include "ewan/protocol/simulation.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>

#include "ewan/protocol/timing.hpp"
#include "ewan/radio/flood.hpp"
#include "ewan/sim/event_queue.hpp"
#include "ewan/sim/random.hpp"

namespace ewan::protocol {

namespace {

using energy::Category;
using radio::FloodInitiator;
using radio::FloodNodeResult;
using radio::FloodResult;
using sim::EventKind;
using sim::SimEvent;

enum CustomCode : std::int64_t { kSyncEnd = 1, kForceOff = 2, kForceOn = 3, kLinkChange = 4 };

std::int64_t custom_arg(CustomCode code, std::int64_t index) { return (index << 8) | code; }

struct NodeRt {
    NodeState st;
    energy::NodeEnergy energy;
    Duration tick_phase{0};
    sim::EventHandle retry;
    sim::EventHandle sync_end;
    std::optional<std::int64_t> mh_target;
    std::optional<std::int64_t> sh_target;
    std::optional<std::int64_t> sample_round;
    // Binary exponential back-off in the contention slot.
    int contention_attempts = 0;
    std::int64_t contend_from = 0;
    bool forced = false;
    bool active = false;
    Time active_since{0};
    std::vector<ActiveInterval> active_log;

    NodeRt(const energy::EnergyParams& p, const energy::HarvestTrace* trace) : energy(p, trace) {}
};

struct AirRequest {
    int node = 0;
    Time start{0};
    Time end{0};
    bool alive = true;
};

struct Interval {
    Time start{0};
    Time end{0};
};

bool overlaps(Time a0, Time a1, Time b0, Time b1) { return a0 < b1 && b0 < a1; }

class Engine {
  public:
    Engine(const scenario::Scenario& sc, ProtocolKind kind, std::uint64_t seed, const SimOptions& opt)
        : sc_(sc),
          kind_(kind),
          pp_(sc.protocol),
          opt_(opt),
          shape_(sc.flood_shape()),
          links_short_(sc.links_short),
          rx_mh_(seed, "multi_hop_rx"),
          rx_sh_(seed, "single_hop_rx"),
          rx_sync_(seed, "sync_rx"),
          backoff_(seed, "backoff"),
          contention_(seed, "contention"),
          phase_(seed, "sample_phase") {
        timing_.period = pp_.period;
        timing_.delta = pp_.delta;
        timing_.multi_hop = has_multi_hop(kind_);
        timing_.single_hop = has_single_hop(kind_);
        model_.ramp_width_db = sc.ramp_width_db;
        model_.capture_sigma_db = sc.capture_sigma_db;

        log_.protocol = kind_;
        log_.seed = seed;
        log_.horizon = sc.horizon;
        log_.period = pp_.period;
        log_.n_nodes = sc.n_nodes;

        nodes_.reserve(static_cast<std::size_t>(sc.n_nodes + 1));
        for (int i = 0; i <= sc.n_nodes; ++i) {
            const int trace_node = std::max(i, 1);
            auto params = effective_energy(kind_, pp_, sc.energy_of(trace_node));
            if (opt_.unlimited_energy) {
                params.capacity = 1e12;
                params.initial_energy = 1e9;
            }
            nodes_.emplace_back(params, &sc.traces.at(static_cast<std::size_t>(trace_node - 1)));
        }
        toa_sync_ = radio::time_on_air_us(sc.bootstrap, pp_.sync_payload);
        sync_window_ = pp_.turnaround + toa_sync_ + pp_.turnaround;
    }

    RunLog run() {
        const Time end = sc_.horizon;
        if (timing_.multi_hop) queue_.schedule(Time{0}, 0, EventKind::round_start, 0);
        if (timing_.single_hop && pp_.delta < end) queue_.schedule(pp_.delta, 0, EventKind::round_start, 1);
        for (int i = 1; i <= sc_.n_nodes; ++i) {
            auto& n = node(i);
            n.tick_phase = Duration{static_cast<std::int64_t>(
                phase_.below(static_cast<std::uint64_t>(n.energy.params().sample_interval.count())))};
            queue_.schedule(n.tick_phase, i, EventKind::storage_sample);
        }
        for (const auto& f : opt_.forced_off) {
            if (f.node < 1 || f.node > sc_.n_nodes || f.to < f.from) {
                throw std::invalid_argument("forced-off interval is invalid");
            }
            queue_.schedule(f.from, f.node, EventKind::custom, custom_arg(kForceOff, 0));
            queue_.schedule(f.to, f.node, EventKind::custom, custom_arg(kForceOn, 0));
        }
        for (std::size_t c = 0; c < opt_.link_changes.size(); ++c) {
            if (opt_.link_changes[c].links_short.size() != sc_.n_nodes + 1) {
                throw std::invalid_argument("link change matrix has the wrong size");
            }
            queue_.schedule(opt_.link_changes[c].at, -1, EventKind::custom,
                            custom_arg(kLinkChange, static_cast<std::int64_t>(c)));
        }

        queue_.run_until(end - Duration{1}, [this](const SimEvent& ev) { dispatch(ev); });

        log_.nodes.resize(static_cast<std::size_t>(sc_.n_nodes + 1));
        for (int i = 1; i <= sc_.n_nodes; ++i) {
            advance(i, end);
            auto& n = node(i);
            if (n.active) n.active_log.push_back({n.active_since, end});
            auto& s = log_.nodes[static_cast<std::size_t>(i)];
            s.ledger = n.energy.ledger();
            s.e_cap_start = n.energy.params().initial_energy;
            s.e_cap_end = n.energy.e_cap();
            s.capacity = n.energy.params().capacity;
            for (auto a : n.active_log) {
                a.end = std::min(a.end, end);
                if (a.end > a.start) s.active.push_back(a);
            }
        }
        return std::move(log_);
    }

  private:
    NodeRt& node(int i) { return nodes_[static_cast<std::size_t>(i)]; }

    // --- event dispatch -------------------------------------------------

    void dispatch(const SimEvent& ev) {
        switch (ev.kind) {
            case EventKind::round_start:
                if (ev.arg % 2 == 0) {
                    multi_hop_round(ev.arg / 2);
                } else {
                    single_hop_round(ev.arg / 2);
                }
                break;
            case EventKind::storage_sample:
                sample_tick(ev.target);
                break;
            case EventKind::sync_request:
                start_sync(ev.target);
                break;
            case EventKind::custom:
                switch (ev.arg & 0xff) {
                    case kSyncEnd: end_sync(ev.target); break;
                    case kForceOff: force_off(ev.target); break;
                    case kForceOn: node(ev.target).forced = false; break;
                    case kLinkChange:
                        links_short_ = opt_.link_changes[static_cast<std::size_t>(ev.arg >> 8)].links_short;
                        break;
                    default: throw sim::EngineError("unknown custom event");
                }
                break;
            default:
                throw sim::EngineError("unexpected event kind");
        }
    }

    // --- node state and energy ------------------------------------------

    void transition(int i, NodeEvent e, Time at) {
        auto& n = node(i);
        const NodeState before = n.st;
        n.st = node_transition(before, e, pp_, kind_);
        if (n.st.vsn != before.vsn) reset_contention(n);
        if (n.st.vsn != before.vsn || n.st.phase != before.phase) {
            log_.transitions.push_back({at, i, before.vsn, before.phase, n.st.vsn, n.st.phase, e});
        }
    }

    void power_down(int i, NodeEvent cause, Time at) {
        auto& n = node(i);
        transition(i, cause, at);
        queue_.cancel(n.retry);
        queue_.cancel(n.sync_end);
        n.mh_target.reset();
        n.sh_target.reset();
        n.sample_round.reset();
        for (auto& r : air_) {
            if (r.node == i && r.end > at) r.alive = false;
        }
        if (n.active) {
            n.active_log.push_back({n.active_since, at});
            n.active = false;
        }
    }

    bool alive(int i) { return node(i).st.powered(); }

    static void reset_contention(NodeRt& n) {
        n.contention_attempts = 0;
        n.contend_from = 0;
    }

    bool wants_contention(int i, std::int64_t k, const Schedule& sched) {
        const auto& n = node(i);
        return n.st.demand > 0 && !sched.assigned(i) && k >= n.contend_from;
    }

    void contended(int i, std::int64_t k) {
        auto& n = node(i);
        n.contention_attempts = std::min(n.contention_attempts + 1, pp_.contention_backoff_exp);
        const auto window = std::uint64_t{1} << n.contention_attempts;
        n.contend_from = k + 1 + static_cast<std::int64_t>(contention_.below(window));
    }

    void assign_slot(NodeRt& n, bool assigned) {
        n.st.has_slot = assigned;
        if (assigned) reset_contention(n);
    }

    /// Brings the node's energy up to t under its background load.
    void advance(int i, Time t) {
        auto& n = node(i);
        while (n.energy.cursor() < t) {
            if (!n.st.powered()) {
                n.energy.run_off_until(t);
                return;
            }
            const bool listening = n.st.vsn == Vsn::bootstrapping && n.st.phase == BootPhase::listen;
            const auto died = listening ? n.energy.run_until(t, sc_.multi_hop.rx_power_w, Category::listen)
                                        : n.energy.run_until(t, n.energy.params().p_sleep, Category::sleep);
            if (died) power_down(i, NodeEvent::energy_depleted, *died);
        }
    }

    /// Runs a load for `d` from the node's cursor; powers the node down on
    /// depletion. Returns false when the node died.
    bool spend(int i, Duration d, double load_w, Category c) {
        if (d <= Duration::zero() || !alive(i)) return alive(i);
        if (auto died = node(i).energy.run(d, load_w, c)) {
            power_down(i, NodeEvent::energy_depleted, *died);
            return false;
        }
        return true;
    }

    /// Listen, transmit, then idle for the rest of a slot of length `slot`.
    bool spend_slot(int i, Duration listen, double rx_w, Duration tx, double tx_w, Duration slot) {
        const double idle = node(i).energy.params().p_idle;
        return spend(i, listen, rx_w, Category::listen) && spend(i, tx, tx_w, Category::tx) &&
               spend(i, slot - listen - tx, idle, Category::idle);
    }

    /// Whether the node survives transmitting for `toa` right now.
    bool survives_tx(int i, Duration toa, double tx_w) {
        energy::NodeEnergy probe = node(i).energy;
        return !probe.run(toa, tx_w, Category::tx).has_value();
    }

    void sample_tick(int i) {
        auto& n = node(i);
        const Time now = queue_.now();
        advance(i, now);
        if (!n.forced) {
            if (n.st.vsn == Vsn::off && n.energy.e_cap() > 0.0) {
                if (!n.energy.draw(Category::boot, n.energy.params().e_boot).died) {
                    transition(i, NodeEvent::powered_up, now);
                }
            }
            if (n.st.vsn == Vsn::charging &&
                energy::reactive_decision(n.energy.storage(), n.energy.params(), false) ==
                    energy::Decision::start_communicating) {
                if (n.energy.draw(Category::com_init, n.energy.params().e_com_init).died) {
                    power_down(i, NodeEvent::shutdown, now);
                } else {
                    transition(i, NodeEvent::energy_start, now);
                    n.active = true;
                    n.active_since = now;
                    if (uses_sync(kind_)) start_sync(i);
                }
            }
        }
        const Time next = now + n.energy.params().sample_interval;
        if (next < sc_.horizon) queue_.schedule(next, i, EventKind::storage_sample);
    }

    void force_off(int i) {
        auto& n = node(i);
        advance(i, queue_.now());
        n.forced = true;
        if (n.st.vsn != Vsn::off) power_down(i, NodeEvent::shutdown, queue_.now());
    }

    // --- bootstrapping exchange -----------------------------------------

    void schedule_retry(int i, Time from) {
        const double wait = backoff_.uniform(0.0, sim::to_seconds(pp_.backoff_window));
        const Time at = std::max(from, queue_.now()) + sim::ceil_micros(wait);
        if (at < sc_.horizon) node(i).retry = queue_.schedule(at, i, EventKind::sync_request);
    }

    void start_sync(int i) {
        const Time now = queue_.now();
        advance(i, now);
        auto& n = node(i);
        if (n.st.vsn != Vsn::bootstrapping || n.st.phase != BootPhase::sync) return;
        if (!spend(i, toa_sync_, sc_.bootstrap.tx_power_w, Category::tx)) return;
        air_.push_back({i, now, now + toa_sync_, true});
        log_.syncs.push_back({now, i, false});
        n.sync_end = queue_.schedule(now + toa_sync_, i, EventKind::custom, custom_arg(kSyncEnd, 0));
    }

    Time next_round_start(Time t) const {
        Time next = sc_.horizon + pp_.period;
        if (timing_.multi_hop) next = std::min(next, timing_.next_mh_after(t - Duration{1}));
        if (timing_.single_hop) next = std::min(next, timing_.next_sh_after(t - Duration{1}));
        return next;
    }

    void end_sync(int i) {
        const Time now = queue_.now();
        auto it = std::find_if(air_.rbegin(), air_.rend(), [&](const AirRequest& r) { return r.node == i && r.end == now; });
        if (it == air_.rend() || !it->alive || !alive(i)) return;
        const AirRequest req = *it;

        const Time resp_start = now + pp_.turnaround;
        const Time resp_end = resp_start + toa_sync_;
        bool busy = resp_end > next_round_start(req.start);
        for (const auto& r : busy_rounds_) busy = busy || overlaps(req.start, resp_end, r.start, r.end);
        for (const auto& r : responses_) busy = busy || overlaps(req.start, resp_end, r.start, r.end);

        bool decoded = false;
        if (!busy) {
            std::vector<radio::HeardTransmission> heard;
            for (const auto& r : air_) {
                if (!r.alive || !overlaps(r.start, r.end, req.start, req.end)) continue;
                heard.push_back({r.node, radio::received_power(sc_.bootstrap.tx_power_dbm, sc_.links_long.loss(r.node, 0))});
            }
            radio::ReceptionModel m = model_;
            m.sensitivity_dbm = sc_.bootstrap.sensitivity_dbm;
            decoded = radio::resolve_concurrent(heard, m, rx_sync_) == std::optional<int>(i);
        }
        const auto response = host_handle_sync_request(now, timing_, busy || !decoded, kind_);
        bool received = false;
        if (response) {
            responses_.push_back({resp_start, resp_end});
            const double rx = radio::received_power(sc_.bootstrap.tx_power_dbm, sc_.links_long.loss(0, i));
            const double prob = radio::reception_probability(rx, sc_.bootstrap.sensitivity_dbm, sc_.ramp_width_db);
            received = rx_sync_.next_unit() < prob;
        }

        if (!spend(i, sync_window_, sc_.bootstrap.rx_power_w, Category::listen)) return;
        prune(now);

        auto& n = node(i);
        if (!received) {
            transition(i, NodeEvent::sync_failed, now);
            schedule_retry(i, now + sync_window_);
            return;
        }
        for (auto s = log_.syncs.rbegin(); s != log_.syncs.rend(); ++s) {
            if (s->node == i) {
                s->answered = true;
                break;
            }
        }
        transition(i, NodeEvent::sync_response, now);
        if (kind_ == ProtocolKind::single_hop) {
            const Time t2 = now + response->tau2;
            n.sh_target = timing_.sh_index(t2);
            n.st.next_sh_round = t2;
        } else {
            const Time t1 = now + response->tau1;
            n.mh_target = timing_.mh_index(t1);
            n.st.next_mh_round = t1;
            if (kind_ == ProtocolKind::ewan) n.st.next_sh_round = now + response->tau2;
        }
    }

    void prune(Time now) {
        const Time horizon = now - sim::seconds(2);
        std::erase_if(air_, [&](const AirRequest& r) { return r.end < horizon; });
        std::erase_if(responses_, [&](const Interval& r) { return r.end < horizon; });
        std::erase_if(busy_rounds_, [&](const Interval& r) { return r.end < horizon; });
    }

    // --- rounds ---------------------------------------------------------

    RoundNodeRecord& record_of(RoundRecord& rec, int i) {
        for (auto& r : rec.nodes) {
            if (r.node == i) return r;
        }
        throw sim::EngineError("node missing from round record");
    }

    void flood_energy(int i, const FloodNodeResult& fr, Duration slot) {
        spend_slot(i, fr.listen_time, sc_.multi_hop.rx_power_w, fr.tx_time, sc_.multi_hop.tx_power_w, slot);
    }

    void idle(int i, Duration d) { spend(i, d, node(i).energy.params().p_idle, Category::idle); }

    std::vector<bool> mask_of(const std::vector<int>& members) const {
        std::vector<bool> mask(static_cast<std::size_t>(sc_.n_nodes + 1), false);
        mask[0] = true;
        for (int i : members) mask[static_cast<std::size_t>(i)] = true;
        return mask;
    }

    void drop_dead(std::vector<int>& members) {
        std::erase_if(members, [&](int i) { return !alive(i); });
    }

    void multi_hop_round(std::int64_t k) {
        const Time t = queue_.now();
        const Time next = t + pp_.period;
        if (next < sc_.horizon) queue_.schedule(next, 0, EventKind::round_start, 2 * (k + 1));

        std::vector<int> cand;
        for (int i = 1; i <= sc_.n_nodes; ++i) {
            advance(i, t);
            const auto& n = node(i);
            const bool member = n.st.vsn == Vsn::multi_hop;
            const bool joining = n.st.vsn == Vsn::bootstrapping &&
                                 ((n.st.phase == BootPhase::await_mh && n.mh_target == k) ||
                                  n.st.phase == BootPhase::listen);
            const bool sampling = n.st.vsn == Vsn::single_hop && n.sample_round == k;
            if (member || joining || sampling) cand.push_back(i);
        }

        const Time other = timing_.single_hop ? t + pp_.delta : Time{0};
        Schedule sched = host_build_schedule(mh_book_, mh_demands_, pp_, Vsn::multi_hop, k, t, other);
        mh_demands_.clear();
        const auto tm = mh_round_timing(sc_.multi_hop, shape_, pp_, static_cast<int>(sched.slots.size()));
        busy_rounds_.push_back({t, t + tm.total()});

        RoundRecord rec;
        rec.vsn = Vsn::multi_hop;
        rec.index = k;
        rec.start = t;
        rec.duration = tm.total();
        rec.slots = static_cast<int>(sched.slots.size());
        std::vector<energy::EnergyLedger> before;
        for (int i : cand) {
            rec.nodes.push_back({i});
            before.push_back(node(i).energy.ledger());
        }

        for (int i : cand) {
            const auto& st = node(i).st;
            if (!(st.vsn == Vsn::bootstrapping && st.phase == BootPhase::listen)) idle(i, pp_.round_wake);
        }

        // First schedule.
        const FloodResult first = radio::simulate_flood(0, sched.payload_bytes(pp_), mask_of(cand), links_short_,
                                                        sc_.multi_hop, shape_, model_, rx_mh_);
        std::vector<int> part;
        for (int i : cand) {
            auto& n = node(i);
            const auto& fr = first.nodes[static_cast<std::size_t>(i)];
            const bool got = fr.received();
            const bool idle_listener = n.st.vsn == Vsn::bootstrapping && n.st.phase == BootPhase::listen;
            if (got) {
                flood_energy(i, fr, tm.schedule);
            } else if (!idle_listener) {
                spend(i, fr.listen_time, sc_.multi_hop.rx_power_w, Category::listen);
            }
            if (!alive(i)) continue;
            record_of(rec, i).received_schedule = got;

            if (n.st.vsn == Vsn::single_hop) {
                n.sample_round.reset();
                transition(i, got ? NodeEvent::sampled_mh_success : NodeEvent::sampled_mh_failure, t);
            } else {
                transition(i, got ? NodeEvent::received_mh_schedule : NodeEvent::missed_schedule, t);
            }
            if (got) {
                n.mh_target.reset();
                n.st.next_mh_round = next;
                n.st.next_sh_round = timing_.single_hop ? std::optional<Time>(t + pp_.delta) : std::nullopt;
                assign_slot(n, sched.assigned(i));
                part.push_back(i);
                continue;
            }
            if (n.st.vsn == Vsn::bootstrapping && n.st.phase == BootPhase::await_sh) {
                n.sh_target = timing_.sh_index(t + pp_.delta);
                n.st.next_sh_round = t + pp_.delta;
            } else if (n.st.vsn == Vsn::bootstrapping && n.st.phase == BootPhase::sync) {
                n.mh_target.reset();
                schedule_retry(i, t + tm.schedule);
            }
        }
        for (int i : part) idle(i, tm.gap);
        drop_dead(part);

        // Data slots.
        std::vector<int> delivered_from;
        for (const auto& slot : sched.slots) {
            const int owner = slot.node;
            const bool sends = std::find(part.begin(), part.end(), owner) != part.end() &&
                               survives_tx(owner, radio::time_on_air_us(sc_.multi_hop, pp_.data_payload),
                                           sc_.multi_hop.tx_power_w);
            if (sends) {
                const FloodResult fl = radio::simulate_flood(owner, pp_.data_payload, mask_of(part), links_short_,
                                                             sc_.multi_hop, shape_, model_, rx_mh_);
                auto& r = record_of(rec, owner);
                r.attempted += 1;
                if (fl.nodes[0].received()) {
                    r.delivered += 1;
                    delivered_from.push_back(owner);
                    log_.deliveries.push_back({t, owner, Vsn::multi_hop, k});
                }
                for (int i : part) flood_energy(i, fl.nodes[static_cast<std::size_t>(i)], tm.data);
            } else {
                for (int i : part) spend_slot(i, tm.data, sc_.multi_hop.rx_power_w, Duration{0}, 0.0, tm.data);
            }
            for (int i : part) idle(i, tm.gap);
            drop_dead(part);
        }

        // Contention slot.
        std::vector<FloodInitiator> contenders;
        for (int i : part) {
            if (wants_contention(i, k, sched)) {
                contenders.push_back({i, i});
                record_of(rec, i).contended = true;
                contended(i, k);
            }
        }
        if (!contenders.empty()) {
            const FloodResult fl = radio::simulate_flood(contenders, mask_of(part), links_short_, sc_.multi_hop,
                                                         shape_, pp_.contention_payload, model_, rx_mh_);
            if (fl.nodes[0].received()) mh_demands_.push_back(fl.nodes[0].packet);
            for (int i : part) flood_energy(i, fl.nodes[static_cast<std::size_t>(i)], tm.contention);
        } else {
            for (int i : part) spend_slot(i, tm.contention, sc_.multi_hop.rx_power_w, Duration{0}, 0.0, tm.contention);
        }
        for (int i : part) idle(i, tm.gap);
        drop_dead(part);

        // Second schedule.
        rec.dropped = host_record_round(mh_book_, delivered_from, pp_);
        const FloodResult second = radio::simulate_flood(0, sched.payload_bytes(pp_), mask_of(part), links_short_,
                                                         sc_.multi_hop, shape_, model_, rx_mh_);
        for (int i : part) flood_energy(i, second.nodes[static_cast<std::size_t>(i)], tm.schedule);

        finish_record(rec, cand, before);
    }

    /// Listens to the host's schedule copies; returns whether one arrived.
    bool listen_sh_schedule(int i, const ShRoundTiming& tm, bool& still_alive) {
        const double rx_w = sc_.single_hop.rx_power_w;
        const double rx = radio::received_power(sc_.single_hop.tx_power_dbm, sc_.links_long.loss(0, i));
        const double prob = radio::reception_probability(rx, sc_.single_hop.sensitivity_dbm, sc_.ramp_width_db);
        Duration used{0};
        for (int copy = 0; copy <= pp_.sh_retx_host; ++copy) {
            if (copy > 0) {
                idle(i, pp_.turnaround);
                used += pp_.turnaround;
            }
            still_alive = spend(i, tm.schedule_toa, rx_w, Category::listen);
            used += tm.schedule_toa;
            if (!still_alive) return false;
            if (rx_sh_.next_unit() < prob) {
                idle(i, tm.schedule - used);
                still_alive = alive(i);
                return still_alive;
            }
        }
        return false;
    }

    void single_hop_round(std::int64_t k) {
        const Time t = queue_.now();
        const Time next = t + pp_.period;
        if (next < sc_.horizon) queue_.schedule(next, 0, EventKind::round_start, 2 * (k + 1) + 1);

        std::vector<int> cand;
        for (int i = 1; i <= sc_.n_nodes; ++i) {
            advance(i, t);
            const auto& n = node(i);
            const bool member = n.st.vsn == Vsn::single_hop;
            const bool joining =
                n.st.vsn == Vsn::bootstrapping && n.st.phase == BootPhase::await_sh && n.sh_target == k;
            if (member || joining) cand.push_back(i);
        }

        const Time other = timing_.multi_hop ? timing_.next_mh_after(t) : Time{0};
        Schedule sched = host_build_schedule(sh_book_, sh_demands_, pp_, Vsn::single_hop, k, t, other);
        if (kind_ != ProtocolKind::ewan) sched.sample_multi_hop = false;
        sh_demands_.clear();
        const auto tm = sh_round_timing(sc_.single_hop, pp_, static_cast<int>(sched.slots.size()));
        busy_rounds_.push_back({t, t + tm.total()});

        RoundRecord rec;
        rec.vsn = Vsn::single_hop;
        rec.index = k;
        rec.start = t;
        rec.duration = tm.total();
        rec.slots = static_cast<int>(sched.slots.size());
        rec.sample_flag = sched.sample_multi_hop;
        std::vector<energy::EnergyLedger> before;
        for (int i : cand) {
            rec.nodes.push_back({i});
            before.push_back(node(i).energy.ledger());
        }

        std::vector<int> part;
        for (int i : cand) {
            auto& n = node(i);
            idle(i, pp_.round_wake);
            bool still_alive = true;
            const bool got = listen_sh_schedule(i, tm, still_alive);
            if (!still_alive) continue;
            record_of(rec, i).received_schedule = got;
            transition(i, got ? NodeEvent::received_sh_schedule : NodeEvent::missed_schedule, t);
            if (got) {
                n.sh_target.reset();
                n.st.next_sh_round = next;
                n.st.next_mh_round = timing_.multi_hop ? std::optional<Time>(other) : std::nullopt;
                assign_slot(n, sched.assigned(i));
                part.push_back(i);
            } else if (n.st.vsn == Vsn::bootstrapping && n.st.phase == BootPhase::sync) {
                n.sh_target.reset();
                schedule_retry(i, t + tm.schedule);
            }
        }
        for (int i : part) idle(i, tm.gap);
        drop_dead(part);

        const double tx_w = sc_.single_hop.tx_power_w;
        const auto link_prob = [&](int i) {
            const double rx = radio::received_power(sc_.single_hop.tx_power_dbm, sc_.links_long.loss(i, 0));
            return radio::reception_probability(rx, sc_.single_hop.sensitivity_dbm, sc_.ramp_width_db);
        };

        // Data slots: node transmission, host repeat.
        std::vector<int> delivered_from;
        for (const auto& slot : sched.slots) {
            const int owner = slot.node;
            const bool present = std::find(part.begin(), part.end(), owner) != part.end();
            if (present && survives_tx(owner, tm.data_toa, tx_w)) {
                auto& r = record_of(rec, owner);
                r.attempted += 1;
                if (rx_sh_.next_unit() < link_prob(owner)) {
                    r.delivered += 1;
                    delivered_from.push_back(owner);
                    log_.deliveries.push_back({t, owner, Vsn::single_hop, k});
                }
            }
            for (int i : part) {
                if (i == owner) {
                    spend_slot(i, Duration{0}, 0.0, (1 + pp_.sh_retx_node) * tm.data_toa, tx_w, tm.data);
                } else if (pp_.sh_listen_data) {
                    // Receives the node's packet and the host repeat.
                    const Duration rx = (2 + pp_.sh_retx_node) * tm.data_toa;
                    spend_slot(i, rx, sc_.single_hop.rx_power_w, Duration{0}, 0.0, tm.data);
                } else {
                    idle(i, tm.data);
                }
                idle(i, tm.gap);
            }
            drop_dead(part);
        }

        // Contention slot.
        std::vector<radio::HeardTransmission> heard;
        for (int i : part) {
            if (wants_contention(i, k, sched)) {
                record_of(rec, i).contended = true;
                contended(i, k);
                if (survives_tx(i, tm.contention_toa, tx_w)) {
                    heard.push_back({i, radio::received_power(sc_.single_hop.tx_power_dbm, sc_.links_long.loss(i, 0))});
                }
                spend_slot(i, Duration{0}, 0.0, tm.contention_toa, tx_w, tm.contention);
            } else {
                idle(i, tm.contention);
            }
            idle(i, tm.gap);
        }
        if (!heard.empty()) {
            radio::ReceptionModel m = model_;
            m.sensitivity_dbm = sc_.single_hop.sensitivity_dbm;
            if (auto got = radio::resolve_concurrent(heard, m, rx_sh_)) sh_demands_.push_back(*got);
        }
        drop_dead(part);

        // Second schedule.
        rec.dropped = host_record_round(sh_book_, delivered_from, pp_);
        for (int i : part) {
            bool still_alive = true;
            listen_sh_schedule(i, tm, still_alive);
        }
        drop_dead(part);
        if (sched.sample_multi_hop) {
            for (int i : part) {
                if (node(i).st.vsn == Vsn::single_hop) node(i).sample_round = k + 1;
            }
        }

        finish_record(rec, cand, before);
    }

    void finish_record(RoundRecord& rec, const std::vector<int>& cand, const std::vector<energy::EnergyLedger>& before) {
        for (std::size_t c = 0; c < cand.size(); ++c) {
            auto& r = rec.nodes[c];
            const auto& after = node(cand[c]).energy.ledger();
            for (std::size_t k = 0; k < energy::kCategoryCount; ++k) {
                r.energy[k] = after.drawn[k] - before[c].drawn[k];
            }
            r.participated = r.received_schedule && (alive(cand[c]) || r.attempted > 0 || r.contended);
        }
        log_.rounds.push_back(std::move(rec));
    }

    const scenario::Scenario& sc_;
    ProtocolKind kind_;
    const ProtocolParams& pp_;
    const SimOptions& opt_;
    radio::FloodShape shape_;
    radio::LinkMatrix links_short_;
    radio::ReceptionModel model_;
    RoundTiming timing_;
    Duration toa_sync_{0};
    Duration sync_window_{0};

    sim::EventQueue queue_;
    sim::RandomStream rx_mh_;
    sim::RandomStream rx_sh_;
    sim::RandomStream rx_sync_;
    sim::RandomStream backoff_;
    sim::RandomStream contention_;
    sim::RandomStream phase_;

    std::vector<NodeRt> nodes_;
    HostBook mh_book_;
    HostBook sh_book_;
    std::vector<int> mh_demands_;
    std::vector<int> sh_demands_;
    std::vector<AirRequest> air_;
    std::vector<Interval> responses_;
    std::vector<Interval> busy_rounds_;

    RunLog log_;
};

}  // namespace

RunLog simulate(const scenario::Scenario& scenario, ProtocolKind kind, std::uint64_t seed, const SimOptions& options) {
    scenario::validate(scenario);
    Engine engine(scenario, kind, seed, options);
    return engine.run();
}

std::string RunLog::events_text() const {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "run protocol=%s seed=%llu horizon_us=%lld nodes=%d\n", to_string(protocol).c_str(),
                  static_cast<unsigned long long>(seed), static_cast<long long>(horizon.count()), n_nodes);
    out += buf;
    for (const auto& t : transitions) {
        std::snprintf(buf, sizeof buf, "%lld transition node=%d %s/%s -> %s/%s cause=%s\n",
                      static_cast<long long>(t.time.count()), t.node, to_string(t.from).c_str(),
                      to_string(t.from_phase).c_str(), to_string(t.to).c_str(), to_string(t.to_phase).c_str(),
                      to_string(t.cause).c_str());
        out += buf;
    }
    for (const auto& s : syncs) {
        std::snprintf(buf, sizeof buf, "%lld sync node=%d answered=%d\n", static_cast<long long>(s.start.count()),
                      s.node, s.answered ? 1 : 0);
        out += buf;
    }
    for (const auto& r : rounds) {
        int got = 0, delivered = 0;
        for (const auto& n : r.nodes) {
            got += n.received_schedule ? 1 : 0;
            delivered += n.delivered;
        }
        std::snprintf(buf, sizeof buf, "%lld round vsn=%s index=%lld slots=%d listeners=%zu received=%d delivered=%d\n",
                      static_cast<long long>(r.start.count()), to_string(r.vsn).c_str(),
                      static_cast<long long>(r.index), r.slots, r.nodes.size(), got, delivered);
        out += buf;
    }
    return out;
}

}  // namespace ewan::protocol
