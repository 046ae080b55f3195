#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "ewan/sim/time.hpp"

namespace ewan::sim {

enum class EventKind : std::uint8_t {
    round_start,
    slot_start,
    wake_up,
    storage_sample,
    trace_step,
    sync_request,
    custom,
};

/// Entity id used as an event target. Node 0 is the host.
using EntityId = int;

struct SimEvent {
    Time time{};
    std::uint64_t sequence = 0;
    EntityId target = 0;
    EventKind kind = EventKind::custom;
    /// Free-form payload interpreted by the handler (round index, sub-kind, ...).
    std::int64_t arg = 0;
};

/// Raised for scheduling errors; these always indicate a bug in the engine
/// or in a handler, never a modelled condition.
class EngineError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

struct EventHandle {
    std::uint64_t sequence = 0;
    bool valid() const { return sequence != 0; }
};

/// Ordered event queue with a simulated clock. Events dequeue in
/// (time, sequence) order; the sequence is assigned on insertion, so ties
/// resolve in scheduling order.
class EventQueue {
  public:
    Time now() const { return now_; }
    bool empty() const { return pending_.empty(); }
    std::size_t size() const { return pending_.size(); }

    /// Enqueues an event. The sequence field of `event` is ignored and
    /// overwritten.
    EventHandle schedule(SimEvent event) {
        if (event.time < now_) {
            throw EngineError("schedule_event: event time lies in the past");
        }
        event.sequence = ++next_sequence_;
        heap_.push(event);
        pending_.insert(event.sequence);
        return EventHandle{event.sequence};
    }

    EventHandle schedule(Time time, EntityId target, EventKind kind, std::int64_t arg = 0) {
        return schedule(SimEvent{time, 0, target, kind, arg});
    }

    /// Cancels a pending event. Returns false if the handle is unknown,
    /// already processed or already cancelled.
    bool cancel(EventHandle handle) {
        return pending_.erase(handle.sequence) != 0;
    }

    /// Processes every event with time <= t_end in order and leaves the clock
    /// at t_end. Returns the number of events handed to the handler.
    template <typename Handler>
    std::size_t run_until(Time t_end, Handler&& handler) {
        if (t_end < now_) {
            throw EngineError("run_until: end time lies in the past");
        }
        std::size_t processed = 0;
        while (!heap_.empty() && heap_.top().time <= t_end) {
            SimEvent ev = heap_.top();
            heap_.pop();
            if (pending_.erase(ev.sequence) == 0) continue;  // cancelled
            now_ = ev.time;
            handler(ev);
            ++processed;
        }
        now_ = t_end;
        return processed;
    }

  private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.sequence > b.sequence;
        }
    };

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::unordered_set<std::uint64_t> pending_;
    std::uint64_t next_sequence_ = 0;
    Time now_{0};
};

}  // namespace ewan::sim
