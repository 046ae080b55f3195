#include "ewan/energy/energy.hpp"

#include <algorithm>
#include <cmath>

namespace ewan::energy {

void EnergyParams::validate() const {
    const auto positive = [](double v, const char* what) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string("energy parameter must be positive: ") + what);
    };
    positive(e_boot, "e_boot");
    positive(e_com_init, "e_com_init");
    positive(p_boot, "p_boot");
    positive(p_sleep, "p_sleep");
    positive(p_idle, "p_idle");
    positive(start_threshold, "start_threshold");
    positive(capacity, "capacity");
    positive(capacitance, "capacitance");
    if (!(buck_efficiency > 0.0 && buck_efficiency <= 1.0)) {
        throw std::invalid_argument("buck efficiency must lie in (0, 1]");
    }
    if (!(charge_efficiency > 0.0 && charge_efficiency <= 1.0)) {
        throw std::invalid_argument("charge efficiency must lie in (0, 1]");
    }
    if (sample_interval <= Duration::zero()) throw std::invalid_argument("sample interval must be positive");
    if (initial_energy < 0.0 || initial_energy > capacity) {
        throw std::invalid_argument("initial energy must lie within [0, capacity]");
    }
}

double step_storage(double e_cap, double e_harv, double e_used, double capacity) {
    return std::max(std::min(e_cap + e_harv - e_used, capacity), 0.0);
}

double energy_from_voltage(double capacitance, double volts) {
    if (volts < 0.0) throw std::invalid_argument("energy_from_voltage: negative voltage");
    return 0.5 * capacitance * volts * volts;
}

HarvestTrace::HarvestTrace(Duration resolution, std::vector<double> power_w)
    : resolution_(resolution), power_(std::move(power_w)) {
    if (resolution_ <= Duration::zero()) throw std::invalid_argument("trace resolution must be positive");
    for (double p : power_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("trace samples must be finite and >= 0");
    }
}

double HarvestTrace::power_at(Time t) const {
    if (t < Time::zero() || t >= span()) throw std::out_of_range("harvest trace queried outside its span");
    return power_[static_cast<std::size_t>(t / resolution_)];
}

double harvest_energy(const HarvestTrace& trace, Time t0, Time t1, double charge_efficiency) {
    if (t0 > t1) throw std::invalid_argument("harvest_energy: t0 > t1");
    if (t0 < Time::zero() || t1 > trace.span()) throw std::out_of_range("harvest_energy: interval outside trace");
    double joules = 0.0;
    Time t = t0;
    while (t < t1) {
        const auto idx = t / trace.resolution();
        const Time seg_end = std::min(t1, (idx + 1) * trace.resolution());
        joules += trace.samples()[static_cast<std::size_t>(idx)] * sim::to_seconds(seg_end - t);
        t = seg_end;
    }
    return charge_efficiency * joules;
}

std::string to_string(Category c) {
    switch (c) {
        case Category::tx: return "tx";
        case Category::listen: return "listen";
        case Category::idle: return "idle";
        case Category::sleep: return "sleep";
        case Category::boot_sampling: return "boot_sampling";
        case Category::com_init: return "com_init";
        case Category::boot: return "boot";
        case Category::count_: break;
    }
    return "?";
}

double EnergyLedger::total_drawn() const {
    double sum = 0.0;
    for (double d : drawn) sum += d;
    return sum;
}

ConsumeResult consume(EnergyLedger& ledger, EnergyStorage& storage, Category category, double amount_at_load,
                      double efficiency) {
    if (amount_at_load < 0.0) throw std::invalid_argument("consume: negative amount");
    const double want = amount_at_load / efficiency;
    ConsumeResult r;
    if (want > storage.e_cap) {
        r.drawn = storage.e_cap;
        r.died = true;
        storage.e_cap = 0.0;
    } else {
        r.drawn = want;
        storage.e_cap -= want;
    }
    ledger[category] += r.drawn;
    return r;
}

std::string to_string(Decision d) {
    switch (d) {
        case Decision::stay_off: return "stay_off";
        case Decision::start_communicating: return "start_communicating";
        case Decision::keep_communicating: return "keep_communicating";
        case Decision::power_off: return "power_off";
    }
    return "?";
}

Decision reactive_decision(const EnergyStorage& storage, const EnergyParams& params, bool currently_communicating) {
    if (currently_communicating) {
        return storage.e_cap <= 0.0 ? Decision::power_off : Decision::keep_communicating;
    }
    return storage.e_cap > params.start_threshold ? Decision::start_communicating : Decision::stay_off;
}

void RadioPowerTable::add(const radio::RadioConfig& config) {
    for (auto& e : entries_) {
        if (e.modulation == config.modulation && e.spreading_factor == config.spreading_factor &&
            e.datarate_bps == config.datarate_bps && e.bandwidth_hz == config.bandwidth_hz &&
            e.tx_power_dbm == config.tx_power_dbm) {
            e.tx_w = config.tx_power_w;
            e.rx_w = config.rx_power_w;
            return;
        }
    }
    entries_.push_back({config.modulation, config.spreading_factor, config.datarate_bps, config.bandwidth_hz,
                        config.tx_power_dbm, config.tx_power_w, config.rx_power_w});
}

const RadioPowerTable::Entry& RadioPowerTable::find(const radio::RadioConfig& config) const {
    for (const auto& e : entries_) {
        if (e.modulation == config.modulation && e.spreading_factor == config.spreading_factor &&
            e.datarate_bps == config.datarate_bps && e.bandwidth_hz == config.bandwidth_hz &&
            e.tx_power_dbm == config.tx_power_dbm) {
            return e;
        }
    }
    throw std::invalid_argument("radio power table has no entry for this configuration");
}

double RadioPowerTable::tx_power(const radio::RadioConfig& config) const { return find(config).tx_w; }
double RadioPowerTable::rx_power(const radio::RadioConfig& config) const { return find(config).rx_w; }

double per_activity_energy(const Activity& a, const RadioPowerTable& table, const EnergyParams& params) {
    const auto non_negative = [](double d) {
        if (d < 0.0) throw std::invalid_argument("per_activity_energy: negative duration");
        return d;
    };
    return std::visit(
        [&](const auto& act) -> double {
            using T = std::decay_t<decltype(act)>;
            if constexpr (std::is_same_v<T, activity::Tx>) {
                return table.tx_power(*act.config) * non_negative(act.toa_s);
            } else if constexpr (std::is_same_v<T, activity::Listen>) {
                return table.rx_power(*act.config) * non_negative(act.duration_s);
            } else if constexpr (std::is_same_v<T, activity::Idle>) {
                return params.p_idle * non_negative(act.duration_s);
            } else if constexpr (std::is_same_v<T, activity::Sleep>) {
                return params.p_sleep * non_negative(act.duration_s);
            } else if constexpr (std::is_same_v<T, activity::BootSample>) {
                return params.e_boot;
            } else {
                return params.e_com_init;
            }
        },
        a);
}

NodeEnergy::NodeEnergy(EnergyParams params, const HarvestTrace* trace) : params_(params), trace_(trace) {
    params_.validate();
    if (!trace_) throw std::invalid_argument("NodeEnergy needs a harvest trace");
    storage_.capacity = params_.capacity;
    storage_.capacitance = params_.capacitance;
    storage_.e_cap = params_.initial_energy;
}

std::optional<Time> NodeEnergy::run(Duration duration, double load_w, Category category) {
    if (duration < Duration::zero()) throw std::invalid_argument("NodeEnergy::run: negative duration");
    if (load_w < 0.0) throw std::invalid_argument("NodeEnergy::run: negative load");
    const double drain = load_w / params_.buck_efficiency;
    const Time end = cursor_ + duration;
    const Duration res = trace_->resolution();
    double& e = storage_.e_cap;
    const double cap = storage_.capacity;

    while (cursor_ < end) {
        const Time seg_end = std::min(end, (cursor_ / res + 1) * res);
        const double h = trace_->power_at(cursor_) * params_.charge_efficiency;
        const double dt = sim::to_seconds(seg_end - cursor_);
        const double rate = h - drain;

        if (rate >= 0.0) {
            ledger_.e_in += h * dt;
            ledger_[category] += drain * dt;
            const double room = cap - e;
            const double gain = rate * dt;
            if (gain > room) {
                ledger_.e_wasted += gain - room;
                e = cap;
            } else {
                e += gain;
            }
            cursor_ = seg_end;
            continue;
        }

        const double t_dead = e / -rate;
        if (t_dead >= dt) {
            ledger_.e_in += h * dt;
            ledger_[category] += drain * dt;
            e = std::max(0.0, e + rate * dt);
            cursor_ = seg_end;
            continue;
        }

        // Storage empties inside this segment. The sub-microsecond tail up to
        // the reported death time only passes harvest through to the load.
        const Time death = std::min(seg_end, cursor_ + sim::ceil_micros(t_dead));
        const double tail = sim::to_seconds(death - cursor_) - t_dead;
        ledger_.e_in += h * (t_dead + tail);
        ledger_[category] += e + h * t_dead + h * tail;
        e = 0.0;
        cursor_ = death;
        return death;
    }
    return std::nullopt;
}

void NodeEnergy::run_off_until(Time t) {
    if (t <= cursor_) return;
    const double drain = params_.p_boot / params_.buck_efficiency;
    const Duration res = trace_->resolution();
    double& e = storage_.e_cap;
    const double cap = storage_.capacity;

    while (cursor_ < t) {
        const Time seg_end = std::min(t, (cursor_ / res + 1) * res);
        const double h = trace_->power_at(cursor_) * params_.charge_efficiency;
        const double dt = sim::to_seconds(seg_end - cursor_);
        const double rate = h - drain;
        ledger_.e_in += h * dt;
        if (rate >= 0.0) {
            ledger_[Category::boot_sampling] += drain * dt;
            const double gain = rate * dt;
            const double room = cap - e;
            if (gain > room) {
                ledger_.e_wasted += gain - room;
                e = cap;
            } else {
                e += gain;
            }
        } else {
            const double t_dead = e / -rate;
            if (t_dead >= dt) {
                ledger_[Category::boot_sampling] += drain * dt;
                e = std::max(0.0, e + rate * dt);
            } else {
                // Empty storage: the sampling circuit takes whatever arrives.
                ledger_[Category::boot_sampling] += e + h * dt;
                e = 0.0;
            }
        }
        cursor_ = seg_end;
    }
}

ConsumeResult NodeEnergy::draw(Category category, double amount_at_load) {
    return consume(ledger_, storage_, category, amount_at_load, params_.buck_efficiency);
}

}  // namespace ewan::energy
