#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ewan/radio/radio.hpp"
#include "ewan/sim/time.hpp"

namespace ewan::energy {

using sim::Duration;
using sim::Time;

/// Node energy parameters. Defaults are the measured platform values.
struct EnergyParams {
    double e_boot = 13.655e-6;        ///< J, application power-up
    double e_com_init = 17.25e-3;     ///< J, communication subsystem init
    double p_boot = 27.254e-6;        ///< W, sampling the storage while off
    double p_sleep = 26.831e-6;       ///< W, deep sleep between rounds
    double p_idle = 10.516e-3;        ///< W, idle between slots of a round
    double buck_efficiency = 0.9;     ///< load-side conversion efficiency
    double start_threshold = 0.115;   ///< J, strict lower bound to start
    Duration sample_interval = sim::seconds(30);
    double charge_efficiency = 1.0;   ///< scales the harvest trace
    double capacity = 0.7;            ///< J, usable capacity B
    double capacitance = 0.35;        ///< F, chosen so 0.5*C*(2 V)^2 = B
    double initial_energy = 0.0;      ///< J at t = 0

    void validate() const;
};

/// E_cap(t+1) = max(min(E_cap + E_harv - E_used, B), 0).
double step_storage(double e_cap, double e_harv, double e_used, double capacity);

/// E = 1/2 C V^2.
double energy_from_voltage(double capacitance, double volts);

/// Piecewise-constant harvested power at a fixed resolution starting at t = 0.
class HarvestTrace {
  public:
    HarvestTrace() = default;
    HarvestTrace(Duration resolution, std::vector<double> power_w);

    Duration resolution() const { return resolution_; }
    Duration span() const { return resolution_ * static_cast<std::int64_t>(power_.size()); }
    const std::vector<double>& samples() const { return power_; }

    /// Power of the sample covering t (t must lie within the span).
    double power_at(Time t) const;

    bool operator==(const HarvestTrace&) const = default;

  private:
    Duration resolution_{sim::seconds(60)};
    std::vector<double> power_;
};

/// charge_efficiency * integral of the trace over [t0, t1].
double harvest_energy(const HarvestTrace& trace, Time t0, Time t1, double charge_efficiency);

enum class Category : std::uint8_t { tx, listen, idle, sleep, boot_sampling, com_init, boot, count_ };
inline constexpr std::size_t kCategoryCount = static_cast<std::size_t>(Category::count_);
std::string to_string(Category c);

/// Cumulative energy drawn from storage per category, plus harvest and clamp
/// losses. Conservation: e_in = (e_cap_end - e_cap_start) + total_drawn() + e_wasted.
struct EnergyLedger {
    std::array<double, kCategoryCount> drawn{};
    double e_in = 0.0;
    double e_wasted = 0.0;

    double& operator[](Category c) { return drawn[static_cast<std::size_t>(c)]; }
    double operator[](Category c) const { return drawn[static_cast<std::size_t>(c)]; }
    double total_drawn() const;
};

struct EnergyStorage {
    double e_cap = 0.0;
    double capacity = 0.7;
    double capacitance = 0.35;
};

struct ConsumeResult {
    double drawn = 0.0;
    bool died = false;
};

/// Instantaneous draw of `amount_at_load / efficiency`. Empties the storage
/// and reports death when the draw exceeds the stored energy.
ConsumeResult consume(EnergyLedger& ledger, EnergyStorage& storage, Category category, double amount_at_load,
                      double efficiency);

enum class Decision { stay_off, start_communicating, keep_communicating, power_off };
std::string to_string(Decision d);

Decision reactive_decision(const EnergyStorage& storage, const EnergyParams& params, bool currently_communicating);

/// Energy at the load of one activity.
namespace activity {
struct Tx { double toa_s; const radio::RadioConfig* config; };
struct Listen { double duration_s; const radio::RadioConfig* config; };
struct Idle { double duration_s; };
struct Sleep { double duration_s; };
struct BootSample {};
struct ComInit {};
}  // namespace activity
using Activity = std::variant<activity::Tx, activity::Listen, activity::Idle, activity::Sleep, activity::BootSample,
                              activity::ComInit>;

/// Radio supply powers keyed by configuration.
class RadioPowerTable {
  public:
    void add(const radio::RadioConfig& config);
    double tx_power(const radio::RadioConfig& config) const;
    double rx_power(const radio::RadioConfig& config) const;

  private:
    struct Entry {
        radio::Modulation modulation;
        int spreading_factor;
        double datarate_bps;
        double bandwidth_hz;
        double tx_power_dbm;
        double tx_w;
        double rx_w;
    };
    const Entry& find(const radio::RadioConfig& config) const;
    std::vector<Entry> entries_;
};

double per_activity_energy(const Activity& a, const RadioPowerTable& table, const EnergyParams& params);

/// Storage, ledger and trace of one node, advanced lazily along simulated
/// time. Every interval integrates harvest and a constant load exactly
/// (both are piecewise constant), so the result equals a fine-grained
/// application of step_storage.
class NodeEnergy {
  public:
    NodeEnergy(EnergyParams params, const HarvestTrace* trace);

    const EnergyParams& params() const { return params_; }
    const EnergyStorage& storage() const { return storage_; }
    const EnergyLedger& ledger() const { return ledger_; }
    Time cursor() const { return cursor_; }
    double e_cap() const { return storage_.e_cap; }

    /// Runs a constant load (W at the load) from the cursor for `duration`.
    /// Returns the death time if the storage empties while the load is on;
    /// the cursor then stops at the death time.
    std::optional<Time> run(Duration duration, double load_w, Category category);

    /// Runs the load until `t` (no-op when the cursor is already past t).
    std::optional<Time> run_until(Time t, double load_w, Category category) {
        if (t <= cursor_) return std::nullopt;
        return run(t - cursor_, load_w, category);
    }

    /// Off-state advance: draws p_boot while the storage is non-empty and
    /// never reports death.
    void run_off_until(Time t);

    /// Instantaneous draw of a fixed energy at the load.
    ConsumeResult draw(Category category, double amount_at_load);

  private:
    EnergyParams params_;
    const HarvestTrace* trace_;
    EnergyStorage storage_;
    EnergyLedger ledger_;
    Time cursor_{0};
};

}  // namespace ewan::energy
