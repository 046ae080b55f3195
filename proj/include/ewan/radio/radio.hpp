#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ewan/sim/random.hpp"
#include "ewan/sim/time.hpp"

namespace ewan::radio {

enum class Modulation { lora, fsk };

std::string to_string(Modulation m);
Modulation parse_modulation(const std::string& s);

/// Transceiver configuration of one VSN (or of the bootstrapping exchange).
struct RadioConfig {
    Modulation modulation = Modulation::lora;
    int spreading_factor = 7;    ///< LoRa only, 5..12
    double datarate_bps = 0.0;   ///< FSK only
    double bandwidth_hz = 125'000.0;
    double center_frequency_hz = 868'000'000.0;
    double tx_power_dbm = 14.0;
    /// LoRa: preamble symbols; FSK: preamble bytes.
    int preamble_length = 8;
    bool has_crc = true;
    bool has_header = true;
    /// LoRa coding rate index: 1 -> 4/5 ... 4 -> 4/8.
    int coding_rate = 1;
    /// FSK sync word length in bytes.
    int sync_word_bytes = 3;
    double sensitivity_dbm = -125.0;
    /// Supply-side power while transmitting / receiving at the load (W).
    double tx_power_w = 0.0;
    double rx_power_w = 0.0;

    /// Throws std::invalid_argument when the modulation fields are inconsistent.
    void validate() const;
};

/// Table defaults for the three channels.
RadioConfig default_bootstrap_config();
RadioConfig default_single_hop_config();
RadioConfig default_multi_hop_config();

/// Nominal SX1262-class sensitivity for a configuration (dBm).
double nominal_sensitivity(const RadioConfig& config);

/// Time on air of one packet in seconds.
double time_on_air(const RadioConfig& config, int payload_bytes);
/// Same, rounded up to whole microseconds.
sim::Duration time_on_air_us(const RadioConfig& config, int payload_bytes);

inline double received_power(double tx_power_dbm, double loss_db) { return tx_power_dbm - loss_db; }

/// Linear ramp between the sensitivity and sensitivity + ramp_width.
double reception_probability(double rx_power_dbm, double sensitivity_dbm, double ramp_width_db);

/// Parameters of the probabilistic reception and capture model.
struct ReceptionModel {
    double sensitivity_dbm = -125.0;
    double ramp_width_db = 2.0;
    double capture_sigma_db = 3.0;
};

/// One transmission as seen by a listener.
struct HeardTransmission {
    int packet = 0;            ///< identical ids denote identical payloads
    double rx_power_dbm = 0.0;
};

struct CaptureOutcome {
    int packet = 0;
    double probability = 0.0;
};

/// Closed-form outcome probabilities of concurrent transmissions at one
/// listener. At most two entries; the remainder is the probability that
/// nothing is received.
std::vector<CaptureOutcome> capture_probabilities(std::span<const HeardTransmission> heard,
                                                  const ReceptionModel& model);

/// Draws the reception outcome. Throws std::invalid_argument on an empty list.
std::optional<int> resolve_concurrent(std::span<const HeardTransmission> heard, const ReceptionModel& model,
                                      sim::RandomStream& stream);

/// Symmetric n x n path-loss matrix in dB; index 0 is the host.
class LinkMatrix {
  public:
    LinkMatrix() = default;
    explicit LinkMatrix(int n, double fill_db = 0.0);

    int size() const { return n_; }
    double loss(int i, int j) const { return loss_[static_cast<std::size_t>(i * n_ + j)]; }
    void set_loss(int i, int j, double db);

    /// True when the power received from `i` at `j` is at least the sensitivity.
    bool in_range(int i, int j, double tx_power_dbm, double sensitivity_dbm) const {
        return i != j && received_power(tx_power_dbm, loss(i, j)) >= sensitivity_dbm;
    }

    /// Checks symmetry and non-negativity; throws std::invalid_argument.
    void validate() const;

    bool operator==(const LinkMatrix&) const = default;

  private:
    int n_ = 0;
    std::vector<double> loss_;
};

/// Adjacency lists of the graph induced by sensitivity.
std::vector<std::vector<int>> connectivity(const LinkMatrix& links, double tx_power_dbm, double sensitivity_dbm);

/// Hop distances from `source` (-1 when unreachable), restricted to
/// `allowed` nodes when given.
std::vector<int> bfs_depths(const std::vector<std::vector<int>>& adjacency, int source,
                            const std::vector<bool>* allowed = nullptr);

}  // namespace ewan::radio
