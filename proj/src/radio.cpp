#include "ewan/radio/radio.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ewan::radio {

std::string to_string(Modulation m) { return m == Modulation::lora ? "lora" : "fsk"; }

Modulation parse_modulation(const std::string& s) {
    if (s == "lora") return Modulation::lora;
    if (s == "fsk") return Modulation::fsk;
    throw std::invalid_argument("unknown modulation '" + s + "'");
}

void RadioConfig::validate() const {
    if (modulation == Modulation::lora) {
        if (spreading_factor < 5 || spreading_factor > 12) {
            throw std::invalid_argument("lora spreading factor must be in 5..12");
        }
        if (datarate_bps != 0.0) throw std::invalid_argument("lora config must not set a datarate");
        if (coding_rate < 1 || coding_rate > 4) throw std::invalid_argument("lora coding rate index must be 1..4");
    } else {
        if (!(datarate_bps > 0.0)) throw std::invalid_argument("fsk config needs a positive datarate");
        if (spreading_factor != 0) throw std::invalid_argument("fsk config must not set a spreading factor");
    }
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (preamble_length < 0) throw std::invalid_argument("preamble length must be non-negative");
    if (tx_power_w < 0.0 || rx_power_w < 0.0) throw std::invalid_argument("radio supply powers must be >= 0");
}

// Supply powers at the load: SX1262 at +14 dBm draws roughly 45 mA and
// about 4.5 mA in receive at 3.3 V.
constexpr double kTxPowerW = 0.149;
constexpr double kRxPowerW = 0.01485;

RadioConfig default_bootstrap_config() {
    RadioConfig c;
    c.modulation = Modulation::lora;
    c.spreading_factor = 7;
    c.bandwidth_hz = 125'000.0;
    c.center_frequency_hz = 866'312'500.0;
    c.tx_power_dbm = 14.0;
    c.preamble_length = 8;
    c.sensitivity_dbm = nominal_sensitivity(c);
    c.tx_power_w = kTxPowerW;
    c.rx_power_w = kRxPowerW;
    return c;
}

RadioConfig default_single_hop_config() {
    RadioConfig c = default_bootstrap_config();
    c.center_frequency_hz = 863'312'500.0;
    return c;
}

RadioConfig default_multi_hop_config() {
    RadioConfig c;
    c.modulation = Modulation::fsk;
    c.spreading_factor = 0;
    c.datarate_bps = 250'000.0;
    c.bandwidth_hz = 312'000.0;
    c.center_frequency_hz = 864'687'500.0;
    c.tx_power_dbm = 14.0;
    c.preamble_length = 4;
    c.sync_word_bytes = 3;
    c.sensitivity_dbm = nominal_sensitivity(c);
    c.tx_power_w = kTxPowerW;
    c.rx_power_w = kRxPowerW;
    return c;
}

double nominal_sensitivity(const RadioConfig& config) {
    if (config.modulation == Modulation::lora) {
        // -125 dBm at SF7/125 kHz, about 2.5 dB per spreading-factor step,
        // 3 dB per bandwidth doubling.
        const double bw_term = 10.0 * std::log10(config.bandwidth_hz / 125'000.0);
        return -125.0 - 2.5 * (config.spreading_factor - 7) + bw_term;
    }
    // -104 dBm at 250 kbit/s, 3 dB per datarate doubling.
    return -104.0 + 10.0 * std::log10(config.datarate_bps / 250'000.0);
}

double time_on_air(const RadioConfig& config, int payload_bytes) {
    if (payload_bytes < 0 || payload_bytes > 255) {
        throw std::invalid_argument("time_on_air: payload must be within 0..255 bytes");
    }
    if (config.modulation == Modulation::fsk) {
        const int overhead = config.preamble_length + config.sync_word_bytes + (config.has_header ? 1 : 0) +
                             (config.has_crc ? 2 : 0);
        return static_cast<double>((overhead + payload_bytes) * 8) / config.datarate_bps;
    }

    // SX126x datasheet symbol count.
    const int sf = config.spreading_factor;
    const double symbol_s = std::ldexp(1.0, sf) / config.bandwidth_hz;
    const bool ldro = symbol_s >= 16.38e-3;
    const int crc_bits = config.has_crc ? 16 : 0;
    const int header_symbols = config.has_header ? 20 : 0;
    const int cr = config.coding_rate + 4;

    double preamble_symbols = 0.0;
    int numerator = 0;
    int denominator = 0;
    if (sf <= 6) {
        preamble_symbols = config.preamble_length + 6.25;
        numerator = 8 * payload_bytes + crc_bits - 4 * sf + header_symbols;
        denominator = 4 * sf;
    } else {
        preamble_symbols = config.preamble_length + 4.25;
        numerator = 8 * payload_bytes + crc_bits - 4 * sf + 8 + header_symbols;
        denominator = ldro ? 4 * (sf - 2) : 4 * sf;
    }
    const int blocks = numerator > 0 ? (numerator + denominator - 1) / denominator : 0;
    const double symbols = preamble_symbols + 8.0 + static_cast<double>(blocks * cr);
    return symbols * symbol_s;
}

sim::Duration time_on_air_us(const RadioConfig& config, int payload_bytes) {
    return sim::ceil_micros(time_on_air(config, payload_bytes));
}

double reception_probability(double rx_power_dbm, double sensitivity_dbm, double ramp_width_db) {
    if (!(ramp_width_db > 0.0)) throw std::invalid_argument("reception_probability: ramp width must be positive");
    if (rx_power_dbm < sensitivity_dbm) return 0.0;
    const double above = rx_power_dbm - sensitivity_dbm;
    if (above >= ramp_width_db) return 1.0;
    return above / ramp_width_db;
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double capture_cdf(double delta_db, double sigma_db) {
    if (sigma_db <= 0.0) return delta_db > 0.0 ? 1.0 : (delta_db < 0.0 ? 0.0 : 0.5);
    return normal_cdf(delta_db / sigma_db);
}

}  // namespace

std::vector<CaptureOutcome> capture_probabilities(std::span<const HeardTransmission> heard,
                                                  const ReceptionModel& model) {
    if (heard.empty()) throw std::invalid_argument("resolve_concurrent: no transmissions");

    // Identical payloads combine; the strongest copy stands for its group.
    std::map<int, double> strongest;
    for (const auto& h : heard) {
        auto [it, inserted] = strongest.emplace(h.packet, h.rx_power_dbm);
        if (!inserted) it->second = std::max(it->second, h.rx_power_dbm);
    }
    std::vector<std::pair<int, double>> groups(strongest.begin(), strongest.end());
    std::stable_sort(groups.begin(), groups.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    const auto rp = [&](double p) { return reception_probability(p, model.sensitivity_dbm, model.ramp_width_db); };
    const auto [lead_packet, lead_power] = groups.front();
    if (groups.size() == 1) return {{lead_packet, rp(lead_power)}};

    double rest_mw = 0.0;
    for (const auto& h : heard) {
        if (h.packet != lead_packet) rest_mw += std::pow(10.0, h.rx_power_dbm / 10.0);
    }
    const double rest_dbm = 10.0 * std::log10(rest_mw);
    const double lead_wins = capture_cdf(lead_power - rest_dbm, model.capture_sigma_db);

    std::vector<CaptureOutcome> out{{lead_packet, lead_wins * rp(lead_power)}};
    // The weaker side is only decodable when it is a single payload.
    if (groups.size() == 2) out.push_back({groups[1].first, (1.0 - lead_wins) * rp(groups[1].second)});
    return out;
}

std::optional<int> resolve_concurrent(std::span<const HeardTransmission> heard, const ReceptionModel& model,
                                      sim::RandomStream& stream) {
    const auto outcomes = capture_probabilities(heard, model);
    const double u = stream.next_unit();
    double acc = 0.0;
    for (const auto& o : outcomes) {
        acc += o.probability;
        if (u < acc) return o.packet;
    }
    return std::nullopt;
}

LinkMatrix::LinkMatrix(int n, double fill_db) : n_(n), loss_(static_cast<std::size_t>(n * n), fill_db) {
    if (n < 0) throw std::invalid_argument("LinkMatrix: negative size");
    for (int i = 0; i < n; ++i) loss_[static_cast<std::size_t>(i * n + i)] = 0.0;
}

void LinkMatrix::set_loss(int i, int j, double db) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("LinkMatrix: index out of range");
    loss_[static_cast<std::size_t>(i * n_ + j)] = db;
    loss_[static_cast<std::size_t>(j * n_ + i)] = db;
}

void LinkMatrix::validate() const {
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if (i == j) continue;
            if (loss(i, j) < 0.0) throw std::invalid_argument("path loss must be >= 0 dB");
            if (loss(i, j) != loss(j, i)) throw std::invalid_argument("path-loss matrix must be symmetric");
        }
    }
}

std::vector<std::vector<int>> connectivity(const LinkMatrix& links, double tx_power_dbm, double sensitivity_dbm) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(links.size()));
    for (int i = 0; i < links.size(); ++i) {
        for (int j = 0; j < links.size(); ++j) {
            if (links.in_range(i, j, tx_power_dbm, sensitivity_dbm)) adj[static_cast<std::size_t>(i)].push_back(j);
        }
    }
    return adj;
}

std::vector<int> bfs_depths(const std::vector<std::vector<int>>& adjacency, int source,
                            const std::vector<bool>* allowed) {
    std::vector<int> depth(adjacency.size(), -1);
    std::vector<int> frontier{source};
    depth[static_cast<std::size_t>(source)] = 0;
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int u : frontier) {
            for (int v : adjacency[static_cast<std::size_t>(u)]) {
                const auto vi = static_cast<std::size_t>(v);
                if (depth[vi] >= 0) continue;
                if (allowed && !(*allowed)[vi]) continue;
                depth[vi] = depth[static_cast<std::size_t>(u)] + 1;
                next.push_back(v);
            }
        }
        frontier = std::move(next);
    }
    return depth;
}

}  // namespace ewan::radio
