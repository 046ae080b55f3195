#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ewan/energy/energy.hpp"
#include "ewan/protocol/params.hpp"
#include "ewan/radio/flood.hpp"
#include "ewan/radio/radio.hpp"

namespace ewan::scenario {

using sim::Duration;
using sim::Time;

enum class TopologyKind { ob, bn, fh, mh, custom };

std::string to_string(TopologyKind k);
TopologyKind parse_topology(const std::string& s);

/// Settings a campaign uses to regenerate traces for every run.
struct GenerateSpec {
    TopologyKind kind = TopologyKind::mh;
    double rho = 0.0;
    int days = 7;
    bool special_mh_traces = false;
    std::uint64_t topology_seed = 1;
    bool operator==(const GenerateSpec&) const = default;
};

struct Scenario {
    std::string name = "scenario";
    TopologyKind kind = TopologyKind::custom;
    /// Energy harvesting nodes; the host is index 0 of the link matrices.
    int n_nodes = 0;
    radio::LinkMatrix links_short;
    radio::LinkMatrix links_long;
    radio::RadioConfig bootstrap = radio::default_bootstrap_config();
    radio::RadioConfig single_hop = radio::default_single_hop_config();
    radio::RadioConfig multi_hop = radio::default_multi_hop_config();
    double ramp_width_db = 2.0;
    double capture_sigma_db = 3.0;
    protocol::ProtocolParams protocol;
    energy::EnergyParams energy;
    /// Per-node parameters (index i - 1 for node i); empty means `energy`.
    std::vector<energy::EnergyParams> node_energy;
    /// Harvest trace of node i at index i - 1.
    std::vector<energy::HarvestTrace> traces;
    Duration horizon = sim::seconds(7 * 24 * 3600);
    /// Hop-1 designation for bottleneck scenarios (checked by `verify`).
    std::vector<int> bottleneck_nodes;
    std::optional<GenerateSpec> generate;

    const energy::EnergyParams& energy_of(int node) const {
        return node_energy.empty() ? energy : node_energy.at(static_cast<std::size_t>(node - 1));
    }
    radio::FloodShape flood_shape() const {
        return {protocol.flood_hops, protocol.flood_retx, protocol.flood_guard};
    }
};

/// Longest multi-hop and single-hop round the parameters allow.
Duration max_mh_round(const Scenario& s);
Duration max_sh_round(const Scenario& s);

/// Checks every load-time invariant; throws std::invalid_argument naming the
/// violated constraint.
void validate(const Scenario& s);

/// Hop distances from the host over the short-range graph.
std::vector<int> short_range_depths(const Scenario& s);

/// Structural contract of a topology kind on the short-range graph. Returns
/// a description of the violation, or nothing when the contract holds.
std::optional<std::string> check_topology_contract(TopologyKind kind, const radio::LinkMatrix& short_links,
                                                   const radio::RadioConfig& short_config,
                                                   const std::vector<int>& bottleneck_nodes);

}  // namespace ewan::scenario
