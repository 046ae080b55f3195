#include "ewan/scenario/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "ewan/protocol/timing.hpp"

namespace ewan::scenario {

std::string to_string(TopologyKind k) {
    switch (k) {
        case TopologyKind::ob: return "ob";
        case TopologyKind::bn: return "bn";
        case TopologyKind::fh: return "fh";
        case TopologyKind::mh: return "mh";
        case TopologyKind::custom: return "custom";
    }
    return "?";
}

TopologyKind parse_topology(const std::string& s) {
    if (s == "ob") return TopologyKind::ob;
    if (s == "bn") return TopologyKind::bn;
    if (s == "fh") return TopologyKind::fh;
    if (s == "mh") return TopologyKind::mh;
    if (s == "custom") return TopologyKind::custom;
    throw std::invalid_argument("unknown topology kind '" + s + "' (expected ob, bn, fh, mh or custom)");
}

Duration max_mh_round(const Scenario& s) {
    return protocol::mh_round_timing(s.multi_hop, s.flood_shape(), s.protocol, s.protocol.max_slots_mh).total();
}

Duration max_sh_round(const Scenario& s) {
    return protocol::sh_round_timing(s.single_hop, s.protocol, s.protocol.max_slots_sh).total();
}

namespace {

void fail(const std::string& what) { throw std::invalid_argument("scenario invalid: " + what); }

}  // namespace

std::vector<int> short_range_depths(const Scenario& s) {
    const auto adj = radio::connectivity(s.links_short, s.multi_hop.tx_power_dbm, s.multi_hop.sensitivity_dbm);
    return radio::bfs_depths(adj, 0);
}

std::optional<std::string> check_topology_contract(TopologyKind kind, const radio::LinkMatrix& short_links,
                                                   const radio::RadioConfig& short_config,
                                                   const std::vector<int>& bottleneck_nodes) {
    const auto adj = radio::connectivity(short_links, short_config.tx_power_dbm, short_config.sensitivity_dbm);
    const auto depth = radio::bfs_depths(adj, 0);
    const int n = short_links.size() - 1;
    const auto deepest = *std::max_element(depth.begin(), depth.end());
    const bool connected = std::none_of(depth.begin(), depth.end(), [](int d) { return d < 0; });
    const auto adjacent = std::count(depth.begin(), depth.end(), 1);

    switch (kind) {
        case TopologyKind::custom:
            return std::nullopt;
        case TopologyKind::ob:
            if (!connected) return "ob: short-range graph is not connected";
            if (adjacent * 3 < n * 2) return "ob: fewer than two thirds of the nodes are host-adjacent";
            return std::nullopt;
        case TopologyKind::fh:
            if (!connected) return "fh: short-range graph is not connected";
            if (deepest > 2) return "fh: a node is more than two hops from the host";
            return std::nullopt;
        case TopologyKind::mh:
            if (!connected) return "mh: short-range graph is not connected";
            if (deepest != 5) return "mh: host eccentricity is " + std::to_string(deepest) + ", expected 5";
            return std::nullopt;
        case TopologyKind::bn: {
            if (!connected) return "bn: short-range graph is not connected";
            if (bottleneck_nodes.size() != 2) return "bn: exactly two bottleneck nodes must be designated";
            std::vector<bool> allowed(static_cast<std::size_t>(n + 1), true);
            for (int b : bottleneck_nodes) {
                if (b < 1 || b > n) return "bn: bottleneck node index out of range";
                allowed[static_cast<std::size_t>(b)] = false;
            }
            const auto cut = radio::bfs_depths(adj, 0, &allowed);
            for (int i = 1; i <= n; ++i) {
                if (allowed[static_cast<std::size_t>(i)] && cut[static_cast<std::size_t>(i)] >= 0) {
                    return "bn: node " + std::to_string(i) + " reaches the host without the bottleneck nodes";
                }
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

void validate(const Scenario& s) {
    if (s.n_nodes < 1) fail("need at least one energy harvesting node");
    const int n = s.n_nodes + 1;
    if (s.links_short.size() != n || s.links_long.size() != n) fail("link matrices must be (n_nodes + 1) square");
    try {
        s.links_short.validate();
        s.links_long.validate();
        s.bootstrap.validate();
        s.single_hop.validate();
        s.multi_hop.validate();
        s.protocol.validate();
        s.energy.validate();
        for (const auto& e : s.node_energy) e.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    if (s.bootstrap.center_frequency_hz == s.single_hop.center_frequency_hz ||
        s.bootstrap.center_frequency_hz == s.multi_hop.center_frequency_hz ||
        s.single_hop.center_frequency_hz == s.multi_hop.center_frequency_hz) {
        fail("the three channels must use distinct center frequencies");
    }
    if (!(s.ramp_width_db > 0.0)) fail("reception ramp width must be positive");
    if (s.capture_sigma_db < 0.0) fail("capture sigma must be >= 0");
    if (s.horizon <= Duration::zero()) fail("horizon must be positive");
    if (!s.node_energy.empty() && static_cast<int>(s.node_energy.size()) != s.n_nodes) {
        fail("per-node energy parameters must cover every node");
    }
    if (static_cast<int>(s.traces.size()) != s.n_nodes) fail("every node needs a harvest trace");
    for (int i = 0; i < s.n_nodes; ++i) {
        if (s.traces[static_cast<std::size_t>(i)].span() < s.horizon) {
            fail("harvest trace of node " + std::to_string(i + 1) + " does not cover the horizon");
        }
    }
    for (int i = 1; i < n; ++i) {
        const double rx = radio::received_power(s.bootstrap.tx_power_dbm, s.links_long.loss(i, 0));
        if (rx < s.bootstrap.sensitivity_dbm || rx < s.single_hop.sensitivity_dbm) {
            fail("long-range link: node " + std::to_string(i) + " has no direct long-range link to the host");
        }
    }
    const Duration mh = max_mh_round(s);
    const Duration sh = max_sh_round(s);
    if (mh >= s.protocol.delta) {
        fail("delta T too small: a full multi-hop round lasts " + std::to_string(mh.count()) + " us");
    }
    if (s.protocol.delta + sh >= s.protocol.period) {
        fail("period too small: a full single-hop round does not end before the next multi-hop round");
    }
    if (auto violation = check_topology_contract(s.kind, s.links_short, s.multi_hop, s.bottleneck_nodes)) {
        fail("topology contract violated: " + *violation);
    }
}

}  // namespace ewan::scenario
