#pragma once

#include <utility>
#include <vector>

#include "ewan/scenario/scenario.hpp"

namespace ewan::test {

using Edge = std::pair<int, int>;

/// Loss 0 dB on the listed edges and 200 dB elsewhere.
inline radio::LinkMatrix lossless_links(int n_nodes, const std::vector<Edge>& edges) {
    radio::LinkMatrix m(n_nodes + 1, 200.0);
    for (auto [a, b] : edges) m.set_loss(a, b, 0.0);
    return m;
}

/// Host - 1 - 2 - ... - n.
inline std::vector<Edge> chain_edges(int n_nodes) {
    std::vector<Edge> e;
    for (int i = 0; i < n_nodes; ++i) e.emplace_back(i, i + 1);
    return e;
}

/// Custom scenario with lossless short links, strong long-range links to the
/// host and constant harvest.
inline scenario::Scenario lossless_scenario(int n_nodes, const std::vector<Edge>& edges, sim::Duration horizon,
                                            double harvest_w = 5e-3) {
    scenario::Scenario s;
    s.name = "lossless";
    s.n_nodes = n_nodes;
    s.links_short = lossless_links(n_nodes, edges);
    s.links_long = radio::LinkMatrix(n_nodes + 1, 80.0);
    const auto res = sim::seconds(60);
    const auto samples = static_cast<std::size_t>(horizon / res + 1);
    for (int i = 0; i < n_nodes; ++i) s.traces.emplace_back(res, std::vector<double>(samples, harvest_w));
    s.horizon = horizon;
    return s;
}

}  // namespace ewan::test
