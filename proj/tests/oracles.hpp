#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

namespace ewan::test {

// Semtech AN1200.13 time-on-air, extended with the SX126x rule for SF5/6
// (two extra preamble symbols, no 8-bit header offset).
inline double oracle_lora_toa(int sf, double bw, int payload, int preamble, bool crc, bool header, int cr) {
    const double tsym = std::pow(2.0, sf) / bw;
    const int de = tsym * 1000.0 > 16.0 ? 1 : 0;
    const int ih = header ? 0 : 1;
    double t_preamble = (preamble + 4.25) * tsym;
    double num = 8.0 * payload - 4.0 * sf + 28.0 + 16.0 * (crc ? 1 : 0) - 20.0 * ih;
    if (sf < 7) {
        t_preamble = (preamble + 6.25) * tsym;
        num -= 8.0;
    }
    const double n_payload = 8.0 + std::max(std::ceil(num / (4.0 * (sf - 2.0 * de))) * (cr + 4), 0.0);
    return t_preamble + n_payload * tsym;
}

inline double phi(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

/// Hop counts from `source`, -1 when unreachable.
inline std::vector<int> bfs(const std::vector<std::vector<int>>& adj, int source) {
    std::vector<int> depth(adj.size(), -1);
    std::deque<int> q{source};
    depth[static_cast<std::size_t>(source)] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (depth[static_cast<std::size_t>(v)] < 0) {
                depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
                q.push_back(v);
            }
        }
    }
    return depth;
}

}  // namespace ewan::test
