#include "ewan/scenario/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ewan::scenario {

namespace {

constexpr int kPaperNodes = 15;
constexpr int kMaxLayoutAttempts = 1000;
/// Intended short-range edge when two nodes are at most this far apart.
constexpr double kEdgeRangeM = 320.0;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

using Layout = std::vector<std::array<double, 2>>;

double distance(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

Topology links_from_layout(const Layout& pos) {
    const int n = static_cast<int>(pos.size());
    Topology t{radio::LinkMatrix(n), radio::LinkMatrix(n), {}, pos};
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = distance(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]);
            const double pl = path_loss_db(d);
            t.links_short.set_loss(i, j, d <= kEdgeRangeM ? std::min(pl, kEdgeLossDb) : std::max(pl, kNonEdgeLossDb));
            t.links_long.set_loss(i, j, i == 0 ? std::min(pl, kLongLossCapDb) : pl);
        }
    }
    return t;
}

std::array<double, 2> jitter(sim::RandomStream& s, double x, double y, double amount) {
    return {x + s.uniform(-amount, amount), y + s.uniform(-amount, amount)};
}

Layout layout_ob(sim::RandomStream& s) {
    Layout pos{{0.0, 0.0}};
    for (int i = 0; i < kPaperNodes; ++i) pos.push_back({s.uniform(-350.0, 350.0), s.uniform(-350.0, 350.0)});
    return pos;
}

Layout layout_fh(sim::RandomStream& s) {
    // Five first-hop nodes on an inner ring, two second-hop nodes behind each.
    Layout pos{{0.0, 0.0}};
    const double step = 2.0 * std::numbers::pi / 5.0;
    for (int k = 0; k < 5; ++k) {
        const double a = k * step;
        pos.push_back(jitter(s, 200.0 * std::cos(a), 200.0 * std::sin(a), 15.0));
    }
    const double spread = 18.0 * std::numbers::pi / 180.0;
    for (int k = 0; k < 5; ++k) {
        for (double side : {-1.0, 1.0}) {
            const double a = k * step + side * spread;
            pos.push_back(jitter(s, 420.0 * std::cos(a), 420.0 * std::sin(a), 15.0));
        }
    }
    return pos;
}

Layout layout_bn(sim::RandomStream& s) {
    // Host at the edge of a dense cluster reached through two nodes.
    Layout pos{{0.0, 0.0}, jitter(s, 250.0, -100.0, 10.0), jitter(s, 250.0, 100.0, 10.0)};
    while (static_cast<int>(pos.size()) <= kPaperNodes) {
        const std::array<double, 2> p{s.uniform(340.0, 560.0), s.uniform(-260.0, 260.0)};
        if (distance(p, pos[0]) > kEdgeRangeM + 10.0) pos.push_back(p);
    }
    return pos;
}

Layout layout_mh(sim::RandomStream& s) {
    // Five layers of three nodes, 250 m apart.
    Layout pos{{0.0, 0.0}};
    for (int layer = 1; layer <= 5; ++layer) {
        for (double y : {-150.0, 0.0, 150.0}) pos.push_back(jitter(s, 250.0 * layer, y, 20.0));
    }
    return pos;
}

}  // namespace

double path_loss_db(double distance_m) { return 40.0 + 30.0 * std::log10(std::max(distance_m, 1.0)); }

Topology generate_topology(TopologyKind kind, sim::RandomStream& stream) {
    const auto config = radio::default_multi_hop_config();
    for (int attempt = 0; attempt < kMaxLayoutAttempts; ++attempt) {
        Layout pos;
        std::vector<int> bottleneck;
        switch (kind) {
            case TopologyKind::ob: pos = layout_ob(stream); break;
            case TopologyKind::fh: pos = layout_fh(stream); break;
            case TopologyKind::mh: pos = layout_mh(stream); break;
            case TopologyKind::bn:
                pos = layout_bn(stream);
                bottleneck = {1, 2};
                break;
            case TopologyKind::custom:
                throw std::invalid_argument("custom topologies are not generated");
        }
        Topology t = links_from_layout(pos);
        t.bottleneck_nodes = bottleneck;
        if (!check_topology_contract(kind, t.links_short, config, t.bottleneck_nodes)) return t;
    }
    throw std::runtime_error("no layout satisfying the " + to_string(kind) + " contract found");
}

void TraceGenParams::validate() const {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    if (!(e_avg_min >= 0.0 && e_avg_min <= e_avg_max)) throw std::invalid_argument("bad daily energy range");
    if (!(start_min_h <= start_max_h && end_min_h <= end_max_h && start_max_h < end_min_h)) {
        throw std::invalid_argument("harvest windows must satisfy start < end");
    }
    if (start_min_h < 0.0 || end_max_h > 24.0) throw std::invalid_argument("harvest windows must lie within a day");
    if (noise_sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
    if (days < 1) throw std::invalid_argument("days must be >= 1");
    if (resolution <= Duration::zero() || sim::seconds(3600) % resolution != Duration::zero()) {
        throw std::invalid_argument("trace resolution must divide one hour");
    }
}

std::vector<std::vector<DayShape>> draw_day_shapes(const TraceGenParams& params, int n_nodes,
                                                   sim::RandomStream& stream) {
    params.validate();
    std::vector<std::vector<DayShape>> out(static_cast<std::size_t>(n_nodes),
                                           std::vector<DayShape>(static_cast<std::size_t>(params.days)));
    const double a = std::sqrt(params.rho);
    const double b = std::sqrt(1.0 - params.rho);
    std::vector<double> u(static_cast<std::size_t>(n_nodes));
    const auto correlated = [&]() {
        const double common = stream.gaussian(0.0, 1.0);
        for (auto& v : u) v = normal_cdf(a * common + b * stream.gaussian(0.0, 1.0));
    };
    for (int d = 0; d < params.days; ++d) {
        const auto day = static_cast<std::size_t>(d);
        correlated();
        for (std::size_t i = 0; i < u.size(); ++i) {
            out[i][day].e_avg = params.e_avg_min + u[i] * (params.e_avg_max - params.e_avg_min);
        }
        correlated();
        for (std::size_t i = 0; i < u.size(); ++i) {
            out[i][day].start_h = params.start_min_h + u[i] * (params.start_max_h - params.start_min_h);
        }
        correlated();
        for (std::size_t i = 0; i < u.size(); ++i) {
            out[i][day].end_h = params.end_min_h + u[i] * (params.end_max_h - params.end_min_h);
        }
    }
    return out;
}

energy::HarvestTrace render_trace(const std::vector<DayShape>& days, double noise_sigma, Duration resolution,
                                  sim::RandomStream& noise) {
    const double res_s = sim::to_seconds(resolution);
    const auto per_hour = static_cast<std::size_t>(3600.0 / res_s + 0.5);
    std::vector<double> power;
    power.reserve(days.size() * 24 * per_hour);
    for (const auto& day : days) {
        if (!(day.start_h < day.end_h)) throw std::invalid_argument("day shape needs start < end");
        const double start = day.start_h * 3600.0;
        const double end = day.end_h * 3600.0;
        const double level = day.e_avg / (end - start);
        for (int hour = 0; hour < 24; ++hour) {
            const double factor = std::max(0.0, 1.0 + noise.gaussian(0.0, noise_sigma));
            for (std::size_t k = 0; k < per_hour; ++k) {
                const double t0 = hour * 3600.0 + static_cast<double>(k) * res_s;
                const double overlap = std::max(0.0, std::min(t0 + res_s, end) - std::max(t0, start));
                power.push_back(level * factor * overlap / res_s);
            }
        }
    }
    return energy::HarvestTrace(resolution, std::move(power));
}

std::vector<energy::HarvestTrace> generate_traces(const TraceGenParams& params, int n_nodes,
                                                  sim::RandomStream& stream) {
    const auto shapes = draw_day_shapes(params, n_nodes, stream);
    std::vector<energy::HarvestTrace> out;
    for (int i = 0; i < n_nodes; ++i) {
        auto noise = stream.split("noise/" + std::to_string(i + 1));
        out.push_back(render_trace(shapes[static_cast<std::size_t>(i)], params.noise_sigma, params.resolution, noise));
    }
    return out;
}

std::vector<energy::HarvestTrace> special_mh_traces(const TraceGenParams& params, const std::vector<int>& depths,
                                                    sim::RandomStream& stream, double energy_factor, double widen_h) {
    const int n = static_cast<int>(depths.size()) - 1;
    auto shapes = draw_day_shapes(params, n, stream);
    std::vector<energy::HarvestTrace> out;
    for (int i = 1; i <= n; ++i) {
        auto& days = shapes[static_cast<std::size_t>(i - 1)];
        if (depths[static_cast<std::size_t>(i)] > 1) {
            for (auto& d : days) {
                d.e_avg *= energy_factor;
                d.start_h = std::max(0.0, d.start_h - widen_h);
                d.end_h = std::min(24.0, d.end_h + widen_h);
            }
        }
        auto noise = stream.split("noise/" + std::to_string(i));
        out.push_back(render_trace(days, params.noise_sigma, params.resolution, noise));
    }
    return out;
}

void regenerate_traces(Scenario& s, std::uint64_t seed) {
    if (!s.generate) throw std::invalid_argument("scenario has no generation settings");
    TraceGenParams params;
    params.rho = s.generate->rho;
    params.days = s.generate->days;
    sim::RandomStream stream(seed, "traces");
    s.traces = s.generate->special_mh_traces ? special_mh_traces(params, short_range_depths(s), stream)
                                             : generate_traces(params, s.n_nodes, stream);
}

Scenario make_scenario(const GenerateSpec& spec, std::uint64_t trace_seed) {
    sim::RandomStream topo_stream(spec.topology_seed, "topology");
    Topology topo = generate_topology(spec.kind, topo_stream);
    Scenario s;
    s.kind = spec.kind;
    s.name = to_string(spec.kind) + (spec.special_mh_traces ? "_special" : "");
    s.n_nodes = kPaperNodes;
    s.links_short = std::move(topo.links_short);
    s.links_long = std::move(topo.links_long);
    s.bottleneck_nodes = std::move(topo.bottleneck_nodes);
    s.horizon = sim::seconds(static_cast<std::int64_t>(spec.days) * 24 * 3600);
    s.generate = spec;
    // Every protocol gets the large evaluation storage.
    s.energy.capacitance *= s.protocol.large_capacity / s.energy.capacity;
    s.energy.capacity = s.protocol.large_capacity;
    regenerate_traces(s, trace_seed);
    validate(s);
    return s;
}

namespace {

/// Office lighting: flat plateaus with a slight flicker.
double artificial_light(double h, double level) {
    const bool on = (h >= 0.8 && h < 4.2) || (h >= 6.6 && h < 10.6);
    if (!on) return 0.0;
    return level * (1.0 + 0.05 * std::sin(h * 7.0));
}

/// Daylight: two smooth bumps.
double natural_light(double h, double level) {
    const auto bump = [](double x, double c, double w) { return std::exp(-0.5 * (x - c) * (x - c) / (w * w)); };
    return level * (bump(h, 2.2, 1.1) + 0.75 * bump(h, 8.6, 1.3));
}

}  // namespace

Scenario make_replay_scenario() {
    Scenario s;
    s.name = "replay";
    s.kind = TopologyKind::custom;
    s.n_nodes = 2;
    s.horizon = sim::seconds(12 * 3600);
    s.protocol.period = sim::seconds(180);

    // host - node 1 - node 2 on the short range; both reach the host directly
    // on the long range.
    s.links_short = radio::LinkMatrix(3);
    s.links_short.set_loss(0, 1, 80.0);
    s.links_short.set_loss(1, 2, 84.0);
    s.links_short.set_loss(0, 2, 125.0);
    s.links_long = radio::LinkMatrix(3);
    s.links_long.set_loss(0, 1, 84.0);
    s.links_long.set_loss(0, 2, 95.0);
    s.links_long.set_loss(1, 2, 90.0);

    s.energy.charge_efficiency = 0.85;

    const int samples = 12 * 60;
    std::vector<double> p1(samples), p2(samples);
    for (int k = 0; k < samples; ++k) {
        const double h = (k + 0.5) / 60.0;
        p1[static_cast<std::size_t>(k)] = artificial_light(h, 210e-6);
        p2[static_cast<std::size_t>(k)] = natural_light(h, 330e-6);
    }
    s.traces = {energy::HarvestTrace(sim::seconds(60), std::move(p1)),
                energy::HarvestTrace(sim::seconds(60), std::move(p2))};
    validate(s);
    return s;
}

}  // namespace ewan::scenario
