// Acceptance checks. Prints one line per criterion and exits non-zero when
// a criterion fails that was not named with --allow N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ewan/energy/energy.hpp"
#include "ewan/metrics/metrics.hpp"
#include "ewan/protocol/simulation.hpp"
#include "ewan/radio/flood.hpp"
#include "ewan/radio/radio.hpp"
#include "ewan/scenario/generate.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace ewan;
using protocol::ProtocolKind;
using protocol::Vsn;
using sim::Duration;
using sim::seconds;
using sim::Time;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double secs(Time t) { return sim::to_seconds(t); }

/// VSN of `node` just before `t`, from the transition log.
Vsn state_before(const protocol::RunLog& log, int node, Time t) {
    Vsn v = Vsn::off;
    for (const auto& tr : log.transitions) {
        if (tr.time >= t) break;
        if (tr.node == node) v = tr.to;
    }
    return v;
}

const protocol::RoundNodeRecord* find_node(const protocol::RoundRecord& r, int node) {
    for (const auto& n : r.nodes) {
        if (n.node == node) return &n;
    }
    return nullptr;
}

std::vector<std::vector<int>> adjacency(int n_nodes, const std::vector<test::Edge>& edges) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_nodes + 1));
    for (auto [a, b] : edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    return adj;
}

/// Random connected graph, host included, with hop depth at most `max_depth`.
std::vector<test::Edge> random_graph(int n_nodes, int max_depth, double extra, sim::RandomStream& rs) {
    std::vector<test::Edge> edges;
    std::vector<int> depth{0};
    for (int i = 1; i <= n_nodes; ++i) {
        int parent = 0;
        do {
            parent = static_cast<int>(rs.below(static_cast<std::uint64_t>(i)));
        } while (depth[static_cast<std::size_t>(parent)] >= max_depth);
        edges.emplace_back(parent, i);
        depth.push_back(depth[static_cast<std::size_t>(parent)] + 1);
    }
    for (int a = 1; a <= n_nodes; ++a) {
        for (int b = a + 1; b <= n_nodes; ++b) {
            if (rs.next_unit() < extra) edges.emplace_back(a, b);
        }
    }
    return edges;
}

// ---------------------------------------------------------------------------

Outcome fallback_timing() {
    const auto t_cut = seconds(3600);
    auto s = test::lossless_scenario(2, test::chain_edges(2), seconds(3 * 3600));
    protocol::SimOptions opt;
    opt.unlimited_energy = true;
    opt.link_changes.push_back({t_cut - seconds(10), test::lossless_links(2, {{0, 1}})});
    const auto wall = std::chrono::steady_clock::now();
    const auto log = protocol::simulate(s, ProtocolKind::ewan, 1, opt);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall).count();
    if (state_before(log, 2, t_cut) != Vsn::multi_hop) return {false, "node 2 not multi-hop before the cut"};
    const auto& pp = s.protocol;
    const Time expect = t_cut + pp.period * pp.p + pp.delta;
    for (const auto& r : log.rounds) {
        if (r.vsn != Vsn::single_hop) continue;
        const auto* n = find_node(r, 2);
        if (!n || n->attempted == 0) continue;
        return {r.start == expect && elapsed < 1.0,
                fmt("first single-hop data at t%+.3f s (expected t%+.3f s), %.3f s wall", secs(r.start - t_cut),
                    secs(expect - t_cut), elapsed)};
    }
    return {false, "node 2 never transmitted on the single-hop network"};
}

Outcome single_hop_recovery() {
    std::string detail;
    bool pass = true;
    for (int offset : {0, 1, 2, 3}) {
        const Time t = seconds(7200 + 300 * offset);
        auto s = test::lossless_scenario(4, {{0, 1}}, seconds(4 * 3600));
        protocol::SimOptions opt;
        opt.unlimited_energy = true;
        opt.link_changes.push_back({t - seconds(10), test::lossless_links(4, {{0, 1}, {1, 2}, {1, 3}, {1, 4}})});
        const auto log = protocol::simulate(s, ProtocolKind::ewan, 11 + static_cast<std::uint64_t>(offset), opt);
        std::set<std::int64_t> join_rounds;
        bool ok = true;
        for (int node = 2; node <= 4; ++node) {
            if (state_before(log, node, t) != Vsn::single_hop) ok = false;
            for (const auto& tr : log.transitions) {
                if (tr.node == node && tr.time >= t && tr.to == Vsn::multi_hop) {
                    join_rounds.insert((tr.time - t) / s.protocol.period);
                    break;
                }
            }
        }
        // Round offset from t at which each node joined.
        const bool same = join_rounds.size() == 1;
        const std::int64_t k = same ? *join_rounds.begin() : -1;
        ok = ok && same && k >= 0 && k <= 1;
        pass = pass && ok;
        detail += fmt("%s t=%ds: joined at round t+%lld; ", ok ? "ok" : "bad", 7200 + 300 * offset,
                      static_cast<long long>(k));
    }
    return {pass, detail};
}

Outcome bootstrap_convergence() {
    sim::RandomStream rs(31, "bootstrap_graphs");
    bool pass = true;
    double worst_margin = 1e18;
    double worst_wall = 0;
    int graphs = 5;
    for (int g = 0; g < graphs; ++g) {
        const int n = 15;
        const auto edges = random_graph(n, 5, 0.08, rs);
        auto s = test::lossless_scenario(n, edges, seconds(11 * 3600));
        protocol::SimOptions opt;
        opt.unlimited_energy = true;
        const auto wall = std::chrono::steady_clock::now();
        const auto log = protocol::simulate(s, ProtocolKind::ewan, 100 + static_cast<std::uint64_t>(g), opt);
        worst_wall = std::max(
            worst_wall, std::chrono::duration<double>(std::chrono::steady_clock::now() - wall).count());
        // Latency of the network's bootstrap: every node has entered a VSN.
        Time boot_done{0};
        for (int i = 1; i <= n; ++i) {
            for (const auto& tr : log.transitions) {
                if (tr.node == i && (tr.to == Vsn::multi_hop || tr.to == Vsn::single_hop)) {
                    boot_done = std::max(boot_done, tr.time);
                    break;
                }
            }
        }
        const Time deadline = boot_done + s.protocol.period * s.protocol.m;
        Time all_in{0};
        for (int i = 1; i <= n; ++i) {
            std::optional<Time> joined;
            for (const auto& tr : log.transitions) {
                if (tr.node != i) continue;
                if (!joined && tr.to == Vsn::multi_hop) joined = tr.time;
                if (joined && tr.from == Vsn::multi_hop) pass = false;  // left again
            }
            if (!joined) {
                pass = false;
                continue;
            }
            all_in = std::max(all_in, *joined);
        }
        worst_margin = std::min(worst_margin, secs(deadline - all_in));
        if (all_in > deadline) pass = false;
        int rounds_after = 0;
        for (const auto& r : log.rounds) rounds_after += r.vsn == Vsn::multi_hop && r.start > all_in;
        if (rounds_after < 100) pass = false;
    }
    pass = pass && worst_wall < 5.0;
    return {pass, fmt("%d graphs; all nodes multi-hop with >= %.0f s to spare, none left; slowest run %.2f s", graphs,
                      worst_margin, worst_wall)};
}

Outcome safety_liveness_properties() {
    sim::RandomStream rs(57, "property_trials");
    const int trials = 1000;
    int reach_violations = 0, join_violations = 0, exit_violations = 0, consistency = 0;
    long sampled = 0, exits = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const int n = 3 + static_cast<int>(rs.below(6));
        const auto edges = random_graph(n, 5, 0.2, rs);
        const auto adj = adjacency(n, edges);
        auto s = test::lossless_scenario(n, edges, seconds(5 * 3600));
        protocol::SimOptions opt;
        opt.unlimited_energy = true;
        for (int i = 1; i <= n; ++i) {
            const int k = static_cast<int>(rs.below(3));
            for (int j = 0; j < k; ++j) {
                const auto from = seconds(static_cast<std::int64_t>(rs.uniform(0, 4.5 * 3600)));
                const auto len = seconds(static_cast<std::int64_t>(rs.uniform(300, 3600)));
                opt.forced_off.push_back({i, from, from + len});
            }
        }
        const auto log = protocol::simulate(s, ProtocolKind::ewan, 1000 + static_cast<std::uint64_t>(trial), opt);
        const auto& pp = s.protocol;

        std::vector<const protocol::RoundRecord*> mh;
        for (const auto& r : log.rounds) {
            if (r.vsn == Vsn::multi_hop) mh.push_back(&r);
        }
        // Reachability over the round's participants plus the node itself.
        const auto reachable = [&](const protocol::RoundRecord& r, int x) {
            std::vector<bool> allowed(static_cast<std::size_t>(n + 1), false);
            allowed[0] = true;
            allowed[static_cast<std::size_t>(x)] = true;
            for (const auto& rn : r.nodes) {
                if (rn.participated) allowed[static_cast<std::size_t>(rn.node)] = true;
            }
            std::vector<bool> seen(allowed.size(), false);
            std::vector<int> stack{0};
            seen[0] = true;
            while (!stack.empty()) {
                const int u = stack.back();
                stack.pop_back();
                for (int v : adj[static_cast<std::size_t>(u)]) {
                    const auto vi = static_cast<std::size_t>(v);
                    if (allowed[vi] && !seen[vi]) {
                        seen[vi] = true;
                        stack.push_back(v);
                    }
                }
            }
            return static_cast<bool>(seen[static_cast<std::size_t>(x)]);
        };

        for (int x = 1; x <= n; ++x) {
            int streak = 0;
            for (const auto* r : mh) {
                const Vsn before = state_before(log, x, r->start);
                const auto* rec = find_node(*r, x);
                if (before == Vsn::single_hop && reachable(*r, x)) {
                    if (++streak > pp.m) ++reach_violations;
                } else {
                    streak = 0;
                }
                if (rec && rec->participated && !reachable(*r, x)) ++consistency;
                if (before == Vsn::single_hop && rec && rec->received_schedule) {
                    ++sampled;
                    for (const auto& tr : log.transitions) {
                        if (tr.node != x || tr.time < r->start) continue;
                        if (tr.cause == protocol::NodeEvent::shutdown) break;
                        if (tr.to != Vsn::multi_hop || tr.time >= r->start + pp.period) ++join_violations;
                        break;
                    }
                }
            }
            for (const auto& tr : log.transitions) {
                if (tr.node != x || tr.from != Vsn::multi_hop) continue;
                ++exits;
                using protocol::NodeEvent;
                if (tr.cause == NodeEvent::energy_depleted || tr.cause == NodeEvent::shutdown) continue;
                if (tr.cause != NodeEvent::missed_schedule) {
                    ++exit_violations;
                    continue;
                }
                int misses = 0;
                for (auto it = mh.rbegin(); it != mh.rend() && misses < pp.p; ++it) {
                    if ((*it)->start > tr.time) continue;
                    const auto* rec = find_node(**it, x);
                    if (!rec || rec->received_schedule) break;
                    ++misses;
                }
                if (misses < pp.p) ++exit_violations;
            }
        }
    }
    const bool pass = reach_violations == 0 && join_violations == 0 && exit_violations == 0 && consistency == 0;
    return {pass, fmt("%d trials: %d reachability, %d sampled-join (of %ld), %d exit (of %ld) violations, "
                      "%d flood mismatches",
                      trials, reach_violations, join_violations, sampled, exit_violations, exits, consistency)};
}

Outcome energy_model() {
    using energy::step_storage;
    const bool eq = step_storage(0.6, 0.3, 0.1, 0.7) == 0.7 && step_storage(0.1, 0.0, 0.2, 0.7) == 0.0 &&
                    step_storage(0.2, 0.05, 0.03, 0.7) == 0.2 + 0.05 - 0.03 &&
                    std::abs(step_storage(0.2, 0.05, 0.03, 0.7) - 0.22) < 1e-15;

    // Random load walk against the per-second recurrence.
    sim::RandomStream rs(5, "walk");
    std::vector<double> power(3000);
    for (auto& p : power) p = rs.next_unit() < 0.3 ? 0.0 : rs.uniform(0, 0.02);
    energy::HarvestTrace trace(seconds(1), power);
    energy::EnergyParams ep;
    energy::NodeEnergy ne(ep, &trace);
    double oracle = 0.0, max_dev = 0.0;
    bool bounded = true;
    for (std::size_t t = 0; t + 1 < power.size(); ++t) {
        const double load = rs.next_unit() < 0.5 ? 0.0 : rs.uniform(0, 0.015);
        const Time end = seconds(static_cast<std::int64_t>(t + 1));
        if (ne.run_until(end, load, energy::Category::idle)) ne.run_until(end, 0.0, energy::Category::idle);
        oracle = step_storage(oracle, power[t], load / ep.buck_efficiency, ep.capacity);
        // The lazy model clamps within the second, the recurrence at its end;
        // compare only while no clamp or death happened.
        if (ne.e_cap() < 0 || ne.e_cap() > ep.capacity) bounded = false;
        if (ne.e_cap() > 1e-6 && ne.e_cap() < ep.capacity - 1e-6 && oracle > 1e-6 && oracle < ep.capacity - 1e-6)
            max_dev = std::max(max_dev, std::abs(ne.e_cap() - oracle));
        else
            oracle = ne.e_cap();
    }

    double worst = 0.0;
    int runs = 0;
    for (auto kind : {scenario::TopologyKind::mh, scenario::TopologyKind::ob}) {
        scenario::GenerateSpec g;
        g.kind = kind;
        const auto s = scenario::make_scenario(g, 3);
        for (auto p : {ProtocolKind::ewan, ProtocolKind::single_hop, ProtocolKind::multi_hop, ProtocolKind::drb}) {
            const auto log = protocol::simulate(s, p, 3);
            ++runs;
            for (int i = 1; i <= s.n_nodes; ++i) {
                const auto& ns = log.nodes[static_cast<std::size_t>(i)];
                const auto& l = ns.ledger;
                worst = std::max(worst, std::abs(l.e_in - (ns.e_cap_end - ns.e_cap_start) - l.total_drawn() - l.e_wasted));
                if (ns.e_cap_end < 0 || ns.e_cap_end > ns.capacity || ns.e_cap_start < 0 ||
                    ns.e_cap_start > ns.capacity)
                    bounded = false;
            }
        }
    }
    const bool pass = eq && bounded && worst <= 1e-9 && max_dev <= 1e-9;
    return {pass, fmt("recurrence cases %s, lazy vs stepwise %.2e J, conservation worst %.2e J over %d 7-day runs, "
                      "storage %s",
                      eq ? "exact" : "WRONG", max_dev, worst, runs, bounded ? "within [0, B]" : "OUT OF RANGE")};
}

Outcome radio_model() {
    double toa_dev = 0.0;
    for (double bw : {125e3, 250e3, 500e3}) {
        for (int sf = 5; sf <= 12; ++sf) {
            for (int pl = 0; pl <= 255; ++pl) {
                auto c = radio::default_single_hop_config();
                c.spreading_factor = sf;
                c.bandwidth_hz = bw;
                const double expect = test::oracle_lora_toa(sf, bw, pl, c.preamble_length, c.has_crc, c.has_header,
                                                            c.coding_rate);
                toa_dev = std::max(toa_dev, std::abs(radio::time_on_air(c, pl) - expect));
            }
        }
    }

    const radio::ReceptionModel fsk{-104.0, 2.0, 3.0};
    sim::RandomStream gen(17, "graphs"), rs(18, "flood");
    int flood_bad = 0;
    for (int g = 0; g < 100; ++g) {
        const int n = 4 + static_cast<int>(gen.below(17));
        const double density = gen.uniform(0.1, 0.5);
        radio::LinkMatrix m(n, 200);
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (gen.next_unit() < density) {
                    m.set_loss(i, j, 0);
                    adj[static_cast<std::size_t>(i)].push_back(j);
                    adj[static_cast<std::size_t>(j)].push_back(i);
                }
            }
        }
        const int source = static_cast<int>(gen.below(static_cast<std::uint64_t>(n)));
        const auto depth = test::bfs(adj, source);
        const auto r = radio::simulate_flood(source, 8, std::vector<bool>(static_cast<std::size_t>(n), true), m,
                                             radio::default_multi_hop_config(), {n, 1, Duration{500}}, fsk, rs);
        for (int i = 0; i < n; ++i) {
            flood_bad += r.nodes[static_cast<std::size_t>(i)].first_reception_slot != depth[static_cast<std::size_t>(i)];
        }
    }

    const radio::ReceptionModel lora;
    const double sg = lora.capture_sigma_db;
    const auto ramp = [&](double p) { return std::clamp((p - lora.sensitivity_dbm) / lora.ramp_width_db, 0.0, 1.0); };
    struct Case {
        std::vector<radio::HeardTransmission> heard;
        std::map<int, double> expect;
    };
    const double rest = 10 * std::log10(std::pow(10.0, -9.4) + std::pow(10.0, -9.6));
    const std::vector<Case> cases{
        {{{1, -90}, {2, -93}}, {{1, test::phi(3 / sg)}, {2, test::phi(-3 / sg)}}},
        {{{1, -124.5}, {2, -124}}, {{2, test::phi(0.5 / sg) * ramp(-124)}, {1, test::phi(-0.5 / sg) * ramp(-124.5)}}},
        {{{1, -90}, {1, -95}, {2, -94}, {3, -96}}, {{1, test::phi((-90 - rest) / sg)}}},
    };
    sim::RandomStream crs(42, "capture");
    const int trials = 100000;
    double cap_dev = 0.0;
    for (const auto& c : cases) {
        std::map<int, int> hits;
        for (int i = 0; i < trials; ++i) {
            if (auto got = radio::resolve_concurrent(c.heard, lora, crs)) ++hits[*got];
        }
        for (const auto& [packet, p] : c.expect) {
            cap_dev = std::max(cap_dev, std::abs(static_cast<double>(hits[packet]) / trials - p));
        }
    }
    const bool pass = toa_dev <= 1e-6 && flood_bad == 0 && cap_dev <= 0.01;
    return {pass, fmt("time-on-air max deviation %.2e s, %d flood/BFS mismatches on 100 graphs, capture max "
                      "deviation %.4f",
                      toa_dev, flood_bad, cap_dev)};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int shell(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

Outcome reproducibility() {
    const fs::path dir = fs::temp_directory_path() / "ewan_acceptance";
    fs::remove_all(dir);
    const std::string cli = EWAN_CLI;
    if (shell(cli + " scenario gen --kind fh --seed 1 --out " + (dir / "sc").string()) != 0)
        return {false, "scenario gen failed"};
    const auto scn = (dir / "sc" / "fh.scn").string();
    const std::string campaign = cli + " campaign --scenario-template " + scn + " --runs 4 --seed 9 --out ";
    const std::string run = cli + " run --scenario " + scn + " --protocol ewan --seed 9 --out ";
    if (shell(campaign + (dir / "a").string()) || shell(campaign + (dir / "b").string() + " --threads 1") ||
        shell(run + (dir / "ra").string()) || shell(run + (dir / "rb").string()))
        return {false, "CLI invocation failed"};
    int diffs = 0;
    for (const char* f : {"aggregate.csv", "per_node.csv"}) diffs += slurp(dir / "a" / f) != slurp(dir / "b" / f);
    for (const char* f : {"metrics.csv", "rounds.csv", "events.log"}) diffs += slurp(dir / "ra" / f) != slurp(dir / "rb" / f);
    const bool non_empty = slurp(dir / "a" / "aggregate.csv").size() > 100 && slurp(dir / "ra" / "events.log").size() > 100;
    return {diffs == 0 && non_empty, fmt("%d of 5 output files differ between repeated invocations", diffs)};
}

// ---------------------------------------------------------------------------
// Campaign based criteria.

constexpr int kRuns = 20;
constexpr std::uint64_t kMasterSeed = 1;
const scenario::TopologyKind kKinds[] = {scenario::TopologyKind::ob, scenario::TopologyKind::bn,
                                         scenario::TopologyKind::fh, scenario::TopologyKind::mh};
const ProtocolKind kProtocols[] = {ProtocolKind::ewan, ProtocolKind::single_hop, ProtocolKind::multi_hop,
                                   ProtocolKind::drb};

struct Cell {
    scenario::Scenario scenario;
    metrics::CampaignResult result;
    const metrics::ProtocolResult& of(ProtocolKind k) const {
        for (const auto& p : result.protocols) {
            if (p.protocol == k) return p;
        }
        throw std::logic_error("protocol missing");
    }
    double mean(ProtocolKind k, metrics::Metric m) const { return metrics::network_summary(of(k), m).mean; }
};

Cell run_cell(const scenario::GenerateSpec& g, std::vector<ProtocolKind> protocols) {
    metrics::CampaignSpec spec;
    spec.scenario = scenario::make_scenario(g, kMasterSeed);
    spec.protocols = std::move(protocols);
    spec.runs = kRuns;
    spec.master_seed = kMasterSeed;
    Cell c{spec.scenario, metrics::run_campaign(spec)};
    return c;
}

std::map<std::pair<int, int>, Cell> g_cells;  // (kind, rho x 100)

const Cell& cell(scenario::TopologyKind kind, double rho) {
    const auto key = std::make_pair(static_cast<int>(kind), static_cast<int>(std::lround(rho * 100)));
    auto it = g_cells.find(key);
    if (it == g_cells.end()) {
        scenario::GenerateSpec g;
        g.kind = kind;
        g.rho = rho;
        it = g_cells.emplace(key, run_cell(g, {std::begin(kProtocols), std::end(kProtocols)})).first;
    }
    return it->second;
}

using metrics::Metric;

Outcome baseline_comparison() {
    bool pass = true;
    const auto& mh = cell(scenario::TopologyKind::mh, 0);
    const double ratio = mh.mean(ProtocolKind::drb, Metric::efficiency) / mh.mean(ProtocolKind::multi_hop, Metric::efficiency);
    pass = ratio >= 1.5 && ratio <= 4.0;
    std::string detail = fmt("mh efficiency ratio %.2f; liveness drb/mhb", ratio);
    for (auto k : kKinds) {
        const auto& c = cell(k, 0);
        const double a = c.mean(ProtocolKind::drb, Metric::liveness);
        const double b = c.mean(ProtocolKind::multi_hop, Metric::liveness);
        pass = pass && a > b;
        detail += fmt(" %s %.3f/%.3f", scenario::to_string(k).c_str(), a, b);
    }
    const double da = mh.mean(ProtocolKind::drb, Metric::downtime);
    const double db = mh.mean(ProtocolKind::multi_hop, Metric::downtime);
    pass = pass && da > db;
    detail += fmt("; mh downtime drb/mhb %.3f/%.3f", da, db);
    return {pass, detail};
}

Outcome ewan_vs_single_hop() {
    bool ratios = true;
    int downtime_wins = 0;
    std::string detail;
    for (double rho : {0.0, 0.95}) {
        for (auto k : kKinds) {
            const auto& c = cell(k, rho);
            const double r = c.mean(ProtocolKind::ewan, Metric::efficiency) / c.mean(ProtocolKind::single_hop, Metric::efficiency);
            const bool less_down = c.mean(ProtocolKind::ewan, Metric::downtime) < c.mean(ProtocolKind::single_hop, Metric::downtime);
            ratios = ratios && r >= 1.5;
            downtime_wins += less_down;
            detail += fmt("%s/%.2f %.2f%s; ", scenario::to_string(k).c_str(), rho, r, less_down ? "" : " (downtime)");
        }
    }
    detail += fmt("downtime lower in %d/8", downtime_wins);
    return {ratios && downtime_wins >= 6, detail};
}

Outcome depth_liveness() {
    const auto& c = cell(scenario::TopologyKind::mh, 0);
    const auto depths = scenario::short_range_depths(c.scenario);
    const auto& mhb = c.of(ProtocolKind::multi_hop);
    std::map<int, std::pair<double, int>> by_depth;
    int runs_with_dead_deep = 0;
    for (const auto& run : mhb.runs) {
        bool dead = false;
        for (const auto& nm : run.nodes) {
            const int d = depths[static_cast<std::size_t>(nm.node)];
            by_depth[d].first += nm.liveness;
            ++by_depth[d].second;
            if (d >= 4 && nm.liveness == 0.0) dead = true;
        }
        runs_with_dead_deep += dead;
    }
    bool monotone = true;
    double prev = 1e9;
    std::string detail = "mean liveness by depth:";
    for (const auto& [d, acc] : by_depth) {
        const double mean = acc.first / acc.second;
        monotone = monotone && mean <= prev + 1e-12;
        prev = mean;
        detail += fmt(" %d:%.3f", d, mean);
    }
    detail += fmt("; runs with a dead depth>=4 node %d/%d", runs_with_dead_deep, kRuns);
    return {monotone && runs_with_dead_deep * 2 >= kRuns, detail};
}

Outcome deep_nodes_with_strong_harvest() {
    scenario::GenerateSpec g;
    g.kind = scenario::TopologyKind::mh;
    g.special_mh_traces = true;
    const auto c = run_cell(g, {ProtocolKind::ewan, ProtocolKind::drb});
    const auto depths = scenario::short_range_depths(c.scenario);
    const auto deep_mean = [&](ProtocolKind k, Metric m) {
        double sum = 0;
        int count = 0;
        for (const auto& run : c.of(k).runs) {
            for (const auto& nm : run.nodes) {
                if (depths[static_cast<std::size_t>(nm.node)] < 2) continue;
                sum += metrics::value_of(nm, m);
                ++count;
            }
        }
        return sum / count;
    };
    const double ee = deep_mean(ProtocolKind::ewan, Metric::efficiency);
    const double ed = deep_mean(ProtocolKind::drb, Metric::efficiency);
    const double de = deep_mean(ProtocolKind::ewan, Metric::downtime);
    const double dd = deep_mean(ProtocolKind::drb, Metric::downtime);
    return {ee >= 1.5 * ed && de < dd,
            fmt("depth>=2 efficiency e-wan %.2f vs drb %.2f (ratio %.2f); downtime %.3f vs %.3f", ee, ed, ee / ed, de, dd)};
}

Outcome replay_counts() {
    const auto s = scenario::make_replay_scenario();
    const double target[] = {0, 134, 128};
    double sum[3] = {0, 0, 0};
    const int seeds = 20;
    for (int seed = 1; seed <= seeds; ++seed) {
        const auto log = protocol::simulate(s, ProtocolKind::ewan, static_cast<std::uint64_t>(seed));
        for (const auto& d : log.deliveries) sum[d.node] += 1;
    }
    bool pass = true;
    std::string detail = "mean packets over 20 seeds:";
    for (int i = 1; i <= 2; ++i) {
        const double mean = sum[i] / seeds;
        pass = pass && std::abs(mean - target[i]) <= 0.15 * target[i];
        detail += fmt(" node %d %.1f (target %.0f)", i, mean, target[i]);
    }
    return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
    // Criteria allowed to fail without failing the binary; see README.
    std::set<int> known;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--allow") == 0 && i + 1 < argc) known.insert(std::atoi(argv[++i]));
    }
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"single-hop fallback timing", fallback_timing},
        {"single-hop recovery", single_hop_recovery},
        {"bootstrap convergence", bootstrap_convergence},
        {"randomized protocol properties", safety_liveness_properties},
        {"energy model", energy_model},
        {"radio model", radio_model},
        {"reproducibility", reproducibility},
        {"drb vs multi-hop baseline", baseline_comparison},
        {"e-wan vs single-hop baseline", ewan_vs_single_hop},
        {"multi-hop baseline liveness by depth", depth_liveness},
        {"deep nodes with strong harvest", deep_nodes_with_strong_harvest},
        {"case-study replay", replay_counts},
    };
    int passed = 0;
    bool ok = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        const auto wall = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall).count();
        passed += o.pass;
        if (!o.pass && !known.count(id)) ok = false;
        const char* verdict = o.pass ? "PASS" : known.count(id) ? "FAIL (known)" : "FAIL";
        std::printf("criterion %2d %-38s %s  %s [%.1f s]\n", id, criteria[i].first, verdict, o.detail.c_str(), t);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", passed, criteria.size());
    return ok ? 0 : 1;
}
