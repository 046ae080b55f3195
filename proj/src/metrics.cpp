#include "ewan/metrics/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ewan/scenario/generate.hpp"
#include "ewan/sim/random.hpp"

namespace ewan::metrics {

using protocol::RunLog;
using sim::Time;

namespace {

struct Span {
    Time start{0};
    Time end{0};
};

double union_length(std::vector<Span> spans) {
    std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.start < b.start; });
    Time total{0};
    Time cursor{std::numeric_limits<std::int64_t>::min()};
    for (const auto& s : spans) {
        const Time from = std::max(s.start, cursor);
        if (s.end > from) {
            total += s.end - from;
            cursor = s.end;
        }
    }
    return sim::to_seconds(total);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

NodeMetrics compute_metrics(const RunLog& log, int node) {
    if (node < 1 || node > log.n_nodes) throw std::out_of_range("node id out of range");
    const auto& summary = log.nodes.at(static_cast<std::size_t>(node));
    NodeMetrics m;
    m.node = node;
    m.t_sim = sim::to_seconds(log.horizon);
    m.e_in = summary.ledger.e_in;
    m.packets = std::count_if(log.deliveries.begin(), log.deliveries.end(),
                              [&](const protocol::Delivery& d) { return d.node == node; });

    std::vector<Span> active;
    for (const auto& a : summary.active) active.push_back({a.start, std::min(a.end, log.horizon)});
    m.t_active = union_length(active);

    std::vector<Span> com;
    for (const auto& r : log.rounds) {
        for (const auto& n : r.nodes) {
            if (n.node != node || !n.participated) continue;
            for (const auto& a : active) {
                if (r.start >= a.start && r.start < a.end) {
                    com.push_back({r.start, std::min(r.start + log.period, a.end)});
                    break;
                }
            }
        }
    }
    m.t_com = union_length(com);

    m.efficiency = m.e_in > 0.0 ? static_cast<double>(m.packets) / m.e_in : 0.0;
    m.liveness = m.t_com / m.t_sim;
    m.downtime = (m.t_active - m.t_com) / m.t_sim;
    return m;
}

std::vector<NodeMetrics> compute_all(const RunLog& log) {
    std::vector<NodeMetrics> out;
    for (int i = 1; i <= log.n_nodes; ++i) out.push_back(compute_metrics(log, i));
    return out;
}

std::string to_string(Metric m) {
    switch (m) {
        case Metric::efficiency: return "efficiency";
        case Metric::liveness: return "liveness";
        case Metric::downtime: return "downtime";
        case Metric::e_in: return "e_in";
        case Metric::packets: return "packets";
        case Metric::t_active: return "t_active";
        case Metric::t_com: return "t_com";
    }
    return "?";
}

double value_of(const NodeMetrics& m, Metric which) {
    switch (which) {
        case Metric::efficiency: return m.efficiency;
        case Metric::liveness: return m.liveness;
        case Metric::downtime: return m.downtime;
        case Metric::e_in: return m.e_in;
        case Metric::packets: return static_cast<double>(m.packets);
        case Metric::t_active: return m.t_active;
        case Metric::t_com: return m.t_com;
    }
    return 0.0;
}

Summary summarize(std::vector<double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    return s;
}

scenario::Scenario scenario_for_run(const scenario::Scenario& base, std::uint64_t master_seed, int run) {
    scenario::Scenario s = base;
    if (s.generate) scenario::regenerate_traces(s, sim::derive_seed(master_seed, static_cast<std::uint64_t>(run)));
    return s;
}

CampaignResult run_campaign(const CampaignSpec& spec) {
    if (spec.runs < 1) throw std::invalid_argument("a campaign needs at least one run");
    if (spec.protocols.empty()) throw std::invalid_argument("a campaign needs at least one protocol");
    scenario::validate(spec.scenario);

    CampaignResult result;
    result.n_nodes = spec.scenario.n_nodes;
    for (auto p : spec.protocols) {
        ProtocolResult pr;
        pr.protocol = p;
        pr.runs.resize(static_cast<std::size_t>(spec.runs));
        result.protocols.push_back(std::move(pr));
    }

    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const auto worker = [&]() {
        for (int run = next++; run < spec.runs; run = next++) {
            try {
                const auto sc = scenario_for_run(spec.scenario, spec.master_seed, run);
                const std::uint64_t seed = sim::derive_seed(spec.master_seed, static_cast<std::uint64_t>(run));
                for (auto& pr : result.protocols) {
                    const auto log = protocol::simulate(sc, pr.protocol, seed);
                    RunResult rr;
                    rr.run = run;
                    rr.seed = seed;
                    rr.nodes = compute_all(log);
                    rr.delivered = static_cast<long>(log.deliveries.size());
                    pr.runs[static_cast<std::size_t>(run)] = std::move(rr);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };

    unsigned threads = spec.threads != 0 ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(spec.runs));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return result;
}

Summary network_summary(const ProtocolResult& result, Metric metric) {
    std::vector<double> means;
    for (const auto& run : result.runs) {
        double sum = 0.0;
        for (const auto& n : run.nodes) sum += value_of(n, metric);
        means.push_back(run.nodes.empty() ? 0.0 : sum / static_cast<double>(run.nodes.size()));
    }
    return summarize(std::move(means));
}

Summary node_summary(const ProtocolResult& result, int node, Metric metric) {
    std::vector<double> values;
    for (const auto& run : result.runs) values.push_back(value_of(run.nodes.at(static_cast<std::size_t>(node - 1)), metric));
    return summarize(std::move(values));
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<NodeMetrics>& nodes) {
    auto out = open_out(path);
    out << "node,e_in,p,t_active,t_com,efficiency,liveness,downtime\n";
    for (const auto& m : nodes) {
        out << m.node << ',' << num(m.e_in) << ',' << m.packets << ',' << num(m.t_active) << ',' << num(m.t_com)
            << ',' << num(m.efficiency) << ',' << num(m.liveness) << ',' << num(m.downtime) << '\n';
    }
}

void write_rounds_csv(const std::filesystem::path& path, const RunLog& log) {
    auto out = open_out(path);
    out << "vsn,round_index,round_start_s,node,received_schedule,participated,attempted,delivered,contended";
    for (std::size_t c = 0; c < energy::kCategoryCount; ++c) {
        out << ",e_" << energy::to_string(static_cast<energy::Category>(c));
    }
    out << '\n';
    for (const auto& r : log.rounds) {
        for (const auto& n : r.nodes) {
            out << protocol::to_string(r.vsn) << ',' << r.index << ',' << num(sim::to_seconds(r.start)) << ','
                << n.node << ',' << n.received_schedule << ',' << n.participated << ',' << n.attempted << ','
                << n.delivered << ',' << n.contended;
            for (double e : n.energy) out << ',' << num(e);
            out << '\n';
        }
    }
}

void write_events_log(const std::filesystem::path& path, const RunLog& log) {
    auto out = open_out(path);
    out << log.events_text();
}

void write_aggregate_csv(const std::filesystem::path& path, const CampaignResult& result) {
    auto out = open_out(path);
    out << "protocol,metric,mean,std,q1,median,q3,min,max\n";
    for (const auto& pr : result.protocols) {
        for (Metric m : kAllMetrics) {
            const auto s = network_summary(pr, m);
            out << protocol::to_string(pr.protocol) << ',' << to_string(m) << ',' << num(s.mean) << ','
                << num(s.stddev) << ',' << num(s.q1) << ',' << num(s.median) << ',' << num(s.q3) << ','
                << num(s.min) << ',' << num(s.max) << '\n';
        }
    }
}

void write_per_node_csv(const std::filesystem::path& path, const CampaignResult& result) {
    auto out = open_out(path);
    out << "protocol,node,metric,mean,q1,median,q3,min,max\n";
    for (const auto& pr : result.protocols) {
        for (int node = 1; node <= result.n_nodes; ++node) {
            for (Metric m : kAllMetrics) {
                const auto s = node_summary(pr, node, m);
                out << protocol::to_string(pr.protocol) << ',' << node << ',' << to_string(m) << ',' << num(s.mean)
                    << ',' << num(s.q1) << ',' << num(s.median) << ',' << num(s.q3) << ',' << num(s.min) << ','
                    << num(s.max) << '\n';
            }
        }
    }
}

std::filesystem::path output_dir(const std::string& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("EWAN_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "out";
}

}  // namespace ewan::metrics
