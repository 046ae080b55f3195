#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ewan/protocol/simulation.hpp"
#include "ewan/scenario/scenario.hpp"

namespace ewan::metrics {

struct NodeMetrics {
    int node = 0;
    double e_in = 0.0;    ///< J harvested
    long packets = 0;     ///< data packets the host logged from the node
    double t_active = 0.0;  ///< s
    double t_com = 0.0;     ///< s
    double t_sim = 0.0;     ///< s
    double efficiency = 0.0;  ///< packets per J
    double liveness = 0.0;
    double downtime = 0.0;
};

/// Metrics of one node from a complete run log.
NodeMetrics compute_metrics(const protocol::RunLog& log, int node);

/// Metrics of every node, ordered by node id.
std::vector<NodeMetrics> compute_all(const protocol::RunLog& log);

enum class Metric { efficiency, liveness, downtime, e_in, packets, t_active, t_com };
inline constexpr Metric kAllMetrics[] = {Metric::efficiency, Metric::liveness, Metric::downtime, Metric::e_in,
                                         Metric::packets,    Metric::t_active, Metric::t_com};
std::string to_string(Metric m);
double value_of(const NodeMetrics& m, Metric which);

/// Distribution summary; quartiles use linear interpolation between order
/// statistics.
struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation, 0 for fewer than two values
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

Summary summarize(std::vector<double> values);

struct CampaignSpec {
    scenario::Scenario scenario;
    std::vector<protocol::ProtocolKind> protocols;
    int runs = 1;
    std::uint64_t master_seed = 1;
    /// 0 picks the hardware concurrency.
    unsigned threads = 0;
};

struct RunResult {
    int run = 0;
    std::uint64_t seed = 0;
    std::vector<NodeMetrics> nodes;
    long delivered = 0;  ///< packets over all nodes
};

struct ProtocolResult {
    protocol::ProtocolKind protocol = protocol::ProtocolKind::ewan;
    std::vector<RunResult> runs;  ///< ordered by run index
};

struct CampaignResult {
    std::vector<ProtocolResult> protocols;
    int n_nodes = 0;
};

/// Scenario of run `run`: generated scenarios get traces drawn from
/// derive_seed(master_seed, run); others keep their own traces.
scenario::Scenario scenario_for_run(const scenario::Scenario& base, std::uint64_t master_seed, int run);

/// Runs every (protocol, run) pair. Run i of every protocol sees identical
/// traces. The result does not depend on the thread count.
CampaignResult run_campaign(const CampaignSpec& spec);

/// Per-run network mean of each metric, summarised over runs.
Summary network_summary(const ProtocolResult& result, Metric metric);
/// Distribution of one node's metric over runs.
Summary node_summary(const ProtocolResult& result, int node, Metric metric);

// CSV outputs. Every writer throws std::runtime_error when the file cannot
// be written.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<NodeMetrics>& nodes);
void write_rounds_csv(const std::filesystem::path& path, const protocol::RunLog& log);
void write_events_log(const std::filesystem::path& path, const protocol::RunLog& log);
void write_aggregate_csv(const std::filesystem::path& path, const CampaignResult& result);
void write_per_node_csv(const std::filesystem::path& path, const CampaignResult& result);

/// Output directory: the explicit value when given, else $EWAN_OUT_DIR, else
/// "out".
std::filesystem::path output_dir(const std::string& explicit_dir);

}  // namespace ewan::metrics
