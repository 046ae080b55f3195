#include <cstdio>
#include <exception>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ewan/metrics/metrics.hpp"
#include "ewan/scenario/generate.hpp"
#include "ewan/scenario/io.hpp"

namespace fs = std::filesystem;
using namespace ewan;

namespace {

std::vector<protocol::ProtocolKind> parse_protocol_list(const std::string& list) {
    std::vector<protocol::ProtocolKind> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(protocol::parse_protocol(item));
    }
    if (out.empty()) throw std::invalid_argument("empty protocol list");
    return out;
}

int cmd_gen(const std::string& kind, double rho, std::uint64_t seed, bool special, const std::string& out_arg) {
    const fs::path out = metrics::output_dir(out_arg);
    scenario::Scenario s;
    if (kind == "replay") {
        s = scenario::make_replay_scenario();
    } else {
        scenario::GenerateSpec g;
        g.kind = scenario::parse_topology(kind);
        if (g.kind == scenario::TopologyKind::custom) throw std::invalid_argument("kind must be ob, bn, fh, mh or replay");
        g.rho = rho;
        g.special_mh_traces = special;
        g.topology_seed = seed;
        s = scenario::make_scenario(g, seed);
    }
    const fs::path file = out / (s.name + ".scn");
    scenario::save_scenario(s, file);
    std::printf("%s\n", file.string().c_str());
    return 0;
}

int cmd_run(const std::string& file, const std::string& proto, std::uint64_t seed, const std::string& out_arg) {
    const auto s = scenario::load_scenario(file);
    const auto log = protocol::simulate(s, protocol::parse_protocol(proto), seed);
    const fs::path out = metrics::output_dir(out_arg);
    const auto nodes = metrics::compute_all(log);
    metrics::write_metrics_csv(out / "metrics.csv", nodes);
    metrics::write_rounds_csv(out / "rounds.csv", log);
    metrics::write_events_log(out / "events.log", log);
    long total = 0;
    for (const auto& n : nodes) total += n.packets;
    std::printf("%s: %zu rounds, %ld packets delivered\n", proto.c_str(), log.rounds.size(), total);
    return 0;
}

int cmd_campaign(const std::string& file, const std::string& protocols, int runs, std::uint64_t seed,
                 unsigned threads, const std::string& out_arg) {
    metrics::CampaignSpec spec;
    spec.scenario = scenario::load_scenario(file);
    spec.protocols = parse_protocol_list(protocols);
    spec.runs = runs;
    spec.master_seed = seed;
    spec.threads = threads;
    const auto result = metrics::run_campaign(spec);
    const fs::path out = metrics::output_dir(out_arg);
    metrics::write_aggregate_csv(out / "aggregate.csv", result);
    metrics::write_per_node_csv(out / "per_node.csv", result);
    for (const auto& pr : result.protocols) {
        std::printf("%-10s efficiency %.2f  liveness %.2f%%  downtime %.2f%%\n",
                    protocol::to_string(pr.protocol).c_str(),
                    metrics::network_summary(pr, metrics::Metric::efficiency).mean,
                    100.0 * metrics::network_summary(pr, metrics::Metric::liveness).mean,
                    100.0 * metrics::network_summary(pr, metrics::Metric::downtime).mean);
    }
    return 0;
}

int cmd_verify(const std::string& file) {
    const auto s = scenario::load_scenario(file);
    std::printf("%s: ok (%d nodes, %s)\n", file.c_str(), s.n_nodes, scenario::to_string(s.kind).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-harvesting wide-area network simulator"};
    app.require_subcommand(1);

    auto* scen = app.add_subcommand("scenario", "Scenario tools");
    scen->require_subcommand(1);
    auto* gen = scen->add_subcommand("gen", "Generate an evaluation scenario");
    std::string kind, out;
    double rho = 0.0;
    std::uint64_t seed = 1;
    bool special = false;
    gen->add_option("--kind", kind, "ob, bn, fh, mh or replay")->required();
    gen->add_option("--rho", rho, "Cross-node trace correlation")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--seed", seed, "Topology and trace seed");
    gen->add_flag("--special", special, "Deeper nodes harvest more (mh only)");
    gen->add_option("--out", out, "Output directory (default $EWAN_OUT_DIR or out)");

    auto* run = app.add_subcommand("run", "Simulate one protocol on a scenario");
    std::string file, proto;
    run->add_option("--scenario", file)->required();
    run->add_option("--protocol", proto, "ewan, single_hop, multi_hop or drb")->required();
    run->add_option("--seed", seed);
    run->add_option("--out", out);

    auto* camp = app.add_subcommand("campaign", "Monte Carlo runs over several protocols");
    std::string protocols = "ewan,single_hop,multi_hop,drb";
    int runs = 20;
    unsigned threads = 0;
    camp->add_option("--scenario-template", file)->required();
    camp->add_option("--protocols", protocols, "Comma-separated list");
    camp->add_option("--runs", runs)->check(CLI::PositiveNumber);
    camp->add_option("--seed", seed);
    camp->add_option("--threads", threads, "0 uses every core");
    camp->add_option("--out", out);

    auto* verify = app.add_subcommand("verify", "Check scenario invariants");
    verify->add_option("--scenario", file)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(kind, rho, seed, special, out);
        if (run->parsed()) return cmd_run(file, proto, seed, out);
        if (camp->parsed()) return cmd_campaign(file, protocols, runs, seed, threads, out);
        if (verify->parsed()) return cmd_verify(file);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
