#include <gtest/gtest.h>

#include "ewan/metrics/metrics.hpp"
#include "ewan/scenario/generate.hpp"
#include "support.hpp"

using namespace ewan;
using namespace ewan::metrics;
using sim::seconds;

namespace {

protocol::RunLog empty_log(int n_nodes, sim::Duration horizon) {
    protocol::RunLog log;
    log.n_nodes = n_nodes;
    log.horizon = horizon;
    log.period = seconds(300);
    log.nodes.resize(static_cast<std::size_t>(n_nodes + 1));
    return log;
}

void add_round(protocol::RunLog& log, sim::Time start, int node, bool participated) {
    protocol::RoundRecord r;
    r.start = start;
    protocol::RoundNodeRecord n;
    n.node = node;
    n.received_schedule = participated;
    n.participated = participated;
    r.nodes.push_back(n);
    log.rounds.push_back(r);
}

}  // namespace

TEST(Metrics, InactiveNodeIsZero) {
    const auto m = compute_metrics(empty_log(1, seconds(1000)), 1);
    EXPECT_EQ(m.t_sim, 1000.0);
    EXPECT_EQ(m.e_in, 0.0);
    EXPECT_EQ(m.packets, 0);
    EXPECT_EQ(m.efficiency, 0.0);
    EXPECT_EQ(m.liveness, 0.0);
    EXPECT_EQ(m.downtime, 0.0);
}

TEST(Metrics, EfficiencyIsPacketsPerJoule) {
    auto log = empty_log(1, seconds(1000));
    log.nodes[1].ledger.e_in = 5.0;
    for (int i = 0; i < 100; ++i) log.deliveries.push_back({seconds(i), 1, protocol::Vsn::multi_hop, i});
    EXPECT_DOUBLE_EQ(compute_metrics(log, 1).efficiency, 20.0);
}

TEST(Metrics, ParticipatedRoundsContributeOnePeriod) {
    auto log = empty_log(1, seconds(2000));
    log.nodes[1].active.push_back({seconds(0), seconds(1000)});
    add_round(log, seconds(0), 1, true);
    add_round(log, seconds(300), 1, true);
    add_round(log, seconds(600), 1, false);
    add_round(log, seconds(900), 1, true);  // clipped at the end of the active interval
    add_round(log, seconds(1200), 1, true);  // outside any active interval
    const auto m = compute_metrics(log, 1);
    EXPECT_DOUBLE_EQ(m.t_active, 1000.0);
    EXPECT_DOUBLE_EQ(m.t_com, 700.0);
    EXPECT_DOUBLE_EQ(m.liveness, 0.35);
    EXPECT_DOUBLE_EQ(m.downtime, 0.15);
}

TEST(Metrics, IdentitiesHoldOnGeneratedRun) {
    scenario::GenerateSpec g;
    g.kind = scenario::TopologyKind::bn;
    g.days = 2;
    const auto s = scenario::make_scenario(g, 3);
    for (auto kind : {protocol::ProtocolKind::ewan, protocol::ProtocolKind::multi_hop}) {
        const auto log = protocol::simulate(s, kind, 3);
        long delivered = 0;
        for (const auto& r : log.rounds) {
            for (const auto& n : r.nodes) delivered += n.delivered;
        }
        long packets = 0;
        for (const auto& m : compute_all(log)) {
            packets += m.packets;
            EXPECT_LE(m.t_com, m.t_active + 1e-9);
            EXPECT_LE(m.t_active, m.t_sim);
            EXPECT_GE(m.liveness, 0.0);
            EXPECT_LE(m.liveness + m.downtime, 1.0 + 1e-12);
            EXPECT_DOUBLE_EQ(m.liveness, m.t_com / m.t_sim);
            EXPECT_DOUBLE_EQ(m.downtime, (m.t_active - m.t_com) / m.t_sim);
            if (m.e_in > 0) EXPECT_DOUBLE_EQ(m.efficiency, static_cast<double>(m.packets) / m.e_in);
        }
        EXPECT_EQ(packets, delivered);
        EXPECT_EQ(packets, static_cast<long>(log.deliveries.size()));
    }
}

TEST(Summary, InterpolatedQuartiles) {
    const auto s = summarize({5, 1, 4, 2, 3});
    EXPECT_EQ(s.count, 5u);
    EXPECT_DOUBLE_EQ(s.mean, 3.0);
    EXPECT_DOUBLE_EQ(s.q1, 2.0);
    EXPECT_DOUBLE_EQ(s.median, 3.0);
    EXPECT_DOUBLE_EQ(s.q3, 4.0);
    EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(2.5));
    EXPECT_DOUBLE_EQ(summarize({1, 2}).median, 1.5);
    EXPECT_EQ(summarize({}).count, 0u);
}

TEST(Campaign, TracesDependOnRunOnly) {
    scenario::GenerateSpec g;
    g.kind = scenario::TopologyKind::fh;
    g.days = 1;
    const auto base = scenario::make_scenario(g, 1);
    EXPECT_EQ(scenario_for_run(base, 9, 2).traces, scenario_for_run(base, 9, 2).traces);
    EXPECT_NE(scenario_for_run(base, 9, 2).traces, scenario_for_run(base, 9, 3).traces);
}

TEST(Campaign, ThreadCountDoesNotChangeResults) {
    scenario::GenerateSpec g;
    g.kind = scenario::TopologyKind::ob;
    g.days = 1;
    CampaignSpec spec;
    spec.scenario = scenario::make_scenario(g, 1);
    spec.protocols = {protocol::ProtocolKind::ewan, protocol::ProtocolKind::drb};
    spec.runs = 4;
    spec.master_seed = 5;
    spec.threads = 1;
    const auto a = run_campaign(spec);
    spec.threads = 3;
    const auto b = run_campaign(spec);
    for (std::size_t p = 0; p < a.protocols.size(); ++p) {
        for (std::size_t r = 0; r < a.protocols[p].runs.size(); ++r) {
            const auto& x = a.protocols[p].runs[r];
            const auto& y = b.protocols[p].runs[r];
            EXPECT_EQ(x.seed, y.seed);
            EXPECT_EQ(x.delivered, y.delivered);
            for (std::size_t n = 0; n < x.nodes.size(); ++n) EXPECT_EQ(x.nodes[n].e_in, y.nodes[n].e_in);
        }
    }
}

TEST(Campaign, RejectsEmptyInputs) {
    CampaignSpec spec;
    spec.scenario = test::lossless_scenario(1, {{0, 1}}, seconds(3600));
    spec.runs = 0;
    spec.protocols = {protocol::ProtocolKind::ewan};
    EXPECT_THROW(run_campaign(spec), std::invalid_argument);
    spec.runs = 1;
    spec.protocols.clear();
    EXPECT_THROW(run_campaign(spec), std::invalid_argument);
}
