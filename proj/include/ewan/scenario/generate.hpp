#pragma once

#include <array>
#include <vector>

#include "ewan/scenario/scenario.hpp"
#include "ewan/sim/random.hpp"

namespace ewan::scenario {

/// Log-distance path loss: 40 dB at 1 m, exponent 3.
double path_loss_db(double distance_m);

/// Short-range losses are pushed to at most this on an intended edge and to
/// at least `kNonEdgeLossDb` elsewhere, so edges sit in the guaranteed part
/// of the reception ramp and non-edges below sensitivity.
inline constexpr double kEdgeLossDb = 114.0;
inline constexpr double kNonEdgeLossDb = 122.0;
/// Upper bound of every node-host long-range loss.
inline constexpr double kLongLossCapDb = 130.0;

struct Topology {
    radio::LinkMatrix links_short;
    radio::LinkMatrix links_long;
    std::vector<int> bottleneck_nodes;
    /// Planar coordinates in metres; the host is index 0 at the origin.
    std::vector<std::array<double, 2>> positions;
};

/// One of the four evaluation topologies (15 nodes plus the host). The result
/// satisfies `check_topology_contract`; a layout that fails is redrawn.
Topology generate_topology(TopologyKind kind, sim::RandomStream& stream);

struct TraceGenParams {
    double e_avg_min = 1.0;  ///< J/day
    double e_avg_max = 10.0;
    double start_min_h = 5.0;
    double start_max_h = 10.0;
    double end_min_h = 16.0;
    double end_max_h = 21.0;
    double noise_sigma = 0.1;  ///< hourly multiplicative noise
    double rho = 0.0;          ///< cross-node correlation of the daily draws
    int days = 7;
    Duration resolution = sim::seconds(60);

    void validate() const;
};

/// Daily draws of one node.
struct DayShape {
    double e_avg = 0.0;
    double start_h = 0.0;
    double end_h = 0.0;
};

/// Per node, per day draws through a Gaussian copula with pairwise
/// correlation rho, mapped onto the uniform ranges. Result[node][day].
std::vector<std::vector<DayShape>> draw_day_shapes(const TraceGenParams& params, int n_nodes,
                                                   sim::RandomStream& stream);

/// Renders day shapes into a trace with hourly multiplicative noise. Power is
/// zero outside [start, end]; a sample straddling a boundary gets the
/// overlapping fraction.
energy::HarvestTrace render_trace(const std::vector<DayShape>& days, double noise_sigma, Duration resolution,
                                  sim::RandomStream& noise);

std::vector<energy::HarvestTrace> generate_traces(const TraceGenParams& params, int n_nodes,
                                                  sim::RandomStream& stream);

/// Nodes deeper than one hop get `energy_factor` times the daily energy and a
/// window widened by `widen_h` on each side. depths[i] is node i's hop depth
/// (index 0 the host).
std::vector<energy::HarvestTrace> special_mh_traces(const TraceGenParams& params, const std::vector<int>& depths,
                                                    sim::RandomStream& stream, double energy_factor = 6.0,
                                                    double widen_h = 3.0);

/// Regenerates the traces of a generated scenario for run seed `seed`.
void regenerate_traces(Scenario& s, std::uint64_t seed);

/// The four evaluation scenarios with the default parameter set. The
/// topology depends on `spec.topology_seed` only; traces on `trace_seed`.
Scenario make_scenario(const GenerateSpec& spec, std::uint64_t trace_seed);

/// Two-node, two-hop replay of the indoor case study over 12 h with a
/// 3 min period and traces scaled by 0.85.
Scenario make_replay_scenario();

}  // namespace ewan::scenario
