#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "series.hpp"
#include "time.hpp"

namespace shedad {

/// Synthetic district-heating network generator.  Node 0 is the plant-side
/// meter at the heat source; every node emits a normal meter-data stream.
/// The layout is radial: `branch_count` long trunk mains leave the plant,
/// each feeding a bushy neighbourhood of substations on short service
/// pipes.  Substations on the same branch therefore share both a supply
/// level (trunk length × heat loss) and local hydraulic noise, which is
/// what gives the network its recoverable proximity structure.
struct SimConfig {
    int n_substations = 248;  // total network nodes including the plant meter
    std::uint64_t seed = 1;
    std::int64_t start = 1704067200;  // 2024-01-01T00:00:00Z
    int days = 31;

    int branch_count = 8;      // trunk mains off the plant
    int max_branching = 3;     // children cap inside a branch
    double trunk_min_km = 0.8;
    double trunk_max_km = 2.5;
    double service_min_km = 0.05;
    double service_max_km = 0.25;

    double loss_c_per_km = 1.0;          // supply temperature drop per km of path
    double delay_samples_per_km = 2.5;   // thermal transport delay
    double flow_min_m3h = 20.0;
    double flow_max_m3h = 80.0;

    double source_base_c = 75.0;
    double source_daily_amp_c = 4.0;
    double source_weather_gain = 0.6;    // supply raised when outdoor drops
    double source_wobble_sigma_c = 0.3;  // slow plant-output wander (shared)

    double outdoor_mean_c = 1.0;
    double outdoor_daily_amp_c = 6.0;
    double outdoor_trend_amp_c = 4.0;
    double outdoor_trend_days = 9.0;

    double noise_sigma_c = 0.3;          // per-substation sensor noise
    double branch_noise_sigma_c = 0.35;  // slow wander shared within a branch

    double delta_t_base_c = 22.0;
    double delta_t_slope_c_per_km = 1.0;  // delta-T shrinks with distance from the plant
    double delta_t_jitter_c = 0.1;
    double demand_daily_frac = 0.08;

    int supply_faults = 16;
    int performance_faults = 14;
    int gap_substations = 0;       // substations that lose random samples
    int gaps_per_substation = 3;
};

enum class FaultKind {
    spike,
    flatline,
    return_exceeds_supply,
    delta_t_zero,
    oscillation,
    daytime_only_demand,
    low_delta_t,
};

inline const char* fault_kind_name(FaultKind k) {
    switch (k) {
        case FaultKind::spike: return "spike";
        case FaultKind::flatline: return "flatline";
        case FaultKind::return_exceeds_supply: return "return_exceeds_supply";
        case FaultKind::delta_t_zero: return "delta_t_zero";
        case FaultKind::oscillation: return "oscillation";
        case FaultKind::daytime_only_demand: return "daytime_only_demand";
        case FaultKind::low_delta_t: return "low_delta_t";
    }
    return "unknown";
}

inline FaultKind fault_kind_from_name(const std::string& name) {
    for (FaultKind k : {FaultKind::spike, FaultKind::flatline, FaultKind::return_exceeds_supply,
                        FaultKind::delta_t_zero, FaultKind::oscillation,
                        FaultKind::daytime_only_demand, FaultKind::low_delta_t})
        if (name == fault_kind_name(k)) return k;
    throw DataError("unknown fault kind '" + name + "'");
}

/// Supply-profile faults surface as singleton clusters; low_delta_t is the
/// performance category.  return_exceeds_supply and delta_t_zero leave the
/// supply profile untouched, so only the delta-T scoring route can see
/// them (they still count as supply anomalies in the ground truth).
inline bool is_supply_fault(FaultKind k) { return k != FaultKind::low_delta_t; }

struct FaultSpec {
    std::string substation_id;
    FaultKind kind = FaultKind::spike;
    std::int64_t start = 0;      // UTC epoch seconds
    std::int64_t duration_min = 0;
    double magnitude = 0.0;
};

struct PipeEdge {
    int parent = 0;
    int child = 0;
    double length_km = 0.0;
    double diameter_m = 0.0;
};

struct Topology {
    int n = 0;
    std::vector<std::string> ids;     // "S000".. zero-padded, sorted == index order
    std::vector<int> parent;          // parent[0] = -1
    std::vector<PipeEdge> edges;      // edges[i] connects node i+1 to its parent
    std::vector<int> branch;          // trunk index per node; node 0 = -1
    std::vector<int> depth;
    std::vector<double> path_km;
    std::vector<double> x_km, y_km;
    std::vector<double> demand_flow_m3h;      // node 0 = 0
    std::vector<double> downstream_flow_m3h;  // subtree total incl. own demand
    std::vector<int> delay_samples;
};

struct SubstationInfo {
    std::string id;
    double x = 0.0, y = 0.0;
    int branch = -1;
};

struct GroundTruth {
    std::vector<SubstationInfo> substations;
    std::vector<std::string> supply_anomaly_ids;       // sorted
    std::vector<std::string> performance_anomaly_ids;  // sorted
    std::vector<FaultSpec> faults;
};

struct SimResult {
    std::vector<SubstationSeries> series;  // node order == sorted id order
    std::vector<double> outdoor;
    GroundTruth truth;
    // Samples withheld at CSV emission, as (series index, sample index).
    std::vector<std::pair<std::size_t, std::size_t>> gaps;
};

namespace simdetail {

constexpr std::uint64_t kStreamTopology = 2;
constexpr std::uint64_t kStreamWeather = 3;
constexpr std::uint64_t kStreamGaps = 4;
constexpr std::uint64_t kStreamFaultAssign = 5;
constexpr std::uint64_t kStreamSourceWobble = 6;
constexpr std::uint64_t kStreamBranchNoise = 100;
constexpr std::uint64_t kStreamNode = 1000;
constexpr std::uint64_t kStreamFault = 500000;

constexpr double kNoiseAr = 0.97;  // AR(1) pole for the slow shared wander

inline std::string node_id(int index, int n) {
    int width = 3;
    for (int v = n - 1; v >= 1000; v /= 10) ++width;
    char buf[24];
    std::snprintf(buf, sizeof(buf), "S%0*d", std::min(width, 10), index);
    return buf;
}

/// Stationary AR(1) series with the given marginal sigma.
inline std::vector<double> ar1_series(std::size_t len, double sigma, SplitMix64& rng) {
    std::vector<double> out(len, 0.0);
    if (len == 0 || sigma <= 0.0) return out;
    const double innovation = sigma * std::sqrt(1.0 - kNoiseAr * kNoiseAr);
    out[0] = sigma * rng.next_gaussian();
    for (std::size_t i = 1; i < len; ++i)
        out[i] = kNoiseAr * out[i - 1] + innovation * rng.next_gaussian();
    return out;
}

inline void validate_config(const SimConfig& c) {
    auto bad = [](const std::string& msg) { throw DataError("sim config: " + msg); };
    if (c.n_substations < 2) bad("n_substations must be >= 2 (plant meter plus a consumer)");
    if (c.days < 1) bad("days must be >= 1");
    if (c.branch_count < 1) bad("branch_count must be >= 1");
    if (c.max_branching < 1) bad("max_branching must be >= 1");
    if (c.trunk_min_km <= 0 || c.trunk_max_km < c.trunk_min_km) bad("bad trunk length range");
    if (c.service_min_km <= 0 || c.service_max_km < c.service_min_km)
        bad("bad service length range");
    if (c.flow_min_m3h <= 0 || c.flow_max_m3h < c.flow_min_m3h) bad("bad flow range");
    if (c.loss_c_per_km < 0) bad("loss_c_per_km must be non-negative");
    if (c.delay_samples_per_km < 0) bad("delay_samples_per_km must be non-negative");
    if (c.noise_sigma_c < 0 || c.branch_noise_sigma_c < 0 || c.source_wobble_sigma_c < 0)
        bad("noise sigmas must be non-negative");
    if (c.delta_t_base_c <= 0) bad("delta_t_base_c must be positive");
    if (c.supply_faults < 0 || c.performance_faults < 0) bad("fault counts must be non-negative");
    if (c.gap_substations < 0 || c.gaps_per_substation < 0) bad("gap counts must be non-negative");
    if (c.gap_substations > 0 && c.gaps_per_substation < 1)
        bad("gaps_per_substation must be >= 1 when gap_substations is set");
}

}  // namespace simdetail

/// Build the pipe tree, coordinates, flows and transport delays.  Fully
/// determined by (config, config.seed).
inline Topology generate_network(const SimConfig& cfg) {
    simdetail::validate_config(cfg);
    const int n = cfg.n_substations;
    SplitMix64 rng(derive_seed(cfg.seed, simdetail::kStreamTopology));

    Topology topo;
    topo.n = n;
    topo.ids.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) topo.ids.push_back(simdetail::node_id(i, n));
    topo.parent.assign(static_cast<std::size_t>(n), -1);
    topo.branch.assign(static_cast<std::size_t>(n), -1);
    topo.depth.assign(static_cast<std::size_t>(n), 0);
    topo.path_km.assign(static_cast<std::size_t>(n), 0.0);
    topo.x_km.assign(static_cast<std::size_t>(n), 0.0);
    topo.y_km.assign(static_cast<std::size_t>(n), 0.0);
    topo.demand_flow_m3h.assign(static_cast<std::size_t>(n), 0.0);
    topo.downstream_flow_m3h.assign(static_cast<std::size_t>(n), 0.0);
    topo.delay_samples.assign(static_cast<std::size_t>(n), 0);

    std::vector<double> heading(static_cast<std::size_t>(n), 0.0);
    std::vector<int> capacity(static_cast<std::size_t>(n), 0);
    std::vector<int> children(static_cast<std::size_t>(n), 0);
    std::vector<int> open;  // non-root nodes that can take another child
    const int hubs = std::min(cfg.branch_count, n - 1);

    for (int i = 1; i < n; ++i) {
        int parent;
        double length;
        if (i <= hubs) {
            parent = 0;  // trunk main to a new neighbourhood
            length = rng.next_in(cfg.trunk_min_km, cfg.trunk_max_km);
            topo.branch[static_cast<std::size_t>(i)] = i - 1;
            heading[static_cast<std::size_t>(i)] =
                6.283185307179586 * (i - 1) / hubs + rng.next_in(-0.15, 0.15);
            capacity[static_cast<std::size_t>(i)] = cfg.max_branching + 1;
        } else {
            parent = open[static_cast<std::size_t>(rng.next_below(open.size()))];
            length = rng.next_in(cfg.service_min_km, cfg.service_max_km);
            topo.branch[static_cast<std::size_t>(i)] = topo.branch[static_cast<std::size_t>(parent)];
            heading[static_cast<std::size_t>(i)] =
                heading[static_cast<std::size_t>(parent)] + rng.next_in(-0.6, 0.6);
            capacity[static_cast<std::size_t>(i)] =
                1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.max_branching)));
        }
        topo.parent[static_cast<std::size_t>(i)] = parent;
        topo.depth[static_cast<std::size_t>(i)] = topo.depth[static_cast<std::size_t>(parent)] + 1;
        topo.path_km[static_cast<std::size_t>(i)] =
            topo.path_km[static_cast<std::size_t>(parent)] + length;
        topo.x_km[static_cast<std::size_t>(i)] =
            topo.x_km[static_cast<std::size_t>(parent)] +
            length * std::cos(heading[static_cast<std::size_t>(i)]);
        topo.y_km[static_cast<std::size_t>(i)] =
            topo.y_km[static_cast<std::size_t>(parent)] +
            length * std::sin(heading[static_cast<std::size_t>(i)]);
        topo.demand_flow_m3h[static_cast<std::size_t>(i)] =
            rng.next_in(cfg.flow_min_m3h, cfg.flow_max_m3h);

        PipeEdge e;
        e.parent = parent;
        e.child = i;
        e.length_km = length;
        topo.edges.push_back(e);

        if (parent != 0) {
            ++children[static_cast<std::size_t>(parent)];
            if (children[static_cast<std::size_t>(parent)] >=
                capacity[static_cast<std::size_t>(parent)])
                open.erase(std::find(open.begin(), open.end(), parent));
        }
        open.push_back(i);
    }

    // Aggregate subtree flows (children always have larger indices).
    for (int i = n - 1; i >= 1; --i) {
        topo.downstream_flow_m3h[static_cast<std::size_t>(i)] +=
            topo.demand_flow_m3h[static_cast<std::size_t>(i)];
        topo.downstream_flow_m3h[static_cast<std::size_t>(topo.parent[static_cast<std::size_t>(i)])] +=
            topo.downstream_flow_m3h[static_cast<std::size_t>(i)];
    }

    // Pipe diameters sized to carried flow; transport slows toward the
    // network edge where velocities drop.
    const double total_flow = std::max(topo.downstream_flow_m3h[0], 1.0);
    std::vector<double> delay_real(static_cast<std::size_t>(n), 0.0);
    for (auto& e : topo.edges) {
        const double carried = topo.downstream_flow_m3h[static_cast<std::size_t>(e.child)];
        e.diameter_m = 0.08 + 0.35 * std::sqrt(carried / total_flow);
        const double slowdown = std::pow(total_flow / carried, 0.15);
        delay_real[static_cast<std::size_t>(e.child)] =
            delay_real[static_cast<std::size_t>(e.parent)] +
            cfg.delay_samples_per_km * e.length_km * slowdown;
        topo.delay_samples[static_cast<std::size_t>(e.child)] =
            static_cast<int>(std::lround(delay_real[static_cast<std::size_t>(e.child)]));
    }
    return topo;
}

/// Default fault book: `supply_faults` substations cycling through the six
/// supply-profile kinds, then `performance_faults` low-delta-T ones, all
/// running the whole window.  Placement and magnitudes are seeded draws;
/// the plant meter (node 0) is never faulted.
inline std::vector<FaultSpec> default_faults(const Topology& topo, const SimConfig& cfg) {
    const int want = cfg.supply_faults + cfg.performance_faults;
    if (want > topo.n - 1)
        throw DataError("default_faults: " + std::to_string(want) + " faults requested but only " +
                        std::to_string(topo.n - 1) + " consumer substations exist");
    SplitMix64 rng(derive_seed(cfg.seed, simdetail::kStreamFaultAssign));
    std::vector<std::size_t> picked =
        sample_indices(static_cast<std::size_t>(topo.n - 1), static_cast<std::size_t>(want), rng);

    static constexpr FaultKind kSupplyCycle[] = {
        FaultKind::spike,        FaultKind::flatline,    FaultKind::return_exceeds_supply,
        FaultKind::delta_t_zero, FaultKind::oscillation, FaultKind::daytime_only_demand,
    };
    std::vector<FaultSpec> out;
    out.reserve(static_cast<std::size_t>(want));
    for (int f = 0; f < want; ++f) {
        FaultSpec spec;
        spec.substation_id = topo.ids[picked[static_cast<std::size_t>(f)] + 1];
        spec.start = cfg.start;
        spec.duration_min = static_cast<std::int64_t>(cfg.days) * 1440;
        if (f < cfg.supply_faults) {
            spec.kind = kSupplyCycle[f % 6];
            switch (spec.kind) {
                case FaultKind::spike: spec.magnitude = rng.next_in(140.0, 160.0); break;
                case FaultKind::flatline: spec.magnitude = rng.next_in(40.0, 55.0); break;
                case FaultKind::return_exceeds_supply: spec.magnitude = rng.next_in(2.0, 4.0); break;
                case FaultKind::delta_t_zero: spec.magnitude = 1.0; break;
                case FaultKind::oscillation: spec.magnitude = rng.next_in(12.0, 18.0); break;
                case FaultKind::daytime_only_demand: spec.magnitude = rng.next_in(18.0, 25.0); break;
                default: break;
            }
        } else {
            spec.kind = FaultKind::low_delta_t;
            spec.magnitude = rng.next_in(0.3, 0.5);  // fractional delta-T reduction
        }
        out.push_back(std::move(spec));
    }
    std::sort(out.begin(), out.end(),
              [](const FaultSpec& a, const FaultSpec& b) { return a.substation_id < b.substation_id; });
    return out;
}

namespace simdetail {

inline void validate_faults(const Topology& topo, const SimConfig& cfg,
                            const std::vector<FaultSpec>& faults) {
    const std::int64_t window_end = cfg.start + static_cast<std::int64_t>(cfg.days) * 86400;
    std::set<std::string> seen;
    std::set<std::string> known(topo.ids.begin(), topo.ids.end());
    for (const auto& f : faults) {
        if (!known.count(f.substation_id))
            throw DataError("fault references unknown substation " + f.substation_id);
        if (!seen.insert(f.substation_id).second)
            throw DataError("substation " + f.substation_id +
                            " has multiple faults; one fault per substation");
        if (f.magnitude <= 0.0)
            throw DataError("fault on " + f.substation_id + ": magnitude must be positive");
        if (f.kind == FaultKind::low_delta_t && f.magnitude >= 1.0)
            throw DataError("fault on " + f.substation_id +
                            ": low_delta_t magnitude is a fraction in (0,1)");
        if (f.duration_min <= 0)
            throw DataError("fault on " + f.substation_id + ": duration must be positive");
        if (f.start < cfg.start || f.start + f.duration_min * 60 > window_end)
            throw DataError("fault on " + f.substation_id + " lies outside the simulated window");
    }
}

/// Smooth night indicator in [0,1]: 1 between 21:00 and 06:00, cosine
/// ramps one hour wide at both edges.
inline double night_weight(double tod_hours) {
    auto ramp = [](double x) { return 0.5 - 0.5 * std::cos(3.141592653589793 * x); };
    if (tod_hours >= 22.0 || tod_hours < 5.0) return 1.0;
    if (tod_hours >= 21.0) return ramp(tod_hours - 21.0);   // falling asleep
    if (tod_hours >= 5.0 && tod_hours < 6.0) return ramp(6.0 - tod_hours);
    return 0.0;
}

}  // namespace simdetail

/// Run the thermal model and apply faults.  Every stochastic term draws
/// from a sub-stream derived from (cfg.seed, role), so any single series
/// is reproducible in isolation and the result is identical however the
/// caller schedules work.
inline SimResult simulate(const Topology& topo, const SimConfig& cfg,
                          const std::vector<FaultSpec>& faults) {
    simdetail::validate_config(cfg);
    simdetail::validate_faults(topo, cfg, faults);
    const std::size_t n = static_cast<std::size_t>(topo.n);
    const std::size_t T = static_cast<std::size_t>(cfg.days) * kSamplesPerDay;

    int max_delay = 0;
    for (int d : topo.delay_samples) max_delay = std::max(max_delay, d);
    const std::size_t lead = static_cast<std::size_t>(max_delay) + 4;

    // Shared weather, UTC clock.
    SplitMix64 weather_rng(derive_seed(cfg.seed, simdetail::kStreamWeather));
    const double trend_phase = weather_rng.next_in(0.0, 6.283185307179586);
    auto outdoor_at = [&](std::int64_t t_abs) {
        const double tod = static_cast<double>(((t_abs % 86400) + 86400) % 86400);
        const double daily =
            cfg.outdoor_daily_amp_c * std::cos(6.283185307179586 * (tod - 50400.0) / 86400.0);
        const double trend =
            cfg.outdoor_trend_amp_c *
            std::sin(6.283185307179586 * static_cast<double>(t_abs - cfg.start) /
                         (cfg.outdoor_trend_days * 86400.0) +
                     trend_phase);
        return cfg.outdoor_mean_c + daily + trend;
    };

    SimResult result;
    result.outdoor.resize(T);
    for (std::size_t t = 0; t < T; ++t)
        result.outdoor[t] = outdoor_at(cfg.start + static_cast<std::int64_t>(t) * kSampleStepSeconds);

    // Plant output, extended `lead` samples into the past so delayed taps
    // stay inside the array.
    SplitMix64 wobble_rng(derive_seed(cfg.seed, simdetail::kStreamSourceWobble));
    std::vector<double> wobble =
        simdetail::ar1_series(lead + T, cfg.source_wobble_sigma_c, wobble_rng);
    std::vector<double> source(lead + T);
    for (std::size_t k = 0; k < lead + T; ++k) {
        const std::int64_t t_abs =
            cfg.start + (static_cast<std::int64_t>(k) - static_cast<std::int64_t>(lead)) *
                            kSampleStepSeconds;
        const double tod = static_cast<double>(((t_abs % 86400) + 86400) % 86400);
        source[k] = cfg.source_base_c +
                    cfg.source_daily_amp_c *
                        std::sin(6.283185307179586 * (tod - 21600.0) / 86400.0) +
                    cfg.source_weather_gain * (cfg.outdoor_mean_c - outdoor_at(t_abs)) + wobble[k];
    }

    // Slow shared wander per branch.
    int branch_total = 0;
    for (int b : topo.branch) branch_total = std::max(branch_total, b + 1);
    std::vector<std::vector<double>> branch_noise(static_cast<std::size_t>(branch_total));
    for (int b = 0; b < branch_total; ++b) {
        SplitMix64 rng(derive_seed(cfg.seed, simdetail::kStreamBranchNoise +
                                                 static_cast<std::uint64_t>(b)));
        branch_noise[static_cast<std::size_t>(b)] =
            simdetail::ar1_series(T, cfg.branch_noise_sigma_c, rng);
    }

    result.series.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng(derive_seed(cfg.seed, simdetail::kStreamNode + i));
        const double dt_jitter = rng.next_in(-cfg.delta_t_jitter_c, cfg.delta_t_jitter_c);
        const double dt_mean =
            cfg.delta_t_base_c - cfg.delta_t_slope_c_per_km * topo.path_km[i] + dt_jitter;
        const double sensor_sigma = (i == 0 ? 0.3 : 1.0) * cfg.noise_sigma_c;
        const int branch = topo.branch[i];
        const int delay = topo.delay_samples[i];
        const double loss = cfg.loss_c_per_km * topo.path_km[i];
        const double demand =
            i == 0 ? topo.downstream_flow_m3h[0] : topo.demand_flow_m3h[i];

        SubstationSeries s;
        s.id = topo.ids[i];
        s.start = cfg.start;
        s.supply.resize(T);
        s.ret.resize(T);
        s.flow.resize(T);
        for (std::size_t t = 0; t < T; ++t) {
            const std::int64_t t_abs =
                cfg.start + static_cast<std::int64_t>(t) * kSampleStepSeconds;
            const double tod = static_cast<double>(((t_abs % 86400) + 86400) % 86400);
            const double demand_wave =
                std::sin(6.283185307179586 * (tod - 64800.0) / 86400.0);  // evening peak

            double supply = source[lead + t - static_cast<std::size_t>(delay)] - loss +
                            sensor_sigma * rng.next_gaussian();
            if (branch >= 0) supply += branch_noise[static_cast<std::size_t>(branch)][t];

            double dt = dt_mean * (1.0 + cfg.demand_daily_frac * demand_wave) +
                        0.5 * cfg.noise_sigma_c * rng.next_gaussian();
            if (dt < 0.5) dt = 0.5;

            double flow = demand * (1.0 + 0.06 * demand_wave + 0.02 * rng.next_gaussian());
            if (flow < 0.0) flow = 0.0;

            s.supply[t] = supply;
            s.ret[t] = supply - dt;
            s.flow[t] = flow;
        }
        result.series[i] = std::move(s);
    }

    // Faults, in id order with a private stream each.
    std::vector<FaultSpec> ordered = faults;
    std::sort(ordered.begin(), ordered.end(),
              [](const FaultSpec& a, const FaultSpec& b) { return a.substation_id < b.substation_id; });
    for (std::size_t f = 0; f < ordered.size(); ++f) {
        const FaultSpec& spec = ordered[f];
        const std::size_t node = static_cast<std::size_t>(
            std::lower_bound(topo.ids.begin(), topo.ids.end(), spec.substation_id) -
            topo.ids.begin());
        SubstationSeries& s = result.series[node];
        SplitMix64 rng(derive_seed(cfg.seed, simdetail::kStreamFault + f));
        const std::size_t s0 = static_cast<std::size_t>((spec.start - cfg.start) / kSampleStepSeconds);
        const std::size_t s1 = std::min(
            T, s0 + static_cast<std::size_t>(spec.duration_min * 60 / kSampleStepSeconds));

        switch (spec.kind) {
            case FaultKind::spike: {
                // Recurring daily plateaus; the exchanger keeps extracting
                // its usual delta-T, so the return tracks the excursion.
                for (std::size_t day = s0 / kSamplesPerDay; day * kSamplesPerDay < s1; ++day) {
                    const int events = 2 + static_cast<int>(rng.next_below(2));
                    for (int e = 0; e < events; ++e) {
                        const std::size_t off =
                            static_cast<std::size_t>(rng.next_int(5 * 12, 20 * 12));
                        const std::size_t width =
                            static_cast<std::size_t>(rng.next_int(24, 48));  // 2-4 h
                        const std::size_t lo = std::max(s0, day * kSamplesPerDay + off);
                        const std::size_t hi = std::min(s1, lo + width);
                        for (std::size_t t = lo; t < hi && t < T; ++t) {
                            const double target = spec.magnitude + 0.4 * rng.next_gaussian();
                            const double delta = target - s.supply[t];
                            s.supply[t] += delta;
                            s.ret[t] += delta;
                        }
                    }
                }
                break;
            }
            case FaultKind::flatline: {
                // Stuck supply sensor: reading frozen, true return untouched.
                for (std::size_t t = s0; t < s1; ++t) s.supply[t] = spec.magnitude;
                break;
            }
            case FaultKind::return_exceeds_supply: {
                for (std::size_t t = s0; t < s1; ++t)
                    s.ret[t] = s.supply[t] + spec.magnitude + 0.1 * rng.next_gaussian();
                break;
            }
            case FaultKind::delta_t_zero: {
                for (std::size_t t = s0; t < s1; ++t)
                    s.ret[t] = s.supply[t] - 0.05 * std::fabs(rng.next_gaussian());
                break;
            }
            case FaultKind::oscillation: {
                const double period_samples = rng.next_in(6.0, 12.0);  // 30-60 min
                const double phase = rng.next_in(0.0, 6.283185307179586);
                for (std::size_t t = s0; t < s1; ++t) {
                    const double wave =
                        spec.magnitude *
                        std::sin(6.283185307179586 * static_cast<double>(t) / period_samples +
                                 phase);
                    s.supply[t] += wave;
                    s.ret[t] += 0.7 * wave;
                }
                break;
            }
            case FaultKind::daytime_only_demand: {
                for (std::size_t t = s0; t < s1; ++t) {
                    const std::int64_t t_abs =
                        cfg.start + static_cast<std::int64_t>(t) * kSampleStepSeconds;
                    const double tod_h =
                        static_cast<double>(((t_abs % 86400) + 86400) % 86400) / 3600.0;
                    const double w = simdetail::night_weight(tod_h);
                    if (w <= 0.0) continue;
                    const double dt_orig = s.supply[t] - s.ret[t];
                    s.supply[t] -= spec.magnitude * w;
                    s.ret[t] = s.supply[t] - dt_orig * (1.0 - 0.92 * w);
                    s.flow[t] *= 1.0 - 0.98 * w;
                }
                break;
            }
            case FaultKind::low_delta_t: {
                for (std::size_t t = s0; t < s1; ++t) {
                    const double dt_orig = s.supply[t] - s.ret[t];
                    s.ret[t] = s.supply[t] - dt_orig * (1.0 - spec.magnitude);
                }
                break;
            }
        }
    }

    // Ground truth.
    result.truth.substations.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        result.truth.substations.push_back(
            SubstationInfo{topo.ids[i], topo.x_km[i], topo.y_km[i], topo.branch[i]});
    for (const auto& fspec : ordered) {
        if (is_supply_fault(fspec.kind))
            result.truth.supply_anomaly_ids.push_back(fspec.substation_id);
        else
            result.truth.performance_anomaly_ids.push_back(fspec.substation_id);
    }
    result.truth.faults = ordered;

    // Gap injection: seeded sample drop-outs on otherwise healthy
    // substations, surfacing only in the emitted CSV.
    if (cfg.gap_substations > 0) {
        std::vector<std::size_t> eligible;
        std::set<std::string> faulted;
        for (const auto& fspec : ordered) faulted.insert(fspec.substation_id);
        for (std::size_t i = 0; i < n; ++i)
            if (!faulted.count(topo.ids[i])) eligible.push_back(i);
        if (static_cast<std::size_t>(cfg.gap_substations) > eligible.size())
            throw DataError("sim config: gap_substations exceeds the unfaulted substation count");
        SplitMix64 rng(derive_seed(cfg.seed, simdetail::kStreamGaps));
        std::vector<std::size_t> chosen =
            sample_indices(eligible.size(), static_cast<std::size_t>(cfg.gap_substations), rng);
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t c : chosen) {
            const std::size_t node = eligible[c];
            std::vector<std::size_t> holes =
                sample_indices(T, static_cast<std::size_t>(cfg.gaps_per_substation), rng);
            std::sort(holes.begin(), holes.end());
            for (std::size_t h : holes) result.gaps.emplace_back(node, h);
        }
    }
    return result;
}

/// Meter-data CSV: one row per (timestamp, substation), grid order, with
/// gap samples withheld.  Fixed formats keep emission byte-deterministic.
inline void emit_csv(const SimResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    const std::size_t n = result.series.size();
    const std::size_t T = n > 0 ? result.series[0].size() : 0;

    std::vector<std::uint8_t> skip;
    bool any_gaps = !result.gaps.empty();
    if (any_gaps) {
        skip.assign(n * T, 0);
        for (const auto& [node, sample] : result.gaps) skip[node * T + sample] = 1;
    }

    out << "timestamp,substation_id,supply_temp,return_temp,flow,outdoor_temp\n";
    std::string buffer;
    buffer.reserve(1 << 20);
    char line[160];
    for (std::size_t t = 0; t < T; ++t) {
        const std::string ts = format_timestamp_utc(result.series[0].start +
                                                    static_cast<std::int64_t>(t) *
                                                        kSampleStepSeconds);
        for (std::size_t i = 0; i < n; ++i) {
            if (any_gaps && skip[i * T + t]) continue;
            const auto& s = result.series[i];
            std::snprintf(line, sizeof(line), "%s,%s,%.3f,%.3f,%.4f,%.3f\n", ts.c_str(),
                          s.id.c_str(), s.supply[t], s.ret[t], s.flow[t], result.outdoor[t]);
            buffer += line;
            if (buffer.size() > (1 << 20) - 256) {
                out << buffer;
                buffer.clear();
            }
        }
    }
    out << buffer;
}

}  // namespace shedad
