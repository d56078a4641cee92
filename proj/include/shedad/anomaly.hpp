#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cluster.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "matrix.hpp"
#include "series.hpp"

namespace shedad {

constexpr double kModifiedZScale = 0.6745;    // MAD consistency factor for normal data
constexpr double kMeanAdScale = 1.2533;       // mean-absolute-deviation fallback factor
constexpr double kFlagZThreshold = -2.0;      // single-sided: only unusually low values flag

namespace detail {

inline double median_sorted(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

}  // namespace detail

/// Median/MAD-based z-scores: M_i = 0.6745 (x_i - median) / MAD.  When the
/// MAD collapses to zero the mean absolute deviation takes over with its
/// own consistency factor; if that is zero too every score is zero.
inline std::vector<double> modified_z_scores(std::span<const double> values) {
    if (values.size() < 2)
        throw std::invalid_argument("modified_z_scores: need at least two values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double med = detail::median_sorted(sorted);

    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::fabs(values[i] - med);
    std::vector<double> dev_sorted = dev;
    std::sort(dev_sorted.begin(), dev_sorted.end());
    const double mad = detail::median_sorted(dev_sorted);

    std::vector<double> out(values.size(), 0.0);
    if (mad > 0.0) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out[i] = kModifiedZScale * (values[i] - med) / mad;
        return out;
    }
    double mean_ad = 0.0;
    for (double d : dev) mean_ad += d;
    mean_ad /= static_cast<double>(dev.size());
    if (mean_ad > 0.0) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out[i] = (values[i] - med) / (kMeanAdScale * mean_ad);
    }
    return out;
}

/// Mean supply-return temperature difference over the whole window.
inline double delta_t_statistic(const SubstationSeries& s) {
    if (s.size() == 0) throw std::invalid_argument("delta_t_statistic: empty series");
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) acc += s.supply[i] - s.ret[i];
    return acc / static_cast<double>(s.size());
}

/// A substation together with its nearest tree neighbours and their
/// delta-T statistics (center first).
struct ComparisonGroup {
    std::string center;
    std::vector<std::string> members;
    std::vector<double> values;
};

/// For every node of a cluster tree: the node plus its k nearest tree
/// neighbours, nearness ordered by (hop count, path weight, id).
inline std::vector<ComparisonGroup> comparison_groups(
    const NeighborGraph& tree, int k,
    const std::unordered_map<std::string, double>& stat_by_id) {
    if (k < 1) throw std::invalid_argument("comparison_groups: k must be >= 1");
    const std::size_t n = tree.size();
    auto adj = tree.adjacency();

    std::vector<ComparisonGroup> out;
    out.reserve(n);
    for (std::size_t c = 0; c < n; ++c) {
        // BFS-with-weights from the center; trees have unique paths, so a
        // single pass per node suffices.
        std::vector<int> hops(n, -1);
        std::vector<double> pathw(n, 0.0);
        hops[c] = 0;
        std::queue<std::size_t> frontier;
        frontier.push(c);
        while (!frontier.empty()) {
            std::size_t u = frontier.front();
            frontier.pop();
            for (const auto& [v, w] : adj[u]) {
                if (hops[v] >= 0) continue;
                hops[v] = hops[u] + 1;
                pathw[v] = pathw[u] + w;
                frontier.push(v);
            }
        }
        std::vector<std::size_t> others;
        others.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            if (i != c && hops[i] >= 0) others.push_back(i);
        std::sort(others.begin(), others.end(), [&](std::size_t x, std::size_t y) {
            if (hops[x] != hops[y]) return hops[x] < hops[y];
            if (pathw[x] != pathw[y]) return pathw[x] < pathw[y];
            return tree.ids[x] < tree.ids[y];
        });
        if (others.size() > static_cast<std::size_t>(k)) others.resize(static_cast<std::size_t>(k));

        ComparisonGroup g;
        g.center = tree.ids[c];
        g.members.push_back(tree.ids[c]);
        for (std::size_t i : others) g.members.push_back(tree.ids[i]);
        g.values.reserve(g.members.size());
        for (const auto& id : g.members) {
            auto it = stat_by_id.find(id);
            if (it == stat_by_id.end())
                throw DataError("comparison_groups: no delta-T statistic for " + id);
            g.values.push_back(it->second);
        }
        out.push_back(std::move(g));
    }
    return out;
}

struct SubstationScore {
    std::string id;
    int cluster = -1;
    bool supply_anomaly = false;  // singleton cluster at the cut
    int comparisons = 0;
    int flags = 0;
    double score = 0.0;           // flags / comparisons
    double mean_delta_t = std::numeric_limits<double>::quiet_NaN();
};

struct AnomalyScorecard {
    std::vector<SubstationScore> entries;  // sorted by id

    std::vector<std::string> supply_anomalies() const {
        std::vector<std::string> out;
        for (const auto& e : entries)
            if (e.supply_anomaly) out.push_back(e.id);
        return out;
    }

    /// Performance anomalies: substations whose flag share exceeds the
    /// threshold (default threshold 0 means "flagged at least once").
    std::vector<std::string> predicted_performance(double threshold) const {
        std::vector<std::string> out;
        for (const auto& e : entries)
            if (!e.supply_anomaly && e.comparisons > 0 && e.score > threshold)
                out.push_back(e.id);
        return out;
    }
};

/// Score every substation.  Singleton clusters are supply-temperature
/// anomalies and skip delta-T scoring.  Every other cluster gets a minimum
/// spanning tree in `geometry`; each member is compared (modified z-score,
/// flag below kFlagZThreshold) within every group it appears in, and its
/// score is the share of comparisons that flagged it.
inline AnomalyScorecard detect(const ClusterAssignment& assignment,
                               const std::vector<SubstationSeries>& series,
                               const DistanceMatrix& geometry, int comparison_k) {
    if (comparison_k < 1) throw std::invalid_argument("detect: comparison_k must be >= 1");
    std::unordered_map<std::string, double> stat_by_id;
    stat_by_id.reserve(series.size());
    for (const auto& s : series) stat_by_id.emplace(s.id, delta_t_statistic(s));

    AnomalyScorecard card;
    card.entries.reserve(assignment.ids.size());
    std::unordered_map<std::string, std::size_t> entry_index;
    for (std::size_t i = 0; i < assignment.ids.size(); ++i) {
        const auto& id = assignment.ids[i];
        auto it = stat_by_id.find(id);
        if (it == stat_by_id.end()) throw DataError("detect: no series for substation " + id);
        SubstationScore e;
        e.id = id;
        e.cluster = assignment.labels[i];
        e.supply_anomaly = assignment.singleton_flags[static_cast<std::size_t>(e.cluster)];
        e.mean_delta_t = it->second;
        entry_index.emplace(id, card.entries.size());
        card.entries.push_back(std::move(e));
    }

    for (int c = 0; c < assignment.n_clusters; ++c) {
        if (assignment.singleton_flags[static_cast<std::size_t>(c)]) continue;
        auto members = assignment.members(c);
        if (members.size() < 2) continue;  // nothing to compare against
        NeighborGraph tree = minimum_spanning_tree(members, geometry);
        auto groups = comparison_groups(tree, comparison_k, stat_by_id);
        for (const auto& g : groups) {
            std::vector<double> z = modified_z_scores(g.values);
            for (std::size_t m = 0; m < g.members.size(); ++m) {
                auto& e = card.entries[entry_index.at(g.members[m])];
                ++e.comparisons;
                if (z[m] < kFlagZThreshold) ++e.flags;
            }
        }
    }
    for (auto& e : card.entries)
        if (e.comparisons > 0)
            e.score = static_cast<double>(e.flags) / static_cast<double>(e.comparisons);
    return card;
}

}  // namespace shedad
