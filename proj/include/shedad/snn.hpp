#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "matrix.hpp"

namespace shedad {

/// Linear-interpolation quantile (the common "type 7" definition) over a
/// pre-sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty sample");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile_sorted: q outside [0,1]");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

struct AdaptiveKnnParams {
    int k_b = 10;            // baseline neighbour count
    double theta_min = 0.10; // dense-region threshold
    double theta_max = 0.90; // sparse-region threshold
    bool thresholds_as_quantiles = true;  // interpret thetas as quantiles of observed distances
};

struct AdaptiveK {
    int low = 0;       // neighbours closer than theta_min
    int high = 0;      // neighbours farther than theta_max
    double delta_k = 0.0;
    int k = 0;         // final clamped neighbour count
};

/// Density-adjusted neighbour count.  Nodes in dense regions (many
/// distances below theta_min) get a larger k; nodes in sparse regions
/// (many distances above theta_max) get a smaller one.  The adjustment is
///   +(low/k_b - 1) * k_b/2   when low  >= k_b,
///   -(high/k_b - 1) * k_b/2  when high >= k_b,
/// with the dense branch taking precedence, rounded half-to-even and
/// clamped to [1, n-1].
inline AdaptiveK adaptive_neighbor_count(int k_b, int low, int high, std::size_t n) {
    if (k_b < 1) throw std::invalid_argument("adaptive_neighbor_count: k_b must be >= 1");
    AdaptiveK out;
    out.low = low;
    out.high = high;
    if (low >= k_b)
        out.delta_k = (static_cast<double>(low) / k_b - 1.0) * k_b / 2.0;
    else if (high >= k_b)
        out.delta_k = -(static_cast<double>(high) / k_b - 1.0) * k_b / 2.0;
    const double raw = static_cast<double>(k_b) + out.delta_k;
    int k = static_cast<int>(std::nearbyint(raw));
    const int k_max = static_cast<int>(n) - 1;
    out.k = std::clamp(k, 1, k_max);
    return out;
}

struct AdaptiveKnnInfo {
    double theta_min_abs = 0.0;
    double theta_max_abs = 0.0;
    std::vector<AdaptiveK> per_node;
    std::size_t fallback_edges = 0;
};

/// Build one day's neighbour graph from a distance matrix.  Candidates
/// beyond theta_max are discarded before the k_i nearest are taken; a node
/// whose every distance exceeds theta_max keeps a single flagged edge to
/// its nearest neighbour so no node is isolated.
inline NeighborGraph adaptive_knn(const DistanceMatrix& dist, const AdaptiveKnnParams& params,
                                  AdaptiveKnnInfo* info = nullptr) {
    const std::size_t n = dist.size();
    if (n < 2) throw DataError("adaptive_knn: need at least two substations");
    if (params.k_b < 1) throw std::invalid_argument("adaptive_knn: k_b must be >= 1");
    if (static_cast<std::size_t>(params.k_b) >= n)
        throw DataError("adaptive_knn: k_b (" + std::to_string(params.k_b) +
                        ") must be smaller than the substation count (" + std::to_string(n) + ")");

    double theta_min = params.theta_min;
    double theta_max = params.theta_max;
    if (params.thresholds_as_quantiles) {
        std::vector<double> sample;
        sample.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) sample.push_back(dist.at(i, j));
        std::sort(sample.begin(), sample.end());
        theta_min = quantile_sorted(sample, params.theta_min);
        theta_max = quantile_sorted(sample, params.theta_max);
    }
    if (!(theta_min < theta_max))
        throw std::invalid_argument("adaptive_knn: theta_min must be below theta_max");

    NeighborGraph g;
    g.ids = dist.ids;
    if (info) {
        info->theta_min_abs = theta_min;
        info->theta_max_abs = theta_max;
        info->per_node.clear();
        info->per_node.reserve(n);
        info->fallback_edges = 0;
    }

    struct PendingEdge {
        double weight;
        bool fallback;
    };
    std::map<std::pair<std::uint32_t, std::uint32_t>, PendingEdge> picked;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        int low = 0, high = 0;
        order.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = dist.at(i, j);
            if (d < theta_min) ++low;
            if (d > theta_max) ++high;
            order.push_back(j);
        }
        AdaptiveK ak = adaptive_neighbor_count(params.k_b, low, high, n);
        if (info) info->per_node.push_back(ak);

        // Sort every other node by (distance, id); candidates are the ones
        // within theta_max.
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            const double dx = dist.at(i, x), dy = dist.at(i, y);
            if (dx != dy) return dx < dy;
            return dist.ids[x] < dist.ids[y];
        });

        auto edge_key = [&](std::size_t j) {
            std::uint32_t a = static_cast<std::uint32_t>(i);
            std::uint32_t b = static_cast<std::uint32_t>(j);
            if (a > b) std::swap(a, b);
            return std::pair<std::uint32_t, std::uint32_t>{a, b};
        };
        std::size_t taken = 0;
        for (std::size_t j : order) {
            if (dist.at(i, j) > theta_max) break;
            if (taken == static_cast<std::size_t>(ak.k)) break;
            picked.try_emplace(edge_key(j), PendingEdge{dist.at(i, j), false});
            ++taken;
        }
        if (taken == 0) {
            // Every neighbour is beyond theta_max: keep the nearest anyway.
            std::size_t j = order.front();
            auto [it, inserted] = picked.try_emplace(edge_key(j), PendingEdge{dist.at(i, j), true});
            if (!inserted) it->second.fallback = true;
            if (info && inserted) ++info->fallback_edges;
        }
    }

    g.edges.reserve(picked.size());
    for (const auto& [key, pe] : picked) {
        GraphEdge e;
        e.a = key.first;
        e.b = key.second;
        e.weight = pe.weight;
        e.fallback = pe.fallback;
        g.edges.push_back(e);
    }
    return g;
}

struct MergeStats {
    std::size_t graph_count = 0;
    std::size_t candidate_edges = 0;
    std::size_t retained_edges = 0;
    double mean_prevalence = 0.0;  // p-bar across candidates
    bool degenerate = false;       // every candidate in every graph
};

/// Consensus merge of per-day graphs.  Each candidate edge gets a
/// chance-corrected agreement score
///   kappa_e = (p_e - p̄) / (1 - p̄),  p_e = (graphs containing e) / d,
/// where p̄ averages p_e over all candidates; edges with kappa_e below
/// kappa_min are dropped.  Retained weights are the mean of the per-graph
/// weights.  When every candidate appears in every graph the correction is
/// undefined; all candidates are kept and the stats flag it.
inline NeighborGraph merge_graphs(const std::vector<NeighborGraph>& graphs, double kappa_min,
                                  MergeStats* stats = nullptr) {
    if (graphs.size() < 2) throw DataError("merge_graphs: need at least two graphs");
    const auto& ids = graphs.front().ids;
    for (const auto& g : graphs)
        if (g.ids != ids) throw DataError("merge_graphs: graphs cover different substation sets");

    struct Tally {
        std::size_t count = 0;
        double weight_sum = 0.0;
        bool fallback = false;
    };
    std::map<std::pair<std::uint32_t, std::uint32_t>, Tally> tally;
    for (const auto& g : graphs) {
        for (const auto& e : g.edges) {
            auto& t = tally[{e.a, e.b}];
            ++t.count;
            t.weight_sum += e.weight;
            t.fallback = t.fallback || e.fallback;
        }
    }
    if (tally.empty()) throw DataError("merge_graphs: no candidate edges");

    const double d = static_cast<double>(graphs.size());
    double p_bar = 0.0;
    for (const auto& [key, t] : tally) p_bar += static_cast<double>(t.count);
    p_bar /= d * static_cast<double>(tally.size());

    NeighborGraph merged;
    merged.ids = ids;
    const bool degenerate = p_bar >= 1.0;
    for (const auto& [key, t] : tally) {
        const double p_e = static_cast<double>(t.count) / d;
        double kappa = degenerate ? std::numeric_limits<double>::quiet_NaN()
                                  : (p_e - p_bar) / (1.0 - p_bar);
        if (!degenerate && kappa < kappa_min) continue;
        GraphEdge e;
        e.a = key.first;
        e.b = key.second;
        e.weight = t.weight_sum / static_cast<double>(t.count);
        e.fallback = t.fallback;
        e.kappa = kappa;
        merged.edges.push_back(e);
    }
    if (stats) {
        stats->graph_count = graphs.size();
        stats->candidate_edges = tally.size();
        stats->retained_edges = merged.edges.size();
        stats->mean_prevalence = p_bar;
        stats->degenerate = degenerate;
    }
    return merged;
}

struct SnnStats {
    std::size_t floored_denominators = 0;  // pairs whose weight sum needed the epsilon floor
};

constexpr double kSnnDenominatorFloor = 1e-9;

/// Shared-nearest-neighbour similarity: for each pair, the squared count
/// of shared neighbours over the summed edge weights into the shared
/// neighbourhood.  Pairs without shared neighbours score 0.
inline SimilarityMatrix snn_similarity(const NeighborGraph& g, SnnStats* stats = nullptr) {
    const std::size_t n = g.size();
    if (n < 2) throw DataError("snn_similarity: need at least two substations");
    SimilarityMatrix s(g.ids);
    auto adj = g.adjacency();
    std::size_t floored = 0;

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& ai = adj[i];
            const auto& aj = adj[j];
            std::size_t shared = 0;
            double weight_sum = 0.0;
            std::size_t x = 0, y = 0;
            while (x < ai.size() && y < aj.size()) {
                if (ai[x].first < aj[y].first) {
                    ++x;
                } else if (ai[x].first > aj[y].first) {
                    ++y;
                } else {
                    ++shared;
                    weight_sum += ai[x].second + aj[y].second;
                    ++x;
                    ++y;
                }
            }
            if (shared == 0) continue;
            double denom = weight_sum;
            if (denom < kSnnDenominatorFloor) {
                denom = kSnnDenominatorFloor;
                ++floored;
            }
            s.set_symmetric(i, j, static_cast<double>(shared) * static_cast<double>(shared) / denom);
        }
    }
    if (stats) stats->floored_denominators = floored;
    return s;
}

}  // namespace shedad
