#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cluster.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "matrix.hpp"

namespace shedad {

/// Intra-cluster cohesion: mean edge weight of the cluster's minimum
/// spanning tree (n-1 edges).  Singletons contribute 0.
inline double mean_mst_distance(const std::vector<std::string>& member_ids,
                                const DistanceMatrix& dist) {
    if (member_ids.size() < 2) return 0.0;
    NeighborGraph tree = minimum_spanning_tree(member_ids, dist);
    return total_weight(tree) / static_cast<double>(tree.edges.size());
}

/// Population variance of the pairwise distances inside a cluster.
/// Clusters with fewer than three members have no spread to measure and
/// contribute 0.
inline double intra_cluster_variance(const std::vector<std::string>& member_ids,
                                     const DistanceMatrix& dist) {
    if (member_ids.size() < 3) return 0.0;
    auto index = dist.index();
    std::vector<std::size_t> src;
    src.reserve(member_ids.size());
    for (const auto& id : member_ids) {
        auto it = index.find(id);
        if (it == index.end())
            throw DataError("intra_cluster_variance: id " + id + " missing from distance matrix");
        src.push_back(it->second);
    }
    std::vector<double> pair_dists;
    pair_dists.reserve(src.size() * (src.size() - 1) / 2);
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t j = i + 1; j < src.size(); ++j)
            pair_dists.push_back(dist.at(src[i], src[j]));
    double mean = 0.0;
    for (double d : pair_dists) mean += d;
    mean /= static_cast<double>(pair_dists.size());
    double var = 0.0;
    for (double d : pair_dists) var += (d - mean) * (d - mean);
    return var / static_cast<double>(pair_dists.size());
}

struct ClusterQualityRow {
    int cluster = 0;
    std::size_t size = 0;
    bool singleton = false;
    double mean_mst = 0.0;
    double variance = 0.0;
};

struct ClusterQuality {
    std::vector<ClusterQualityRow> clusters;
    double aggregate_mean_mst = 0.0;  // mean over clusters
    double aggregate_variance = 0.0;
};

inline ClusterQuality cluster_quality(const ClusterAssignment& assignment,
                                      const DistanceMatrix& dist) {
    ClusterQuality out;
    out.clusters.reserve(static_cast<std::size_t>(assignment.n_clusters));
    for (int c = 0; c < assignment.n_clusters; ++c) {
        auto members = assignment.members(c);
        ClusterQualityRow row;
        row.cluster = c;
        row.size = members.size();
        row.singleton = assignment.singleton_flags[static_cast<std::size_t>(c)];
        row.mean_mst = mean_mst_distance(members, dist);
        row.variance = intra_cluster_variance(members, dist);
        out.clusters.push_back(row);
        out.aggregate_mean_mst += row.mean_mst;
        out.aggregate_variance += row.variance;
    }
    if (!out.clusters.empty()) {
        out.aggregate_mean_mst /= static_cast<double>(out.clusters.size());
        out.aggregate_variance /= static_cast<double>(out.clusters.size());
    }
    return out;
}

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::optional<double> sensitivity() const {
        if (tp + fn == 0) return std::nullopt;
        return static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    std::optional<double> specificity() const {
        if (tn + fp == 0) return std::nullopt;
        return static_cast<double>(tn) / static_cast<double>(tn + fp);
    }
};

/// Confusion counts over an explicit population.  Predicted and truth sets
/// must both be drawn from the population; anything else is a data error
/// (typically a report evaluated against the wrong ground truth).
inline ConfusionCounts confusion_counts(const std::set<std::string>& predicted,
                                        const std::set<std::string>& truth,
                                        const std::vector<std::string>& population) {
    std::set<std::string> pop(population.begin(), population.end());
    std::string strays;
    for (const auto& id : predicted)
        if (!pop.count(id)) strays += (strays.empty() ? "" : ", ") + id;
    if (!strays.empty())
        throw DataError("confusion_counts: predicted ids outside the population: " + strays);
    for (const auto& id : truth)
        if (!pop.count(id)) strays += (strays.empty() ? "" : ", ") + id;
    if (!strays.empty())
        throw DataError("confusion_counts: truth ids outside the population: " + strays);

    ConfusionCounts out;
    for (const auto& id : pop) {
        const bool p = predicted.count(id) > 0;
        const bool t = truth.count(id) > 0;
        if (p && t) ++out.tp;
        else if (p && !t) ++out.fp;
        else if (!p && t) ++out.fn;
        else ++out.tn;
    }
    return out;
}

}  // namespace shedad
