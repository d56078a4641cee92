#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "anomaly.hpp"
#include "cluster.hpp"
#include "config.hpp"
#include "dtw.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "metrics.hpp"
#include "series.hpp"
#include "snn.hpp"

namespace shedad {

using Logger = std::function<void(const std::string&)>;

struct PipelineResult {
    std::vector<std::int64_t> sampled_dates;
    std::vector<DailyProfile> profiles;        // only the sampled dates
    std::vector<DistanceMatrix> daily;         // one per sampled date
    std::vector<NeighborGraph> day_graphs;
    std::vector<AdaptiveKnnInfo> knn_info;
    NeighborGraph merged;
    MergeStats merge_stats;
    SimilarityMatrix snn;
    SnnStats snn_stats;
    DistanceMatrix dissimilarity;
    Dendrogram dendrogram;
    ClusterAssignment assignment;
    DistanceMatrix euclidean;
    AnomalyScorecard scores;
    ClusterQuality quality;
};

namespace detail {

class StageTimer {
public:
    StageTimer(const Logger& log, std::string name) : log_(log), name_(std::move(name)) {
        t0_ = std::chrono::steady_clock::now();
    }
    void done(const std::string& info) {
        if (!log_) return;
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0_)
                            .count();
        log_("stage " + name_ + ": " + info + " (" + std::to_string(ms) + " ms)");
    }

private:
    const Logger& log_;
    std::string name_;
    std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

/// The full detection pipeline on validated, aligned series.  Every
/// stochastic choice derives from cfg.seed; worker count only affects wall
/// time.
inline PipelineResult run_pipeline(const std::vector<SubstationSeries>& series,
                                   const RunConfig& cfg, const Logger& log = {}) {
    validate_run_config(cfg);
    if (series.size() < 2) throw DataError("pipeline: need at least two substations");
    if (static_cast<std::size_t>(cfg.n_clusters) > series.size())
        throw DataError("pipeline: n_clusters (" + std::to_string(cfg.n_clusters) +
                        ") exceeds the retained substation count (" +
                        std::to_string(series.size()) + ")");

    PipelineResult res;

    {
        detail::StageTimer timer(log, "segment");
        std::map<std::int64_t, std::size_t> date_counts;
        for (const auto& s : series) {
            auto profiles = segment_days(s, cfg.timezone_offset_min);
            for (auto& p : profiles) {
                ++date_counts[p.date];
                res.profiles.push_back(std::move(p));
            }
        }
        std::vector<std::int64_t> complete;
        for (const auto& [date, count] : date_counts)
            if (count == series.size()) complete.push_back(date);
        if (complete.empty())
            throw DataError("pipeline: no complete day shared by every substation");
        res.sampled_dates = sample_days(complete, static_cast<std::size_t>(cfg.r), cfg.seed);

        std::set<std::int64_t> keep(res.sampled_dates.begin(), res.sampled_dates.end());
        std::vector<DailyProfile> kept;
        kept.reserve(series.size() * keep.size());
        for (auto& p : res.profiles)
            if (keep.count(p.date)) kept.push_back(std::move(p));
        res.profiles = std::move(kept);

        std::string dates;
        for (auto d : res.sampled_dates) dates += (dates.empty() ? "" : ",") + format_date(d);
        timer.done(std::to_string(series.size()) + " substations, sampled days " + dates);
    }

    {
        detail::StageTimer timer(log, "dtw");
        res.daily = daily_distance_matrices(res.profiles, res.sampled_dates, cfg.band_radius,
                                            cfg.workers, cfg.cache_dir);
        timer.done(std::to_string(res.daily.size()) + " daily matrices of " +
                   std::to_string(res.daily.front().size()) + " substations, band " +
                   std::to_string(cfg.band_radius));
    }

    {
        detail::StageTimer timer(log, "knn");
        AdaptiveKnnParams params;
        params.k_b = cfg.k_b;
        params.theta_min = cfg.theta_min;
        params.theta_max = cfg.theta_max;
        params.thresholds_as_quantiles = cfg.thresholds_as_quantiles;
        std::string edge_counts;
        for (const auto& m : res.daily) {
            AdaptiveKnnInfo info;
            res.day_graphs.push_back(adaptive_knn(m, params, &info));
            edge_counts += (edge_counts.empty() ? "" : ",") +
                           std::to_string(res.day_graphs.back().edges.size());
            res.knn_info.push_back(std::move(info));
        }
        timer.done("per-day edges " + edge_counts);
    }

    {
        detail::StageTimer timer(log, "merge");
        if (res.day_graphs.size() == 1) {
            // A single day has no agreement to measure; its graph passes
            // through unchanged.
            res.merged = res.day_graphs.front();
            res.merge_stats.graph_count = 1;
            res.merge_stats.candidate_edges = res.merged.edges.size();
            res.merge_stats.retained_edges = res.merged.edges.size();
            res.merge_stats.mean_prevalence = 1.0;
            res.merge_stats.degenerate = true;
            timer.done("single day, merge skipped, " +
                       std::to_string(res.merged.edges.size()) + " edges");
        } else {
            res.merged = merge_graphs(res.day_graphs, cfg.kappa_min, &res.merge_stats);
            timer.done(std::to_string(res.merge_stats.candidate_edges) + " candidates -> " +
                       std::to_string(res.merge_stats.retained_edges) + " retained, p-bar " +
                       std::to_string(res.merge_stats.mean_prevalence) +
                       (res.merge_stats.degenerate ? " [degenerate: full agreement]" : ""));
        }
    }

    {
        detail::StageTimer timer(log, "snn");
        res.snn = snn_similarity(res.merged, &res.snn_stats);
        res.dissimilarity = similarity_to_dissimilarity(res.snn);
        std::string note = res.snn_stats.floored_denominators > 0
                               ? " [" + std::to_string(res.snn_stats.floored_denominators) +
                                     " denominators floored]"
                               : "";
        timer.done("similarity over " + std::to_string(res.snn.size()) + " substations" + note);
    }

    {
        detail::StageTimer timer(log, "cluster");
        res.dendrogram = ward_agglomerative(res.dissimilarity);
        res.assignment = cut(res.dendrogram, cfg.n_clusters, cfg.singleton_threshold);
        std::size_t singles = 0;
        for (bool f : res.assignment.singleton_flags)
            if (f) ++singles;
        timer.done(std::to_string(cfg.n_clusters) + " clusters, " + std::to_string(singles) +
                   " singleton-flagged");
    }

    {
        detail::StageTimer timer(log, "score");
        res.euclidean = euclidean_matrix(series, cfg.workers);
        res.scores = detect(res.assignment, series, res.euclidean, cfg.effective_comparison_k());
        const auto supply = res.scores.supply_anomalies();
        const auto perf = res.scores.predicted_performance(cfg.flag_threshold);
        timer.done(std::to_string(supply.size()) + " supply anomalies, " +
                   std::to_string(perf.size()) + " performance anomalies");
    }

    {
        detail::StageTimer timer(log, "quality");
        res.quality = cluster_quality(res.assignment, res.euclidean);
        timer.done("mean-tree-distance " + std::to_string(res.quality.aggregate_mean_mst) +
                   ", variance " + std::to_string(res.quality.aggregate_variance));
    }

    return res;
}

}  // namespace shedad
