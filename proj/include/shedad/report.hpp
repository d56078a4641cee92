#pragma once

#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "digest.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"
#include "simulator.hpp"

namespace shedad {

constexpr const char* kToolVersion = "shedad 0.1.0";

namespace detail {

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << content;
}

inline nlohmann::json config_json(const RunConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : config_entries(cfg)) j[k] = v;
    return j;
}

inline std::string csv_header_comment(const RunConfig& cfg) {
    return "# config_digest=" + hex64(config_digest(cfg)) + " seed=" + std::to_string(cfg.seed) +
           "\n";
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    return j;
}

}  // namespace detail

inline void write_report_json(const std::string& path, const PipelineResult& res,
                              const RunConfig& cfg) {
    nlohmann::json j;
    j["config"] = detail::config_json(cfg);
    j["config_digest"] = hex64(config_digest(cfg));
    j["seed"] = cfg.seed;

    nlohmann::json population = nlohmann::json::array();
    for (const auto& e : res.scores.entries) population.push_back(e.id);
    j["population"] = population;

    nlohmann::json supply = nlohmann::json::array();
    nlohmann::json performance = nlohmann::json::array();
    std::size_t singleton_clusters = 0;
    for (bool f : res.assignment.singleton_flags)
        if (f) ++singleton_clusters;
    for (const auto& e : res.scores.entries) {
        if (e.supply_anomaly) {
            supply.push_back({{"id", e.id}, {"cluster", e.cluster}});
        } else if (e.comparisons > 0 && e.score > cfg.flag_threshold) {
            performance.push_back({{"id", e.id},
                                   {"cluster", e.cluster},
                                   {"score", e.score},
                                   {"comparisons", e.comparisons},
                                   {"flags", e.flags},
                                   {"mean_delta_t", e.mean_delta_t}});
        }
    }
    j["supply_anomalies"] = supply;
    j["performance_anomalies"] = performance;
    j["counts"] = {{"substations", res.scores.entries.size()},
                   {"clusters", res.assignment.n_clusters},
                   {"singleton_clusters", singleton_clusters},
                   {"supply_anomalies", supply.size()},
                   {"performance_anomalies", performance.size()}};
    detail::write_text_file(path, j.dump(2) + "\n");
}

/// One row per substation: the full scorecard.
inline void write_report_csv(const std::string& path, const PipelineResult& res,
                             const RunConfig& cfg) {
    std::string out = detail::csv_header_comment(cfg);
    out += "substation_id,cluster_id,singleton_flag,supply_anomaly,score,comparisons,flags,mean_"
           "delta_t\n";
    char buf[160];
    for (const auto& e : res.scores.entries) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%.6f,%d,%d,%.6f\n", e.id.c_str(), e.cluster,
                      res.assignment.singleton_flags[static_cast<std::size_t>(e.cluster)] ? 1 : 0,
                      e.supply_anomaly ? 1 : 0, e.score, e.comparisons, e.flags, e.mean_delta_t);
        out += buf;
    }
    detail::write_text_file(path, out);
}

inline void write_assignment_csv(const std::string& path, const ClusterAssignment& assignment,
                                 const RunConfig& cfg) {
    std::string out = detail::csv_header_comment(cfg);
    out += "substation_id,cluster_id,singleton_flag\n";
    for (std::size_t i = 0; i < assignment.ids.size(); ++i) {
        const int c = assignment.labels[i];
        out += assignment.ids[i] + "," + std::to_string(c) + "," +
               (assignment.singleton_flags[static_cast<std::size_t>(c)] ? "1" : "0") + "\n";
    }
    detail::write_text_file(path, out);
}

inline void write_metrics_json(const std::string& path, const ClusterQuality& quality,
                               const RunConfig& cfg, const std::string& distance_kind) {
    nlohmann::json j;
    j["config"] = detail::config_json(cfg);
    j["config_digest"] = hex64(config_digest(cfg));
    j["seed"] = cfg.seed;
    j["distance"] = distance_kind;
    j["aggregate"] = {{"mean_mst", quality.aggregate_mean_mst},
                      {"variance", quality.aggregate_variance}};
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& row : quality.clusters)
        clusters.push_back({{"cluster", row.cluster},
                            {"size", row.size},
                            {"singleton", row.singleton},
                            {"mean_mst", row.mean_mst},
                            {"variance", row.variance}});
    j["clusters"] = clusters;
    detail::write_text_file(path, j.dump(2) + "\n");
}

inline void write_exclusions_json(const std::string& path, const std::vector<Exclusion>& exclusions,
                                  std::size_t retained, const RunConfig& cfg) {
    nlohmann::json j;
    j["config_digest"] = hex64(config_digest(cfg));
    j["retained"] = retained;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : exclusions)
        list.push_back({{"substation_id", e.id}, {"reason", e.reason}});
    j["excluded"] = list;
    detail::write_text_file(path, j.dump(2) + "\n");
}

/// Nested dendrogram: internal nodes are {left, right, height}, leaves are
/// {id}.
inline void write_dendrogram_json(const std::string& path, const Dendrogram& dendro,
                                  const RunConfig& cfg) {
    std::vector<nlohmann::json> nodes;
    nodes.reserve(dendro.leaves() + dendro.merges.size());
    for (const auto& id : dendro.ids) nodes.push_back({{"id", id}});
    for (const auto& m : dendro.merges) {
        nlohmann::json node;
        node["left"] = std::move(nodes[static_cast<std::size_t>(m.left)]);
        node["right"] = std::move(nodes[static_cast<std::size_t>(m.right)]);
        node["height"] = m.height;
        nodes.push_back(std::move(node));
    }
    nlohmann::json j;
    j["config_digest"] = hex64(config_digest(cfg));
    if (dendro.merges.empty()) {
        // No merges (single leaf): emit the forest as-is.
        j["root"] = nodes.empty() ? nlohmann::json(nullptr) : nodes.front();
    } else {
        j["root"] = nodes.back();
    }
    detail::write_text_file(path, j.dump() + "\n");
}

inline void write_manifest_json(const std::string& path, const RunConfig& cfg,
                                const std::vector<std::string>& outputs,
                                std::uint64_t input_digest = 0, bool has_input = false) {
    nlohmann::json j;
    j["tool"] = kToolVersion;
    j["config"] = detail::config_json(cfg);
    j["config_digest"] = hex64(config_digest(cfg));
    j["seed"] = cfg.seed;
    if (has_input) j["input_digest"] = hex64(input_digest);
    j["outputs"] = outputs;
    detail::write_text_file(path, j.dump(2) + "\n");
}

inline void write_ground_truth_json(const std::string& path, const GroundTruth& truth) {
    nlohmann::json j;
    nlohmann::json subs = nlohmann::json::array();
    for (const auto& s : truth.substations)
        subs.push_back({{"id", s.id}, {"x", s.x}, {"y", s.y}, {"branch", s.branch}});
    j["substations"] = subs;
    j["supply_anomalies"] = truth.supply_anomaly_ids;
    j["performance_anomalies"] = truth.performance_anomaly_ids;
    nlohmann::json faults = nlohmann::json::array();
    for (const auto& f : truth.faults)
        faults.push_back({{"substation_id", f.substation_id},
                          {"kind", fault_kind_name(f.kind)},
                          {"start", format_timestamp_utc(f.start)},
                          {"duration_min", f.duration_min},
                          {"magnitude", f.magnitude}});
    j["faults"] = faults;
    detail::write_text_file(path, j.dump(2) + "\n");
}

inline GroundTruth load_ground_truth_json(const std::string& path) {
    nlohmann::json j = detail::load_json_file(path);
    GroundTruth truth;
    try {
        for (const auto& s : j.at("substations")) {
            SubstationInfo info;
            info.id = s.at("id").get<std::string>();
            info.x = s.at("x").get<double>();
            info.y = s.at("y").get<double>();
            info.branch = s.at("branch").get<int>();
            truth.substations.push_back(std::move(info));
        }
        truth.supply_anomaly_ids = j.at("supply_anomalies").get<std::vector<std::string>>();
        truth.performance_anomaly_ids =
            j.at("performance_anomalies").get<std::vector<std::string>>();
        if (j.contains("faults")) {
            for (const auto& f : j.at("faults")) {
                FaultSpec spec;
                spec.substation_id = f.at("substation_id").get<std::string>();
                spec.kind = fault_kind_from_name(f.at("kind").get<std::string>());
                spec.start = parse_timestamp(f.at("start").get<std::string>());
                spec.duration_min = f.at("duration_min").get<std::int64_t>();
                spec.magnitude = f.at("magnitude").get<double>();
                truth.faults.push_back(std::move(spec));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": bad ground truth schema: " + e.what());
    }
    return truth;
}

/// Fault book for cmd_simulate --faults: a JSON array of fault specs.
inline std::vector<FaultSpec> load_faults_json(const std::string& path) {
    nlohmann::json j = detail::load_json_file(path);
    std::vector<FaultSpec> out;
    try {
        for (const auto& f : j) {
            FaultSpec spec;
            spec.substation_id = f.at("substation_id").get<std::string>();
            spec.kind = fault_kind_from_name(f.at("kind").get<std::string>());
            spec.start = parse_timestamp(f.at("start").get<std::string>());
            spec.duration_min = f.at("duration_min").get<std::int64_t>();
            spec.magnitude = f.at("magnitude").get<double>();
            out.push_back(std::move(spec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": bad fault book schema: " + e.what());
    }
    return out;
}

struct LoadedReport {
    std::set<std::string> supply;
    std::set<std::string> performance;
    std::vector<std::string> population;
};

inline LoadedReport load_report_json(const std::string& path) {
    nlohmann::json j = detail::load_json_file(path);
    LoadedReport out;
    try {
        out.population = j.at("population").get<std::vector<std::string>>();
        for (const auto& e : j.at("supply_anomalies"))
            out.supply.insert(e.at("id").get<std::string>());
        for (const auto& e : j.at("performance_anomalies"))
            out.performance.insert(e.at("id").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": bad report schema: " + e.what());
    }
    return out;
}

namespace detail {

inline nlohmann::json confusion_json(const ConfusionCounts& c) {
    nlohmann::json j;
    j["tp"] = c.tp;
    j["fp"] = c.fp;
    j["fn"] = c.fn;
    j["tn"] = c.tn;
    auto sens = c.sensitivity();
    auto spec = c.specificity();
    j["sensitivity"] = sens ? nlohmann::json(*sens) : nlohmann::json(nullptr);
    j["specificity"] = spec ? nlohmann::json(*spec) : nlohmann::json(nullptr);
    return j;
}

}  // namespace detail

/// Ground-truth evaluation: separate confusion matrices for the supply and
/// performance categories, plus a pooled one where a hit by either route
/// counts.
inline nlohmann::json evaluate_against_truth(const LoadedReport& report,
                                             const GroundTruth& truth) {
    std::set<std::string> truth_supply(truth.supply_anomaly_ids.begin(),
                                       truth.supply_anomaly_ids.end());
    std::set<std::string> truth_perf(truth.performance_anomaly_ids.begin(),
                                     truth.performance_anomaly_ids.end());
    std::set<std::string> pred_pooled = report.supply;
    pred_pooled.insert(report.performance.begin(), report.performance.end());
    std::set<std::string> truth_pooled = truth_supply;
    truth_pooled.insert(truth_perf.begin(), truth_perf.end());

    nlohmann::json j;
    j["population_size"] = report.population.size();
    j["supply"] =
        detail::confusion_json(confusion_counts(report.supply, truth_supply, report.population));
    j["performance"] = detail::confusion_json(
        confusion_counts(report.performance, truth_perf, report.population));
    j["pooled"] =
        detail::confusion_json(confusion_counts(pred_pooled, truth_pooled, report.population));
    return j;
}

struct MetricRow {
    std::string method;
    int k = 0;
    std::string metric;
    double value = 0.0;
};

/// Plot-ready long format.
inline void write_metrics_long_csv(const std::string& path, const std::vector<MetricRow>& rows) {
    std::string out = "method,k,metric,value\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), ",%d,%s,%.9g\n", r.k, r.metric.c_str(), r.value);
        out += r.method + buf;
    }
    detail::write_text_file(path, out);
}

}  // namespace shedad
