#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "digest.hpp"
#include "errors.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "series.hpp"
#include "simulator.hpp"

namespace shedad {

struct CmdOptions {
    bool force = false;       // allow overwriting existing outputs
    bool debug_dump = false;  // write intermediate matrices and graphs
};

namespace detail {

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
}

inline void refuse_overwrite(const std::string& path, bool force) {
    if (!force && std::filesystem::exists(path))
        throw DataError("output '" + path + "' already exists (pass --force to overwrite)");
}

inline std::uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    Fnv1a64 h;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h.update(buf, static_cast<std::size_t>(in.gcount()));
    return h.value;
}

}  // namespace detail

/// Generate a synthetic network, emit the meter CSV and its ground truth.
inline void cmd_simulate(RunConfig cfg, const CmdOptions& opts, const Logger& log = {}) {
    validate_run_config(cfg);
    cfg.sim.seed = cfg.seed;  // one seed drives everything

    detail::ensure_dir(cfg.out_dir);
    const std::string data_path = cfg.out_dir + "/data.csv";
    const std::string truth_path = cfg.out_dir + "/ground_truth.json";
    const std::string manifest_path = cfg.out_dir + "/manifest.json";
    for (const auto& p : {data_path, truth_path, manifest_path})
        detail::refuse_overwrite(p, opts.force);

    Topology topo = generate_network(cfg.sim);
    std::vector<FaultSpec> faults = cfg.faults_file.empty()
                                        ? default_faults(topo, cfg.sim)
                                        : load_faults_json(cfg.faults_file);
    SimResult result = simulate(topo, cfg.sim, faults);
    if (log)
        log("simulate: " + std::to_string(topo.n) + " substations, " +
            std::to_string(cfg.sim.days) + " days, " + std::to_string(faults.size()) +
            " faults, " + std::to_string(result.gaps.size()) + " withheld samples");

    emit_csv(result, data_path);
    write_ground_truth_json(truth_path, result.truth);
    write_manifest_json(manifest_path, cfg, {"data.csv", "ground_truth.json"});
}

/// Full detection run: ingest, cluster, score, write reports.
inline void cmd_run(RunConfig cfg, const CmdOptions& opts, const Logger& log = {}) {
    validate_run_config(cfg);
    if (cfg.input.empty()) throw DataError("run: no input CSV given (config key 'input')");

    detail::ensure_dir(cfg.out_dir);
    const std::string report_json = cfg.out_dir + "/report.json";
    const std::string report_csv = cfg.out_dir + "/report.csv";
    const std::string assignment_csv = cfg.out_dir + "/assignment.csv";
    const std::string metrics_json = cfg.out_dir + "/metrics.json";
    const std::string exclusions_json = cfg.out_dir + "/exclusions.json";
    const std::string manifest_path = cfg.out_dir + "/manifest.json";
    for (const auto& p :
         {report_json, report_csv, assignment_csv, metrics_json, exclusions_json, manifest_path})
        detail::refuse_overwrite(p, opts.force);
    if (!cfg.cache_dir.empty()) detail::ensure_dir(cfg.cache_dir);

    const std::uint64_t input_digest = detail::file_digest(cfg.input);
    auto groups = load_csv(cfg.input);
    AlignedData aligned = validate_and_align(groups);
    if (log)
        log("ingest: " + std::to_string(aligned.series.size()) + " substations retained, " +
            std::to_string(aligned.exclusions.size()) + " excluded, window " +
            format_timestamp_utc(aligned.start) + " .. " + format_timestamp_utc(aligned.end));

    PipelineResult res = run_pipeline(aligned.series, cfg, log);

    write_report_json(report_json, res, cfg);
    write_report_csv(report_csv, res, cfg);
    write_assignment_csv(assignment_csv, res.assignment, cfg);
    write_metrics_json(metrics_json, res.quality, cfg, "euclidean");
    write_exclusions_json(exclusions_json, aligned.exclusions, aligned.series.size(), cfg);
    std::vector<std::string> outputs = {"report.json",  "report.csv",      "assignment.csv",
                                        "metrics.json", "exclusions.json"};

    if (opts.debug_dump) {
        const std::string dbg = cfg.out_dir + "/debug";
        detail::ensure_dir(dbg);
        for (std::size_t d = 0; d < res.daily.size(); ++d) {
            const std::string date = format_date(res.sampled_dates[d]);
            write_matrix_csv(res.daily[d], dbg + "/dtw_" + date + ".csv");
            write_graph_csv(res.day_graphs[d], dbg + "/knn_" + date + ".csv");
        }
        write_graph_csv(res.merged, dbg + "/merged_graph.csv");
        write_matrix_csv(res.snn, dbg + "/snn_similarity.csv");
        write_matrix_csv(res.dissimilarity, dbg + "/dissimilarity.csv");
        write_matrix_csv(res.euclidean, dbg + "/euclidean.csv");
        write_dendrogram_json(dbg + "/dendrogram.json", res.dendrogram, cfg);
        outputs.push_back("debug/");
    }
    write_manifest_json(manifest_path, cfg, outputs, input_digest, true);
}

/// Compare a detection report against simulator ground truth.
inline nlohmann::json cmd_eval(const std::string& report_path, const std::string& truth_path,
                               const std::string& out_path, bool force) {
    LoadedReport report = load_report_json(report_path);
    GroundTruth truth = load_ground_truth_json(truth_path);
    nlohmann::json result = evaluate_against_truth(report, truth);
    if (!out_path.empty()) {
        detail::refuse_overwrite(out_path, force);
        detail::write_text_file(out_path, result.dump(2) + "\n");
    }
    return result;
}

/// A labelling to score in cmd_metrics: method name plus assignment CSV.
struct LabelingInput {
    std::string method;
    std::string path;
};

namespace detail {

inline std::map<std::string, int> load_labels_csv(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string_view> fields;
    std::map<std::string, int> labels;
    bool header_seen = false;
    std::size_t id_col = 0, cluster_col = 1;
    while (reader.next(fields)) {
        if (!fields.empty() && !fields[0].empty() && fields[0][0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            bool found = false;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i] == "substation_id") id_col = i;
                if (fields[i] == "cluster_id") {
                    cluster_col = i;
                    found = true;
                }
            }
            if (!found) reader.fail("missing 'cluster_id' column");
            continue;
        }
        if (fields.size() <= std::max(id_col, cluster_col)) reader.fail("short row");
        int value = 0;
        const auto sv = fields[cluster_col];
        auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
        if (ec != std::errc() || ptr != sv.data() + sv.size())
            reader.fail("invalid cluster id '" + std::string(sv) + "'");
        if (!labels.emplace(std::string(fields[id_col]), value).second)
            reader.fail("duplicate substation '" + std::string(fields[id_col]) + "'");
    }
    if (labels.empty()) throw DataError(path + ": no labels");
    return labels;
}

/// Relabel arbitrary cluster ids to the contiguous convention.
inline ClusterAssignment assignment_from_labels(const std::map<std::string, int>& labels,
                                                int singleton_threshold) {
    ClusterAssignment out;
    std::map<int, int> remap;
    for (const auto& [id, raw] : labels) {
        out.ids.push_back(id);
        auto [it, inserted] = remap.emplace(raw, static_cast<int>(remap.size()));
        out.labels.push_back(it->second);
    }
    out.n_clusters = static_cast<int>(remap.size());
    out.sizes.assign(static_cast<std::size_t>(out.n_clusters), 0);
    for (int l : out.labels) ++out.sizes[static_cast<std::size_t>(l)];
    for (std::size_t s : out.sizes)
        out.singleton_flags.push_back(s <= static_cast<std::size_t>(singleton_threshold));
    return out;
}

}  // namespace detail

/// Score one or more labelings of the same input against the Euclidean
/// geometry; emits the plot-ready long CSV (method, k, metric, value).
inline void cmd_metrics(const RunConfig& cfg, const std::vector<LabelingInput>& labelings,
                        const std::string& out_path, const CmdOptions& opts,
                        const Logger& log = {}) {
    validate_run_config(cfg);
    if (cfg.input.empty()) throw DataError("metrics: no input CSV given (config key 'input')");
    if (labelings.empty()) throw DataError("metrics: no labelings given");
    detail::refuse_overwrite(out_path, opts.force);

    auto groups = load_csv(cfg.input);
    AlignedData aligned = validate_and_align(groups);
    DistanceMatrix geometry = euclidean_matrix(aligned.series, cfg.workers);
    std::set<std::string> retained(geometry.ids.begin(), geometry.ids.end());

    std::vector<MetricRow> rows;
    for (const auto& labeling : labelings) {
        auto labels = detail::load_labels_csv(labeling.path);
        std::string missing;
        for (const auto& id : retained)
            if (!labels.count(id)) missing += (missing.empty() ? "" : ", ") + id;
        if (!missing.empty())
            throw DataError(labeling.path + ": no cluster for retained substations: " + missing);
        for (const auto& [id, l] : labels)
            if (!retained.count(id))
                throw DataError(labeling.path + ": unknown substation '" + id + "'");

        ClusterAssignment assignment =
            detail::assignment_from_labels(labels, cfg.singleton_threshold);
        ClusterQuality quality = cluster_quality(assignment, geometry);
        rows.push_back({labeling.method, assignment.n_clusters, "mean_mst",
                        quality.aggregate_mean_mst});
        rows.push_back({labeling.method, assignment.n_clusters, "variance",
                        quality.aggregate_variance});
        if (log)
            log("metrics: " + labeling.method + " k=" + std::to_string(assignment.n_clusters) +
                " mean_mst=" + std::to_string(quality.aggregate_mean_mst) +
                " variance=" + std::to_string(quality.aggregate_variance));
    }
    write_metrics_long_csv(out_path, rows);
}

}  // namespace shedad
