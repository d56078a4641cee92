#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "digest.hpp"
#include "errors.hpp"
#include "simulator.hpp"

namespace shedad {

/// Everything a run needs, one seed included.  Flat key=value config files
/// map 1:1 onto these fields; CLI flags override file values.
struct RunConfig {
    std::string input;
    std::string out_dir = "out";
    std::uint64_t seed = 1;

    int r = 7;                 // sampled days
    int band_radius = 12;      // DTW band, in samples
    int k_b = 10;              // baseline neighbour count
    double theta_min = 0.10;
    double theta_max = 0.90;
    bool thresholds_as_quantiles = true;
    double kappa_min = 0.6;
    int n_clusters = 30;
    int singleton_threshold = 1;
    int comparison_k = 0;      // 0: use k_b
    double flag_threshold = 0.0;
    int timezone_offset_min = 0;
    unsigned workers = 0;      // 0: hardware concurrency
    std::string cache_dir;     // empty: no DTW cache
    std::string faults_file;   // simulate: explicit fault book (JSON)

    SimConfig sim;

    int effective_comparison_k() const { return comparison_k > 0 ? comparison_k : k_b; }
};

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.c_str();
    const char* last = first + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw DataError("config key '" + key + "': invalid value '" + value + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw DataError("config key '" + key + "': expected true/false, got '" + value + "'");
}

struct ConfigField {
    const char* key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

inline const std::vector<ConfigField>& config_fields() {
    auto str_field = [](const char* key, std::string RunConfig::* member) {
        return ConfigField{key, [member](const RunConfig& c) { return c.*member; },
                           [member](RunConfig& c, const std::string&, const std::string& v) {
                               c.*member = v;
                           }};
    };
    auto int_field = [](const char* key, auto member_ptr) {
        using Owner = RunConfig;
        return ConfigField{
            key,
            [member_ptr](const Owner& c) { return std::to_string(c.*member_ptr); },
            [member_ptr](Owner& c, const std::string& k, const std::string& v) {
                c.*member_ptr = parse_number<std::remove_reference_t<decltype(c.*member_ptr)>>(k, v);
            }};
    };
    auto dbl_field = [](const char* key, double RunConfig::* member) {
        return ConfigField{key, [member](const RunConfig& c) { return format_double(c.*member); },
                           [member](RunConfig& c, const std::string& k, const std::string& v) {
                               c.*member = parse_number<double>(k, v);
                           }};
    };
    auto bool_field = [](const char* key, bool RunConfig::* member) {
        return ConfigField{key,
                           [member](const RunConfig& c) { return c.*member ? "true" : "false"; },
                           [member](RunConfig& c, const std::string& k, const std::string& v) {
                               c.*member = parse_bool(k, v);
                           }};
    };
    auto sim_int = [](const char* key, auto member_ptr) {
        return ConfigField{
            key,
            [member_ptr](const RunConfig& c) { return std::to_string(c.sim.*member_ptr); },
            [member_ptr](RunConfig& c, const std::string& k, const std::string& v) {
                c.sim.*member_ptr =
                    parse_number<std::remove_reference_t<decltype(c.sim.*member_ptr)>>(k, v);
            }};
    };
    auto sim_dbl = [](const char* key, double SimConfig::* member) {
        return ConfigField{key,
                           [member](const RunConfig& c) { return format_double(c.sim.*member); },
                           [member](RunConfig& c, const std::string& k, const std::string& v) {
                               c.sim.*member = parse_number<double>(k, v);
                           }};
    };

    static const std::vector<ConfigField> fields = {
        str_field("input", &RunConfig::input),
        str_field("out", &RunConfig::out_dir),
        int_field("seed", &RunConfig::seed),
        int_field("r", &RunConfig::r),
        int_field("band_radius", &RunConfig::band_radius),
        int_field("k_b", &RunConfig::k_b),
        dbl_field("theta_min", &RunConfig::theta_min),
        dbl_field("theta_max", &RunConfig::theta_max),
        bool_field("thresholds_as_quantiles", &RunConfig::thresholds_as_quantiles),
        dbl_field("kappa_min", &RunConfig::kappa_min),
        int_field("n_clusters", &RunConfig::n_clusters),
        int_field("singleton_threshold", &RunConfig::singleton_threshold),
        int_field("comparison_k", &RunConfig::comparison_k),
        dbl_field("flag_threshold", &RunConfig::flag_threshold),
        int_field("timezone_offset_min", &RunConfig::timezone_offset_min),
        int_field("workers", &RunConfig::workers),
        str_field("cache_dir", &RunConfig::cache_dir),
        str_field("faults_file", &RunConfig::faults_file),
        sim_int("sim.n_substations", &SimConfig::n_substations),
        sim_int("sim.days", &SimConfig::days),
        sim_int("sim.start", &SimConfig::start),
        sim_int("sim.branch_count", &SimConfig::branch_count),
        sim_int("sim.max_branching", &SimConfig::max_branching),
        sim_dbl("sim.trunk_min_km", &SimConfig::trunk_min_km),
        sim_dbl("sim.trunk_max_km", &SimConfig::trunk_max_km),
        sim_dbl("sim.service_min_km", &SimConfig::service_min_km),
        sim_dbl("sim.service_max_km", &SimConfig::service_max_km),
        sim_dbl("sim.loss_c_per_km", &SimConfig::loss_c_per_km),
        sim_dbl("sim.delay_samples_per_km", &SimConfig::delay_samples_per_km),
        sim_dbl("sim.flow_min_m3h", &SimConfig::flow_min_m3h),
        sim_dbl("sim.flow_max_m3h", &SimConfig::flow_max_m3h),
        sim_dbl("sim.source_base_c", &SimConfig::source_base_c),
        sim_dbl("sim.source_daily_amp_c", &SimConfig::source_daily_amp_c),
        sim_dbl("sim.source_weather_gain", &SimConfig::source_weather_gain),
        sim_dbl("sim.source_wobble_sigma_c", &SimConfig::source_wobble_sigma_c),
        sim_dbl("sim.outdoor_mean_c", &SimConfig::outdoor_mean_c),
        sim_dbl("sim.outdoor_daily_amp_c", &SimConfig::outdoor_daily_amp_c),
        sim_dbl("sim.outdoor_trend_amp_c", &SimConfig::outdoor_trend_amp_c),
        sim_dbl("sim.outdoor_trend_days", &SimConfig::outdoor_trend_days),
        sim_dbl("sim.noise_sigma_c", &SimConfig::noise_sigma_c),
        sim_dbl("sim.branch_noise_sigma_c", &SimConfig::branch_noise_sigma_c),
        sim_dbl("sim.delta_t_base_c", &SimConfig::delta_t_base_c),
        sim_dbl("sim.delta_t_slope_c_per_km", &SimConfig::delta_t_slope_c_per_km),
        sim_dbl("sim.delta_t_jitter_c", &SimConfig::delta_t_jitter_c),
        sim_dbl("sim.demand_daily_frac", &SimConfig::demand_daily_frac),
        sim_int("sim.supply_faults", &SimConfig::supply_faults),
        sim_int("sim.performance_faults", &SimConfig::performance_faults),
        sim_int("sim.gap_substations", &SimConfig::gap_substations),
        sim_int("sim.gaps_per_substation", &SimConfig::gaps_per_substation),
    };
    return fields;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Apply one "key=value" assignment.
inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& f : detail::config_fields()) {
        if (key == f.key) {
            f.set(cfg, key, value);
            return;
        }
    }
    throw DataError("unknown config key '" + key + "'");
}

/// Parse flat key=value text ('#' comments, blank lines allowed) on top of
/// the given defaults.
inline RunConfig parse_run_config(const std::string& text, RunConfig base = {}) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw DataError("config line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty())
            throw DataError("config line " + std::to_string(line_no) + ": empty key");
        apply_config_entry(base, key, value);
    }
    return base;
}

inline RunConfig load_run_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), std::move(base));
}

/// All config entries as sorted key -> rendered value.
inline std::map<std::string, std::string> config_entries(const RunConfig& cfg) {
    std::map<std::string, std::string> kv;
    for (const auto& f : detail::config_fields()) kv[f.key] = f.get(cfg);
    return kv;
}

/// Canonical form: every key, sorted, one per line.  Equal configs produce
/// identical bytes, which is what the digest and config echo rely on.
inline std::string serialize_run_config(const RunConfig& cfg) {
    std::map<std::string, std::string> kv = config_entries(cfg);
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

inline std::uint64_t config_digest(const RunConfig& cfg) {
    return fnv1a64(serialize_run_config(cfg));
}

/// Sanity checks shared by all subcommands.
inline void validate_run_config(const RunConfig& cfg) {
    auto bad = [](const std::string& msg) { throw DataError("config: " + msg); };
    if (cfg.r < 1) bad("r must be >= 1");
    if (cfg.band_radius < 0) bad("band_radius must be >= 0");
    if (cfg.k_b < 1) bad("k_b must be >= 1");
    if (cfg.thresholds_as_quantiles) {
        if (cfg.theta_min < 0.0 || cfg.theta_max > 1.0) bad("theta quantiles must lie in [0,1]");
    } else if (cfg.theta_min < 0.0) {
        bad("theta_min must be non-negative");
    }
    if (!(cfg.theta_min < cfg.theta_max)) bad("theta_min must be below theta_max");
    if (cfg.kappa_min < -1.0 || cfg.kappa_min > 1.0) bad("kappa_min must lie in [-1,1]");
    if (cfg.n_clusters < 1) bad("n_clusters must be >= 1");
    if (cfg.singleton_threshold < 0) bad("singleton_threshold must be >= 0");
    if (cfg.comparison_k < 0) bad("comparison_k must be >= 0");
    if (cfg.flag_threshold < 0.0 || cfg.flag_threshold >= 1.0)
        bad("flag_threshold must lie in [0,1)");
    if (cfg.timezone_offset_min < -1440 || cfg.timezone_offset_min > 1440)
        bad("timezone_offset_min must lie in [-1440,1440]");
}

}  // namespace shedad
