#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "csv.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "time.hpp"

namespace shedad {

constexpr int kSampleStepSeconds = 300;
constexpr int kSamplesPerDay = 86400 / kSampleStepSeconds;  // 288
constexpr double kMinPlausibleTempC = -50.0;
constexpr double kMaxPlausibleTempC = 200.0;

struct RawReading {
    std::int64_t timestamp = 0;  // UTC epoch seconds
    double supply = 0.0;
    double ret = 0.0;
    double flow = 0.0;
    double outdoor = 0.0;
};

struct SubstationReadings {
    std::string id;
    std::vector<RawReading> rows;  // sorted by timestamp, strictly increasing
};

/// One substation on the common 5-minute grid.
struct SubstationSeries {
    std::string id;
    std::int64_t start = 0;  // UTC epoch seconds of the first sample
    int step = kSampleStepSeconds;
    std::vector<double> supply;
    std::vector<double> ret;
    std::vector<double> flow;

    std::size_t size() const { return supply.size(); }
};

/// One local calendar day of supply temperature (kSamplesPerDay samples).
struct DailyProfile {
    std::string id;
    std::int64_t date = 0;  // local days since epoch
    std::vector<double> supply;
};

struct Exclusion {
    std::string id;
    std::string reason;
};

/// Maps logical column roles to CSV header names.
struct ColumnMap {
    std::string timestamp = "timestamp";
    std::string substation = "substation_id";
    std::string supply = "supply_temp";
    std::string ret = "return_temp";
    std::string flow = "flow";
    std::string outdoor = "outdoor_temp";
};

namespace detail {

/// Empty cells and literal nan markers become NaN (a missing value, which
/// later excludes the substation); anything else non-numeric is a parse
/// error at the row level.
inline bool parse_cell(std::string_view field, double& out) {
    if (field.empty() || field == "nan" || field == "NaN" || field == "NAN") {
        out = std::numeric_limits<double>::quiet_NaN();
        return true;
    }
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace detail

/// Read a meter-data CSV (any row order) and group readings per substation,
/// sorted by timestamp.  Duplicate (substation, timestamp) pairs and
/// malformed rows are hard errors with line numbers.
inline std::vector<SubstationReadings> load_csv(const std::string& path,
                                                const ColumnMap& columns = {}) {
    CsvReader reader(path);
    std::vector<std::string_view> fields;
    if (!reader.next(fields)) throw DataError(path + ": empty file (missing header)");

    auto find_column = [&](const std::string& name, bool required) -> std::size_t {
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (fields[i] == name) return i;
        if (required) reader.fail("missing required column '" + name + "'");
        return static_cast<std::size_t>(-1);
    };
    const std::size_t col_ts = find_column(columns.timestamp, true);
    const std::size_t col_id = find_column(columns.substation, true);
    const std::size_t col_supply = find_column(columns.supply, true);
    const std::size_t col_return = find_column(columns.ret, true);
    const std::size_t col_flow = find_column(columns.flow, true);
    const std::size_t col_outdoor = find_column(columns.outdoor, true);
    const std::size_t n_columns = fields.size();

    std::map<std::string, std::vector<RawReading>, std::less<>> groups;
    while (reader.next(fields)) {
        if (fields.size() != n_columns)
            reader.fail("expected " + std::to_string(n_columns) + " fields, got " +
                        std::to_string(fields.size()));
        RawReading r;
        try {
            r.timestamp = parse_timestamp(fields[col_ts]);
        } catch (const DataError& e) {
            reader.fail(e.what());
        }
        auto numeric = [&](std::size_t col, const std::string& name, double& out) {
            if (!detail::parse_cell(fields[col], out))
                reader.fail("invalid value '" + std::string(fields[col]) + "' for column '" +
                            name + "'");
        };
        numeric(col_supply, columns.supply, r.supply);
        numeric(col_return, columns.ret, r.ret);
        numeric(col_flow, columns.flow, r.flow);
        numeric(col_outdoor, columns.outdoor, r.outdoor);
        std::string_view id = fields[col_id];
        if (id.empty()) reader.fail("empty substation id");
        auto it = groups.find(id);
        if (it == groups.end()) it = groups.emplace(std::string(id), std::vector<RawReading>{}).first;
        it->second.push_back(r);
    }
    if (groups.empty()) throw DataError(path + ": no data rows");

    std::vector<SubstationReadings> out;
    out.reserve(groups.size());
    for (auto& [id, rows] : groups) {
        std::sort(rows.begin(), rows.end(),
                  [](const RawReading& a, const RawReading& b) { return a.timestamp < b.timestamp; });
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].timestamp == rows[i - 1].timestamp)
                throw DataError(path + ": duplicate timestamp " +
                                format_timestamp_utc(rows[i].timestamp) + " for substation " + id);
        out.push_back(SubstationReadings{id, std::move(rows)});
    }
    return out;
}

struct AlignedData {
    std::int64_t start = 0;
    std::int64_t end = 0;  // last sample timestamp
    std::vector<SubstationSeries> series;      // retained, sorted by id
    std::vector<Exclusion> exclusions;         // sorted by id
    std::vector<double> outdoor;               // shared channel from a retained substation
};

/// Place every substation on the common grid spanning [min ts, max ts]
/// across the whole file.  Substations with gaps, missing values, off-grid
/// timestamps or physically implausible readings are excluded (with a
/// reason) rather than repaired.
inline AlignedData validate_and_align(const std::vector<SubstationReadings>& groups) {
    if (groups.empty()) throw DataError("validate_and_align: no substations");
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& g : groups) {
        if (g.rows.empty()) continue;
        lo = std::min(lo, g.rows.front().timestamp);
        hi = std::max(hi, g.rows.back().timestamp);
    }
    if (lo > hi) throw DataError("validate_and_align: no readings");

    const std::size_t expected =
        static_cast<std::size_t>((hi - lo) / kSampleStepSeconds) + 1;
    AlignedData out;
    out.start = lo;
    out.end = hi;

    for (const auto& g : groups) {
        std::string reason;
        std::vector<double> supply(expected, std::numeric_limits<double>::quiet_NaN());
        std::vector<double> ret(expected, std::numeric_limits<double>::quiet_NaN());
        std::vector<double> flow(expected, std::numeric_limits<double>::quiet_NaN());
        std::vector<double> outdoor(expected, std::numeric_limits<double>::quiet_NaN());
        for (const auto& r : g.rows) {
            if ((r.timestamp - lo) % kSampleStepSeconds != 0) {
                reason = "off_grid_timestamp";
                break;
            }
            std::size_t slot = static_cast<std::size_t>((r.timestamp - lo) / kSampleStepSeconds);
            supply[slot] = r.supply;
            ret[slot] = r.ret;
            flow[slot] = r.flow;
            outdoor[slot] = r.outdoor;
        }
        if (reason.empty() && g.rows.size() != expected) reason = "missing_samples";
        if (reason.empty()) {
            for (std::size_t i = 0; i < expected && reason.empty(); ++i) {
                if (std::isnan(supply[i]) || std::isnan(ret[i]) || std::isnan(flow[i]) ||
                    std::isnan(outdoor[i]))
                    reason = "missing_values";
                else if (supply[i] < kMinPlausibleTempC || supply[i] > kMaxPlausibleTempC ||
                         ret[i] < kMinPlausibleTempC || ret[i] > kMaxPlausibleTempC)
                    reason = "temperature_out_of_range";
                else if (flow[i] < 0.0)
                    reason = "negative_flow";
            }
        }
        if (!reason.empty()) {
            out.exclusions.push_back(Exclusion{g.id, reason});
            continue;
        }
        SubstationSeries s;
        s.id = g.id;
        s.start = lo;
        s.supply = std::move(supply);
        s.ret = std::move(ret);
        s.flow = std::move(flow);
        out.series.push_back(std::move(s));
        if (out.outdoor.empty()) out.outdoor = std::move(outdoor);
    }
    if (out.series.empty())
        throw DataError("validate_and_align: every substation was excluded");
    return out;
}

/// Cut a series into complete local calendar days.  Partial days at either
/// end are dropped.  `tz_offset_min` shifts the day boundary away from UTC
/// midnight for networks logged in local time.
inline std::vector<DailyProfile> segment_days(const SubstationSeries& series,
                                              int tz_offset_min = 0) {
    std::vector<DailyProfile> out;
    if (series.size() == 0) return out;
    const std::int64_t offset = static_cast<std::int64_t>(tz_offset_min) * 60;
    const std::int64_t local_start = series.start + offset;
    std::int64_t first_midnight = (local_start / 86400) * 86400;
    if (first_midnight < local_start) first_midnight += 86400;

    std::int64_t t = first_midnight;
    while (true) {
        std::int64_t begin = t - offset;  // back to UTC
        std::int64_t idx = (begin - series.start) / series.step;
        if (idx < 0 || (begin - series.start) % series.step != 0) break;
        if (static_cast<std::size_t>(idx) + kSamplesPerDay > series.size()) break;
        DailyProfile p;
        p.id = series.id;
        p.date = t / 86400;
        p.supply.assign(series.supply.begin() + idx,
                        series.supply.begin() + idx + kSamplesPerDay);
        out.push_back(std::move(p));
        t += 86400;
    }
    return out;
}

constexpr std::uint64_t kStreamDaySampling = 1;

/// Pick `r` distinct days from the candidates, reproducibly from the seed
/// alone.  Result is sorted ascending.
inline std::vector<std::int64_t> sample_days(const std::vector<std::int64_t>& dates, std::size_t r,
                                             std::uint64_t seed) {
    if (r == 0) throw std::invalid_argument("sample_days: r must be positive");
    if (r > dates.size())
        throw DataError("sample_days: requested " + std::to_string(r) + " days but only " +
                        std::to_string(dates.size()) + " available");
    SplitMix64 rng(derive_seed(seed, kStreamDaySampling));
    std::vector<std::size_t> picked = sample_indices(dates.size(), r, rng);
    std::vector<std::int64_t> out;
    out.reserve(r);
    for (std::size_t i : picked) out.push_back(dates[i]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace shedad
