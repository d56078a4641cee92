#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "digest.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "series.hpp"

namespace shedad {

/// Dynamic time warping distance between two equal-length profiles with a
/// Sakoe-Chiba band: cell (i,j) is reachable only if |i-j| <= band_radius.
/// Local cost is |a_i - b_j|; steps are insert, delete and diagonal match.
/// band_radius 0 degenerates to the aligned L1 distance.  Memory is two
/// rolling rows of the band width.
inline double dtw_distance(std::span<const double> a, std::span<const double> b,
                           int band_radius) {
    if (a.size() != b.size())
        throw std::invalid_argument("dtw_distance: length mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    if (band_radius < 0) throw std::invalid_argument("dtw_distance: negative band radius");
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("dtw_distance: empty profiles");

    const std::size_t w = static_cast<std::size_t>(band_radius);
    constexpr double inf = std::numeric_limits<double>::infinity();
    // Two rolling rows over the band window; row i covers j in
    // [max(i-w,0), min(i+w,n-1)], at most 2w+1 cells.
    std::vector<double> prev(2 * w + 2, inf), cur(2 * w + 2, inf);
    std::size_t prev_lo = 0, prev_hi = 0;

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j_lo = i > w ? i - w : 0;
        const std::size_t j_hi = std::min(n - 1, i + w);
        std::fill(cur.begin(), cur.end(), inf);
        const double ai = a[i];
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            const double cost = std::fabs(ai - b[j]);
            double best;
            if (i == 0 && j == 0) {
                best = 0.0;
            } else {
                double diag = inf, up = inf, left = inf;
                if (i > 0) {
                    if (j >= prev_lo && j <= prev_hi) up = prev[j - prev_lo];
                    if (j > prev_lo && j - 1 <= prev_hi) diag = prev[j - 1 - prev_lo];
                }
                if (j > j_lo) left = cur[j - j_lo - 1];
                best = std::min(diag, std::min(up, left));
            }
            cur[j - j_lo] = best + cost;
        }
        std::swap(prev, cur);
        prev_lo = j_lo;
        prev_hi = j_hi;
    }
    return prev[(n - 1) - prev_lo];
}

namespace detail {

/// Map a flat index in [0, n*(n-1)/2) to the corresponding (i,j) pair of
/// the upper triangle, row-major.
inline std::pair<std::size_t, std::size_t> pair_from_index(std::size_t p, std::size_t n) {
    std::size_t i = 0;
    std::size_t row = n - 1;  // pairs in row i
    std::size_t base = 0;
    while (base + row <= p) {
        base += row;
        --row;
        ++i;
    }
    return {i, i + 1 + (p - base)};
}

}  // namespace detail

/// Pairwise Euclidean distance over each substation's full sample vector
/// (supply channel).  Used as the geometry for per-cluster spanning trees
/// and quality metrics.
inline DistanceMatrix euclidean_matrix(const std::vector<SubstationSeries>& series,
                                       unsigned workers = 1) {
    std::vector<std::string> ids;
    ids.reserve(series.size());
    for (const auto& s : series) ids.push_back(s.id);
    DistanceMatrix m(std::move(ids));
    const std::size_t n = series.size();
    for (std::size_t i = 1; i < n; ++i)
        if (series[i].size() != series[0].size())
            throw std::invalid_argument("euclidean_matrix: series lengths differ");

    const std::size_t pairs = n * (n - 1) / 2;
    parallel_for(pairs, workers, [&](std::size_t p) {
        auto [i, j] = detail::pair_from_index(p, n);
        double acc = 0.0;
        const auto& x = series[i].supply;
        const auto& y = series[j].supply;
        for (std::size_t t = 0; t < x.size(); ++t) {
            const double d = x[t] - y[t];
            acc += d * d;
        }
        m.set_symmetric(i, j, std::sqrt(acc));
    });
    return m;
}

namespace detail {

inline std::uint64_t profiles_digest(const std::vector<const DailyProfile*>& profiles) {
    Fnv1a64 h;
    for (const auto* p : profiles) {
        h.update(p->id);
        h.update_pod(p->date);
        h.update(p->supply.data(), p->supply.size() * sizeof(double));
    }
    return h.value;
}

}  // namespace detail

/// One DTW distance matrix per selected day, substations in sorted-id
/// order.  Every substation must have a profile for every selected day.
/// With a cache directory, each day's matrix is persisted keyed on (day,
/// band, profile digest) and reused when the key matches.
inline std::vector<DistanceMatrix> daily_distance_matrices(
    const std::vector<DailyProfile>& profiles, const std::vector<std::int64_t>& dates,
    int band_radius, unsigned workers = 1, const std::string& cache_dir = "") {
    // Index profiles by (date, id).
    std::map<std::pair<std::int64_t, std::string>, const DailyProfile*> by_key;
    std::vector<std::string> ids;
    for (const auto& p : profiles) {
        by_key[{p.date, p.id}] = &p;
        ids.push_back(p.id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const std::size_t n = ids.size();
    if (n < 2) throw DataError("daily_distance_matrices: need at least two substations");

    std::vector<DistanceMatrix> out;
    out.reserve(dates.size());
    for (std::int64_t date : dates) {
        std::vector<const DailyProfile*> day;
        day.reserve(n);
        for (const auto& id : ids) {
            auto it = by_key.find({date, id});
            if (it == by_key.end())
                throw DataError("daily_distance_matrices: substation " + id +
                                " has no profile for " + format_date(date));
            day.push_back(it->second);
        }

        std::string cache_path;
        std::uint64_t digest = 0;
        if (!cache_dir.empty()) {
            digest = detail::profiles_digest(day);
            cache_path = cache_dir + "/dtw_" + format_date(date) + "_b" +
                         std::to_string(band_radius) + ".bin";
            if (auto cached = try_read_matrix_cache<DistanceTag>(
                    cache_path, static_cast<std::uint32_t>(band_radius), digest)) {
                out.push_back(std::move(*cached));
                continue;
            }
        }

        DistanceMatrix m(ids);
        const std::size_t pairs = n * (n - 1) / 2;
        parallel_for(pairs, workers, [&](std::size_t p) {
            auto [i, j] = detail::pair_from_index(p, n);
            m.set_symmetric(i, j, dtw_distance(day[i]->supply, day[j]->supply, band_radius));
        });
        if (!cache_path.empty())
            write_matrix_cache(m, cache_path, static_cast<std::uint32_t>(band_radius), digest);
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace shedad
