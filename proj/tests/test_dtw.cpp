#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include <shedad/dtw.hpp>
#include <shedad/rng.hpp>

#include "oracles.hpp"

namespace {

std::vector<double> random_profile(shedad::SplitMix64& rng, std::size_t len, double spread = 5.0) {
    std::vector<double> out(len);
    for (auto& v : out) v = rng.next_in(-spread, spread);
    return out;
}

}  // namespace

TEST_CASE("dtw hand-checked values") {
    const std::vector<double> a = {0, 1, 0};
    const std::vector<double> b = {0, 0, 1};
    // Band 1 lets the peak align diagonally: |0-0| + |1-0|(diag) step
    // pattern gives total cost 1.
    REQUIRE(shedad::dtw_distance(a, b, 1) == 1.0);
    REQUIRE(shedad::dtw_distance(a, b, 2) == 1.0);
    // Band 0 is the aligned L1 distance.
    REQUIRE(shedad::dtw_distance(a, b, 0) == 2.0);
    const std::vector<double> z = {0, 0, 0};
    const std::vector<double> o = {1, 1, 1};
    REQUIRE(shedad::dtw_distance(z, o, 0) == 3.0);
    REQUIRE(shedad::dtw_distance(z, o, 2) == 3.0);
}

TEST_CASE("dtw input validation") {
    const std::vector<double> a = {1, 2, 3};
    const std::vector<double> b = {1, 2};
    const std::vector<double> e;
    REQUIRE_THROWS_AS(shedad::dtw_distance(a, b, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(shedad::dtw_distance(a, a, -1), std::invalid_argument);
    REQUIRE_THROWS_AS(shedad::dtw_distance(e, e, 0), std::invalid_argument);
}

TEST_CASE("dtw basic metric-ish properties") {
    shedad::SplitMix64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t len = 2 + rng.next_below(30);
        auto a = random_profile(rng, len);
        auto b = random_profile(rng, len);
        const int band = static_cast<int>(rng.next_below(len + 2));
        REQUIRE(shedad::dtw_distance(a, a, band) == 0.0);
        REQUIRE(shedad::dtw_distance(a, b, band) == shedad::dtw_distance(b, a, band));
        REQUIRE(shedad::dtw_distance(a, b, band) >= 0.0);
    }
}

TEST_CASE("dtw band 0 equals aligned L1") {
    shedad::SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t len = 1 + rng.next_below(40);
        auto a = random_profile(rng, len);
        auto b = random_profile(rng, len);
        double l1 = 0.0;
        for (std::size_t i = 0; i < len; ++i) l1 += std::fabs(a[i] - b[i]);
        REQUIRE_THAT(shedad::dtw_distance(a, b, 0),
                     Catch::Matchers::WithinAbs(l1, 1e-9 * (1.0 + l1)));
    }
}

TEST_CASE("dtw agrees with the full-table oracle") {
    shedad::SplitMix64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t len = 1 + rng.next_below(32);
        auto a = random_profile(rng, len);
        auto b = random_profile(rng, len);
        const int band = static_cast<int>(rng.next_below(len + 1));
        const double got = shedad::dtw_distance(a, b, band);
        const double want = oracle::dtw_full(a, b, band);
        REQUIRE_THAT(got, Catch::Matchers::WithinAbs(want, 1e-9 * (1.0 + want)));
        // A band of len-1 or more no longer constrains anything.
        const double unconstrained = shedad::dtw_distance(a, b, static_cast<int>(len));
        const double oracle_unconstrained = oracle::dtw_full(a, b, -1);
        REQUIRE_THAT(unconstrained,
                     Catch::Matchers::WithinAbs(oracle_unconstrained,
                                                1e-9 * (1.0 + oracle_unconstrained)));
    }
}

TEST_CASE("widening the band never increases the distance") {
    shedad::SplitMix64 rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t len = 2 + rng.next_below(24);
        auto a = random_profile(rng, len);
        auto b = random_profile(rng, len);
        double prev = std::numeric_limits<double>::infinity();
        for (int band = 0; band <= static_cast<int>(len); ++band) {
            const double d = shedad::dtw_distance(a, b, band);
            REQUIRE(d <= prev + 1e-12);
            prev = d;
        }
    }
}

TEST_CASE("euclidean_matrix matches direct computation and ignores worker count") {
    shedad::SplitMix64 rng(5);
    std::vector<shedad::SubstationSeries> series;
    for (int i = 0; i < 7; ++i) {
        shedad::SubstationSeries s;
        s.id = "S" + std::to_string(i);
        s.supply = random_profile(rng, 64);
        s.ret.assign(64, 0.0);
        s.flow.assign(64, 0.0);
        series.push_back(std::move(s));
    }
    auto m1 = shedad::euclidean_matrix(series, 1);
    auto m3 = shedad::euclidean_matrix(series, 3);
    REQUIRE(m1.values == m3.values);  // bitwise: disjoint writes, same arithmetic
    REQUIRE(m1.ids.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        REQUIRE(m1.at(i, i) == 0.0);
        for (std::size_t j = i + 1; j < 7; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < 64; ++t) {
                const double d = series[i].supply[t] - series[j].supply[t];
                acc += d * d;
            }
            REQUIRE_THAT(m1.at(i, j), Catch::Matchers::WithinAbs(std::sqrt(acc), 1e-12));
            REQUIRE(m1.at(i, j) == m1.at(j, i));
        }
    }

    series[1].supply.pop_back();
    REQUIRE_THROWS_AS(shedad::euclidean_matrix(series, 1), std::invalid_argument);
}

TEST_CASE("daily_distance_matrices builds one matrix per day in id order") {
    shedad::SplitMix64 rng(8);
    std::vector<shedad::DailyProfile> profiles;
    const std::vector<std::int64_t> dates = {19723, 19725};
    for (const char* id : {"S2", "S0", "S1"}) {
        for (auto date : dates) {
            shedad::DailyProfile p;
            p.id = id;
            p.date = date;
            p.supply = random_profile(rng, 16);
            profiles.push_back(std::move(p));
        }
    }
    auto mats = shedad::daily_distance_matrices(profiles, dates, 3, 1);
    REQUIRE(mats.size() == 2);
    REQUIRE(mats[0].ids == std::vector<std::string>{"S0", "S1", "S2"});

    // Spot-check one entry against a direct call.
    const shedad::DailyProfile* a = nullptr;
    const shedad::DailyProfile* b = nullptr;
    for (const auto& p : profiles) {
        if (p.id == "S0" && p.date == 19725) a = &p;
        if (p.id == "S2" && p.date == 19725) b = &p;
    }
    REQUIRE(mats[1].at(0, 2) == shedad::dtw_distance(a->supply, b->supply, 3));

    // A missing (id, day) pair is an error that names both.
    profiles.pop_back();
    try {
        shedad::daily_distance_matrices(profiles, dates, 3, 1);
        FAIL("expected DataError");
    } catch (const shedad::DataError& e) {
        REQUIRE_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("S1"));
        REQUIRE_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("2024-01-03"));
    }
}

TEST_CASE("matrix cache round-trips and rejects stale keys") {
    const auto dir = std::filesystem::temp_directory_path() / "shedad_cache_test";
    std::filesystem::create_directories(dir);

    shedad::SplitMix64 rng(21);
    std::vector<shedad::DailyProfile> profiles;
    for (const char* id : {"A", "B", "C"}) {
        shedad::DailyProfile p;
        p.id = id;
        p.date = 19723;
        p.supply = random_profile(rng, 24);
        profiles.push_back(std::move(p));
    }
    const std::vector<std::int64_t> dates = {19723};
    auto fresh = shedad::daily_distance_matrices(profiles, dates, 2, 1, dir.string());
    const auto cache_file = dir / "dtw_2024-01-01_b2.bin";
    REQUIRE(std::filesystem::exists(cache_file));
    auto cached = shedad::daily_distance_matrices(profiles, dates, 2, 1, dir.string());
    REQUIRE(fresh[0].values == cached[0].values);
    REQUIRE(fresh[0].ids == cached[0].ids);

    // Direct reader: wrong band or digest politely misses.
    std::vector<const shedad::DailyProfile*> ptrs;
    for (const auto& p : profiles) ptrs.push_back(&p);
    const std::uint64_t digest = shedad::detail::profiles_digest(ptrs);
    REQUIRE(shedad::try_read_matrix_cache<shedad::DistanceTag>(cache_file.string(), 2, digest));
    REQUIRE_FALSE(
        shedad::try_read_matrix_cache<shedad::DistanceTag>(cache_file.string(), 3, digest));
    REQUIRE_FALSE(
        shedad::try_read_matrix_cache<shedad::DistanceTag>(cache_file.string(), 2, digest ^ 1));
    REQUIRE_FALSE(shedad::try_read_matrix_cache<shedad::DistanceTag>(
        (dir / "missing.bin").string(), 2, digest));

    // Changing a profile changes the digest, so the cache recomputes
    // rather than serving stale values.
    profiles[0].supply[0] += 100.0;
    auto changed = shedad::daily_distance_matrices(profiles, dates, 2, 1, dir.string());
    REQUIRE(changed[0].at(0, 1) != fresh[0].at(0, 1));

    std::filesystem::remove_all(dir);
}
