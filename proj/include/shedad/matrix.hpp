#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "digest.hpp"
#include "errors.hpp"

namespace shedad {

/// Dense symmetric square matrix keyed by substation id.  The Tag type
/// only distinguishes distances from similarities at compile time.
template <typename Tag>
struct SquareMatrix {
    std::vector<std::string> ids;
    std::vector<double> values;  // n*n row-major

    SquareMatrix() = default;
    explicit SquareMatrix(std::vector<std::string> ids_in)
        : ids(std::move(ids_in)), values(ids.size() * ids.size(), 0.0) {}

    std::size_t size() const { return ids.size(); }

    double at(std::size_t i, std::size_t j) const { return values[i * ids.size() + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * ids.size() + j]; }

    void set_symmetric(std::size_t i, std::size_t j, double v) {
        at(i, j) = v;
        at(j, i) = v;
    }

    std::unordered_map<std::string, std::size_t> index() const {
        std::unordered_map<std::string, std::size_t> m;
        m.reserve(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) m.emplace(ids[i], i);
        return m;
    }
};

struct DistanceTag;
struct SimilarityTag;
using DistanceMatrix = SquareMatrix<DistanceTag>;
using SimilarityMatrix = SquareMatrix<SimilarityTag>;

/// Matrix dump with an id header row and a leading id column.
template <typename Tag>
void write_matrix_csv(const SquareMatrix<Tag>& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "id";
    for (const auto& id : m.ids) out << ',' << id;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << m.ids[i];
        for (std::size_t j = 0; j < m.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.9g", m.at(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
}

namespace detail {
constexpr char kMatrixCacheMagic[8] = {'S', 'H', 'D', 'M', 'A', 'T', '0', '1'};
}

/// Binary cache entry: magic, band, content digest, ids, raw values.
/// Readers validate band and digest and fall back to recomputation on any
/// mismatch, so stale files are harmless.
template <typename Tag>
void write_matrix_cache(const SquareMatrix<Tag>& m, const std::string& path, std::uint32_t band,
                        std::uint64_t digest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out.write(detail::kMatrixCacheMagic, 8);
    std::uint32_t n = static_cast<std::uint32_t>(m.size());
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&band), 4);
    out.write(reinterpret_cast<const char*>(&digest), 8);
    for (const auto& id : m.ids) {
        std::uint32_t len = static_cast<std::uint32_t>(id.size());
        out.write(reinterpret_cast<const char*>(&len), 4);
        out.write(id.data(), len);
    }
    out.write(reinterpret_cast<const char*>(m.values.data()),
              static_cast<std::streamsize>(m.values.size() * sizeof(double)));
}

template <typename Tag>
std::optional<SquareMatrix<Tag>> try_read_matrix_cache(const std::string& path, std::uint32_t band,
                                                       std::uint64_t digest) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, detail::kMatrixCacheMagic, 8) != 0)
        return std::nullopt;
    std::uint32_t n = 0, file_band = 0;
    std::uint64_t file_digest = 0;
    if (!in.read(reinterpret_cast<char*>(&n), 4) ||
        !in.read(reinterpret_cast<char*>(&file_band), 4) ||
        !in.read(reinterpret_cast<char*>(&file_digest), 8))
        return std::nullopt;
    if (file_band != band || file_digest != digest) return std::nullopt;
    SquareMatrix<Tag> m;
    m.ids.resize(n);
    for (auto& id : m.ids) {
        std::uint32_t len = 0;
        if (!in.read(reinterpret_cast<char*>(&len), 4) || len > 4096) return std::nullopt;
        id.resize(len);
        if (!in.read(id.data(), len)) return std::nullopt;
    }
    m.values.resize(static_cast<std::size_t>(n) * n);
    if (!in.read(reinterpret_cast<char*>(m.values.data()),
                 static_cast<std::streamsize>(m.values.size() * sizeof(double))))
        return std::nullopt;
    return m;
}

}  // namespace shedad
