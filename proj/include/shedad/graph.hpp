#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace shedad {

struct GraphEdge {
    std::uint32_t a = 0;  // indices into NeighborGraph::ids, a < b
    std::uint32_t b = 0;
    double weight = 0.0;
    bool fallback = false;  // forced nearest-neighbour edge beyond the distance ceiling
    double kappa = std::numeric_limits<double>::quiet_NaN();  // agreement score, set by merging
};

/// Undirected weighted graph over a fixed id set.  Edges are unique,
/// normalized to a < b and kept sorted by (a, b).
struct NeighborGraph {
    std::vector<std::string> ids;
    std::vector<GraphEdge> edges;

    std::size_t size() const { return ids.size(); }

    void normalize() {
        for (auto& e : edges)
            if (e.a > e.b) std::swap(e.a, e.b);
        std::sort(edges.begin(), edges.end(), [](const GraphEdge& x, const GraphEdge& y) {
            return x.a != y.a ? x.a < y.a : x.b < y.b;
        });
    }

    /// Adjacency lists as (neighbour index, edge weight), sorted by index.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency() const {
        std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(ids.size());
        for (const auto& e : edges) {
            adj[e.a].emplace_back(e.b, e.weight);
            adj[e.b].emplace_back(e.a, e.weight);
        }
        for (auto& row : adj) std::sort(row.begin(), row.end());
        return adj;
    }

    std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> deg(ids.size(), 0);
        for (const auto& e : edges) {
            ++deg[e.a];
            ++deg[e.b];
        }
        return deg;
    }
};

struct UnionFind {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> rank_;

    explicit UnionFind(std::size_t n) : parent(n), rank_(n, 0) {
        std::iota(parent.begin(), parent.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }
};

/// Minimum spanning tree over the given substations using distances looked
/// up in `dist` (which may cover a superset of ids).  Kruskal with the tie
/// break (weight, id_a, id_b); member ids are sorted first, so the result
/// is independent of input order.  A single node yields an empty tree.
inline NeighborGraph minimum_spanning_tree(std::vector<std::string> member_ids,
                                           const DistanceMatrix& dist) {
    std::sort(member_ids.begin(), member_ids.end());
    member_ids.erase(std::unique(member_ids.begin(), member_ids.end()), member_ids.end());
    const std::size_t n = member_ids.size();
    if (n == 0) throw std::invalid_argument("minimum_spanning_tree: empty member set");

    auto index = dist.index();
    std::vector<std::size_t> src(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = index.find(member_ids[i]);
        if (it == index.end())
            throw DataError("minimum_spanning_tree: id " + member_ids[i] +
                            " missing from distance matrix");
        src[i] = it->second;
    }

    NeighborGraph tree;
    tree.ids = std::move(member_ids);
    if (n == 1) return tree;

    std::vector<GraphEdge> all;
    all.reserve(n * (n - 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) {
            GraphEdge e;
            e.a = i;
            e.b = j;
            e.weight = dist.at(src[i], src[j]);
            all.push_back(e);
        }
    // Local indices follow the sorted ids, so comparing them matches the
    // lexicographic id tie break.
    std::sort(all.begin(), all.end(), [](const GraphEdge& x, const GraphEdge& y) {
        if (x.weight != y.weight) return x.weight < y.weight;
        return x.a != y.a ? x.a < y.a : x.b < y.b;
    });

    UnionFind uf(n);
    for (const auto& e : all) {
        if (uf.unite(e.a, e.b)) {
            tree.edges.push_back(e);
            if (tree.edges.size() == n - 1) break;
        }
    }
    tree.normalize();
    return tree;
}

inline double total_weight(const NeighborGraph& g) {
    double sum = 0.0;
    for (const auto& e : g.edges) sum += e.weight;
    return sum;
}

/// Edge-list dump: id_a, id_b, weight, retained kappa (empty when the edge
/// never went through merging), fallback flag.
inline void write_graph_csv(const NeighborGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "id_a,id_b,weight,retained_kappa,fallback\n";
    char buf[64];
    for (const auto& e : g.edges) {
        out << g.ids[e.a] << ',' << g.ids[e.b];
        std::snprintf(buf, sizeof(buf), ",%.9g,", e.weight);
        out << buf;
        if (!std::isnan(e.kappa)) {
            std::snprintf(buf, sizeof(buf), "%.9g", e.kappa);
            out << buf;
        }
        out << ',' << (e.fallback ? 1 : 0) << '\n';
    }
}

}  // namespace shedad
