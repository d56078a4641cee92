#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace shedad {

/// Similarity -> dissimilarity: d = 1 / (1 + s).  Unrelated pairs (s = 0)
/// land at distance 1; distance falls toward 0 as similarity grows.
inline DistanceMatrix similarity_to_dissimilarity(const SimilarityMatrix& s) {
    DistanceMatrix d;
    d.ids = s.ids;
    d.values.resize(s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.values[i] < 0.0)
            throw std::invalid_argument("similarity_to_dissimilarity: negative similarity");
        d.values[i] = 1.0 / (1.0 + s.values[i]);
    }
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) d.at(i, i) = 0.0;
    return d;
}

/// One agglomeration step.  Node numbering follows the usual convention:
/// leaves are 0..n-1 (in sorted-id order), the cluster created by merge
/// step t is node n+t.
struct MergeStep {
    int left = 0;
    int right = 0;
    double height = 0.0;
    int size = 0;  // leaves under the new node
};

struct Dendrogram {
    std::vector<std::string> ids;  // sorted; leaf i is ids[i]
    std::vector<MergeStep> merges;

    std::size_t leaves() const { return ids.size(); }
};

/// Ward agglomerative clustering via the Lance-Williams recursion on
/// squared dissimilarities,
///   D2(A∪B, C) = ((nA+nC) D2(A,C) + (nB+nC) D2(B,C) - nC D2(A,B)) / (nA+nB+nC),
/// with merge heights reported as sqrt of the recursed value.  Ids are
/// sorted internally and ties broken on the smallest member id of each
/// cluster, so any permutation of the input yields the identical tree.
inline Dendrogram ward_agglomerative(const DistanceMatrix& dist) {
    const std::size_t n = dist.size();
    Dendrogram out;
    if (n == 0) throw std::invalid_argument("ward_agglomerative: empty matrix");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return dist.ids[a] < dist.ids[b]; });
    out.ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.ids.push_back(dist.ids[perm[i]]);
    if (n < 2) return out;

    // Working state per slot: squared distances, cluster size, smallest
    // member leaf, current node id.  Dead slots are skipped.
    std::vector<double> d2(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = dist.at(perm[i], perm[j]);
            d2[i * n + j] = v * v;
        }
    std::vector<double> size(n, 1.0);
    std::vector<int> rep(n), node(n);
    std::vector<bool> alive(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        rep[i] = static_cast<int>(i);
        node[i] = static_cast<int>(i);
    }

    out.merges.reserve(n - 1);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t best_p = 0, best_q = 0;
        double best = std::numeric_limits<double>::infinity();
        int best_lo = 0, best_hi = 0;
        bool found = false;
        for (std::size_t p = 0; p < n; ++p) {
            if (!alive[p]) continue;
            for (std::size_t q = p + 1; q < n; ++q) {
                if (!alive[q]) continue;
                const double v = d2[p * n + q];
                const int lo = std::min(rep[p], rep[q]);
                const int hi = std::max(rep[p], rep[q]);
                if (!found || v < best ||
                    (v == best && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
                    found = true;
                    best = v;
                    best_p = p;
                    best_q = q;
                    best_lo = lo;
                    best_hi = hi;
                }
            }
        }

        const std::size_t p = best_p, q = best_q;
        MergeStep m;
        const bool p_first = rep[p] <= rep[q];
        m.left = p_first ? node[p] : node[q];
        m.right = p_first ? node[q] : node[p];
        m.height = std::sqrt(std::max(best, 0.0));
        m.size = static_cast<int>(size[p] + size[q]);

        const double na = size[p], nb = size[q], dab = best;
        for (std::size_t c = 0; c < n; ++c) {
            if (!alive[c] || c == p || c == q) continue;
            const double nc = size[c];
            const double v = ((na + nc) * d2[p * n + c] + (nb + nc) * d2[q * n + c] - nc * dab) /
                             (na + nb + nc);
            d2[p * n + c] = v;
            d2[c * n + p] = v;
        }
        size[p] = na + nb;
        rep[p] = std::min(rep[p], rep[q]);
        node[p] = static_cast<int>(n + step);
        alive[q] = false;
        out.merges.push_back(m);
    }
    return out;
}

struct ClusterAssignment {
    std::vector<std::string> ids;   // sorted
    std::vector<int> labels;        // parallel to ids, values in [0, n_clusters)
    int n_clusters = 0;
    std::vector<std::size_t> sizes;          // per cluster
    std::vector<bool> singleton_flags;       // per cluster

    std::vector<std::string> members(int cluster) const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (labels[i] == cluster) out.push_back(ids[i]);
        return out;
    }
};

namespace detail {

struct CutUnionFind {
    std::vector<int> parent;
    explicit CutUnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

/// Cut the tree into exactly `n_clusters` groups by replaying the first
/// n - n_clusters merges.  Cluster labels are contiguous from 0, ordered
/// by each cluster's smallest member id.  Clusters no larger than
/// `singleton_threshold` are flagged.
inline ClusterAssignment cut(const Dendrogram& dendro, int n_clusters,
                             int singleton_threshold = 1) {
    const std::size_t n = dendro.leaves();
    if (n_clusters < 1 || static_cast<std::size_t>(n_clusters) > n)
        throw std::invalid_argument("cut: n_clusters must be in [1, " + std::to_string(n) + "]");
    if (singleton_threshold < 0)
        throw std::invalid_argument("cut: singleton_threshold must be non-negative");

    detail::CutUnionFind uf(n);
    // A leaf contained in each dendrogram node, to translate node merges
    // into leaf-set unions.
    std::vector<int> seed_leaf(n + dendro.merges.size());
    for (std::size_t i = 0; i < n; ++i) seed_leaf[i] = static_cast<int>(i);
    const std::size_t replay = n - static_cast<std::size_t>(n_clusters);
    for (std::size_t t = 0; t < replay; ++t) {
        const auto& m = dendro.merges[t];
        uf.unite(seed_leaf[static_cast<std::size_t>(m.left)],
                 seed_leaf[static_cast<std::size_t>(m.right)]);
        seed_leaf[n + t] = seed_leaf[static_cast<std::size_t>(m.left)];
    }

    ClusterAssignment out;
    out.ids = dendro.ids;
    out.labels.assign(n, -1);
    out.n_clusters = n_clusters;
    std::vector<int> root_label(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int root = uf.find(static_cast<int>(i));
        if (root_label[static_cast<std::size_t>(root)] < 0) {
            root_label[static_cast<std::size_t>(root)] = next++;
            out.sizes.push_back(0);
        }
        const int label = root_label[static_cast<std::size_t>(root)];
        out.labels[i] = label;
        ++out.sizes[static_cast<std::size_t>(label)];
    }
    if (next != n_clusters)
        throw std::logic_error("cut: produced " + std::to_string(next) + " clusters, expected " +
                               std::to_string(n_clusters));
    out.singleton_flags.reserve(out.sizes.size());
    for (std::size_t s : out.sizes)
        out.singleton_flags.push_back(s <= static_cast<std::size_t>(singleton_threshold));
    return out;
}

}  // namespace shedad
