#pragma once

#include "intdim/point_set.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace intdim {

/// Sorted distances from each anchor to its k nearest neighbors, self excluded.
///
/// Row i belongs to anchors[i]. Distances are non-decreasing along a row and
/// strictly positive; equal distances are ordered by dataset index.
struct NeighborTable {
    std::size_t k = 0;
    std::vector<std::size_t> anchors;
    std::vector<double> distances;        // anchors.size() x k, row-major
    std::vector<std::uint32_t> neighbors; // anchors.size() x k, row-major

    std::size_t rows() const { return anchors.size(); }
    std::span<const double> distances_of(std::size_t i) const { return {distances.data() + i * k, k}; }
    std::span<const std::uint32_t> neighbors_of(std::size_t i) const { return {neighbors.data() + i * k, k}; }

    /// The table restricted to the first k' <= k neighbors of every anchor.
    NeighborTable prefix(std::size_t k_prefix) const;
};

/// Squared Euclidean distance summed left to right in double precision. Every
/// distance the library reports goes through this routine.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Exact k nearest neighbors of the given anchors over the whole point set.
///
/// Candidates are screened with a single-precision GEMM and a rigorous bound on
/// its rounding error, then re-ranked with squared_distance(). The result is
/// identical to a brute-force double loop and does not depend on thread count.
/// Throws KnnError when k is 0 or k >= n, or when a neighbor sits at distance
/// zero (duplicate rows).
NeighborTable knn(const PointSet& ps, std::span<const std::size_t> anchors, std::size_t k);

/// knn() with every row as an anchor.
NeighborTable knn_all(const PointSet& ps, std::size_t k);

/// Undirected kNN graph in compressed adjacency form. An edge {u,v} exists when
/// either endpoint lists the other among its k nearest neighbors; its weight is
/// their Euclidean distance.
struct KnnGraph {
    struct Edge {
        std::uint32_t u;
        std::uint32_t v;
        double weight;
    };

    std::size_t nodes = 0;
    std::vector<Edge> edges;            // u < v, sorted by (u, v)
    std::vector<std::size_t> offsets;   // nodes + 1
    std::vector<std::uint32_t> targets;
    std::vector<double> weights;

    std::size_t degree(std::size_t node) const { return offsets[node + 1] - offsets[node]; }

    static KnnGraph from_edges(std::size_t nodes, std::vector<Edge> edges);
};

KnnGraph build_knn_graph(const PointSet& ps, std::size_t k);
KnnGraph knn_graph_from_table(const NeighborTable& table, std::size_t nodes);

/// Nodes of the largest connected component, ascending. Ties go to the component
/// holding the smallest node index.
std::vector<std::size_t> largest_component(const KnnGraph& g);

/// Single-source shortest-path distances from one node; unreachable nodes get +inf.
std::vector<double> shortest_paths(const KnnGraph& g, std::size_t source);

/// Pooled shortest-path distances from every source lying in the largest
/// component to every node it reaches, zeros excluded. Pooled in source order,
/// then node order. Throws KnnError when no source is in the largest component.
std::vector<double> geodesic_distances(const KnnGraph& g, std::span<const std::size_t> sources);

/// Streaming variant for large graphs: histogram of the same pooled distances
/// over [0, max] with `bins` equal-width bins. Returns the counts and the upper edge.
struct GeodesicHistogram {
    std::vector<std::uint64_t> counts;
    double max_distance = 0.0;
    std::size_t sources_used = 0;
};
GeodesicHistogram geodesic_histogram(const KnnGraph& g, std::span<const std::size_t> sources, std::size_t bins);

} // namespace intdim

namespace intdim {

// Neighbor-table cache. Distances go to `path` as an f64 raw tensor (rows x k);
// anchors and neighbor indices go to little-endian uint32 side files named in
// the header next to the dataset checksum they were computed from.
void save_neighbor_table(const NeighborTable& table, const PointSet& source, const std::filesystem::path& path);

/// Loads a cached table and checks it belongs to `source`; throws KnnError on
/// a checksum or shape mismatch.
NeighborTable load_neighbor_table(const std::filesystem::path& path, const PointSet& source);

} // namespace intdim
