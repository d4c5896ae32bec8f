#include "intdim/error.hpp"
#include "intdim/knn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

namespace intdim {

KnnGraph KnnGraph::from_edges(std::size_t nodes, std::vector<Edge> edges) {
    for (auto& e : edges) {
        if (e.u == e.v)
            throw KnnError("self-loop at node " + std::to_string(e.u));
        if (e.u >= nodes || e.v >= nodes)
            throw KnnError("edge endpoint out of range");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw KnnError("edge weights must be positive and finite");
        if (e.u > e.v)
            std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }),
                edges.end());

    KnnGraph g;
    g.nodes = nodes;
    g.offsets.assign(nodes + 1, 0);
    for (const auto& e : edges) {
        ++g.offsets[e.u + 1];
        ++g.offsets[e.v + 1];
    }
    std::partial_sum(g.offsets.begin(), g.offsets.end(), g.offsets.begin());
    g.targets.resize(2 * edges.size());
    g.weights.resize(2 * edges.size());
    std::vector<std::size_t> fill(g.offsets.begin(), g.offsets.end() - 1);
    for (const auto& e : edges) {
        g.targets[fill[e.u]] = e.v;
        g.weights[fill[e.u]++] = e.weight;
        g.targets[fill[e.v]] = e.u;
        g.weights[fill[e.v]++] = e.weight;
    }
    g.edges = std::move(edges);
    return g;
}

KnnGraph knn_graph_from_table(const NeighborTable& table, std::size_t nodes) {
    std::vector<KnnGraph::Edge> edges;
    edges.reserve(table.rows() * table.k);
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto a = static_cast<std::uint32_t>(table.anchors[i]);
        const auto nb = table.neighbors_of(i);
        const auto d = table.distances_of(i);
        for (std::size_t j = 0; j < table.k; ++j)
            edges.push_back({a, nb[j], d[j]});
    }
    return KnnGraph::from_edges(nodes, std::move(edges));
}

KnnGraph build_knn_graph(const PointSet& ps, std::size_t k) {
    return knn_graph_from_table(knn_all(ps, k), ps.size());
}

std::vector<std::size_t> largest_component(const KnnGraph& g) {
    std::vector<std::size_t> label(g.nodes, g.nodes);
    std::vector<std::size_t> stack;
    std::size_t best_label = 0, best_size = 0;
    for (std::size_t s = 0; s < g.nodes; ++s) {
        if (label[s] != g.nodes)
            continue;
        std::size_t size = 0;
        label[s] = s;
        stack.push_back(s);
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            ++size;
            for (std::size_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
                const auto w = g.targets[e];
                if (label[w] == g.nodes) {
                    label[w] = s;
                    stack.push_back(w);
                }
            }
        }
        if (size > best_size) {
            best_size = size;
            best_label = s;
        }
    }
    std::vector<std::size_t> out;
    out.reserve(best_size);
    for (std::size_t v = 0; v < g.nodes; ++v)
        if (label[v] == best_label)
            out.push_back(v);
    return out;
}

namespace {

void dijkstra(const KnnGraph& g, std::size_t source, std::vector<double>& dist) {
    using Item = std::pair<double, std::uint32_t>;
    dist.assign(g.nodes, std::numeric_limits<double>::infinity());
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, static_cast<std::uint32_t>(source));
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v])
            continue;
        for (std::size_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
            const double nd = d + g.weights[e];
            const auto w = g.targets[e];
            if (nd < dist[w]) {
                dist[w] = nd;
                heap.emplace(nd, w);
            }
        }
    }
}

std::vector<std::size_t> sources_in_largest(const KnnGraph& g, std::span<const std::size_t> sources) {
    const auto comp = largest_component(g);
    std::vector<std::size_t> used;
    for (auto s : sources) {
        if (s >= g.nodes)
            throw KnnError("source " + std::to_string(s) + " out of range");
        if (std::binary_search(comp.begin(), comp.end(), s))
            used.push_back(s);
    }
    if (used.empty())
        throw KnnError("no source lies in the largest connected component");
    return used;
}

} // namespace

std::vector<double> shortest_paths(const KnnGraph& g, std::size_t source) {
    if (source >= g.nodes)
        throw KnnError("source " + std::to_string(source) + " out of range");
    std::vector<double> dist;
    dijkstra(g, source, dist);
    return dist;
}

std::vector<double> geodesic_distances(const KnnGraph& g, std::span<const std::size_t> sources) {
    const auto used = sources_in_largest(g, sources);
    std::vector<std::vector<double>> per_source(used.size());
#pragma omp parallel
    {
        std::vector<double> dist;
#pragma omp for schedule(dynamic, 8)
        for (std::size_t i = 0; i < used.size(); ++i) {
            dijkstra(g, used[i], dist);
            for (double d : dist)
                if (d > 0.0 && std::isfinite(d))
                    per_source[i].push_back(d);
        }
    }
    std::vector<double> pooled;
    for (const auto& v : per_source)
        pooled.insert(pooled.end(), v.begin(), v.end());
    return pooled;
}

GeodesicHistogram geodesic_histogram(const KnnGraph& g, std::span<const std::size_t> sources, std::size_t bins) {
    if (bins == 0)
        throw KnnError("histogram needs at least one bin");
    const auto used = sources_in_largest(g, sources);
    const auto count = static_cast<std::ptrdiff_t>(used.size());

    // Pass 1: range. Pass 2: counts. Storing every pooled distance would need
    // O(n^2) memory for the graph sizes this is meant for.
    double max_distance = 0.0;
#pragma omp parallel
    {
        std::vector<double> dist;
        double local = 0.0;
#pragma omp for schedule(dynamic, 8) nowait
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            dijkstra(g, used[static_cast<std::size_t>(i)], dist);
            for (double d : dist)
                if (std::isfinite(d))
                    local = std::max(local, d);
        }
#pragma omp critical(intdim_geo_max)
        max_distance = std::max(max_distance, local);
    }
    if (!(max_distance > 0.0))
        throw KnnError("all geodesic distances are zero");

    GeodesicHistogram h;
    h.counts.assign(bins, 0);
    h.max_distance = max_distance;
    h.sources_used = used.size();
    const double width = max_distance / static_cast<double>(bins);
#pragma omp parallel
    {
        std::vector<double> dist;
        std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(dynamic, 8) nowait
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            dijkstra(g, used[static_cast<std::size_t>(i)], dist);
            for (double d : dist) {
                if (!(d > 0.0) || !std::isfinite(d))
                    continue;
                const auto b = std::min(bins - 1, static_cast<std::size_t>(d / width));
                ++local[b];
            }
        }
#pragma omp critical(intdim_geo_hist)
        for (std::size_t b = 0; b < bins; ++b)
            h.counts[b] += local[b];
    }
    return h;
}

} // namespace intdim
