#pragma once

// Reference implementations used only by the tests. Each is the plainest
// possible version of the library routine it checks.

#include "intdim/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <unistd.h>

namespace oracle {

inline intdim::PointSet random_points(std::size_t n, std::size_t dim, std::uint64_t seed, double lo = 0.0,
                                      double hi = 1.0) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> data(n * dim);
    for (auto& v : data)
        v = u(eng);
    return intdim::PointSet(n, dim, std::move(data));
}

inline intdim::PointSet from_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<double> data;
    for (const auto& r : rows)
        data.insert(data.end(), r.begin(), r.end());
    return intdim::PointSet(rows.size(), rows.front().size(), std::move(data));
}

inline double dist2(const intdim::PointSet& ps, std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t c = 0; c < ps.dim(); ++c) {
        const double t = ps.row(a)[c] - ps.row(b)[c];
        s += t * t;
    }
    return s;
}

struct Neighbors {
    std::vector<double> dist;
    std::vector<std::size_t> idx;
};

// O(n^2) double loop, full sort, ties by index.
inline Neighbors naive_knn(const intdim::PointSet& ps, std::size_t anchor, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t j = 0; j < ps.size(); ++j)
        if (j != anchor)
            all.emplace_back(dist2(ps, anchor, j), j);
    std::sort(all.begin(), all.end());
    Neighbors out;
    for (std::size_t j = 0; j < k; ++j) {
        out.dist.push_back(std::sqrt(all[j].first));
        out.idx.push_back(all[j].second);
    }
    return out;
}

// Eq. for the local estimator written straight from its definition.
inline double local_mle(const std::vector<double>& t, std::size_t k) {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j)
        s += std::log(t[k - 1] / t[j]);
    return s == 0.0 ? std::numeric_limits<double>::infinity() : static_cast<double>(k - 1) / s;
}

inline double mackay(const intdim::PointSet& ps, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto nb = naive_knn(ps, i, k);
        for (std::size_t j = 0; j + 1 < k; ++j)
            s += std::log(nb.dist[k - 1] / nb.dist[j]);
    }
    return static_cast<double>(ps.size() * (k - 1)) / s;
}

// All-pairs shortest paths on an edge list.
inline std::vector<std::vector<double>> floyd_warshall(std::size_t n,
                                                       const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (std::size_t i = 0; i < n; ++i)
        d[i][i] = 0.0;
    for (const auto& [u, v, w] : edges) {
        d[u][v] = std::min(d[u][v], w);
        d[v][u] = std::min(d[v][u], w);
    }
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][m] + d[m][j] < d[i][j])
                    d[i][j] = d[i][m] + d[m][j];
    return d;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::filesystem::path temp_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("intdim_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(p);
    return p;
}

} // namespace oracle
