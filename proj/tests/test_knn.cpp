#include "oracles.hpp"

#include "intdim/error.hpp"
#include "intdim/knn.hpp"
#include "intdim/parallel.hpp"
#include "intdim/synth.hpp"

#include <doctest.h>

#include <numeric>
#include <set>

using namespace intdim;

namespace {

void check_against_oracle(const PointSet& ps, std::size_t k) {
    const auto t = knn_all(ps, k);
    REQUIRE(t.rows() == ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto nb = oracle::naive_knn(ps, i, k);
        for (std::size_t j = 0; j < k; ++j) {
            REQUIRE(t.neighbors_of(i)[j] == nb.idx[j]);
            REQUIRE(t.distances_of(i)[j] == nb.dist[j]);
        }
    }
}

} // namespace

TEST_CASE("knn on three collinear points") {
    const PointSet ps(3, 1, {0, 1, 3});
    const std::vector<std::size_t> a{0};
    const auto t = knn(ps, a, 2);
    CHECK(t.distances_of(0)[0] == 1.0);
    CHECK(t.distances_of(0)[1] == 3.0);
    CHECK(t.neighbors_of(0)[0] == 1);
    CHECK(t.neighbors_of(0)[1] == 2);
}

TEST_CASE("knn matches the naive oracle exactly") {
    check_against_oracle(oracle::random_points(200, 16, 11), 10);
    check_against_oracle(oracle::random_points(500, 3, 12), 7);
    check_against_oracle(oracle::random_points(300, 700, 13), 5);
    // Large offset stresses the float screening bound.
    check_against_oracle(oracle::random_points(150, 20, 14, 1000.0, 1000.001), 6);
    // Integer grid: many exact ties, resolved by index.
    std::vector<double> grid;
    for (int x = 0; x < 12; ++x)
        for (int y = 0; y < 12; ++y) {
            grid.push_back(x);
            grid.push_back(y);
        }
    check_against_oracle(PointSet(144, 2, grid), 8);
}

TEST_CASE("knn with anchors and k = n - 1") {
    const auto ps = oracle::random_points(40, 5, 3);
    const std::vector<std::size_t> anchors{39, 0, 17};
    const auto t = knn(ps, anchors, 39);
    for (std::size_t r = 0; r < anchors.size(); ++r) {
        std::set<std::size_t> seen(t.neighbors_of(r).begin(), t.neighbors_of(r).end());
        CHECK(seen.size() == 39);
        CHECK(seen.count(anchors[r]) == 0);
        CHECK(std::is_sorted(t.distances_of(r).begin(), t.distances_of(r).end()));
        CHECK(t.distances_of(r)[0] > 0.0);
    }
    CHECK(t.anchors == anchors);
}

TEST_CASE("knn errors") {
    const auto ps = oracle::random_points(5, 2, 1);
    CHECK_THROWS_AS(knn_all(ps, 5), KnnError);
    CHECK_THROWS_AS(knn_all(ps, 0), KnnError);
    const PointSet dup(3, 2, {0, 0, 1, 1, 0, 0});
    CHECK_THROWS_AS(knn_all(dup, 1), KnnError);
    const std::vector<std::size_t> bad{7};
    CHECK_THROWS_AS(knn(ps, bad, 2), KnnError);
}

TEST_CASE("prefix monotonicity") {
    const auto ps = oracle::random_points(300, 8, 4);
    const auto big = knn_all(ps, 20);
    const auto small = knn_all(ps, 7);
    const auto pre = big.prefix(7);
    CHECK(pre.distances == small.distances);
    CHECK(pre.neighbors == small.neighbors);
}

TEST_CASE("isometry leaves the table unchanged") {
    const auto ps = oracle::random_points(250, 6, 5);
    const auto q = random_orthonormal(6, 6, 99);
    std::vector<double> moved(ps.data().size());
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t r = 0; r < 6; ++r) {
            double s = 3.0 - 0.5 * r;
            for (std::size_t c = 0; c < 6; ++c)
                s += q[c * 6 + r] * ps.row(i)[c];
            moved[i * 6 + r] = s;
        }
    const auto a = knn_all(ps, 9);
    const auto b = knn_all(PointSet(250, 6, moved), 9);
    CHECK(a.neighbors == b.neighbors);
    for (std::size_t i = 0; i < a.distances.size(); ++i)
        REQUIRE(oracle::rel(b.distances[i], a.distances[i]) < 1e-9);
}

TEST_CASE("results do not depend on thread count") {
    const auto ps = oracle::random_points(3000, 12, 6);
    set_max_threads(1);
    const auto one = knn_all(ps, 10);
    set_max_threads(4);
    const auto four = knn_all(ps, 10);
    set_max_threads(0);
    CHECK(one.distances == four.distances);
    CHECK(one.neighbors == four.neighbors);
}

TEST_CASE("knn graph") {
    SUBCASE("collinear k = 1") {
        const auto g = build_knn_graph(PointSet(3, 1, {0, 1, 3}), 1);
        REQUIRE(g.edges.size() == 2);
        CHECK(g.edges[0].u == 0);
        CHECK(g.edges[0].v == 1);
        CHECK(g.edges[1].u == 1);
        CHECK(g.edges[1].v == 2);
        CHECK(g.edges[1].weight == 2.0);
    }
    SUBCASE("k = n - 1 is complete") {
        const auto g = build_knn_graph(oracle::random_points(9, 2, 1), 8);
        CHECK(g.edges.size() == 36);
    }
    SUBCASE("degree at least k, no self loops") {
        const auto g = build_knn_graph(oracle::random_points(400, 3, 2), 4);
        for (std::size_t v = 0; v < g.nodes; ++v)
            CHECK(g.degree(v) >= 4);
        for (const auto& e : g.edges) {
            CHECK(e.u != e.v);
            CHECK(e.weight > 0.0);
        }
    }
}

TEST_CASE("shortest paths") {
    SUBCASE("path graph") {
        const auto g = KnnGraph::from_edges(3, {{0, 1, 1.0}, {1, 2, 2.0}});
        const std::vector<std::size_t> src{0};
        auto d = geodesic_distances(g, src);
        std::sort(d.begin(), d.end());
        CHECK(d == std::vector<double>{1.0, 3.0});
    }
    SUBCASE("complete Euclidean graph gives Euclidean distances") {
        const auto ps = oracle::random_points(30, 3, 8);
        const auto g = build_knn_graph(ps, 29);
        for (std::size_t s : {0, 13}) {
            const auto d = shortest_paths(g, s);
            for (std::size_t j = 0; j < 30; ++j)
                CHECK(d[j] == doctest::Approx(std::sqrt(oracle::dist2(ps, s, j))).epsilon(1e-12));
        }
    }
    SUBCASE("matches Floyd-Warshall on a random 2-D kNN graph") {
        const auto ps = oracle::random_points(100, 2, 21);
        const auto g = build_knn_graph(ps, 4);
        std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
        // Oracle edges from the naive neighbor lists, symmetrized by hand.
        for (std::size_t i = 0; i < 100; ++i) {
            const auto nb = oracle::naive_knn(ps, i, 4);
            for (std::size_t j = 0; j < 4; ++j)
                edges.emplace_back(i, nb.idx[j], nb.dist[j]);
        }
        const auto fw = oracle::floyd_warshall(100, edges);
        const auto comp = largest_component(g);
        std::vector<double> expect;
        for (auto s : comp)
            for (std::size_t j = 0; j < 100; ++j)
                if (fw[s][j] > 0.0 && std::isfinite(fw[s][j]))
                    expect.push_back(fw[s][j]);
        auto got = geodesic_distances(g, comp);
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            REQUIRE(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
    SUBCASE("no source in the largest component") {
        const auto g = KnnGraph::from_edges(5, {{0, 1, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}});
        const std::vector<std::size_t> src{4};
        CHECK_THROWS_AS(geodesic_distances(g, src), KnnError);
    }
    SUBCASE("histogram agrees with pooled distances") {
        const auto ps = oracle::random_points(200, 2, 31);
        const auto g = build_knn_graph(ps, 4);
        const auto comp = largest_component(g);
        const auto pooled = geodesic_distances(g, comp);
        const auto h = geodesic_histogram(g, comp, 50);
        CHECK(h.max_distance == *std::max_element(pooled.begin(), pooled.end()));
        std::vector<std::uint64_t> counts(50, 0);
        for (double d : pooled)
            ++counts[std::min<std::size_t>(49, static_cast<std::size_t>(d / h.max_distance * 50))];
        CHECK(h.counts == counts);
    }
}

TEST_CASE("neighbor table cache round trip") {
    const auto dir = oracle::temp_dir("cache");
    const auto ps = oracle::random_points(120, 4, 41);
    const std::vector<std::size_t> anchors{3, 50, 119, 7};
    const auto t = knn(ps, anchors, 6);
    save_neighbor_table(t, ps, dir / "t");
    const auto back = load_neighbor_table(dir / "t", ps);
    CHECK(back.k == 6);
    CHECK(back.anchors == t.anchors);
    CHECK(back.distances == t.distances);
    CHECK(back.neighbors == t.neighbors);
    CHECK_THROWS_AS(load_neighbor_table(dir / "t", oracle::random_points(120, 4, 42)), KnnError);
    std::filesystem::remove_all(dir);
}
