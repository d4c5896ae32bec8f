#include "intdim/knn.hpp"

#include "intdim/error.hpp"

#include <cblas.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace intdim {
namespace {

constexpr std::size_t kAnchorBlock = 256;
constexpr std::size_t kRefBlock = 2048;

struct Candidate {
    double approx;
    std::uint32_t index;
};

// Per-anchor screening state: every point whose approximate squared distance is
// within `threshold` of the anchor. The threshold is the running k-th smallest
// approximation plus twice the error bound, so it only ever shrinks and no true
// neighbor can be pruned.
struct Screen {
    std::vector<Candidate> cands;
    std::vector<double> scratch;
    double threshold = std::numeric_limits<double>::infinity();

    void tighten(std::size_t k, double margin) {
        if (cands.size() < k)
            return;
        scratch.resize(cands.size());
        for (std::size_t i = 0; i < cands.size(); ++i)
            scratch[i] = cands[i].approx;
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1), scratch.end());
        threshold = std::min(threshold, scratch[k - 1] + margin);
        std::erase_if(cands, [t = threshold](const Candidate& c) { return c.approx > t; });
    }
};

void check_request(const PointSet& ps, std::span<const std::size_t> anchors, std::size_t k) {
    if (k == 0)
        throw KnnError("k must be at least 1");
    if (k >= ps.size())
        throw KnnError("k = " + std::to_string(k) + " needs at least " + std::to_string(k + 1) + " points, have " +
                       std::to_string(ps.size()));
    if (ps.size() > std::numeric_limits<std::uint32_t>::max())
        throw KnnError("point sets above 2^32 rows are not supported");
    for (auto a : anchors)
        if (a >= ps.size())
            throw KnnError("anchor index " + std::to_string(a) + " out of range");
}

} // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

NeighborTable NeighborTable::prefix(std::size_t k_prefix) const {
    if (k_prefix > k)
        throw KnnError("prefix k = " + std::to_string(k_prefix) + " exceeds table k = " + std::to_string(k));
    NeighborTable out;
    out.k = k_prefix;
    out.anchors = anchors;
    out.distances.resize(rows() * k_prefix);
    out.neighbors.resize(rows() * k_prefix);
    for (std::size_t i = 0; i < rows(); ++i) {
        std::copy_n(distances.begin() + static_cast<std::ptrdiff_t>(i * k), k_prefix,
                    out.distances.begin() + static_cast<std::ptrdiff_t>(i * k_prefix));
        std::copy_n(neighbors.begin() + static_cast<std::ptrdiff_t>(i * k), k_prefix,
                    out.neighbors.begin() + static_cast<std::ptrdiff_t>(i * k_prefix));
    }
    return out;
}

NeighborTable knn(const PointSet& ps, std::span<const std::size_t> anchors, std::size_t k) {
    check_request(ps, anchors, k);
    const std::size_t n = ps.size();
    const std::size_t dim = ps.dim();
    const std::size_t m = anchors.size();

    NeighborTable table;
    table.k = k;
    table.anchors.assign(anchors.begin(), anchors.end());
    table.distances.resize(m * k);
    table.neighbors.resize(m * k);
    if (m == 0)
        return table;

    // Single-precision copy for the screening GEMM, exact squared norms for the
    // expansion |a|^2 + |b|^2 - 2 a.b.
    std::vector<float> xf(n * dim);
    std::vector<double> norm2(n);
    double max_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = ps.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            xf[i * dim + j] = static_cast<float>(row[j]);
            s += row[j] * row[j];
        }
        norm2[i] = s;
        max_norm = std::max(max_norm, std::sqrt(s));
    }

    // Rounding the inputs to float and any-order float accumulation of a dot
    // product of length N err by at most (N + 2) u |a||b| with u = 2^-24; the
    // double-precision expansion adds a few ulps of |a|^2 + |b|^2 on top.
    const double u = std::ldexp(1.0, -24);
    const double gamma = 1.05 * static_cast<double>(dim + 2) * u / (1.0 - static_cast<double>(dim + 2) * u);
    const double max_norm2 = max_norm * max_norm;
    auto margin_for = [&](std::size_t anchor) {
        const double na = std::sqrt(norm2[anchor]);
        const double err = 2.0 * gamma * na * max_norm + 8.0 * std::ldexp(1.0, -52) * (norm2[anchor] + max_norm2);
        return 2.0 * err;
    };

    openblas_set_num_threads(1);
    const std::size_t anchor_blocks = (m + kAnchorBlock - 1) / kAnchorBlock;
    std::size_t zero_row = m;
    std::size_t zero_partner = 0;

#pragma omp parallel
    {
        std::vector<float> ablock(kAnchorBlock * dim);
        std::vector<float> gram(kAnchorBlock * kRefBlock);
        std::vector<Screen> screens(kAnchorBlock);
        std::vector<double> margins(kAnchorBlock);
        std::vector<std::pair<double, std::uint32_t>> exact;

#pragma omp for schedule(dynamic, 1)
        for (std::size_t blk = 0; blk < anchor_blocks; ++blk) {
            const std::size_t a0 = blk * kAnchorBlock;
            const std::size_t na = std::min(kAnchorBlock, m - a0);
            for (std::size_t i = 0; i < na; ++i) {
                const std::size_t a = anchors[a0 + i];
                std::copy_n(xf.begin() + static_cast<std::ptrdiff_t>(a * dim), dim,
                            ablock.begin() + static_cast<std::ptrdiff_t>(i * dim));
                screens[i].cands.clear();
                screens[i].threshold = std::numeric_limits<double>::infinity();
                margins[i] = margin_for(a);
            }

            for (std::size_t r0 = 0; r0 < n; r0 += kRefBlock) {
                const std::size_t nr = std::min(kRefBlock, n - r0);
                cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(na), static_cast<int>(nr),
                            static_cast<int>(dim), 1.0f, ablock.data(), static_cast<int>(dim),
                            xf.data() + r0 * dim, static_cast<int>(dim), 0.0f, gram.data(), static_cast<int>(nr));
                for (std::size_t i = 0; i < na; ++i) {
                    const std::size_t a = anchors[a0 + i];
                    Screen& sc = screens[i];
                    const double base = norm2[a];
                    const float* g = gram.data() + i * nr;
                    for (std::size_t j = 0; j < nr; ++j) {
                        const double approx = base + norm2[r0 + j] - 2.0 * static_cast<double>(g[j]);
                        if (approx <= sc.threshold && r0 + j != a)
                            sc.cands.push_back({approx, static_cast<std::uint32_t>(r0 + j)});
                    }
                    if (sc.cands.size() >= k &&
                        (sc.threshold == std::numeric_limits<double>::infinity() || sc.cands.size() > 2 * k + 64))
                        sc.tighten(k, margins[i]);
                }
            }

            for (std::size_t i = 0; i < na; ++i) {
                const std::size_t row = a0 + i;
                const std::size_t a = anchors[row];
                Screen& sc = screens[i];
                sc.tighten(k, margins[i]);
                exact.clear();
                for (const auto& c : sc.cands)
                    exact.emplace_back(squared_distance(ps.row(a), ps.row(c.index)), c.index);
                std::partial_sort(exact.begin(), exact.begin() + static_cast<std::ptrdiff_t>(k), exact.end());
                for (std::size_t j = 0; j < k; ++j) {
                    table.distances[row * k + j] = std::sqrt(exact[j].first);
                    table.neighbors[row * k + j] = exact[j].second;
                }
                if (exact[0].first == 0.0) {
#pragma omp critical(intdim_knn_zero)
                    if (row < zero_row) {
                        zero_row = row;
                        zero_partner = exact[0].second;
                    }
                }
            }
        }
    }
    if (zero_row < m)
        throw KnnError("rows " + std::to_string(anchors[zero_row]) + " and " + std::to_string(zero_partner) +
                       " are identical (zero neighbor distance); deduplicate the point set first");
    return table;
}

NeighborTable knn_all(const PointSet& ps, std::size_t k) {
    std::vector<std::size_t> all(ps.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return knn(ps, all, k);
}

} // namespace intdim
