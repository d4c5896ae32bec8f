#include "intdim/error.hpp"
#include "intdim/estimators.hpp"
#include "intdim/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace intdim {
namespace {

constexpr double kMinEstimate = 1e-6;

// Least-squares polynomial in x of the given degree; returns the constant term.
double polynomial_intercept(const std::vector<double>& x, const std::vector<double>& y, std::size_t degree) {
    std::vector<double> distinct = x;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() <= degree)
        throw EstimatorError("degenerate GeoMLE regression: " + std::to_string(distinct.size()) +
                             " distinct radii for a degree-" + std::to_string(degree) + " fit");

    // Radii are rescaled by their mean for conditioning; the intercept is unaffected.
    double mean = 0.0;
    for (double v : x)
        mean += v;
    mean /= static_cast<double>(x.size());

    const auto rows = static_cast<Eigen::Index>(x.size());
    const auto cols = static_cast<Eigen::Index>(degree + 1);
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double t = x[static_cast<std::size_t>(i)] / mean;
        double p = 1.0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            design(i, c) = p;
            p *= t;
        }
        rhs(i) = y[static_cast<std::size_t>(i)];
    }
    const auto qr = design.colPivHouseholderQr();
    if (qr.rank() < cols)
        throw EstimatorError("degenerate GeoMLE regression: rank-deficient design");
    const Eigen::VectorXd coef = qr.solve(rhs);
    return coef(0);
}

// k2 nearest members of `in_sample` (other than `self`) by exact search.
void exact_neighbors(const PointSet& ps, std::size_t self, const std::vector<std::size_t>& members,
                     std::size_t k2, std::vector<std::pair<double, std::size_t>>& scratch, std::vector<double>& out) {
    scratch.clear();
    for (auto j : members)
        if (j != self)
            scratch.emplace_back(squared_distance(ps.row(self), ps.row(j)), j);
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k2), scratch.end());
    out.resize(k2);
    for (std::size_t j = 0; j < k2; ++j)
        out[j] = std::sqrt(scratch[j].first);
}

} // namespace

std::size_t geomle_table_k(const GeoMleParams& params, std::size_t n) {
    return std::min(n - 1, 2 * params.k2 + 32);
}

GeoMleResult geomle(const PointSet& ps, const GeoMleParams& params, const NeighborTable* table) {
    if (params.k1 < 3 || params.k2 <= params.k1)
        throw EstimatorError("GeoMLE needs k2 > k1 >= 3");
    if (params.bootstraps < 2)
        throw EstimatorError("GeoMLE needs at least 2 bootstrap resamples");
    if (params.degree < 1)
        throw EstimatorError("GeoMLE polynomial degree must be at least 1");
    const std::size_t n = ps.size();
    if (n <= params.k2)
        throw EstimatorError("GeoMLE with k2 = " + std::to_string(params.k2) + " needs more than " +
                             std::to_string(params.k2) + " points");

    NeighborTable own;
    if (table == nullptr || table->rows() != n || table->k < std::min(n - 1, params.k2)) {
        own = knn_all(ps, geomle_table_k(params, n));
        table = &own;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (table->anchors[i] != i)
            throw EstimatorError("GeoMLE table must list every row as its own anchor, in order");

    const std::size_t k1 = params.k1, k2 = params.k2;
    const std::size_t nk = k2 - k1 + 1;
    GeoMleResult result;
    result.intercepts.resize(params.bootstraps);
    std::vector<std::size_t> fallbacks(params.bootstraps, 0);
    std::vector<std::exception_ptr> errors(params.bootstraps);

#pragma omp parallel
    {
        std::vector<std::uint32_t> weight(n);
        std::vector<std::size_t> members;
        std::vector<double> dist(k2), logsum(k2 + 1);
        std::vector<std::pair<double, std::size_t>> scratch;
        std::vector<double> mle_sum(nk), mle_weight(nk), radius_sum(nk);

#pragma omp for schedule(dynamic, 1)
        for (std::size_t b = 0; b < params.bootstraps; ++b) {
          try {
            auto eng = make_engine(params.seed, b);
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            std::fill(weight.begin(), weight.end(), 0u);
            for (std::size_t s = 0; s < n; ++s)
                ++weight[pick(eng)];
            members.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (weight[i] > 0)
                    members.push_back(i);
            if (members.size() <= k2)
                throw EstimatorError("bootstrap resample has too few distinct points for k2");

            std::fill(mle_sum.begin(), mle_sum.end(), 0.0);
            std::fill(mle_weight.begin(), mle_weight.end(), 0.0);
            std::fill(radius_sum.begin(), radius_sum.end(), 0.0);
            double total_weight = 0.0;

            for (auto x : members) {
                // Neighbors of x within the resample: filter the full list, fall
                // back to an exact search when too few members survive.
                std::size_t got = 0;
                const auto nd = table->distances_of(x);
                const auto ni = table->neighbors_of(x);
                for (std::size_t j = 0; j < table->k && got < k2; ++j)
                    if (weight[ni[j]] > 0)
                        dist[got++] = nd[j];
                if (got < k2) {
                    exact_neighbors(ps, x, members, k2, scratch, dist);
                    ++fallbacks[b];
                }

                logsum[0] = 0.0;
                for (std::size_t j = 0; j < k2; ++j) {
                    if (!(dist[j] > 0.0))
                        throw EstimatorError("non-positive neighbor distance");
                    logsum[j + 1] = logsum[j] + std::log(dist[j]);
                }
                const double w = weight[x];
                total_weight += w;
                for (std::size_t k = k1; k <= k2; ++k) {
                    const double s = static_cast<double>(k - 1) * std::log(dist[k - 1]) - logsum[k - 1];
                    if (s > 0.0) {
                        // (k-2) rather than (k-1): the biased form drifts with k and the
                        // drift is what the extrapolation would amplify.
                        mle_sum[k - k1] += w * static_cast<double>(k - 2) / s;
                        mle_weight[k - k1] += w;
                    }
                    radius_sum[k - k1] += w * dist[k - 1];
                }
            }

            std::vector<double> radii, means;
            for (std::size_t i = 0; i < nk; ++i) {
                if (mle_weight[i] == 0.0)
                    continue;
                radii.push_back(radius_sum[i] / total_weight);
                means.push_back(mle_sum[i] / mle_weight[i]);
            }
            result.intercepts[b] = polynomial_intercept(radii, means, params.degree);
          } catch (...) {
            errors[b] = std::current_exception();
          }
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    double mean = 0.0;
    for (double v : result.intercepts)
        mean += v;
    mean /= static_cast<double>(result.intercepts.size());
    result.estimate = std::max(mean, kMinEstimate);
    for (auto f : fallbacks)
        result.fallback_searches += f;
    return result;
}

} // namespace intdim
