#include "intdim/error.hpp"
#include "intdim/estimators.hpp"
#include "intdim/rng.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace intdim {
namespace {

void check_table(const NeighborTable& table, std::size_t k, Normalization normalization) {
    if (k < 2)
        throw EstimatorError("MLE needs k >= 2");
    if (normalization == Normalization::KMinus2 && k < 3)
        throw EstimatorError("the k-2 normalization needs k >= 3");
    if (table.k < k)
        throw EstimatorError("neighbor table has k = " + std::to_string(table.k) + ", need " + std::to_string(k));
    if (table.rows() == 0)
        throw EstimatorError("neighbor table is empty");
}

// sum_{j<k} log(T_k / T_j) for one row.
double log_ratio_sum(std::span<const double> d, std::size_t k) {
    const double tk = d[k - 1];
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        if (!(d[j] > 0.0))
            throw EstimatorError("non-positive neighbor distance");
        s += std::log(tk / d[j]);
    }
    return s;
}

double numerator(std::size_t k, Normalization normalization) {
    return static_cast<double>(normalization == Normalization::KMinus1 ? k - 1 : k - 2);
}

} // namespace

LocalEstimates mle_local(const NeighborTable& table, std::size_t k, Normalization normalization) {
    check_table(table, k, normalization);
    LocalEstimates out;
    out.values.resize(table.rows());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const double s = log_ratio_sum(table.distances_of(i), k);
        if (s > 0.0) {
            out.values[i] = numerator(k, normalization) / s;
        } else {
            out.values[i] = std::numeric_limits<double>::infinity();
            ++out.infinite;
        }
    }
    return out;
}

double mle_global(const NeighborTable& table, std::size_t k, Aggregation aggregation, Normalization normalization) {
    check_table(table, k, normalization);
    if (aggregation == Aggregation::MacKay) {
        double total = 0.0;
        for (std::size_t i = 0; i < table.rows(); ++i)
            total += log_ratio_sum(table.distances_of(i), k);
        if (!(total > 0.0))
            throw EstimatorError("all local estimates are infinite (every neighbor distance ties)");
        return static_cast<double>(table.rows()) * numerator(k, normalization) / total;
    }
    const auto local = mle_local(table, k, normalization);
    double sum = 0.0;
    std::size_t finite = 0;
    for (double v : local.values) {
        if (std::isfinite(v)) {
            sum += v;
            ++finite;
        }
    }
    if (finite == 0)
        throw EstimatorError("all local estimates are infinite (every neighbor distance ties)");
    return sum / static_cast<double>(finite);
}

std::vector<std::size_t> draw_anchors(std::size_t n, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw EstimatorError("anchor fraction must lie in (0, 1]");
    if (fraction == 1.0) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    const auto m = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    if (m < kMinAnchors)
        throw EstimatorError("anchor fraction " + std::to_string(fraction) + " of " + std::to_string(n) +
                             " points gives " + std::to_string(m) + " anchors, need at least " +
                             std::to_string(kMinAnchors));
    return sample_without_replacement(n, m, derive_seed(seed, 0xa4c4));
}

EstimateReport mle_anchor(const PointSet& ps, const MleParams& params) {
    const auto t0 = std::chrono::steady_clock::now();
    if (params.k < 2)
        throw EstimatorError("MLE needs k >= 2");
    const auto anchors = draw_anchors(ps.size(), params.anchor_fraction, params.seed);
    const auto table = knn(ps, anchors, params.k);

    EstimateReport r;
    r.estimator = "mle";
    r.spec.kind = EstimatorKind::Mle;
    r.spec.k = params.k;
    r.spec.aggregation = params.aggregation;
    r.spec.normalization = params.normalization;
    r.spec.anchor_fraction = params.anchor_fraction;
    r.spec.seed = params.seed;
    r.estimate = mle_global(table, params.k, params.aggregation, params.normalization);
    r.infinite_locals = mle_local(table, params.k, params.normalization).infinite;
    r.per_replicate = {r.estimate};
    r.n_used = ps.size();
    r.ambient_dim = ps.dim();
    r.anchors = anchors.size();
    r.seed = params.seed;
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace intdim
