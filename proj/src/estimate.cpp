#include "intdim/dataset.hpp"
#include "intdim/error.hpp"
#include "intdim/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <optional>

namespace intdim {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// The point set an estimator actually sees: either the caller's or a
// deduplicated copy. Avoids copying large datasets that have no duplicates.
struct Working {
    const PointSet* points = nullptr;
    std::optional<PointSet> owned;
    std::size_t removed = 0;
};

Working prepare(const PointSet& ps, bool dedup) {
    Working w;
    w.points = &ps;
    if (!dedup)
        return w;
    const auto keep = unique_rows(ps);
    w.removed = ps.size() - keep.size();
    if (w.removed > 0) {
        w.owned = ps.select(keep, ps.name());
        w.points = &*w.owned;
    }
    return w;
}

bool cache_fits(const NeighborTable* cache, const std::vector<std::size_t>& anchors, std::size_t k) {
    return cache != nullptr && cache->k >= k && cache->anchors == anchors;
}

void check_k(const PointSet& ps, std::size_t k) {
    if (k >= ps.size())
        throw EstimatorError("k = " + std::to_string(k) + " needs more than " + std::to_string(k) + " points, have " +
                             std::to_string(ps.size()));
}

} // namespace

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::Mle: return "mle";
    case EstimatorKind::TwoNN: return "twonn";
    case EstimatorKind::GeoMle: return "geomle";
    case EstimatorKind::Geodesic: return "geodesic";
    }
    return "unknown";
}

std::string_view to_string(Aggregation aggregation) {
    return aggregation == Aggregation::MacKay ? "mackay" : "levina";
}

std::string_view to_string(Normalization normalization) {
    return normalization == Normalization::KMinus1 ? "k-1" : "k-2";
}

EstimatorKind parse_estimator(std::string_view name) {
    if (name == "mle")
        return EstimatorKind::Mle;
    if (name == "twonn")
        return EstimatorKind::TwoNN;
    if (name == "geomle")
        return EstimatorKind::GeoMle;
    if (name == "geodesic" || name == "knn-graph")
        return EstimatorKind::Geodesic;
    throw EstimatorError("unknown estimator '" + std::string(name) + "'");
}

Aggregation parse_aggregation(std::string_view name) {
    if (name == "mackay")
        return Aggregation::MacKay;
    if (name == "levina")
        return Aggregation::Levina;
    throw EstimatorError("unknown aggregation '" + std::string(name) + "'");
}

Normalization parse_normalization(std::string_view name) {
    if (name == "k-1")
        return Normalization::KMinus1;
    if (name == "k-2")
        return Normalization::KMinus2;
    throw EstimatorError("unknown normalization '" + std::string(name) + "' (expected k-1 or k-2)");
}

EstimatorSpec default_spec(EstimatorKind kind) {
    EstimatorSpec spec;
    spec.kind = kind;
    switch (kind) {
    case EstimatorKind::Mle: spec.k = 5; break;
    case EstimatorKind::TwoNN: spec.k = 2; break;
    case EstimatorKind::GeoMle: spec.k = spec.geomle.k2; break;
    case EstimatorKind::Geodesic: spec.k = 4; break;
    }
    return spec;
}

EstimateReport estimate(const PointSet& ps, const EstimatorSpec& spec, const NeighborTable* cache) {
    const auto t0 = Clock::now();
    const auto work = prepare(ps, spec.deduplicate);
    const PointSet& w = *work.points;

    EstimateReport r;
    r.estimator = std::string(to_string(spec.kind));
    r.spec = spec;
    r.seed = spec.seed;
    r.n_used = w.size();
    r.ambient_dim = w.dim();
    r.dedup_removed = work.removed;

    switch (spec.kind) {
    case EstimatorKind::Mle: {
        if (spec.k < 2)
            throw EstimatorError("MLE needs k >= 2");
        check_k(w, spec.k);
        const auto anchors = draw_anchors(w.size(), spec.anchor_fraction, spec.seed);
        if (cache_fits(cache, anchors, spec.k)) {
            r.estimate = mle_global(*cache, spec.k, spec.aggregation, spec.normalization);
            r.infinite_locals = mle_local(*cache, spec.k, spec.normalization).infinite;
            r.anchors = anchors.size();
        } else {
            const auto a = mle_anchor(w, {spec.k, spec.anchor_fraction, spec.seed, spec.aggregation, spec.normalization});
            r.estimate = a.estimate;
            r.infinite_locals = a.infinite_locals;
            r.anchors = a.anchors;
        }
        break;
    }
    case EstimatorKind::TwoNN: {
        check_k(w, 2);
        const auto anchors = draw_anchors(w.size(), spec.anchor_fraction, spec.seed);
        r.anchors = anchors.size();
        r.estimate = cache_fits(cache, anchors, 2) ? twonn(*cache, spec.discard_fraction)
                                                   : twonn(knn(w, anchors, 2), spec.discard_fraction);
        break;
    }
    case EstimatorKind::GeoMle: {
        auto params = spec.geomle;
        params.seed = spec.seed;
        const auto g = geomle(w, params, cache);
        r.estimate = g.estimate;
        r.per_replicate = g.intercepts;
        r.anchors = w.size();
        break;
    }
    case EstimatorKind::Geodesic: {
        const auto fit = geodesic_id(w, {spec.k, spec.bins, spec.sample_cap, spec.seed});
        r.estimate = fit.estimate;
        r.anchors = fit.component_size;
        r.n_used = fit.points_used;
        break;
    }
    }
    if (r.per_replicate.empty())
        r.per_replicate = {r.estimate};
    r.runtime_ms = elapsed_ms(t0);
    return r;
}

std::vector<EstimateReport> estimate_k_sweep(const PointSet& ps, const EstimatorSpec& spec,
                                             const std::vector<std::size_t>& ks, const NeighborTable* cache) {
    if (ks.empty())
        throw EstimatorError("empty k list");
    if (spec.kind != EstimatorKind::Mle) {
        std::vector<EstimateReport> out;
        for (auto k : ks) {
            auto s = spec;
            s.k = k;
            out.push_back(estimate(ps, s, cache));
        }
        return out;
    }

    const auto t0 = Clock::now();
    const auto work = prepare(ps, spec.deduplicate);
    const PointSet& w = *work.points;
    const auto k_max = *std::max_element(ks.begin(), ks.end());
    if (*std::min_element(ks.begin(), ks.end()) < 2)
        throw EstimatorError("MLE needs k >= 2");
    check_k(w, k_max);
    const auto anchors = draw_anchors(w.size(), spec.anchor_fraction, spec.seed);
    NeighborTable own;
    const NeighborTable* table = cache;
    if (!cache_fits(cache, anchors, k_max)) {
        own = knn(w, anchors, k_max);
        table = &own;
    }
    const double search_ms = elapsed_ms(t0);

    std::vector<EstimateReport> out;
    for (auto k : ks) {
        const auto t1 = Clock::now();
        EstimateReport r;
        r.estimator = "mle";
        r.spec = spec;
        r.spec.k = k;
        r.seed = spec.seed;
        r.n_used = w.size();
        r.ambient_dim = w.dim();
        r.dedup_removed = work.removed;
        r.anchors = anchors.size();
        r.estimate = mle_global(*table, k, spec.aggregation, spec.normalization);
        r.infinite_locals = mle_local(*table, k, spec.normalization).infinite;
        r.per_replicate = {r.estimate};
        r.runtime_ms = search_ms + elapsed_ms(t1);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace intdim
