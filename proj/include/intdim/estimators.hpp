#pragma once

#include "intdim/knn.hpp"
#include "intdim/point_set.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace intdim {

// ---------------------------------------------------------------------------
// Levina-Bickel maximum likelihood
// ---------------------------------------------------------------------------

enum class Aggregation {
    MacKay, // inverse of the mean inverse local estimate
    Levina, // arithmetic mean of finite local estimates
};

/// Numerator of the local estimate. KMinus1 is the maximum-likelihood form;
/// KMinus2 is the bias-corrected form, whose local estimates are unbiased but
/// whose MacKay pooling then runs low by (k-2)/(k-1).
enum class Normalization { KMinus1, KMinus2 };

struct LocalEstimates {
    std::vector<double> values; // one per table row; +inf where all k distances tie
    std::size_t infinite = 0;
};

/// Local MLE at every anchor from its first k neighbor distances (k >= 2,
/// table.k >= k). Throws EstimatorError on a non-positive distance.
LocalEstimates mle_local(const NeighborTable& table, std::size_t k,
                         Normalization normalization = Normalization::KMinus1);

/// Global MLE over all table rows. MacKay sums log-ratios over every row and
/// neighbor before inverting; Levina averages finite local estimates.
/// Throws EstimatorError when every local estimate is infinite.
double mle_global(const NeighborTable& table, std::size_t k, Aggregation aggregation,
                  Normalization normalization = Normalization::KMinus1);

struct MleParams {
    std::size_t k = 5;
    double anchor_fraction = 1.0;
    std::uint64_t seed = 0;
    Aggregation aggregation = Aggregation::MacKay;
    Normalization normalization = Normalization::KMinus1;
};

/// Fewest anchors mle_anchor accepts when anchor_fraction < 1.
inline constexpr std::size_t kMinAnchors = 32;

/// Anchor rows for a fraction of n points: floor(fraction * n) rows drawn
/// without replacement and sorted, or every row when fraction == 1.
std::vector<std::size_t> draw_anchors(std::size_t n, double fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Comparison estimators
// ---------------------------------------------------------------------------

/// TwoNN from first/second neighbor distance ratios. The largest
/// floor(discard_fraction * rows) ratios are censored at the largest kept ratio
/// and the Pareto exponent is fitted in closed form.
double twonn(const NeighborTable& table, double discard_fraction);

struct GeoMleParams {
    std::size_t k1 = 20;
    std::size_t k2 = 55;
    std::size_t bootstraps = 20;
    std::size_t degree = 1; // higher degrees extrapolate unstably over [k1, k2]
    std::uint64_t seed = 0;
};

struct GeoMleResult {
    double estimate = 0.0;
    std::vector<double> intercepts; // one per bootstrap resample
    std::size_t fallback_searches = 0;
};

/// GeoMLE: per bootstrap resample, regress the mean local MLE at k in [k1, k2]
/// (unbiased (k-2) normalization)
/// on the mean k-th neighbor radius and extrapolate to radius zero. `table`, if
/// given, must be a knn_all() table of `ps`; neighbor lists inside a resample are
/// filtered from it and only recomputed when too few survive.
GeoMleResult geomle(const PointSet& ps, const GeoMleParams& params, const NeighborTable* table = nullptr);

/// Minimum table width geomle() wants for its filtering shortcut.
std::size_t geomle_table_k(const GeoMleParams& params, std::size_t n);

struct GeodesicParams {
    std::size_t k = 4;
    std::size_t bins = 1000;
    std::size_t sample_cap = 10000;
    std::uint64_t seed = 0;
};

struct GeodesicFit {
    double estimate = 0.0;
    double r_max = 0.0;             // centre of the modal bin
    std::size_t window_bins = 0;    // bins used in the fit, peak included
    std::size_t points_used = 0;    // after capping
    std::size_t component_size = 0;
    double residual = 0.0;          // sum of squared log-density residuals at the optimum
};

/// Fits the histogram of shortest-path distances on a kNN graph to the
/// geodesic distance density of a d-sphere, sin^(d-1)(pi r / (2 r_max)).
GeodesicFit geodesic_id(const PointSet& ps, const GeodesicParams& params);

/// The fit step alone, exposed for testing: bins are equal-width on [0, max_distance].
GeodesicFit fit_geodesic_histogram(const std::vector<std::uint64_t>& counts, double max_distance);

// ---------------------------------------------------------------------------
// Uniform entry point
// ---------------------------------------------------------------------------

enum class EstimatorKind { Mle, TwoNN, GeoMle, Geodesic };

std::string_view to_string(EstimatorKind kind);
std::string_view to_string(Aggregation aggregation);
std::string_view to_string(Normalization normalization);
EstimatorKind parse_estimator(std::string_view name);
Aggregation parse_aggregation(std::string_view name);
Normalization parse_normalization(std::string_view name);

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::Mle;
    std::size_t k = 5; // mle and twonn neighbors; geodesic graph degree
    Aggregation aggregation = Aggregation::MacKay;
    Normalization normalization = Normalization::KMinus1; // mle
    double anchor_fraction = 1.0; // mle, twonn
    double discard_fraction = 0.1; // twonn
    GeoMleParams geomle;
    std::size_t bins = 1000;         // geodesic
    std::size_t sample_cap = 10000;  // geodesic
    std::uint64_t seed = 0;
    bool deduplicate = true;
};

/// Spec with the conventional defaults for an estimator (geodesic uses k = 4).
EstimatorSpec default_spec(EstimatorKind kind);

struct EstimateReport {
    std::string estimator;
    EstimatorSpec spec;
    double estimate = 0.0;
    std::vector<double> per_replicate;
    double std_error = 0.0;
    std::size_t n_used = 0;
    std::size_t ambient_dim = 0;
    std::size_t dedup_removed = 0;
    std::size_t anchors = 0;
    std::size_t infinite_locals = 0;
    std::uint64_t seed = 0;
    double runtime_ms = 0.0;
};

/// MLE at a random fraction of anchors with neighbors searched over all of ps.
/// anchor_fraction == 1 uses every row and equals mle_global on knn_all.
EstimateReport mle_anchor(const PointSet& ps, const MleParams& params);

/// Runs one estimator on ps: optional deduplication, dispatch, timing. A cached
/// table (computed on the deduplicated data) is reused when its anchors match
/// and it is wide enough.
EstimateReport estimate(const PointSet& ps, const EstimatorSpec& spec, const NeighborTable* cache = nullptr);

/// MLE at several k from one neighbor search at max(ks).
std::vector<EstimateReport> estimate_k_sweep(const PointSet& ps, const EstimatorSpec& spec,
                                             const std::vector<std::size_t>& ks,
                                             const NeighborTable* cache = nullptr);

} // namespace intdim
