#include "intdim/dataset.hpp"
#include "intdim/error.hpp"
#include "intdim/estimators.hpp"
#include "intdim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace intdim {
namespace {

constexpr double kGridMin = 1.0;
constexpr double kGridMax = 100.0;
constexpr double kGridStep = 0.05;
constexpr double kWindowFraction = 0.5; // of the peak count, left of the peak

} // namespace

GeodesicFit fit_geodesic_histogram(const std::vector<std::uint64_t>& counts, double max_distance) {
    if (counts.empty() || !(max_distance > 0.0))
        throw EstimatorError("empty geodesic histogram");
    const auto peak_it = std::max_element(counts.begin(), counts.end());
    const auto peak = static_cast<std::size_t>(peak_it - counts.begin());
    const double peak_count = static_cast<double>(*peak_it);
    if (peak_count == 0.0)
        throw EstimatorError("empty geodesic histogram");

    const double width = max_distance / static_cast<double>(counts.size());
    const double r_max = (static_cast<double>(peak) + 0.5) * width;

    // Fitting window: bins up to and including the peak whose count is at least
    // half the peak count. x = log sin(pi r / (2 r_max)), y = log(p(r) / p(r_max)).
    std::vector<double> xs, ys;
    for (std::size_t b = 0; b <= peak; ++b) {
        const double c = static_cast<double>(counts[b]);
        if (c < kWindowFraction * peak_count)
            continue;
        const double ratio = (static_cast<double>(b) + 0.5) / (static_cast<double>(peak) + 0.5);
        xs.push_back(std::log(std::sin(std::numbers::pi / 2.0 * ratio)));
        ys.push_back(std::log(c / peak_count));
    }
    if (xs.size() < 2)
        throw EstimatorError("empty fitting window: no bins left of the geodesic distance peak reach half its count");

    GeodesicFit fit;
    fit.r_max = r_max;
    fit.window_bins = xs.size();
    fit.residual = std::numeric_limits<double>::infinity();
    const auto steps = static_cast<std::size_t>(std::lround((kGridMax - kGridMin) / kGridStep));
    for (std::size_t s = 0; s <= steps; ++s) {
        const double d = kGridMin + kGridStep * static_cast<double>(s);
        double sse = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - (d - 1.0) * xs[i];
            sse += r * r;
        }
        if (sse < fit.residual) {
            fit.residual = sse;
            fit.estimate = d;
        }
    }
    return fit;
}

GeodesicFit geodesic_id(const PointSet& ps, const GeodesicParams& params) {
    if (params.k < 1)
        throw EstimatorError("geodesic estimator needs k >= 1");
    if (params.bins < 2)
        throw EstimatorError("geodesic estimator needs at least 2 bins");
    if (params.sample_cap < 2)
        throw EstimatorError("geodesic sample cap must be at least 2");

    const PointSet* points = &ps;
    std::optional<PointSet> capped;
    if (ps.size() > params.sample_cap) {
        capped = subsample(ps, params.sample_cap, derive_seed(params.seed, 0x6e0d));
        points = &*capped;
    }
    if (params.k >= points->size())
        throw EstimatorError("geodesic estimator needs more than k = " + std::to_string(params.k) + " points");

    const auto graph = build_knn_graph(*points, params.k);
    const auto comp = largest_component(graph);
    if (2 * comp.size() <= points->size())
        throw EstimatorError("kNN graph is disconnected: largest component holds " + std::to_string(comp.size()) +
                             " of " + std::to_string(points->size()) + " points");

    const auto hist = geodesic_histogram(graph, comp, params.bins);
    auto fit = fit_geodesic_histogram(hist.counts, hist.max_distance);
    fit.points_used = points->size();
    fit.component_size = comp.size();
    return fit;
}

} // namespace intdim
