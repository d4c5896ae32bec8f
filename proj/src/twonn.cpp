#include "intdim/error.hpp"
#include "intdim/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace intdim {

double twonn(const NeighborTable& table, double discard_fraction) {
    if (table.k < 2)
        throw EstimatorError("TwoNN needs the two nearest neighbors of every anchor");
    if (!(discard_fraction >= 0.0 && discard_fraction < 1.0))
        throw EstimatorError("discard fraction must lie in [0, 1)");
    const std::size_t n = table.rows();
    if (n == 0)
        throw EstimatorError("neighbor table is empty");

    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = table.distances_of(i);
        if (!(d[0] > 0.0))
            throw EstimatorError("non-positive neighbor distance");
        logs[i] = std::log(d[1] / d[0]);
    }

    const auto discard = static_cast<std::size_t>(std::floor(discard_fraction * static_cast<double>(n)));
    if (discard >= n)
        throw EstimatorError("discard fraction leaves no ratios");
    double cutoff = std::numeric_limits<double>::infinity();
    std::size_t at_cutoff_to_keep = 0;
    if (discard > 0) {
        // The kept set is the n - discard smallest ratios; ties at the cutoff are
        // kept in row order so the sum below stays in row order.
        std::vector<double> sorted = logs;
        const auto keep = n - discard;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(keep - 1), sorted.end());
        cutoff = sorted[keep - 1];
        const auto below = static_cast<std::size_t>(
            std::count_if(logs.begin(), logs.end(), [cutoff](double v) { return v < cutoff; }));
        at_cutoff_to_keep = keep - below;
    }

    double sum = 0.0;
    std::size_t kept = 0;
    for (double v : logs) {
        if (v < cutoff || (v == cutoff && at_cutoff_to_keep > 0)) {
            if (v == cutoff)
                --at_cutoff_to_keep;
            sum += v;
            ++kept;
        }
    }
    // Discarded ratios are censored at the cutoff, not dropped: each still
    // contributes log(cutoff) to the Pareto likelihood. Dropping them outright
    // biases the estimate upward by roughly 35% at a 10% discard.
    if (discard > 0)
        sum += static_cast<double>(discard) * cutoff;
    if (!(sum > 0.0))
        throw EstimatorError("every second/first neighbor ratio is 1; TwoNN estimate is infinite");
    return static_cast<double>(kept) / sum;
}

} // namespace intdim
