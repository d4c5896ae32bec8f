#pragma once

#include "intdim/estimators.hpp"
#include "intdim/point_set.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace intdim {

struct Summary {
    double mean = 0.0;
    double std_error = 0.0; // sample standard deviation / sqrt(R); 0 when R == 1
};

Summary summarize(std::span<const double> values);

/// R runs of the estimator, replicate r using seed + r for both its subsample
/// and its anchors. With subsample_size == 0 every run sees all of ps.
/// The report's estimate is the replicate mean and std_error the standard error.
EstimateReport replicate_estimate(const PointSet& ps, const EstimatorSpec& spec, std::size_t replicates,
                                  std::uint64_t seed, std::size_t subsample_size = 0);

struct ConvergenceCurve {
    std::vector<std::size_t> sample_sizes;
    std::vector<double> mean_estimates;
    std::vector<double> std_errors;
    std::size_t replicates = 0;
    EstimatorSpec spec;
};

/// Replicated estimates on independent subsamples at each size. Subsamples at
/// different sizes are drawn independently (not nested).
ConvergenceCurve convergence_curve(const PointSet& ps, const EstimatorSpec& spec,
                                   const std::vector<std::size_t>& sample_sizes, std::size_t replicates,
                                   std::uint64_t seed);

/// CSV with header "m,mean,stderr,R".
void write_curve_csv(const ConvergenceCurve& curve, std::ostream& out);

} // namespace intdim
