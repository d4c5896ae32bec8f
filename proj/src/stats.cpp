#include "intdim/stats.hpp"

#include "intdim/dataset.hpp"
#include "intdim/error.hpp"
#include "intdim/rng.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace intdim {

Summary summarize(std::span<const double> values) {
    if (values.empty())
        throw EstimatorError("cannot summarize zero replicates");
    Summary s;
    for (double v : values)
        s.mean += v;
    const auto r = static_cast<double>(values.size());
    s.mean /= r;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - s.mean) * (v - s.mean);
        s.std_error = std::sqrt(ss / (r - 1.0)) / std::sqrt(r);
    }
    return s;
}

EstimateReport replicate_estimate(const PointSet& ps, const EstimatorSpec& spec, std::size_t replicates,
                                  std::uint64_t seed, std::size_t subsample_size) {
    if (replicates == 0)
        throw EstimatorError("need at least one replicate");
    if (subsample_size > ps.size())
        throw EstimatorError("subsample size " + std::to_string(subsample_size) + " exceeds " +
                             std::to_string(ps.size()) + " points");
    const auto t0 = std::chrono::steady_clock::now();

    // Replicates run one after another; each estimator call is itself parallel
    // and the aggregate is taken in replicate order.
    std::vector<EstimateReport> runs;
    runs.reserve(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
        auto s = spec;
        s.seed = seed + r;
        if (subsample_size > 0 && subsample_size < ps.size())
            runs.push_back(estimate(subsample(ps, subsample_size, s.seed), s));
        else
            runs.push_back(estimate(ps, s));
    }

    EstimateReport out = runs.front();
    out.spec.seed = seed;
    out.seed = seed;
    out.per_replicate.clear();
    out.dedup_removed = 0;
    out.infinite_locals = 0;
    for (const auto& run : runs) {
        out.per_replicate.push_back(run.estimate);
        out.dedup_removed += run.dedup_removed;
        out.infinite_locals += run.infinite_locals;
    }
    const auto sum = summarize(out.per_replicate);
    out.estimate = sum.mean;
    out.std_error = sum.std_error;
    out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

ConvergenceCurve convergence_curve(const PointSet& ps, const EstimatorSpec& spec,
                                   const std::vector<std::size_t>& sample_sizes, std::size_t replicates,
                                   std::uint64_t seed) {
    ConvergenceCurve curve;
    curve.replicates = replicates;
    curve.spec = spec;
    for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
        const auto m = sample_sizes[i];
        if (m > ps.size())
            throw EstimatorError("sample size " + std::to_string(m) + " exceeds " + std::to_string(ps.size()) +
                                 " points");
        if (m < spec.k + 1)
            throw EstimatorError("sample size " + std::to_string(m) + " is below k + 1 = " +
                                 std::to_string(spec.k + 1));
        if (i > 0 && m <= sample_sizes[i - 1])
            throw EstimatorError("sample sizes must be increasing");
        const auto rep = replicate_estimate(ps, spec, replicates, derive_seed(seed, i), m);
        curve.sample_sizes.push_back(m);
        curve.mean_estimates.push_back(rep.estimate);
        curve.std_errors.push_back(rep.std_error);
    }
    return curve;
}

void write_curve_csv(const ConvergenceCurve& curve, std::ostream& out) {
    out << "m,mean,stderr,R\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < curve.sample_sizes.size(); ++i)
        out << curve.sample_sizes[i] << ',' << curve.mean_estimates[i] << ',' << curve.std_errors[i] << ','
            << curve.replicates << '\n';
}

} // namespace intdim
