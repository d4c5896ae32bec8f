#include "intdim/report.hpp"

namespace intdim {

nlohmann::ordered_json spec_to_json(const EstimatorSpec& spec) {
    nlohmann::ordered_json j;
    j["estimator"] = to_string(spec.kind);
    switch (spec.kind) {
    case EstimatorKind::Mle:
        j["k"] = spec.k;
        j["aggregation"] = to_string(spec.aggregation);
        j["normalization"] = to_string(spec.normalization);
        j["anchor_fraction"] = spec.anchor_fraction;
        break;
    case EstimatorKind::TwoNN:
        j["discard_fraction"] = spec.discard_fraction;
        j["anchor_fraction"] = spec.anchor_fraction;
        break;
    case EstimatorKind::GeoMle:
        j["k1"] = spec.geomle.k1;
        j["k2"] = spec.geomle.k2;
        j["bootstraps"] = spec.geomle.bootstraps;
        j["degree"] = spec.geomle.degree;
        break;
    case EstimatorKind::Geodesic:
        j["k"] = spec.k;
        j["bins"] = spec.bins;
        j["sample_cap"] = spec.sample_cap;
        break;
    }
    j["deduplicate"] = spec.deduplicate;
    j["seed"] = spec.seed;
    return j;
}

nlohmann::ordered_json report_to_json(const EstimateReport& r) {
    nlohmann::ordered_json j;
    j["estimator"] = r.estimator;
    j["params"] = spec_to_json(r.spec);
    j["estimate"] = r.estimate;
    j["per_replicate"] = r.per_replicate;
    j["stderr"] = r.std_error;
    j["n_used"] = r.n_used;
    j["N"] = r.ambient_dim;
    j["dedup_removed"] = r.dedup_removed;
    j["anchors"] = r.anchors;
    j["anchor_fraction"] = r.spec.anchor_fraction;
    j["infinite_locals"] = r.infinite_locals;
    j["seed"] = r.seed;
    j["runtime_ms"] = r.runtime_ms;
    return j;
}

nlohmann::ordered_json curve_to_json(const ConvergenceCurve& c) {
    nlohmann::ordered_json j;
    j["params"] = spec_to_json(c.spec);
    j["replicates"] = c.replicates;
    j["sample_sizes"] = c.sample_sizes;
    j["mean_estimates"] = c.mean_estimates;
    j["stderrs"] = c.std_errors;
    return j;
}

} // namespace intdim
