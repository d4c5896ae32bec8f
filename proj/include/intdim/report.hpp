#pragma once

#include "intdim/estimators.hpp"
#include "intdim/stats.hpp"

#include <json.hpp>

#include <string_view>

namespace intdim {

inline constexpr std::string_view kToolName = "intdim";
inline constexpr std::string_view kToolVersion = INTDIM_VERSION;

/// Estimator parameters that apply to spec.kind only.
nlohmann::ordered_json spec_to_json(const EstimatorSpec& spec);

/// Stable report fields; see docs/report-schema.md.
nlohmann::ordered_json report_to_json(const EstimateReport& report);

nlohmann::ordered_json curve_to_json(const ConvergenceCurve& curve);

} // namespace intdim
