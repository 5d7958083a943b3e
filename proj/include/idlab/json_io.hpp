#pragma once

#include "idlab/bench.hpp"
#include "idlab/estimators.hpp"
#include "idlab/manifest.hpp"
#include "idlab/profiles.hpp"
#include "idlab/stats.hpp"
#include "idlab/textstats.hpp"
#include "json.hpp"

namespace idlab {

using nlohmann::json;

// Serializers picked up by nlohmann through ADL. Non-finite reals become null.
void to_json(json& j, const EstimatorSpec& v);
void to_json(json& j, const IdEstimate& v);
void to_json(json& j, const IdProfile& v);
void to_json(json& j, const ProfileAggregate& v);
void to_json(json& j, const ConvergenceCurve& v);
void to_json(json& j, const ShallowDescriptors& v);
void to_json(json& j, const DatasetPpl& v);
void to_json(json& j, const AdaptationMetrics& v);
void to_json(json& j, const CorrelationReport& v);
void to_json(json& j, const CorrelationMatrix& v);
void to_json(json& j, const LinkageEntry& v);
void to_json(json& j, const LinkageReport& v);
void to_json(json& j, const BenchCell& v);

}  // namespace idlab
