#pragma once

#include <json.hpp>

#include "rsoc/cost_functionals.hpp"
#include "rsoc/domain_model.hpp"
#include "rsoc/hjb_discounted.hpp"
#include "rsoc/hjb_ergodic.hpp"
#include "rsoc/recurrence_probe.hpp"
#include "rsoc/verification.hpp"

namespace rsoc {

using json = nlohmann::json;

json to_json(const Vec& v);
json to_json(const EllipticityReport& r);
json to_json(const ReflectionReport& r);
json to_json(const BoundsReport& r);
json to_json(const RepresentationReport& r);
json to_json(const CostEstimate& r);
json to_json(const DppReport& r);
json to_json(const RhoEstimate& r);
json to_json(const ErgodicResidual& r);
json to_json(const NearMonotoneReport& r);
json to_json(const HitReport& r);
json to_json(const RecurrenceReport& r);
json to_json(const MartingaleReport& r);
json to_json(const PathInvariantReport& r);

}  // namespace rsoc
