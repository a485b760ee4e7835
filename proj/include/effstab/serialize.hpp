#pragma once

// JSON forms of the library's value types. Undefined numbers are written as
// null; every finite number is written at full double precision, so a
// report re-parses into the values that produced it.

#include "json.hpp"

#include "effstab/io.hpp"
#include "effstab/measures.hpp"
#include "effstab/orcheck.hpp"
#include "effstab/scc.hpp"
#include "effstab/transport.hpp"

namespace effstab {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const RiskPair& pair);
void from_json(const Json& j, RiskPair& pair);
void to_json(Json& j, const EffectMeasure& m);
void from_json(const Json& j, EffectMeasure& m);
void to_json(Json& j, const MechanismSpec& mech);
void from_json(const Json& j, MechanismSpec& mech);
void to_json(Json& j, const MeasureRow& row);
void from_json(const Json& j, MeasureRow& row);
void to_json(Json& j, const StabilityReport& report);
void from_json(const Json& j, StabilityReport& report);
void to_json(Json& j, const DivergenceReport& report);
void from_json(const Json& j, DivergenceReport& report);
void to_json(Json& j, const SimulationResult& result);
void from_json(const Json& j, SimulationResult& result);
void to_json(Json& j, const EffectBounds& bounds);
void from_json(const Json& j, EffectBounds& bounds);
void to_json(Json& j, const SensitivityReport& report);
void from_json(const Json& j, SensitivityReport& report);
void to_json(Json& j, const TwoSettingScenario& scn);
void from_json(const Json& j, TwoSettingScenario& scn);
void to_json(Json& j, const SearchResult& result);
void from_json(const Json& j, SearchResult& result);
void to_json(Json& j, const CollapsibilityReport& report);
void from_json(const Json& j, CollapsibilityReport& report);
void to_json(Json& j, const ClosureResult& result);
void from_json(const Json& j, ClosureResult& result);

namespace io {
void to_json(Json& j, const TrialRow& row);
void from_json(const Json& j, TrialRow& row);
}  // namespace io

// Optional numbers as value-or-null.
[[nodiscard]] Json optional_number(const std::optional<double>& v);
[[nodiscard]] std::optional<double> read_optional_number(const Json& j,
                                                         const char* key);

}  // namespace effstab
