#include "effstab/serialize.hpp"

namespace effstab {

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> read_optional_number(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

void to_json(Json& j, const RiskPair& pair) {
  j = Json{{"p0", pair.p0.value()}, {"p1", pair.p1.value()}};
}

void from_json(const Json& j, RiskPair& pair) {
  pair = RiskPair(j.at("p0").get<double>(), j.at("p1").get<double>());
}

void to_json(Json& j, const EffectMeasure& m) {
  j = Json{{"kind", to_string(m.kind)}, {"value", m.value}};
}

void from_json(const Json& j, EffectMeasure& m) {
  m.kind = parse_measure_kind(j.at("kind").get<std::string>());
  m.value = j.at("value").get<double>();
}

void to_json(Json& j, const MechanismSpec& mech) {
  j = Json{{"representation", to_string(mech.representation)},
           {"background_prev", mech.background_prev},
           {"switch_prev_increase", mech.switch_prev_increase},
           {"switch_prev_decrease", mech.switch_prev_decrease}};
  if (mech.dependence) {
    j["dependence"] = Json{
        {"target", to_string(mech.dependence->target)},
        {"given_background", mech.dependence->given_background},
        {"given_no_background", mech.dependence->given_no_background}};
  } else {
    j["dependence"] = nullptr;
  }
}

void from_json(const Json& j, MechanismSpec& mech) {
  mech.representation =
      parse_representation(j.at("representation").get<std::string>());
  mech.background_prev = j.at("background_prev").get<double>();
  mech.switch_prev_increase = j.at("switch_prev_increase").get<double>();
  mech.switch_prev_decrease = j.at("switch_prev_decrease").get<double>();
  mech.dependence.reset();
  if (const auto it = j.find("dependence"); it != j.end() && !it->is_null()) {
    mech.dependence = Dependence{
        parse_switch_role(it->at("target").get<std::string>()),
        it->at("given_background").get<double>(),
        it->at("given_no_background").get<double>()};
  }
}

void to_json(Json& j, const MeasureRow& row) {
  j = Json::object();
  for (const MeasureKind kind : kAllMeasureKinds) {
    j[std::string(to_string(kind))] = optional_number(row[kind]);
  }
}

void from_json(const Json& j, MeasureRow& row) {
  for (const MeasureKind kind : kAllMeasureKinds) {
    row[kind] = read_optional_number(j, std::string(to_string(kind)).c_str());
  }
}

void to_json(Json& j, const StabilityReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    rows.push_back(Json{{"background_prev", row.background_prev},
                        {"p0", row.pair.p0.value()},
                        {"p1", row.pair.p1.value()},
                        {"measures", row.measures}});
  }
  j = Json{{"mechanism", report.mechanism}, {"rows", std::move(rows)}};
}

void from_json(const Json& j, StabilityReport& report) {
  report.mechanism = j.at("mechanism").get<MechanismSpec>();
  report.rows.clear();
  for (const auto& r : j.at("rows")) {
    report.rows.push_back({r.at("background_prev").get<double>(),
                           RiskPair(r.at("p0").get<double>(),
                                    r.at("p1").get<double>()),
                           r.at("measures").get<MeasureRow>()});
  }
}

void to_json(Json& j, const DivergenceReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    rows.push_back(Json{{"kind", to_string(row.kind)},
                        {"status", to_string(row.status)},
                        {"measure_value", optional_number(row.measure_value)},
                        {"predicted", optional_number(row.predicted)},
                        {"raw_prediction", optional_number(row.raw_prediction)}});
  }
  j = Json{{"baseline_risk", report.baseline_risk.value()},
           {"reference", report.reference},
           {"rows", std::move(rows)}};
}

void from_json(const Json& j, DivergenceReport& report) {
  report.baseline_risk = Risk(j.at("baseline_risk").get<double>());
  report.reference = j.at("reference").get<RiskPair>();
  report.rows.clear();
  for (const auto& r : j.at("rows")) {
    DivergenceRow row;
    row.kind = parse_measure_kind(r.at("kind").get<std::string>());
    row.status = parse_row_status(r.at("status").get<std::string>());
    row.measure_value = read_optional_number(r, "measure_value");
    row.predicted = read_optional_number(r, "predicted");
    row.raw_prediction = read_optional_number(r, "raw_prediction");
    report.rows.push_back(row);
  }
}

void to_json(Json& j, const SimulationResult& result) {
  j = Json{{"n", result.n},
           {"seed", result.seed},
           {"events0", result.events0},
           {"events1", result.events1},
           {"background_count", result.background_count},
           {"increase_count", result.increase_count},
           {"decrease_count", result.decrease_count},
           {"p0_hat", result.p0_hat()},
           {"p1_hat", result.p1_hat()}};
  if (!result.individuals.empty()) {
    Json people = Json::array();
    for (const auto& ind : result.individuals) {
      people.push_back(Json::array({int{ind.background}, int{ind.increase_switch},
                                    int{ind.decrease_switch}, int{ind.y0},
                                    int{ind.y1}}));
    }
    j["individuals_columns"] =
        Json::array({"background", "increase_switch", "decrease_switch", "y0",
                     "y1"});
    j["individuals"] = std::move(people);
  }
}

void from_json(const Json& j, SimulationResult& result) {
  result.n = j.at("n").get<std::size_t>();
  result.seed = j.at("seed").get<std::uint64_t>();
  result.events0 = j.at("events0").get<std::size_t>();
  result.events1 = j.at("events1").get<std::size_t>();
  result.background_count = j.at("background_count").get<std::size_t>();
  result.increase_count = j.at("increase_count").get<std::size_t>();
  result.decrease_count = j.at("decrease_count").get<std::size_t>();
  result.individuals.clear();
  if (const auto it = j.find("individuals"); it != j.end()) {
    for (const auto& row : *it) {
      result.individuals.push_back(
          Individual{row.at(0).get<int>() != 0, row.at(1).get<int>() != 0,
                     row.at(2).get<int>() != 0, row.at(3).get<int>() != 0,
                     row.at(4).get<int>() != 0});
    }
  }
}

void to_json(Json& j, const EffectBounds& bounds) {
  j = Json{{"kind", to_string(bounds.kind)},
           {"lower", bounds.lower},
           {"upper", bounds.upper},
           {"feasible", bounds.feasible},
           {"matches", bounds.matches}};
}

void from_json(const Json& j, EffectBounds& bounds) {
  bounds.kind = parse_measure_kind(j.at("kind").get<std::string>());
  bounds.lower = j.at("lower").get<double>();
  bounds.upper = j.at("upper").get<double>();
  bounds.feasible = j.at("feasible").get<bool>();
  bounds.matches = j.at("matches").get<std::size_t>();
}

void to_json(Json& j, const SensitivityReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    rows.push_back(Json{{"given_background", row.given_background},
                        {"given_no_background", row.given_no_background},
                        {"p0", row.pair.p0.value()},
                        {"p1", row.pair.p1.value()},
                        {"measure_value", optional_number(row.measure_value)}});
  }
  j = Json{{"kind", to_string(report.kind)},
           {"marginal_prev", report.marginal_prev},
           {"independence_value", report.independence_value},
           {"rows", std::move(rows)}};
}

void from_json(const Json& j, SensitivityReport& report) {
  report.kind = parse_measure_kind(j.at("kind").get<std::string>());
  report.marginal_prev = j.at("marginal_prev").get<double>();
  report.independence_value = j.at("independence_value").get<double>();
  report.rows.clear();
  for (const auto& r : j.at("rows")) {
    report.rows.push_back({r.at("given_background").get<double>(),
                           r.at("given_no_background").get<double>(),
                           RiskPair(r.at("p0").get<double>(),
                                    r.at("p1").get<double>()),
                           read_optional_number(r, "measure_value")});
  }
}

void to_json(Json& j, const TwoSettingScenario& scn) {
  j = Json{{"p0_s", scn.p0_s}, {"p1_s", scn.p1_s}, {"p0_t", scn.p0_t},
           {"p1_t", scn.p1_t}, {"w", scn.w}};
}

void from_json(const Json& j, TwoSettingScenario& scn) {
  scn.p0_s = j.at("p0_s").get<double>();
  scn.p1_s = j.at("p1_s").get<double>();
  scn.p0_t = j.at("p0_t").get<double>();
  scn.p1_t = j.at("p1_t").get<double>();
  scn.w = j.at("w").get<double>();
}

void to_json(Json& j, const SearchResult& result) {
  j = Json{{"trials", result.trials},
           {"seed", result.seed},
           {"near_equal", result.near_equal},
           {"max_residual", result.max_residual},
           {"min_residual", result.min_residual}};
  j["counterexample"] =
      result.counterexample ? Json(*result.counterexample) : Json(nullptr);
}

void from_json(const Json& j, SearchResult& result) {
  result.trials = j.at("trials").get<std::size_t>();
  result.seed = j.at("seed").get<std::uint64_t>();
  result.near_equal = j.at("near_equal").get<std::size_t>();
  result.max_residual = j.at("max_residual").get<double>();
  result.min_residual = j.at("min_residual").get<double>();
  result.counterexample.reset();
  if (const auto& c = j.at("counterexample"); !c.is_null()) {
    result.counterexample = c.get<TwoSettingScenario>();
  }
}

namespace {

Json stratum_json(const StratumRow& row) {
  return Json{{"label", row.label},
              {"weight", row.weight},
              {"p0", row.pair.p0.value()},
              {"p1", row.pair.p1.value()}};
}

StratumRow stratum_from_json(const Json& j) {
  return {j.at("weight").get<double>(),
          RiskPair(j.at("p0").get<double>(), j.at("p1").get<double>()),
          j.at("label").get<std::string>()};
}

}  // namespace

void to_json(Json& j, const CollapsibilityReport& report) {
  j = Json{{"kind", to_string(report.kind)},
           {"trials", report.trials},
           {"seed", report.seed},
           {"collapsible", report.collapsible},
           {"worst_violation", report.worst_violation}};
  if (report.witness) {
    j["witness"] = Json{{"strata", Json::array({stratum_json(report.witness->first),
                                                stratum_json(report.witness->second)})},
                        {"stratum_value", report.witness->stratum_value},
                        {"pooled_value", report.witness->pooled_value}};
  } else {
    j["witness"] = nullptr;
  }
}

void from_json(const Json& j, CollapsibilityReport& report) {
  report.kind = parse_measure_kind(j.at("kind").get<std::string>());
  report.trials = j.at("trials").get<std::size_t>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.collapsible = j.at("collapsible").get<bool>();
  report.worst_violation = j.at("worst_violation").get<double>();
  report.witness.reset();
  if (const auto& w = j.at("witness"); !w.is_null()) {
    report.witness = CollapsibilityWitness{
        stratum_from_json(w.at("strata").at(0)),
        stratum_from_json(w.at("strata").at(1)),
        w.at("stratum_value").get<double>(), w.at("pooled_value").get<double>()};
  }
}

void to_json(Json& j, const ClosureResult& result) {
  j = Json{{"closed", result.closed}};
  if (result.first_violation) {
    j["first_violation"] = Json{{"p", result.first_violation->p},
                                {"raw", result.first_violation->raw}};
  } else {
    j["first_violation"] = nullptr;
  }
}

void from_json(const Json& j, ClosureResult& result) {
  result.closed = j.at("closed").get<bool>();
  result.first_violation.reset();
  if (const auto& v = j.at("first_violation"); !v.is_null()) {
    result.first_violation =
        ClosureViolation{v.at("p").get<double>(), v.at("raw").get<double>()};
  }
}

namespace io {

void to_json(Json& j, const TrialRow& row) {
  j = Json{{"setting", row.setting},
           {"stratum", row.stratum},
           {"p0", row.pair.p0.value()},
           {"p1", row.pair.p1.value()},
           {"weight", optional_number(row.weight)}};
  if (row.counts) {
    j["counts"] = Json{{"n0", row.counts->n0},
                       {"events0", row.counts->events0},
                       {"n1", row.counts->n1},
                       {"events1", row.counts->events1}};
  } else {
    j["counts"] = nullptr;
  }
}

void from_json(const Json& j, TrialRow& row) {
  row.setting = j.at("setting").get<std::string>();
  row.stratum = j.at("stratum").get<std::string>();
  row.pair = RiskPair(j.at("p0").get<double>(), j.at("p1").get<double>());
  row.weight = read_optional_number(j, "weight");
  row.counts.reset();
  if (const auto& c = j.at("counts"); !c.is_null()) {
    row.counts = ArmCounts{c.at("n0").get<std::uint64_t>(),
                           c.at("events0").get<std::uint64_t>(),
                           c.at("n1").get<std::uint64_t>(),
                           c.at("events1").get<std::uint64_t>()};
  }
}

}  // namespace io

}  // namespace effstab
