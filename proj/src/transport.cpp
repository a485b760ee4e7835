#include "effstab/transport.hpp"

#include <cmath>

namespace effstab {

ModifierTable::ModifierTable(std::map<std::string, EffectMeasure> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw ValidationError("modifier table is empty");
  const MeasureKind first = entries_.begin()->second.kind;
  for (const auto& [key, measure] : entries_) {
    if (measure.kind != first) {
      throw ValidationError("modifier table mixes measure kinds (key '" + key +
                            "')");
    }
    validate_measure(measure);
  }
}

MeasureKind ModifierTable::kind() const {
  if (entries_.empty()) throw ValidationError("modifier table is empty");
  return entries_.begin()->second.kind;
}

const EffectMeasure& ModifierTable::at(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw UnknownModifier("no effect value for modifier '" + key + "'");
  }
  return it->second;
}

Risk predict_risk(const PredictionRequest& request) {
  const EffectMeasure* measure = nullptr;
  if (const auto* bare = std::get_if<EffectMeasure>(&request.measure_source)) {
    if (request.modifier_key) {
      throw ValidationError("modifier key '" + *request.modifier_key +
                            "' given without a modifier table");
    }
    measure = bare;
  } else {
    const auto& table = std::get<ModifierTable>(request.measure_source);
    if (request.modifier_key) {
      measure = &table.at(*request.modifier_key);
    } else if (table.entries().size() == 1) {
      measure = &table.entries().begin()->second;
    } else {
      throw UnknownModifier("modifier table has several entries but no key");
    }
  }
  return apply_effect(*measure, request.baseline_risk);
}

std::string_view to_string(RowStatus status) noexcept {
  switch (status) {
    case RowStatus::Ok: return "ok";
    case RowStatus::InvalidPrediction: return "InvalidPrediction";
    case RowStatus::UndefinedMeasure: return "UndefinedMeasure";
  }
  return "?";
}

RowStatus parse_row_status(std::string_view text) {
  if (text == "ok") return RowStatus::Ok;
  if (text == "InvalidPrediction") return RowStatus::InvalidPrediction;
  if (text == "UndefinedMeasure") return RowStatus::UndefinedMeasure;
  throw ValidationError("unknown row status '" + std::string(text) + "'");
}

DivergenceReport divergence_report(const RiskPair& reference,
                                   Risk target_baseline) {
  DivergenceReport report{target_baseline, reference, {}};
  report.rows.reserve(kAllMeasureKinds.size());
  for (const MeasureKind kind : kAllMeasureKinds) {
    DivergenceRow row;
    row.kind = kind;
    try {
      const EffectMeasure measure = compute_measure(kind, reference);
      row.measure_value = measure.value;
      row.predicted = apply_effect(measure, target_baseline).value();
    } catch (const UndefinedMeasure&) {
      row.status = RowStatus::UndefinedMeasure;
    } catch (const InvalidPrediction& e) {
      row.status = RowStatus::InvalidPrediction;
      row.raw_prediction = e.raw_value();
    }
    report.rows.push_back(row);
  }
  return report;
}

double rare_disease_gap(const RiskPair& pair) {
  // (1 - SR) - RD = RD / (1 - p0) - RD = RD * p0 / (1 - p0); the factored
  // form avoids cancellation and is exactly 0 at p0 = 0.
  const double p0 = pair.p0.value();
  if (p0 >= 1.0) {
    throw UndefinedMeasure("rare-disease gap undefined at p0 = 1");
  }
  const double rd = compute_measure(MeasureKind::RD, pair).value;
  return std::abs(rd) * p0 / (1.0 - p0);
}

}  // namespace effstab
