#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "effstab/measures.hpp"

namespace effstab {

// Per-stratum effect values keyed by an opaque effect-modifier label.
// All entries share one kind.
class ModifierTable {
 public:
  ModifierTable() = default;
  explicit ModifierTable(std::map<std::string, EffectMeasure> entries);

  [[nodiscard]] const std::map<std::string, EffectMeasure>& entries() const {
    return entries_;
  }
  [[nodiscard]] MeasureKind kind() const;
  // Throws UnknownModifier when `key` is absent.
  [[nodiscard]] const EffectMeasure& at(const std::string& key) const;

 private:
  std::map<std::string, EffectMeasure> entries_;
};

using MeasureSource = std::variant<EffectMeasure, ModifierTable>;

struct PredictionRequest {
  Risk baseline_risk;
  std::optional<std::string> modifier_key;
  MeasureSource measure_source;
};

// Risk under intervention predicted from the baseline risk and the resolved
// effect value: g_lambda(p0), or g_lambda_m(p0) when a modifier key selects a
// table entry. A table without a key resolves only if it has one entry.
[[nodiscard]] Risk predict_risk(const PredictionRequest& request);

enum class RowStatus { Ok, InvalidPrediction, UndefinedMeasure };

[[nodiscard]] std::string_view to_string(RowStatus status) noexcept;
[[nodiscard]] RowStatus parse_row_status(std::string_view text);

struct DivergenceRow {
  MeasureKind kind = MeasureKind::RD;
  RowStatus status = RowStatus::Ok;
  std::optional<double> measure_value;
  std::optional<double> predicted;
  // Out-of-range g(p) when status is InvalidPrediction.
  std::optional<double> raw_prediction;

  [[nodiscard]] bool valid() const { return status == RowStatus::Ok; }
};

struct DivergenceReport {
  Risk baseline_risk;
  RiskPair reference;
  std::vector<DivergenceRow> rows;  // one per MeasureKind, in kAllMeasureKinds order
};

// Transports the effect observed in `reference` to `target_baseline` on every
// scale. Failing scales are flagged per row; the report is always returned.
[[nodiscard]] DivergenceReport divergence_report(const RiskPair& reference,
                                                 Risk target_baseline);

// |(1 - SR) - RD|: how far one minus the survival ratio is from the risk
// difference. Equals |RD| * p0 / (1 - p0). Throws UndefinedMeasure if p0 = 1.
[[nodiscard]] double rare_disease_gap(const RiskPair& pair);

}  // namespace effstab
