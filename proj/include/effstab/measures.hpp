#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "effstab/errors.hpp"

namespace effstab {

// Absolute tolerance for comparing O(1) probabilities.
inline constexpr double kRiskTol = 1e-12;
// Tolerance on the sum of stratum weights.
inline constexpr double kWeightTol = 1e-9;
inline constexpr std::size_t kDefaultGridSize = 1001;

// A probability P(Y=1) under one treatment arm. Construction rejects values
// outside [0,1] (and NaN).
class Risk {
 public:
  constexpr Risk() = default;
  explicit Risk(double value);

  [[nodiscard]] constexpr double value() const noexcept { return value_; }
  [[nodiscard]] Risk complement() const { return Risk(1.0 - value_); }

  friend constexpr bool operator==(Risk, Risk) = default;

 private:
  double value_ = 0.0;
};

// Counterfactual risks under control (p0) and intervention (p1).
struct RiskPair {
  Risk p0;
  Risk p1;

  RiskPair() = default;
  RiskPair(Risk control, Risk treated) : p0(control), p1(treated) {}
  RiskPair(double control, double treated) : p0(control), p1(treated) {}

  friend bool operator==(const RiskPair&, const RiskPair&) = default;
};

enum class MeasureKind { RD, RR, OR, SR, Switch };

inline constexpr std::array<MeasureKind, 5> kAllMeasureKinds = {
    MeasureKind::RD, MeasureKind::RR, MeasureKind::OR, MeasureKind::SR,
    MeasureKind::Switch};

// Lower-case short names: "rd", "rr", "or", "sr", "switch".
[[nodiscard]] std::string_view to_string(MeasureKind kind) noexcept;
// Accepts the short names case-insensitively plus "theta" for Switch.
[[nodiscard]] MeasureKind parse_measure_kind(std::string_view text);

struct EffectMeasure {
  MeasureKind kind = MeasureKind::RD;
  double value = 0.0;

  friend bool operator==(const EffectMeasure&, const EffectMeasure&) = default;
};

// Value the measure takes when p1 == p0.
[[nodiscard]] double null_value(MeasureKind kind) noexcept;

// Throws InvalidArgument unless `value` is finite and inside the kind's
// range: RD and Switch in [-1,1], RR/OR/SR in [0,inf).
void validate_measure(const EffectMeasure& measure);

struct StratumRow {
  double weight = 0.0;
  RiskPair pair;
  std::string label;
};

// ---------------------------------------------------------------------------
// Algebra

// Measure of `kind` contrasting pair.p1 with pair.p0. Throws UndefinedMeasure
// when the denominator the kind needs is zero; never returns inf or NaN.
//
// Switch is the signed variant of the relative risk: one minus the survival
// ratio when risk rises, the risk ratio minus one when it falls, and exactly
// zero when |p1 - p0| <= kRiskTol.
[[nodiscard]] EffectMeasure compute_measure(MeasureKind kind,
                                            const RiskPair& pair);

// Unclamped effect function g(p). May fall outside [0,1] for RD, RR and SR.
[[nodiscard]] double effect_function_raw(const EffectMeasure& measure,
                                         double p);

// g(p) as a Risk. Raw values within kRiskTol of [0,1] are clamped; anything
// further out throws InvalidPrediction carrying the raw value.
[[nodiscard]] Risk apply_effect(const EffectMeasure& measure, Risk p);

// Re-expresses `from` on the `to_kind` scale at baseline p0.
[[nodiscard]] EffectMeasure convert_measure(const EffectMeasure& from, Risk p0,
                                            MeasureKind to_kind);

// Counts the complement of the outcome: (1 - p0, 1 - p1).
[[nodiscard]] RiskPair recode_outcome(const RiskPair& pair);

// Weighted marginal risks. Throws WeightError on an empty set, negative or
// non-finite weights, or weights not summing to 1 within kWeightTol.
[[nodiscard]] RiskPair pool_strata(std::span<const StratumRow> strata);

struct ClosureViolation {
  double p = 0.0;
  double raw = 0.0;
};

struct ClosureResult {
  bool closed = true;
  std::optional<ClosureViolation> first_violation;
};

// Scans g on a uniform grid of `grid_size` points spanning [0,1]
// (endpoints included).
[[nodiscard]] ClosureResult closure_check(MeasureKind kind, double value,
                                          std::size_t grid_size = kDefaultGridSize);

// True iff |g_a(p) - g_b(p)| <= tol at every grid point where both effect
// functions give a valid risk. False when no grid point is valid for both.
[[nodiscard]] bool prediction_equivalent(const EffectMeasure& a,
                                         const EffectMeasure& b,
                                         std::size_t grid_size = kDefaultGridSize,
                                         double tol = kRiskTol);

// Uniform grid helper shared by the scans above: i / (n - 1), i in [0, n).
[[nodiscard]] double grid_point(std::size_t index, std::size_t grid_size);

}  // namespace effstab
