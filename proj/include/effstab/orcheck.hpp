#pragma once

// Numerical checks of odds-ratio non-collapsibility and of the two-setting
// impossibility result: three-way equality of the odds ratio in settings s,
// t and their w-weighted pool forces either equal counterfactual risks in
// s and t, or no effect in either.

#include <cstdint>
#include <optional>
#include <vector>

#include "effstab/measures.hpp"

namespace effstab {

struct TwoSettingScenario {
  double p0_s = 0.0;
  double p1_s = 0.0;
  double p0_t = 0.0;
  double p1_t = 0.0;
  double w = 0.5;  // share of setting s in the pool

  // All four risks in (0,1) and w in (0,1); throws InvalidArgument.
  void validate() const;

  friend bool operator==(const TwoSettingScenario&,
                         const TwoSettingScenario&) = default;
};

[[nodiscard]] RiskPair pooled_pair(const TwoSettingScenario& scn);

// max(|log OR_s - log OR_t|, |log OR_s - log OR_pooled|).
[[nodiscard]] double or_residual(const TwoSettingScenario& scn);

// The p1 that gives baseline p0 the odds ratio `odds_ratio`.
[[nodiscard]] double p1_for_odds_ratio(double p0, double odds_ratio);

enum class SearchFamily {
  Unrestricted,  // p0_s, p1_s, p0_t, w free; p1_t solved for OR_t = OR_s
  SettingEqual,  // p0_t = p0_s, p1_t = p1_s
  Null,          // p1_s = p0_s, p1_t = p0_t
};

struct SearchResult {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  // Samples whose residual fell below residual_tol.
  std::size_t near_equal = 0;
  double max_residual = 0.0;
  double min_residual = 0.0;
  std::optional<TwoSettingScenario> counterexample;
};

// Searches for a scenario with OR_s = OR_t = OR_pooled (residual below
// residual_tol) whose setting gap max(|p0_s-p0_t|, |p1_s-p1_t|) and effect gap
// max(|p1_s-p0_s|, |p1_t-p0_t|) both exceed degeneracy_tol.
// Deterministic in (trials, seed, family) for any thread count.
[[nodiscard]] SearchResult counterexample_search(
    std::size_t trials, std::uint64_t seed, double residual_tol,
    double degeneracy_tol, SearchFamily family = SearchFamily::Unrestricted,
    std::size_t threads = 0);

struct CollapsibilityWitness {
  StratumRow first;
  StratumRow second;
  double stratum_value = 0.0;
  double pooled_value = 0.0;
};

struct CollapsibilityReport {
  MeasureKind kind = MeasureKind::RD;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool collapsible = true;
  double worst_violation = 0.0;
  std::optional<CollapsibilityWitness> witness;  // at the worst violation
};

inline constexpr double kCollapsibleTol = 1e-9;

// |pooled value - common stratum value| for strata sharing one value of
// `kind`. Throws ValidationError if the strata values differ by > 1e-9.
[[nodiscard]] double collapsibility_violation(MeasureKind kind,
                                              std::span<const StratumRow> strata);

// Random two-stratum mixtures with a shared value of `kind`: the second
// stratum is built by applying the first stratum's value to a fresh baseline.
// Collapsible iff worst violation < kCollapsibleTol.
[[nodiscard]] CollapsibilityReport collapsibility_audit(MeasureKind kind,
                                                        std::size_t trials,
                                                        std::uint64_t seed);

}  // namespace effstab
