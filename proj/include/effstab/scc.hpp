#pragma once

// Sufficient-component-cause ("causal pie") mechanisms with switches.
//
// Two representations of the same process:
//   OutcomePies     pies for Y.   background U, switch B (A sufficient for Y),
//                                 switch C (not-A sufficient for Y).
//                                 y0 = U or C,  y1 = U or B.
//   ComplementPies  pies for ~Y.  background W, switch E (not-A sufficient for
//                                 ~Y), switch D (A sufficient for ~Y).
//                                 y0 = not (W or E),  y1 = not (W or D).
//
// Each representation has one risk-increasing switch (B or E) and one
// risk-decreasing switch (C or D). Switches are aggregate events with scalar
// prevalences.

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "effstab/measures.hpp"

namespace effstab {

enum class Representation { OutcomePies, ComplementPies };
enum class SwitchKind { B, C, D, E };
enum class SwitchRole { Increase, Decrease };

[[nodiscard]] std::string_view to_string(Representation r) noexcept;
[[nodiscard]] std::string_view to_string(SwitchKind k) noexcept;
[[nodiscard]] std::string_view to_string(SwitchRole r) noexcept;
[[nodiscard]] Representation parse_representation(std::string_view text);
[[nodiscard]] SwitchKind parse_switch_kind(std::string_view text);
[[nodiscard]] SwitchRole parse_switch_role(std::string_view text);

// Switch prevalence conditional on the background event (U or W) being
// present or absent. The other switch stays independent of everything.
struct Dependence {
  SwitchRole target = SwitchRole::Increase;
  double given_background = 0.0;
  double given_no_background = 0.0;

  friend bool operator==(const Dependence&, const Dependence&) = default;
};

struct MechanismSpec {
  Representation representation = Representation::OutcomePies;
  double background_prev = 0.0;       // Pr(U) or Pr(W)
  double switch_prev_increase = 0.0;  // Pr(B) or Pr(E)
  double switch_prev_decrease = 0.0;  // Pr(C) or Pr(D)
  std::optional<Dependence> dependence;

  friend bool operator==(const MechanismSpec&, const MechanismSpec&) = default;

  [[nodiscard]] double switch_prev(SwitchRole role) const noexcept;
  [[nodiscard]] SwitchKind switch_kind(SwitchRole role) const noexcept;
  // Switch kinds with positive prevalence.
  [[nodiscard]] std::set<SwitchKind> active_switches() const;

  // Range checks; with a dependence block the target's marginal must equal
  // the background-weighted mix of the conditionals within 1e-9.
  // Throws ValidationError.
  void validate() const;
};

// Sets the dependence block and the matching marginal prevalence.
[[nodiscard]] MechanismSpec with_dependence(MechanismSpec mech,
                                            Dependence dependence);

struct Individual {
  bool background = false;
  bool increase_switch = false;
  bool decrease_switch = false;
  bool y0 = false;
  bool y1 = false;

  friend bool operator==(const Individual&, const Individual&) = default;
};

// Potential outcomes implied by the flags under the representation.
[[nodiscard]] Individual structural_outcomes(Representation representation,
                                             bool background,
                                             bool increase_switch,
                                             bool decrease_switch) noexcept;

// Accepts {}, {B}, {D}, {B,D}, {C}, {E}, {C,E}; any mix of {B,D} with {C,E}
// throws IncoherentMechanism naming one clashing pair.
void coherence_check(const std::set<SwitchKind>& kinds);
[[nodiscard]] bool is_coherent(const std::set<SwitchKind>& kinds);

// Exact risks from the joint distribution of background and switch events.
[[nodiscard]] RiskPair analytic_risks(const MechanismSpec& mech);

struct SimulationResult {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t events0 = 0;
  std::size_t events1 = 0;
  std::size_t background_count = 0;
  std::size_t increase_count = 0;
  std::size_t decrease_count = 0;
  std::vector<Individual> individuals;  // filled only on request

  [[nodiscard]] double p0_hat() const;
  [[nodiscard]] double p1_hat() const;
};

// Monte Carlo draw of n individuals. Three uniforms per individual
// (background, increase switch, decrease switch) from the chunked streams in
// rng.hpp; output is bit-identical for equal (mech, n, seed) whatever the
// thread count (0 = hardware concurrency).
[[nodiscard]] SimulationResult simulate(const MechanismSpec& mech,
                                        std::size_t n, std::uint64_t seed,
                                        bool keep_individuals = false,
                                        std::size_t threads = 0);

// Values of all five measures for a pair; nullopt where undefined.
struct MeasureRow {
  std::array<std::optional<double>, 5> values{};

  [[nodiscard]] const std::optional<double>& operator[](MeasureKind k) const {
    return values[static_cast<std::size_t>(k)];
  }
  std::optional<double>& operator[](MeasureKind k) {
    return values[static_cast<std::size_t>(k)];
  }
};

[[nodiscard]] MeasureRow all_measures(const RiskPair& pair);

struct StabilityRow {
  double background_prev = 0.0;
  RiskPair pair;
  MeasureRow measures;
};

struct StabilityReport {
  MechanismSpec mechanism;
  std::vector<StabilityRow> rows;
};

// One row per background prevalence, substituted into the template. With a
// dependence block the conditionals are held fixed and the target's marginal
// is re-derived for each row. Undefined measures are left empty per row.
[[nodiscard]] StabilityReport stability_table(
    const MechanismSpec& mech_template, std::span<const double> background_prevs);

// Characteristic measure of a monotone, independent mechanism and the value
// the mechanism pins it to: B-only -> SR = Pr(~B); D-only -> RR = Pr(~D).
// C-only (SR) and E-only (RR) report the value from analytic_risks, which is
// constant across backgrounds. A switch-free mechanism reports the null of
// its representation's measure.
[[nodiscard]] EffectMeasure stable_measure_value(const MechanismSpec& mech);

struct FalsificationResult {
  bool consistent = true;
  std::string constraint;  // e.g. "p1 >= Pr(B)"
  double required = 0.0;   // the prevalence bound
  double observed = 0.0;   // the left-hand side
};

// Deterministic implications of a switch model:
// B: p1 >= Pr(B); C: p0 >= Pr(C); D: 1 - p1 >= Pr(D); E: 1 - p0 >= Pr(E).
[[nodiscard]] FalsificationResult falsification_check(SwitchKind kind,
                                                      double switch_prev,
                                                      const RiskPair& observed);

struct SensitivityRow {
  double given_background = 0.0;
  double given_no_background = 0.0;
  RiskPair pair;
  std::optional<double> measure_value;
};

struct SensitivityReport {
  MeasureKind kind = MeasureKind::SR;
  double marginal_prev = 0.0;
  double independence_value = 0.0;
  std::vector<SensitivityRow> rows;
};

// Sweeps Pr(switch | background) over `steps` evenly spaced points of
// [lower, upper], holding the marginal switch prevalence fixed by solving for
// Pr(switch | no background). Requires a B-only or D-only mechanism.
// Throws InfeasibleDependence when a sweep point admits no valid joint.
[[nodiscard]] SensitivityReport correlation_sensitivity(const MechanismSpec& mech,
                                                        double lower,
                                                        double upper,
                                                        std::size_t steps);

inline constexpr std::size_t kDefaultBoundsResolution = 2001;

struct EffectBounds {
  MeasureKind kind = MeasureKind::SR;
  double lower = 0.0;
  double upper = 0.0;
  bool feasible = false;
  std::size_t matches = 0;  // grid triples reproducing the observed pair
};

// Partial identification of Pr(~B) under an OutcomePies model with
// independent U, B, C and Pr(C) <= max_opposing_prev. Every axis is the grid
// i / (resolution - 1); a triple is kept when both implied risks are within
// half a grid step of the observed ones. Throws Infeasible when none is.
[[nodiscard]] EffectBounds bounds_nonmonotone(
    const RiskPair& observed, double max_opposing_prev,
    std::size_t resolution = kDefaultBoundsResolution);

}  // namespace effstab
