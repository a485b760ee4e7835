#include "effstab/orcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "effstab/rng.hpp"

namespace effstab {

namespace {

bool interior(double p) { return p > 0.0 && p < 1.0; }

double log_odds_ratio(double p0, double p1) {
  return std::log(p1) - std::log1p(-p1) - (std::log(p0) - std::log1p(-p0));
}

// Mixing the complements directly keeps 1 - p exact when p is close to 1,
// which a subtraction from the pooled risk would not.
double pooled_log_odds(double w, double p_s, double p_t) {
  const double p = w * p_s + (1.0 - w) * p_t;
  const double q = w * (1.0 - p_s) + (1.0 - w) * (1.0 - p_t);
  return std::log(p) - std::log(q);
}

}  // namespace

void TwoSettingScenario::validate() const {
  if (!interior(p0_s) || !interior(p1_s) || !interior(p0_t) ||
      !interior(p1_t)) {
    throw InvalidArgument("two-setting scenario risks must lie in (0,1)");
  }
  if (!interior(w)) throw InvalidArgument("pooling weight w must lie in (0,1)");
}

RiskPair pooled_pair(const TwoSettingScenario& scn) {
  scn.validate();
  return {scn.w * scn.p0_s + (1.0 - scn.w) * scn.p0_t,
          scn.w * scn.p1_s + (1.0 - scn.w) * scn.p1_t};
}

double or_residual(const TwoSettingScenario& scn) {
  scn.validate();
  const double s = log_odds_ratio(scn.p0_s, scn.p1_s);
  const double t = log_odds_ratio(scn.p0_t, scn.p1_t);
  const double pool = pooled_log_odds(scn.w, scn.p1_s, scn.p1_t) -
                      pooled_log_odds(scn.w, scn.p0_s, scn.p0_t);
  return std::max(std::abs(s - t), std::abs(s - pool));
}

double p1_for_odds_ratio(double p0, double odds_ratio) {
  return apply_effect({MeasureKind::OR, odds_ratio}, Risk(p0)).value();
}

SearchResult counterexample_search(std::size_t trials, std::uint64_t seed,
                                   double residual_tol, double degeneracy_tol,
                                   SearchFamily family, std::size_t threads) {
  if (!(residual_tol > 0.0) || !(degeneracy_tol > 0.0)) {
    throw InvalidArgument("search tolerances must be positive");
  }
  struct Partial {
    std::size_t near_equal = 0;
    double max_residual = 0.0;
    double min_residual = std::numeric_limits<double>::infinity();
    std::optional<TwoSettingScenario> counterexample;
  };
  const auto parts = rng::run_chunked<Partial>(
      trials, seed, threads,
      [&](std::size_t, std::size_t begin, std::size_t end,
          rng::Stream& stream) {
        Partial part;
        for (std::size_t i = begin; i < end; ++i) {
          TwoSettingScenario scn;
          scn.p0_s = stream.uniform_open();
          scn.p1_s = stream.uniform_open();
          scn.p0_t = stream.uniform_open();
          scn.w = stream.uniform_open();
          switch (family) {
            case SearchFamily::Unrestricted: {
              const double g = (scn.p1_s * (1.0 - scn.p0_s)) /
                               (scn.p0_s * (1.0 - scn.p1_s));
              scn.p1_t = p1_for_odds_ratio(scn.p0_t, g);
              break;
            }
            case SearchFamily::SettingEqual:
              scn.p0_t = scn.p0_s;
              scn.p1_t = scn.p1_s;
              break;
            case SearchFamily::Null:
              scn.p1_s = scn.p0_s;
              scn.p1_t = scn.p0_t;
              break;
          }
          // Extreme odds ratios can round p1_t onto the boundary.
          if (!interior(scn.p1_t)) continue;
          const double r = or_residual(scn);
          part.max_residual = std::max(part.max_residual, r);
          part.min_residual = std::min(part.min_residual, r);
          if (r >= residual_tol) continue;
          ++part.near_equal;
          const double setting_gap = std::max(std::abs(scn.p0_s - scn.p0_t),
                                              std::abs(scn.p1_s - scn.p1_t));
          const double effect_gap = std::max(std::abs(scn.p1_s - scn.p0_s),
                                             std::abs(scn.p1_t - scn.p0_t));
          if (setting_gap > degeneracy_tol && effect_gap > degeneracy_tol &&
              !part.counterexample) {
            part.counterexample = scn;
          }
        }
        return part;
      });

  SearchResult result;
  result.trials = trials;
  result.seed = seed;
  result.min_residual = std::numeric_limits<double>::infinity();
  for (const auto& part : parts) {
    result.near_equal += part.near_equal;
    result.max_residual = std::max(result.max_residual, part.max_residual);
    result.min_residual = std::min(result.min_residual, part.min_residual);
    if (!result.counterexample && part.counterexample) {
      result.counterexample = part.counterexample;
    }
  }
  if (!std::isfinite(result.min_residual)) result.min_residual = 0.0;
  return result;
}

double collapsibility_violation(MeasureKind kind,
                                std::span<const StratumRow> strata) {
  if (strata.empty()) throw WeightError("no strata to pool");
  const double common = compute_measure(kind, strata.front().pair).value;
  for (const auto& row : strata) {
    const double v = compute_measure(kind, row.pair).value;
    if (std::abs(v - common) > 1e-9 * std::max(1.0, std::abs(common))) {
      throw ValidationError("strata do not share a common " +
                            std::string(to_string(kind)) + " value");
    }
  }
  const double pooled = compute_measure(kind, pool_strata(strata)).value;
  return std::abs(pooled - common);
}

CollapsibilityReport collapsibility_audit(MeasureKind kind, std::size_t trials,
                                          std::uint64_t seed) {
  if (trials == 0) throw InvalidArgument("audit needs at least one trial");
  struct Partial {
    double worst = -1.0;
    std::optional<CollapsibilityWitness> witness;
  };
  const auto parts = rng::run_chunked<Partial>(
      trials, seed, 1,
      [&](std::size_t, std::size_t begin, std::size_t end,
          rng::Stream& stream) {
        Partial part;
        for (std::size_t i = begin; i < end; ++i) {
          // Redraw until the shared value maps the second baseline into [0,1];
          // the loop is deterministic given the stream.
          for (;;) {
            const RiskPair first(stream.uniform_open(), stream.uniform_open());
            const double p0_b = stream.uniform_open();
            const double w = stream.uniform_open();
            const EffectMeasure shared = compute_measure(kind, first);
            const double raw = effect_function_raw(shared, p0_b);
            if (!(raw > 0.0 && raw < 1.0)) continue;
            const RiskPair second(p0_b, raw);
            const std::array<StratumRow, 2> strata = {
                StratumRow{w, first, "a"}, StratumRow{1.0 - w, second, "b"}};
            const double pooled =
                compute_measure(kind, pool_strata(strata)).value;
            const double violation = std::abs(pooled - shared.value);
            if (violation > part.worst) {
              part.worst = violation;
              part.witness =
                  CollapsibilityWitness{strata[0], strata[1], shared.value,
                                        pooled};
            }
            break;
          }
        }
        return part;
      });

  CollapsibilityReport report;
  report.kind = kind;
  report.trials = trials;
  report.seed = seed;
  double worst = -1.0;
  for (const auto& part : parts) {
    if (part.worst > worst) {
      worst = part.worst;
      report.witness = part.witness;
    }
  }
  report.worst_violation = std::max(worst, 0.0);
  report.collapsible = report.worst_violation < kCollapsibleTol;
  return report;
}

}  // namespace effstab
