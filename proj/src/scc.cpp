#include "effstab/scc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "effstab/rng.hpp"

namespace effstab {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

bool in_bd(SwitchKind k) { return k == SwitchKind::B || k == SwitchKind::D; }

// Probability of the target switch given the background flag.
double conditional_prev(const MechanismSpec& mech, SwitchRole role,
                        bool background) {
  if (mech.dependence && mech.dependence->target == role) {
    return background ? mech.dependence->given_background
                      : mech.dependence->given_no_background;
  }
  return mech.switch_prev(role);
}

}  // namespace

std::string_view to_string(Representation r) noexcept {
  return r == Representation::OutcomePies ? "outcome_pies" : "complement_pies";
}

std::string_view to_string(SwitchKind k) noexcept {
  switch (k) {
    case SwitchKind::B: return "B";
    case SwitchKind::C: return "C";
    case SwitchKind::D: return "D";
    case SwitchKind::E: return "E";
  }
  return "?";
}

std::string_view to_string(SwitchRole r) noexcept {
  return r == SwitchRole::Increase ? "increase" : "decrease";
}

Representation parse_representation(std::string_view text) {
  if (text == "outcome_pies") return Representation::OutcomePies;
  if (text == "complement_pies") return Representation::ComplementPies;
  throw ValidationError("unknown representation '" + std::string(text) + "'");
}

SwitchKind parse_switch_kind(std::string_view text) {
  if (text == "B" || text == "b") return SwitchKind::B;
  if (text == "C" || text == "c") return SwitchKind::C;
  if (text == "D" || text == "d") return SwitchKind::D;
  if (text == "E" || text == "e") return SwitchKind::E;
  throw ValidationError("unknown switch kind '" + std::string(text) + "'");
}

SwitchRole parse_switch_role(std::string_view text) {
  if (text == "increase") return SwitchRole::Increase;
  if (text == "decrease") return SwitchRole::Decrease;
  throw ValidationError("unknown switch role '" + std::string(text) + "'");
}

double MechanismSpec::switch_prev(SwitchRole role) const noexcept {
  return role == SwitchRole::Increase ? switch_prev_increase
                                      : switch_prev_decrease;
}

SwitchKind MechanismSpec::switch_kind(SwitchRole role) const noexcept {
  if (representation == Representation::OutcomePies) {
    return role == SwitchRole::Increase ? SwitchKind::B : SwitchKind::C;
  }
  return role == SwitchRole::Increase ? SwitchKind::E : SwitchKind::D;
}

std::set<SwitchKind> MechanismSpec::active_switches() const {
  std::set<SwitchKind> kinds;
  for (const SwitchRole role : {SwitchRole::Increase, SwitchRole::Decrease}) {
    if (switch_prev(role) > 0.0) kinds.insert(switch_kind(role));
  }
  return kinds;
}

void MechanismSpec::validate() const {
  if (!in_unit(background_prev)) {
    throw ValidationError("background prevalence " + fmt(background_prev) +
                          " outside [0,1]");
  }
  if (!in_unit(switch_prev_increase) || !in_unit(switch_prev_decrease)) {
    throw ValidationError("switch prevalence outside [0,1]");
  }
  if (dependence) {
    const auto& d = *dependence;
    if (!in_unit(d.given_background) || !in_unit(d.given_no_background)) {
      throw ValidationError("conditional switch prevalence outside [0,1]");
    }
    const double implied = background_prev * d.given_background +
                           (1.0 - background_prev) * d.given_no_background;
    if (std::abs(implied - switch_prev(d.target)) > 1e-9) {
      throw ValidationError("marginal " + std::string(to_string(d.target)) +
                            " switch prevalence " +
                            fmt(switch_prev(d.target)) +
                            " disagrees with the conditionals (implied " +
                            fmt(implied) + ")");
    }
  }
}

MechanismSpec with_dependence(MechanismSpec mech, Dependence dependence) {
  const double implied =
      mech.background_prev * dependence.given_background +
      (1.0 - mech.background_prev) * dependence.given_no_background;
  if (dependence.target == SwitchRole::Increase) {
    mech.switch_prev_increase = implied;
  } else {
    mech.switch_prev_decrease = implied;
  }
  mech.dependence = dependence;
  return mech;
}

Individual structural_outcomes(Representation representation, bool background,
                               bool increase_switch,
                               bool decrease_switch) noexcept {
  Individual ind{background, increase_switch, decrease_switch, false, false};
  if (representation == Representation::OutcomePies) {
    ind.y0 = background || decrease_switch;
    ind.y1 = background || increase_switch;
  } else {
    ind.y0 = !(background || increase_switch);
    ind.y1 = !(background || decrease_switch);
  }
  return ind;
}

void coherence_check(const std::set<SwitchKind>& kinds) {
  const auto bd = std::find_if(kinds.begin(), kinds.end(), in_bd);
  const auto ce = std::find_if_not(kinds.begin(), kinds.end(), in_bd);
  if (bd != kinds.end() && ce != kinds.end()) {
    throw IncoherentMechanism("switches " + std::string(to_string(*bd)) +
                              " and " + std::string(to_string(*ce)) +
                              " cannot share one assignment mechanism");
  }
}

bool is_coherent(const std::set<SwitchKind>& kinds) {
  try {
    coherence_check(kinds);
    return true;
  } catch (const IncoherentMechanism&) {
    return false;
  }
}

RiskPair analytic_risks(const MechanismSpec& mech) {
  mech.validate();
  coherence_check(mech.active_switches());
  double p0 = 0.0;
  double p1 = 0.0;
  for (const bool bg : {false, true}) {
    const double p_bg = bg ? mech.background_prev : 1.0 - mech.background_prev;
    const double inc = conditional_prev(mech, SwitchRole::Increase, bg);
    const double dec = conditional_prev(mech, SwitchRole::Decrease, bg);
    for (const bool s_inc : {false, true}) {
      for (const bool s_dec : {false, true}) {
        const double cell =
            p_bg * (s_inc ? inc : 1.0 - inc) * (s_dec ? dec : 1.0 - dec);
        const Individual ind =
            structural_outcomes(mech.representation, bg, s_inc, s_dec);
        if (ind.y0) p0 += cell;
        if (ind.y1) p1 += cell;
      }
    }
  }
  return {std::clamp(p0, 0.0, 1.0), std::clamp(p1, 0.0, 1.0)};
}

double SimulationResult::p0_hat() const {
  return n == 0 ? 0.0 : static_cast<double>(events0) / static_cast<double>(n);
}

double SimulationResult::p1_hat() const {
  return n == 0 ? 0.0 : static_cast<double>(events1) / static_cast<double>(n);
}

SimulationResult simulate(const MechanismSpec& mech, std::size_t n,
                          std::uint64_t seed, bool keep_individuals,
                          std::size_t threads) {
  if (n == 0) throw InvalidArgument("simulation size must be at least 1");
  mech.validate();
  coherence_check(mech.active_switches());

  const std::array<double, 2> inc_prev = {
      conditional_prev(mech, SwitchRole::Increase, false),
      conditional_prev(mech, SwitchRole::Increase, true)};
  const std::array<double, 2> dec_prev = {
      conditional_prev(mech, SwitchRole::Decrease, false),
      conditional_prev(mech, SwitchRole::Decrease, true)};

  SimulationResult result;
  result.n = n;
  result.seed = seed;
  if (keep_individuals) result.individuals.resize(n);

  struct Counts {
    std::size_t y0 = 0, y1 = 0, bg = 0, inc = 0, dec = 0;
  };
  const auto chunks = rng::run_chunked<Counts>(
      n, seed, threads,
      [&](std::size_t, std::size_t begin, std::size_t end, rng::Stream& stream) {
        Counts c;
        for (std::size_t i = begin; i < end; ++i) {
          const bool bg = stream.bernoulli(mech.background_prev);
          const bool s_inc = stream.bernoulli(inc_prev[bg]);
          const bool s_dec = stream.bernoulli(dec_prev[bg]);
          const Individual ind =
              structural_outcomes(mech.representation, bg, s_inc, s_dec);
          c.y0 += ind.y0;
          c.y1 += ind.y1;
          c.bg += bg;
          c.inc += s_inc;
          c.dec += s_dec;
          if (keep_individuals) result.individuals[i] = ind;
        }
        return c;
      });
  for (const auto& c : chunks) {
    result.events0 += c.y0;
    result.events1 += c.y1;
    result.background_count += c.bg;
    result.increase_count += c.inc;
    result.decrease_count += c.dec;
  }
  return result;
}

MeasureRow all_measures(const RiskPair& pair) {
  MeasureRow row;
  for (const MeasureKind kind : kAllMeasureKinds) {
    try {
      row[kind] = compute_measure(kind, pair).value;
    } catch (const UndefinedMeasure&) {
      row[kind].reset();
    }
  }
  return row;
}

StabilityReport stability_table(const MechanismSpec& mech_template,
                                std::span<const double> background_prevs) {
  mech_template.validate();
  coherence_check(mech_template.active_switches());
  StabilityReport report{mech_template, {}};
  report.rows.reserve(background_prevs.size());
  for (const double bg : background_prevs) {
    if (!in_unit(bg)) {
      throw ValidationError("background prevalence " + fmt(bg) +
                            " outside [0,1]");
    }
    MechanismSpec mech = mech_template;
    mech.background_prev = bg;
    if (mech.dependence) mech = with_dependence(mech, *mech.dependence);
    const RiskPair pair = analytic_risks(mech);
    report.rows.push_back({bg, pair, all_measures(pair)});
  }
  return report;
}

EffectMeasure stable_measure_value(const MechanismSpec& mech) {
  mech.validate();
  if (mech.dependence) {
    throw DependencePresent(
        "stable measure requires independent switch and background events");
  }
  const double inc = mech.switch_prev_increase;
  const double dec = mech.switch_prev_decrease;
  if (inc > 0.0 && dec > 0.0) {
    throw NotMonotone("both switch classes have positive prevalence");
  }
  const bool outcome = mech.representation == Representation::OutcomePies;
  if (outcome) {
    // B-only (or no switch): SR = Pr(~B). C-only: SR from the risks.
    if (dec == 0.0) return {MeasureKind::SR, 1.0 - inc};
    return compute_measure(MeasureKind::SR, analytic_risks(mech));
  }
  // D-only (or no switch): RR = Pr(~D). E-only: RR from the risks.
  if (inc == 0.0) return {MeasureKind::RR, 1.0 - dec};
  return compute_measure(MeasureKind::RR, analytic_risks(mech));
}

FalsificationResult falsification_check(SwitchKind kind, double switch_prev,
                                        const RiskPair& observed) {
  if (!in_unit(switch_prev)) {
    throw InvalidArgument("switch prevalence " + fmt(switch_prev) +
                          " outside [0,1]");
  }
  const double p0 = observed.p0.value();
  const double p1 = observed.p1.value();
  FalsificationResult r;
  r.required = switch_prev;
  switch (kind) {
    case SwitchKind::B:
      r.constraint = "p1 >= Pr(B)";
      r.observed = p1;
      break;
    case SwitchKind::C:
      r.constraint = "p0 >= Pr(C)";
      r.observed = p0;
      break;
    case SwitchKind::D:
      r.constraint = "1 - p1 >= Pr(D)";
      r.observed = 1.0 - p1;
      break;
    case SwitchKind::E:
      r.constraint = "1 - p0 >= Pr(E)";
      r.observed = 1.0 - p0;
      break;
  }
  r.consistent = r.observed >= switch_prev - kRiskTol;
  return r;
}

SensitivityReport correlation_sensitivity(const MechanismSpec& mech,
                                          double lower, double upper,
                                          std::size_t steps) {
  mech.validate();
  if (!in_unit(lower) || !in_unit(upper) || lower > upper) {
    throw InvalidArgument("conditional prevalence range must lie in [0,1]");
  }
  if (steps == 0) throw InvalidArgument("sensitivity sweep needs >= 1 step");

  const bool outcome = mech.representation == Representation::OutcomePies;
  // The swept switch is B (OutcomePies) or D (ComplementPies); the other
  // class must be absent.
  const SwitchRole role = outcome ? SwitchRole::Increase : SwitchRole::Decrease;
  const SwitchRole opposing =
      outcome ? SwitchRole::Decrease : SwitchRole::Increase;
  if (mech.switch_prev(opposing) > 0.0) {
    throw NotMonotone("correlation sensitivity needs a B-only or D-only "
                      "mechanism");
  }

  SensitivityReport report;
  report.kind = outcome ? MeasureKind::SR : MeasureKind::RR;
  report.marginal_prev = mech.switch_prev(role);
  report.independence_value = 1.0 - report.marginal_prev;

  const double u = mech.background_prev;
  const double m = report.marginal_prev;
  MechanismSpec base = mech;
  base.dependence.reset();
  for (std::size_t i = 0; i < steps; ++i) {
    const double given_bg =
        steps == 1 ? lower
                   : lower + (upper - lower) * static_cast<double>(i) /
                                 static_cast<double>(steps - 1);
    double given_none = m;
    if (u >= 1.0) {
      if (std::abs(given_bg - m) > 1e-12) {
        throw InfeasibleDependence("with Pr(background) = 1 the conditional "
                                   "must equal the marginal");
      }
    } else {
      given_none = (m - u * given_bg) / (1.0 - u);
      if (given_none < -1e-12 || given_none > 1.0 + 1e-12) {
        throw InfeasibleDependence(
            "Pr(switch | background) = " + fmt(given_bg) +
            " forces Pr(switch | no background) = " + fmt(given_none));
      }
      given_none = std::clamp(given_none, 0.0, 1.0);
    }
    MechanismSpec point = base;
    point.dependence = Dependence{role, given_bg, given_none};
    SensitivityRow row;
    row.given_background = given_bg;
    row.given_no_background = given_none;
    row.pair = analytic_risks(point);
    try {
      row.measure_value = compute_measure(report.kind, row.pair).value;
    } catch (const UndefinedMeasure&) {
      row.measure_value.reset();
    }
    report.rows.push_back(row);
  }
  return report;
}

EffectBounds bounds_nonmonotone(const RiskPair& observed,
                                double max_opposing_prev,
                                std::size_t resolution) {
  if (!in_unit(max_opposing_prev)) {
    throw InvalidArgument("max_opposing_prev outside [0,1]");
  }
  if (resolution < 2) throw InvalidArgument("grid resolution must be >= 2");

  const double p0 = observed.p0.value();
  const double p1 = observed.p1.value();
  const std::size_t last = resolution - 1;
  const double tol = 0.5 / static_cast<double>(last);

  const auto matches_p1 = [&](double u, std::size_t ib) {
    const double b = grid_point(ib, resolution);
    return std::abs(u + (1.0 - u) * b - p1) <= tol;
  };

  EffectBounds bounds;
  std::size_t lowest_b = resolution;
  std::size_t highest_b = 0;
  for (std::size_t ic = 0; ic < resolution; ++ic) {
    const double c = grid_point(ic, resolution);
    if (c > max_opposing_prev) break;
    for (std::size_t iu = 0; iu < resolution; ++iu) {
      const double u = grid_point(iu, resolution);
      if (std::abs(u + (1.0 - u) * c - p0) > tol) continue;

      // p1 is nondecreasing in b; locate the matching index run around the
      // solution and confirm its ends with the exact predicate.
      std::size_t lo = 0;
      std::size_t hi = last;
      if (u < 1.0) {
        const double b_lo = (p1 - tol - u) / (1.0 - u);
        const double b_hi = (p1 + tol - u) / (1.0 - u);
        const double scale = static_cast<double>(last);
        lo = static_cast<std::size_t>(
            std::clamp(std::ceil(b_lo * scale), 0.0, scale));
        hi = static_cast<std::size_t>(
            std::clamp(std::floor(b_hi * scale), 0.0, scale));
        while (lo > 0 && matches_p1(u, lo - 1)) --lo;
        while (hi < last && matches_p1(u, hi + 1)) ++hi;
        while (lo <= hi && !matches_p1(u, lo)) ++lo;
        while (hi >= lo && hi > 0 && !matches_p1(u, hi)) --hi;
        if (lo > hi || !matches_p1(u, lo)) continue;
      } else if (!matches_p1(u, 0)) {
        continue;
      }
      bounds.matches += hi - lo + 1;
      lowest_b = std::min(lowest_b, lo);
      highest_b = std::max(highest_b, hi);
    }
  }
  if (bounds.matches == 0) {
    throw Infeasible("no grid mechanism reproduces (p0=" + fmt(p0) +
                     ", p1=" + fmt(p1) + ") with Pr(C) <= " +
                     fmt(max_opposing_prev));
  }
  bounds.feasible = true;
  bounds.lower = 1.0 - grid_point(highest_b, resolution);
  bounds.upper = 1.0 - grid_point(lowest_b, resolution);
  return bounds;
}

}  // namespace effstab
