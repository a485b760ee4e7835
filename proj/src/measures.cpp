#include "effstab/measures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace effstab {

namespace {

std::string format_pair(const RiskPair& pair) {
  std::ostringstream out;
  out.precision(17);
  out << "(p0=" << pair.p0.value() << ", p1=" << pair.p1.value() << ")";
  return out.str();
}

[[noreturn]] void undefined(MeasureKind kind, const RiskPair& pair,
                            const char* reason) {
  throw UndefinedMeasure(std::string(to_string(kind)) + " undefined for " +
                         format_pair(pair) + ": " + reason);
}

}  // namespace

Risk::Risk(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream out;
    out.precision(17);
    out << "risk " << value << " outside [0,1]";
    throw InvalidArgument(out.str());
  }
}

std::string_view to_string(MeasureKind kind) noexcept {
  switch (kind) {
    case MeasureKind::RD: return "rd";
    case MeasureKind::RR: return "rr";
    case MeasureKind::OR: return "or";
    case MeasureKind::SR: return "sr";
    case MeasureKind::Switch: return "switch";
  }
  return "?";
}

MeasureKind parse_measure_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "rd") return MeasureKind::RD;
  if (lower == "rr") return MeasureKind::RR;
  if (lower == "or") return MeasureKind::OR;
  if (lower == "sr") return MeasureKind::SR;
  if (lower == "switch" || lower == "theta") return MeasureKind::Switch;
  throw InvalidArgument("unknown measure kind '" + std::string(text) + "'");
}

double null_value(MeasureKind kind) noexcept {
  switch (kind) {
    case MeasureKind::RD:
    case MeasureKind::Switch:
      return 0.0;
    case MeasureKind::RR:
    case MeasureKind::OR:
    case MeasureKind::SR:
      return 1.0;
  }
  return 0.0;
}

void validate_measure(const EffectMeasure& measure) {
  const double v = measure.value;
  bool ok = std::isfinite(v);
  switch (measure.kind) {
    case MeasureKind::RD:
    case MeasureKind::Switch:
      ok = ok && v >= -1.0 && v <= 1.0;
      break;
    case MeasureKind::RR:
    case MeasureKind::OR:
    case MeasureKind::SR:
      ok = ok && v >= 0.0;
      break;
  }
  if (!ok) {
    std::ostringstream out;
    out.precision(17);
    out << to_string(measure.kind) << " value " << v << " outside its range";
    throw InvalidArgument(out.str());
  }
}

EffectMeasure compute_measure(MeasureKind kind, const RiskPair& pair) {
  const double p0 = pair.p0.value();
  const double p1 = pair.p1.value();
  double value = 0.0;
  switch (kind) {
    case MeasureKind::RD:
      value = p1 - p0;
      break;
    case MeasureKind::RR:
      if (p0 <= 0.0) undefined(kind, pair, "p0 = 0");
      value = p1 / p0;
      break;
    case MeasureKind::OR:
      if (p0 <= 0.0 || p0 >= 1.0) undefined(kind, pair, "p0 not in (0,1)");
      if (p1 >= 1.0) undefined(kind, pair, "p1 = 1");
      value = (p1 * (1.0 - p0)) / (p0 * (1.0 - p1));
      break;
    case MeasureKind::SR:
      if (p0 >= 1.0) undefined(kind, pair, "p0 = 1");
      value = (1.0 - p1) / (1.0 - p0);
      break;
    case MeasureKind::Switch:
      // p1 > p0 implies p0 < 1 and p1 < p0 implies p0 > 0, so the branch
      // denominators never vanish for valid risks.
      if (std::abs(p1 - p0) <= kRiskTol) {
        value = 0.0;
      } else if (p1 > p0) {
        value = 1.0 - (1.0 - p1) / (1.0 - p0);
      } else {
        value = -1.0 + p1 / p0;
      }
      break;
  }
  return {kind, value};
}

double effect_function_raw(const EffectMeasure& measure, double p) {
  validate_measure(measure);
  const double v = measure.value;
  switch (measure.kind) {
    case MeasureKind::RD:
      return p + v;
    case MeasureKind::RR:
      return p * v;
    case MeasureKind::OR: {
      // p*g/(1-p) / (1 + p*g/(1-p)), rearranged to stay finite at p = 1.
      const double num = p * v;
      const double den = (1.0 - p) + num;
      return den > 0.0 ? num / den : 0.0;
    }
    case MeasureKind::SR:
      return 1.0 - (1.0 - p) * v;
    case MeasureKind::Switch:
      if (v > 0.0) return 1.0 - (1.0 - p) * (1.0 - v);
      if (v < 0.0) return p * (1.0 + v);
      return p;
  }
  return p;
}

Risk apply_effect(const EffectMeasure& measure, Risk p) {
  const double raw = effect_function_raw(measure, p.value());
  if (raw < -kRiskTol || raw > 1.0 + kRiskTol || !std::isfinite(raw)) {
    std::ostringstream out;
    out.precision(17);
    out << to_string(measure.kind) << "=" << measure.value << " maps p="
        << p.value() << " to " << raw << ", outside [0,1]";
    throw InvalidPrediction(out.str(), raw);
  }
  return Risk(std::clamp(raw, 0.0, 1.0));
}

EffectMeasure convert_measure(const EffectMeasure& from, Risk p0,
                              MeasureKind to_kind) {
  return compute_measure(to_kind, RiskPair(p0, apply_effect(from, p0)));
}

RiskPair recode_outcome(const RiskPair& pair) {
  return {pair.p0.complement(), pair.p1.complement()};
}

RiskPair pool_strata(std::span<const StratumRow> strata) {
  if (strata.empty()) throw WeightError("no strata to pool");
  double total = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
  for (const auto& row : strata) {
    if (!std::isfinite(row.weight) || row.weight < 0.0) {
      throw WeightError("stratum '" + row.label + "' has an invalid weight");
    }
    total += row.weight;
    p0 += row.weight * row.pair.p0.value();
    p1 += row.weight * row.pair.p1.value();
  }
  if (std::abs(total - 1.0) > kWeightTol) {
    std::ostringstream out;
    out.precision(17);
    out << "stratum weights sum to " << total << ", not 1";
    throw WeightError(out.str());
  }
  return {std::clamp(p0, 0.0, 1.0), std::clamp(p1, 0.0, 1.0)};
}

double grid_point(std::size_t index, std::size_t grid_size) {
  if (grid_size < 2) return 0.0;
  if (index + 1 == grid_size) return 1.0;
  return static_cast<double>(index) / static_cast<double>(grid_size - 1);
}

ClosureResult closure_check(MeasureKind kind, double value,
                            std::size_t grid_size) {
  const EffectMeasure measure{kind, value};
  validate_measure(measure);
  ClosureResult result;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double p = grid_point(i, grid_size);
    const double raw = effect_function_raw(measure, p);
    if (raw < -kRiskTol || raw > 1.0 + kRiskTol) {
      result.closed = false;
      result.first_violation = ClosureViolation{p, raw};
      break;
    }
  }
  return result;
}

bool prediction_equivalent(const EffectMeasure& a, const EffectMeasure& b,
                           std::size_t grid_size, double tol) {
  validate_measure(a);
  validate_measure(b);
  const auto valid = [](double raw) {
    return raw >= -kRiskTol && raw <= 1.0 + kRiskTol;
  };
  bool any = false;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double p = grid_point(i, grid_size);
    const double ga = effect_function_raw(a, p);
    const double gb = effect_function_raw(b, p);
    if (!valid(ga) || !valid(gb)) continue;
    any = true;
    if (std::abs(ga - gb) > tol) return false;
  }
  return any;
}

}  // namespace effstab
