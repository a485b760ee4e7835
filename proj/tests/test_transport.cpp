#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "effstab/transport.hpp"
#include "oracles.hpp"

using namespace effstab;

namespace {

PredictionRequest bare(double p0, MeasureKind kind, double value) {
  return {Risk(p0), std::nullopt, EffectMeasure{kind, value}};
}

const DivergenceRow& row_for(const DivergenceReport& report, MeasureKind kind) {
  const auto it = std::find_if(report.rows.begin(), report.rows.end(),
                               [&](const DivergenceRow& r) { return r.kind == kind; });
  REQUIRE(it != report.rows.end());
  return *it;
}

}  // namespace

TEST_CASE("predict_risk worked examples") {
  CHECK(std::abs(predict_risk(bare(0.01, MeasureKind::Switch, 0.000027)).value() -
                 0.0100267) <= 1e-7);
  CHECK(std::abs(predict_risk(bare(0.01, MeasureKind::RR, 3.2)).value() - 0.032) <= 1e-12);
  CHECK(predict_risk(bare(0.0, MeasureKind::Switch, 0.25)).value() == 0.25);

  const ModifierTable table({{"m1", {MeasureKind::Switch, 0.02}},
                             {"m2", {MeasureKind::Switch, -0.5}}});
  const PredictionRequest keyed{Risk(0.03), "m2", table};
  CHECK(std::abs(predict_risk(keyed).value() - 0.015) <= 1e-12);
  const PredictionRequest other{Risk(0.03), "m1", table};
  CHECK(std::abs(predict_risk(other).value() - 0.0494) <= 1e-12);
}

TEST_CASE("predict_risk errors") {
  const ModifierTable table({{"m1", {MeasureKind::Switch, 0.02}},
                             {"m2", {MeasureKind::Switch, -0.5}}});
  CHECK_THROWS_AS((void)predict_risk({Risk(0.03), "m3", table}), UnknownModifier);
  CHECK_THROWS_AS((void)predict_risk({Risk(0.03), std::nullopt, table}), UnknownModifier);
  CHECK_THROWS_AS((void)predict_risk({Risk(0.03), "m1", EffectMeasure{MeasureKind::RR, 2.0}}),
                  ValidationError);
  CHECK_THROWS_AS((void)predict_risk(bare(0.6, MeasureKind::RR, 2.0)), InvalidPrediction);
}

TEST_CASE("modifier tables hold a single kind and at least one entry") {
  CHECK_THROWS_AS(ModifierTable(std::map<std::string, EffectMeasure>{}), ValidationError);
  CHECK_THROWS_AS(ModifierTable({{"a", {MeasureKind::RR, 2.0}},
                                 {"b", {MeasureKind::OR, 2.0}}}),
                  ValidationError);
  CHECK_THROWS_AS(ModifierTable({{"a", {MeasureKind::Switch, 2.0}}}), InvalidArgument);
}

TEST_CASE("divergence_report worked examples") {
  const auto report = divergence_report(RiskPair(0.005, 0.01495), Risk(0.10));
  REQUIRE(report.rows.size() == kAllMeasureKinds.size());
  for (std::size_t i = 0; i < kAllMeasureKinds.size(); ++i) {
    CHECK(report.rows[i].kind == kAllMeasureKinds[i]);
  }
  CHECK(*row_for(report, MeasureKind::RR).predicted == doctest::Approx(0.299).epsilon(1e-12));
  CHECK(*row_for(report, MeasureKind::SR).predicted == doctest::Approx(0.109).epsilon(1e-12));

  const auto wide = divergence_report(RiskPair(0.02, 0.04), Risk(0.60));
  const auto& rr = row_for(wide, MeasureKind::RR);
  CHECK(rr.status == RowStatus::InvalidPrediction);
  CHECK_FALSE(rr.predicted.has_value());
  CHECK(*rr.raw_prediction == doctest::Approx(1.2));
  const auto& sw = row_for(wide, MeasureKind::Switch);
  CHECK(sw.valid());
  CHECK(*sw.predicted == doctest::Approx(1.0 - 0.4 * (1.0 - 0.02 / 0.98)).epsilon(1e-12));
  CHECK(std::abs(*sw.predicted - 0.6082) < 5e-5);
}

TEST_CASE("divergence_report marks undefined rows instead of failing") {
  const auto report = divergence_report(RiskPair(0.0, 0.1), Risk(0.3));
  CHECK(row_for(report, MeasureKind::RR).status == RowStatus::UndefinedMeasure);
  CHECK(row_for(report, MeasureKind::OR).status == RowStatus::UndefinedMeasure);
  CHECK(row_for(report, MeasureKind::RD).valid());
  CHECK(row_for(report, MeasureKind::SR).valid());
}

TEST_CASE("null reference predicts the target baseline on every scale") {
  for (double target : {0.0, 0.2, 0.9}) {
    const auto report = divergence_report(RiskPair(0.3, 0.3), Risk(target));
    for (const auto& row : report.rows) {
      REQUIRE(row.valid());
      CHECK(*row.predicted == doctest::Approx(target).epsilon(1e-14));
    }
  }
}

TEST_CASE("rare_disease_gap worked examples") {
  CHECK(std::abs(rare_disease_gap(RiskPair(0.10, 0.109)) - 0.001) <= 1e-12);
  CHECK(std::abs(rare_disease_gap(RiskPair(0.001, 0.01099)) - 0.00001) <= 1e-12);
  CHECK(rare_disease_gap(RiskPair(0.0, 0.37)) == 0.0);
  CHECK_THROWS_AS((void)rare_disease_gap(RiskPair(1.0, 0.5)), UndefinedMeasure);
}

TEST_CASE("property: predictions diverge across scales away from the source") {
  oracle::Gen gen(201);
  for (int i = 0; i < 5000; ++i) {
    const double p0 = gen.range(0.01, 0.99);
    const double p1 = gen.range(0.01, 0.99);
    const double target = gen.range(0.01, 0.99);
    if (std::abs(p1 - p0) < 1e-6 || std::abs(target - p0) < 1e-6) continue;
    const auto report = divergence_report(RiskPair(p0, p1), Risk(target));
    std::set<double> predictions;
    for (const auto& row : report.rows) {
      if (row.valid()) predictions.insert(*row.predicted);
    }
    REQUIRE(predictions.size() > 1);
  }
}

TEST_CASE("property: every scale agrees at the source baseline") {
  oracle::Gen gen(202);
  for (int i = 0; i < 5000; ++i) {
    const RiskPair ref(gen.unit(), gen.unit());
    const auto report = divergence_report(ref, ref.p0);
    for (const auto& row : report.rows) {
      if (row.status == RowStatus::UndefinedMeasure) continue;
      REQUIRE(row.valid());
      REQUIRE(std::abs(*row.predicted - ref.p1.value()) <= 1e-12);
    }
  }
}

TEST_CASE("property: the rare-disease gap is bounded by the baseline odds") {
  oracle::Gen gen(203);
  for (int i = 0; i < 20000; ++i) {
    const double p0 = gen.range(0.0, 0.999);
    const double p1 = gen.unit();
    const double gap = rare_disease_gap(RiskPair(p0, p1));
    const double sr = (1.0 - p1) / (1.0 - p0);
    REQUIRE(std::abs(gap - std::abs((1.0 - sr) - (p1 - p0))) <= 1e-9);
    REQUIRE(gap <= p0 / (1.0 - p0) + 1e-12);
  }
  double previous = rare_disease_gap(RiskPair(0.1, 0.2));
  for (double p0 : {0.05, 0.01, 0.001, 0.0001}) {
    const double gap = rare_disease_gap(RiskPair(p0, p0 + 0.1));
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < 1e-4);
}

TEST_CASE("property: a one-entry table predicts like the bare measure") {
  oracle::Gen gen(204);
  for (int i = 0; i < 5000; ++i) {
    const double p0 = gen.unit();
    const EffectMeasure m{MeasureKind::Switch, gen.range(-1.0, 1.0)};
    const ModifierTable table({{"only", m}});
    const double direct = predict_risk({Risk(p0), std::nullopt, m}).value();
    REQUIRE(predict_risk({Risk(p0), "only", table}).value() == direct);
    REQUIRE(predict_risk({Risk(p0), std::nullopt, table}).value() == direct);
  }
}
