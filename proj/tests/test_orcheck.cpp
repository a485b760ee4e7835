#include <doctest.h>

#include <array>
#include <cmath>

#include "effstab/orcheck.hpp"
#include "oracles.hpp"

using namespace effstab;

namespace {

double odds(double p) { return p / (1.0 - p); }

}  // namespace

TEST_CASE("pooled_pair examples") {
  const auto a = pooled_pair({0.1, 0.2, 0.3, 0.4, 0.5});
  CHECK(a.p0.value() == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(a.p1.value() == doctest::Approx(0.3).epsilon(1e-14));
  const auto b = pooled_pair({0.3, 0.6, 0.3, 0.6, 0.17});
  CHECK(b.p0.value() == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(b.p1.value() == doctest::Approx(0.6).epsilon(1e-14));
  const auto c = pooled_pair({0.01, 0.0199, 0.05, 0.0595, 0.25});
  CHECK(std::abs(c.p0.value() - 0.04) <= 1e-12);
  CHECK(std::abs(c.p1.value() - 0.0496) <= 1e-12);
  CHECK_THROWS_AS((void)pooled_pair({0.1, 0.2, 0.3, 0.4, 1.0}), InvalidArgument);
  CHECK_THROWS_AS((void)pooled_pair({0.0, 0.2, 0.3, 0.4, 0.5}), InvalidArgument);
}

TEST_CASE("or_residual examples") {
  CHECK(or_residual({0.2, 0.45, 0.2, 0.45, 0.3}) <= 1e-12);
  CHECK(or_residual({0.2, 0.2, 0.7, 0.7, 0.3}) <= 1e-12);

  // Solving odds(p1_t) = 3.857... * odds(0.4) gives p1_t = 0.72 exactly;
  // 0.70588... (= 12/17) corresponds to an odds ratio of 3.6 instead.
  const double p1_t = p1_for_odds_ratio(0.4, odds(0.3) / odds(0.1));
  CHECK(p1_t == doctest::Approx(0.72).epsilon(1e-12));
  CHECK(odds(0.3) / odds(0.1) == doctest::Approx(3.857142857).epsilon(1e-9));
  CHECK(odds(p1_t) / odds(0.4) == doctest::Approx(odds(0.3) / odds(0.1)).epsilon(1e-12));
  CHECK(odds(12.0 / 17.0) / odds(0.4) == doctest::Approx(3.6).epsilon(1e-12));
  const TwoSettingScenario scn{0.1, 0.3, 0.4, p1_t, 0.5};
  CHECK(or_residual(scn) > 0.01);
  const auto pooled = pooled_pair(scn);
  const double pooled_or = odds(pooled.p1.value()) / odds(pooled.p0.value());
  CHECK(std::abs(std::log(pooled_or) - std::log(odds(0.3) / odds(0.1))) ==
        doctest::Approx(or_residual(scn)).epsilon(1e-12));
}

TEST_CASE("property: degenerate families have zero residual for every pooling weight") {
  oracle::Gen gen(401);
  for (int i = 0; i < 20000; ++i) {
    const double p0 = gen.open_unit();
    const double p1 = gen.open_unit();
    const double q0 = gen.open_unit();
    const double w = gen.open_unit();
    REQUIRE(or_residual({p0, p1, p0, p1, w}) <= 1e-12);
    REQUIRE(or_residual({p0, p0, q0, q0, w}) <= 1e-12);
  }
}

TEST_CASE("counterexample search finds nothing and degenerate families stay exact") {
  const auto search = counterexample_search(200000, 8, 1e-10, 1e-3);
  CHECK(search.trials == 200000);
  CHECK(search.seed == 8);
  CHECK_FALSE(search.counterexample.has_value());
  CHECK(search.max_residual > 0.1);

  const auto equal = counterexample_search(20000, 9, 1e-10, 1e-3, SearchFamily::SettingEqual);
  CHECK(equal.max_residual <= 1e-12);
  CHECK(equal.near_equal == 20000);
  CHECK_FALSE(equal.counterexample.has_value());

  const auto null = counterexample_search(20000, 10, 1e-10, 1e-3, SearchFamily::Null);
  CHECK(null.max_residual <= 1e-12);
  CHECK(null.near_equal == 20000);
  CHECK_FALSE(null.counterexample.has_value());
}

TEST_CASE("counterexample search is deterministic across thread counts") {
  const auto a = counterexample_search(150000, 77, 1e-10, 1e-3, SearchFamily::Unrestricted, 1);
  const auto b = counterexample_search(150000, 77, 1e-10, 1e-3, SearchFamily::Unrestricted, 3);
  CHECK(a.near_equal == b.near_equal);
  CHECK(a.max_residual == b.max_residual);
  CHECK(a.min_residual == b.min_residual);
}

TEST_CASE("search tolerances must be positive") {
  CHECK_THROWS_AS((void)counterexample_search(10, 1, 0.0, 1e-3), InvalidArgument);
  CHECK_THROWS_AS((void)counterexample_search(10, 1, 1e-10, -1.0), InvalidArgument);
}

TEST_CASE("collapsibility_violation examples") {
  const std::array<StratumRow, 2> same = {StratumRow{0.5, RiskPair(0.2, 0.35), "a"},
                                          StratumRow{0.5, RiskPair(0.2, 0.35), "b"}};
  CHECK(collapsibility_violation(MeasureKind::RD, same) == 0.0);

  const double p1_a = 4.0 * 0.1 / (0.9 + 0.4);
  const double p1_b = 4.0 * 0.6 / (0.4 + 2.4);
  CHECK(p1_a == doctest::Approx(0.3077).epsilon(1e-4));
  CHECK(p1_b == doctest::Approx(0.8571).epsilon(1e-4));
  const std::array<StratumRow, 2> odds_strata = {StratumRow{0.5, RiskPair(0.1, p1_a), "a"},
                                                 StratumRow{0.5, RiskPair(0.6, p1_b), "b"}};
  CHECK(collapsibility_violation(MeasureKind::OR, odds_strata) > 0.01);

  const std::array<StratumRow, 2> mismatch = {StratumRow{0.5, RiskPair(0.1, 0.2), "a"},
                                              StratumRow{0.5, RiskPair(0.1, 0.3), "b"}};
  CHECK_THROWS_AS((void)collapsibility_violation(MeasureKind::RD, mismatch), ValidationError);
}

TEST_CASE("collapsibility audits separate the affine measures from the odds ratio") {
  for (MeasureKind k : {MeasureKind::RD, MeasureKind::RR, MeasureKind::SR, MeasureKind::Switch}) {
    CAPTURE(to_string(k));
    const auto report = collapsibility_audit(k, 10000, 2024);
    CHECK(report.kind == k);
    CHECK(report.trials == 10000);
    CHECK(report.collapsible);
    CHECK(report.worst_violation < 1e-9);
  }
  const auto odds_report = collapsibility_audit(MeasureKind::OR, 10000, 2024);
  CHECK_FALSE(odds_report.collapsible);
  REQUIRE(odds_report.witness.has_value());
  CHECK(odds_report.worst_violation > 0.01);
  const auto& wit = *odds_report.witness;
  const double or_a = odds(wit.first.pair.p1.value()) / odds(wit.first.pair.p0.value());
  const double or_b = odds(wit.second.pair.p1.value()) / odds(wit.second.pair.p0.value());
  CHECK(or_a == doctest::Approx(or_b).epsilon(1e-9));
  const std::array<StratumRow, 2> strata = {wit.first, wit.second};
  CHECK(collapsibility_violation(MeasureKind::OR, strata) ==
        doctest::Approx(odds_report.worst_violation).epsilon(1e-9));
}

TEST_CASE("collapsibility audits are reproducible") {
  const auto a = collapsibility_audit(MeasureKind::OR, 3000, 5);
  const auto b = collapsibility_audit(MeasureKind::OR, 3000, 5);
  CHECK(a.worst_violation == b.worst_violation);
  CHECK(a.witness->first.pair == b.witness->first.pair);
}
