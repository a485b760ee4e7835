#include <doctest.h>

#include <sstream>

#include "effstab/io.hpp"
#include "effstab/serialize.hpp"

using namespace effstab;
using namespace effstab::io;

namespace {

std::vector<TrialRow> parse(const std::string& text) {
  std::istringstream in(text);
  return ingest_csv(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("count layout") {
  const auto rows = parse("setting,stratum,n0,events0,n1,events1\ns,all,1000,5,1000,15\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].setting == "s");
  CHECK(rows[0].stratum == "all");
  CHECK(rows[0].pair.p0.value() == 5.0 / 1000.0);
  CHECK(rows[0].pair.p1.value() == 15.0 / 1000.0);
  REQUIRE(rows[0].counts.has_value());
  CHECK(rows[0].counts->events1 == 15);
  CHECK_FALSE(rows[0].weight.has_value());
}

TEST_CASE("risk layout with weights") {
  const auto rows = parse(
      "setting,stratum,p0,p1,weight\n"
      "t,young,0.01,0.0199,0.25\n"
      "t,old,0.05,0.0595,0.75\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].pair.p1.value() == 0.0595);
  CHECK(*rows[0].weight == 0.25);
  CHECK_FALSE(rows[0].counts.has_value());
}

TEST_CASE("combined layout accepts either counts or risks per row") {
  const auto rows = parse(
      "setting,stratum,n0,events0,n1,events1,p0,p1\n"
      "s,all,1000,5,1000,15,,\n"
      "t,all,,,,,0.01,0.0199\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].pair == RiskPair(0.005, 0.015));
  CHECK(rows[1].pair == RiskPair(0.01, 0.0199));
  CHECK_THROWS_AS(parse("setting,stratum,n0,events0,n1,events1,p0,p1\n"
                        "s,all,1000,5,1000,15,0.1,0.2\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse("setting,stratum,n0,events0,n1,events1,p0,p1\n"
                        "s,all,,,,,,\n"),
                  ValidationError);
}

TEST_CASE("comments, blank lines, BOM and CRLF are tolerated") {
  const auto rows = parse(
      "\xEF\xBB\xBFsetting,stratum,p0,p1\r\n"
      "# a comment\r\n"
      "\r\n"
      "s , a , 0.1 , 0.2\r\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].setting == "s");
  CHECK(rows[0].pair == RiskPair(0.1, 0.2));
}

TEST_CASE("validation errors name the violated invariant") {
  CHECK_THROWS_WITH_AS(parse("setting,stratum,n0,events0,n1,events1\ns,all,10,11,10,1\n"),
                       doctest::Contains("events <= n"), ValidationError);
  CHECK_THROWS_AS(parse("setting,stratum,n0,events0,n1,events1\ns,all,0,0,10,1\n"),
                  ValidationError);
  CHECK_THROWS_WITH_AS(parse("setting,stratum,p0,p1\ns,a,0.1,0.2\ns,a,0.3,0.4\n"),
                       doctest::Contains("duplicate"), ValidationError);
  CHECK_THROWS_AS(parse("setting,stratum,p0,p1\ns,a,0.1,1.2\n"), ValidationError);
  CHECK_THROWS_AS(parse("setting,stratum,p0,p1,weight\ns,a,0.1,0.2,-1\n"), ValidationError);
  CHECK_THROWS_AS(parse("setting,stratum,p0,p1,weight\ns,a,0.1,0.2,inf\n"), ValidationError);
}

TEST_CASE("parse errors report their line number") {
  CHECK(parse_error_line("setting,stratum,p0,p1\ns,a,0.1,0.2\ns,b,zero,0.2\n") == 3);
  CHECK(parse_error_line("setting,stratum,p0,p1\n\n# c\ns,a,0.1\n") == 4);
  CHECK(parse_error_line("foo,bar\n") == 1);
  CHECK(parse_error_line("") == 1);
  CHECK(parse_error_line("setting,stratum,n0,events0,n1,events1\ns,a,10,-1,10,1\n") == 2);
}

TEST_CASE("ingest reads the fixture file") {
  const auto rows = ingest(std::filesystem::path(EFFSTAB_SCENARIO_DIR) / "trials.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].pair == RiskPair(0.005, 0.015));
  CHECK(rows[1].pair == RiskPair(0.01, 0.0199));
  CHECK_THROWS_AS((void)ingest("/nonexistent/file.csv"), ValidationError);
  CHECK_THROWS_AS((void)ingest(std::filesystem::path(EFFSTAB_SCENARIO_DIR) / "trials.csv", "xlsx"),
                  ValidationError);
}

TEST_CASE("scenario config parsing") {
  const auto cfg = parse_config(R"({
    "schema_version": 1,
    "mechanism": {"representation": "complement_pies", "background_prev": 0.2,
                  "switch_prev_decrease": 0.25},
    "background_prevs": [0.1, 0.2],
    "simulation": {"n": 1000, "seed": 42},
    "bounds": {"p0": 0.05, "p1": 0.0595, "max_opposing_prev": 0.005},
    "sensitivity": {"lower": 0.0, "upper": 0.5, "steps": 6},
    "output": {"format": "tsv", "path": "out.tsv"}
  })");
  CHECK(cfg.mechanism.representation == Representation::ComplementPies);
  CHECK(cfg.mechanism.switch_prev_decrease == 0.25);
  CHECK(cfg.background_prevs.size() == 2);
  CHECK(cfg.simulation->n == 1000);
  CHECK(*cfg.simulation->seed == 42);
  CHECK(cfg.bounds->resolution == kDefaultBoundsResolution);
  CHECK(cfg.bounds->max_opposing_prev == 0.005);
  CHECK(cfg.sensitivity->steps == 6);
  CHECK(cfg.output.format == OutputFormat::Tsv);
  CHECK(*cfg.output.path == "out.tsv");
}

TEST_CASE("config dependence derives or checks the marginal") {
  const auto derived = parse_config(R"({"mechanism": {"background_prev": 0.05,
    "dependence": {"target": "increase", "given_background": 0.03, "given_no_background": 0.01}}})");
  CHECK(derived.mechanism.switch_prev_increase == doctest::Approx(0.05 * 0.03 + 0.95 * 0.01));
  REQUIRE(derived.mechanism.dependence.has_value());
  CHECK(derived.mechanism.dependence->given_background == 0.03);

  CHECK_THROWS_AS((void)parse_config(R"({"mechanism": {"background_prev": 0.05,
    "switch_prev_increase": 0.5,
    "dependence": {"target": "increase", "given_background": 0.03, "given_no_background": 0.01}}})"),
                  ValidationError);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS((void)parse_config(R"({"mechanism": {}, "extra": 1})"), ValidationError);
  CHECK_THROWS_AS((void)parse_config(R"({"mechanism": {"background": 0.1}})"), ValidationError);
  CHECK_THROWS_AS((void)parse_config(R"({"background_prevs": [0.1]})"), ValidationError);
  CHECK_THROWS_AS((void)parse_config(R"({"mechanism": {"background_prev": 1.5}})"), ValidationError);
  CHECK_THROWS_AS((void)parse_config(R"({"mechanism": {}, "background_prevs": [2]})"), ValidationError);
  CHECK_THROWS_AS((void)parse_config(R"({"mechanism": {}, "schema_version": 2})"), ValidationError);
  CHECK_THROWS_AS((void)parse_config(R"({"mechanism": {}, "bounds": {"p0": 0.1, "p1": 0.2}})"),
                  ValidationError);
  CHECK_THROWS_AS((void)parse_config(R"({"mechanism": {"representation": "pies"}})"), ValidationError);
  try {
    (void)parse_config("{\n  \"mechanism\": {\n    \"background_prev\": ,\n  }\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("shipped scenario configs load") {
  for (const char* name : {"table3.json", "table3_row2.json", "nonmonotone_bounds.json",
                           "vaccine_sensitivity.json", "dependent_switch.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW((void)load_config(std::filesystem::path(EFFSTAB_SCENARIO_DIR) / name));
  }
}

TEST_CASE("report structures round trip through JSON") {
  const std::vector<double> backgrounds = {0.0, 0.01, 0.1};
  const auto report = stability_table(
      {Representation::OutcomePies, 0.0, 0.01, 0.0, std::nullopt}, backgrounds);
  const Json j = report;
  const auto back = Json::parse(j.dump()).get<StabilityReport>();
  REQUIRE(back.rows.size() == report.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].pair == report.rows[i].pair);
    CHECK(back.rows[i].measures.values == report.rows[i].measures.values);
  }
  CHECK(back.mechanism == report.mechanism);
  CHECK(j.dump().find("null") != std::string::npos);

  const MechanismSpec mech = with_dependence(
      {Representation::OutcomePies, 0.05, 0.0, 0.0, std::nullopt},
      {SwitchRole::Increase, 0.03, 0.01});
  CHECK(Json::parse(Json(mech).dump()).get<MechanismSpec>() == mech);
}
