#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "effstab/io.hpp"
#include "effstab/orcheck.hpp"
#include "effstab/scc.hpp"
#include "effstab/serialize.hpp"
#include "effstab/transport.hpp"

namespace effstab::cli {

namespace {

// Tabular form of a report for --format tsv.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct CommandOutput {
  Json result;
  Table table;
  std::optional<std::uint64_t> seed;
};

std::string cell(double v) {
  if (!std::isfinite(v)) return "NA";
  Json j(v);
  return j.dump();
}

std::string cell(const std::optional<double>& v) {
  return v ? cell(*v) : "NA";
}

std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(std::string_view v) { return std::string(v); }
std::string cell(bool v) { return v ? "true" : "false"; }

std::vector<std::string> measure_cells(const MeasureRow& row) {
  std::vector<std::string> cells;
  for (const MeasureKind kind : kAllMeasureKinds) cells.push_back(cell(row[kind]));
  return cells;
}

std::vector<std::string> measure_columns() {
  std::vector<std::string> cols;
  for (const MeasureKind kind : kAllMeasureKinds) cols.emplace_back(to_string(kind));
  return cols;
}

// Flag values shared across subcommands.
struct Options {
  std::string format = "json";
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::size_t> points;
  std::string config_path;
  std::string input_path;

  std::optional<double> p0, p1, value, ref_p0, ref_p1;
  std::string kind;
  std::vector<std::string> modifiers;
  std::string modifier_key;
  bool pool = false;

  std::string representation = "outcome_pies";
  std::optional<double> switch_inc, switch_dec;
  std::vector<double> backgrounds;

  std::optional<std::size_t> n;
  bool individuals = false;
  std::size_t threads = 0;

  std::optional<double> max_opposing;
  std::optional<std::size_t> resolution;

  std::size_t trials = 1000000;
  double degeneracy_tol = 1e-3;
  std::string family = "unrestricted";
  std::string audit;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MechanismSpec mechanism_from(const Options& o,
                             const std::optional<io::ScenarioConfig>& cfg) {
  MechanismSpec mech = cfg ? cfg->mechanism : MechanismSpec{};
  if (!cfg) mech.representation = parse_representation(o.representation);
  if (o.switch_inc) mech.switch_prev_increase = *o.switch_inc;
  if (o.switch_dec) mech.switch_prev_decrease = *o.switch_dec;
  mech.validate();
  return mech;
}

std::optional<io::ScenarioConfig> maybe_config(const Options& o) {
  if (o.config_path.empty()) return std::nullopt;
  return io::load_config(o.config_path);
}

// --- measure ---------------------------------------------------------------

CommandOutput cmd_measure(const Options& o) {
  CommandOutput output;
  output.table.columns = {"setting", "stratum", "p0", "p1", "weight"};
  for (auto& c : measure_columns()) output.table.columns.push_back(c);

  std::vector<io::TrialRow> rows;
  if (!o.input_path.empty()) {
    rows = io::ingest(o.input_path);
  } else {
    if (!o.p0 || !o.p1) throw UsageError("measure needs --p0 and --p1, or --input");
    io::TrialRow row;
    row.setting = "cli";
    row.stratum = "all";
    row.pair = RiskPair(*o.p0, *o.p1);
    rows.push_back(row);
  }

  Json jrows = Json::array();
  for (const auto& row : rows) {
    const MeasureRow m = all_measures(row.pair);
    Json jr(row);
    jr["measures"] = m;
    jrows.push_back(std::move(jr));
    std::vector<std::string> cells = {row.setting, row.stratum,
                                      cell(row.pair.p0.value()),
                                      cell(row.pair.p1.value()), cell(row.weight)};
    for (auto& c : measure_cells(m)) cells.push_back(c);
    output.table.rows.push_back(std::move(cells));
  }
  output.result["rows"] = std::move(jrows);

  if (!o.kind.empty()) {
    if (rows.size() != 1) throw UsageError("--kind applies to a single pair");
    output.result["measure"] = compute_measure(parse_measure_kind(o.kind), rows[0].pair);
  }

  if (o.pool) {
    std::map<std::string, std::vector<StratumRow>> by_setting;
    for (const auto& row : rows) {
      if (!row.weight) {
        throw ValidationError("--pool needs a weight for every row (" +
                              row.setting + ", " + row.stratum + ")");
      }
      by_setting[row.setting].push_back({*row.weight, row.pair, row.stratum});
    }
    Json pooled = Json::array();
    for (const auto& [setting, strata] : by_setting) {
      const RiskPair pair = pool_strata(strata);
      const MeasureRow m = all_measures(pair);
      pooled.push_back(Json{{"setting", setting},
                            {"p0", pair.p0.value()},
                            {"p1", pair.p1.value()},
                            {"measures", m}});
      std::vector<std::string> cells = {setting, "pooled", cell(pair.p0.value()),
                                        cell(pair.p1.value()), "1"};
      for (auto& c : measure_cells(m)) cells.push_back(c);
      output.table.rows.push_back(std::move(cells));
    }
    output.result["pooled"] = std::move(pooled);
  }
  return output;
}

// --- predict ---------------------------------------------------------------

CommandOutput cmd_predict(const Options& o) {
  CommandOutput output;
  if (!o.p0) throw UsageError("predict needs --p0 (target baseline risk)");
  const Risk baseline(*o.p0);

  if (o.ref_p0 || o.ref_p1) {
    if (!o.ref_p0 || !o.ref_p1) {
      throw UsageError("divergence report needs both --ref-p0 and --ref-p1");
    }
    const DivergenceReport report =
        divergence_report(RiskPair(*o.ref_p0, *o.ref_p1), baseline);
    output.result = report;
    output.table.columns = {"kind", "status", "measure_value", "predicted",
                            "raw_prediction"};
    for (const auto& row : report.rows) {
      output.table.rows.push_back({cell(to_string(row.kind)), cell(to_string(row.status)),
                                   cell(row.measure_value), cell(row.predicted),
                                   cell(row.raw_prediction)});
    }
    return output;
  }

  if (o.kind.empty()) throw UsageError("predict needs --kind");
  const MeasureKind kind = parse_measure_kind(o.kind);
  PredictionRequest request{baseline, std::nullopt, EffectMeasure{}};
  if (!o.modifiers.empty()) {
    std::map<std::string, EffectMeasure> entries;
    for (const auto& spec : o.modifiers) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) {
        throw UsageError("--modifier expects KEY=VALUE, got '" + spec + "'");
      }
      double v = 0.0;
      try {
        v = std::stod(spec.substr(eq + 1));
      } catch (const std::exception&) {
        throw UsageError("--modifier value is not a number: '" + spec + "'");
      }
      entries[spec.substr(0, eq)] = EffectMeasure{kind, v};
    }
    request.measure_source = ModifierTable(std::move(entries));
    if (!o.modifier_key.empty()) request.modifier_key = o.modifier_key;
  } else {
    if (!o.value) throw UsageError("predict needs --value or --modifier");
    request.measure_source = EffectMeasure{kind, *o.value};
  }
  const Risk predicted = predict_risk(request);
  output.result = Json{{"baseline_risk", baseline.value()},
                       {"kind", to_string(kind)},
                       {"modifier_key", o.modifier_key.empty()
                                            ? Json(nullptr)
                                            : Json(o.modifier_key)},
                       {"predicted", predicted.value()}};
  if (o.value) output.result["value"] = *o.value;
  output.table.columns = {"kind", "baseline_risk", "predicted"};
  output.table.rows.push_back(
      {cell(to_string(kind)), cell(baseline.value()), cell(predicted.value())});
  return output;
}

// --- stability -------------------------------------------------------------

CommandOutput cmd_stability(const Options& o) {
  const auto cfg = maybe_config(o);
  const MechanismSpec mech = mechanism_from(o, cfg);
  std::vector<double> backgrounds = o.backgrounds;
  if (backgrounds.empty() && cfg) backgrounds = cfg->background_prevs;
  if (backgrounds.empty()) {
    throw UsageError("stability needs --backgrounds or background_prevs in --config");
  }
  const StabilityReport report = stability_table(mech, backgrounds);
  CommandOutput output;
  output.result = report;
  output.table.columns = {"background_prev", "p0", "p1"};
  for (auto& c : measure_columns()) output.table.columns.push_back(c);
  for (const auto& row : report.rows) {
    std::vector<std::string> cells = {cell(row.background_prev),
                                      cell(row.pair.p0.value()),
                                      cell(row.pair.p1.value())};
    for (auto& c : measure_cells(row.measures)) cells.push_back(c);
    output.table.rows.push_back(std::move(cells));
  }
  return output;
}

// --- simulate --------------------------------------------------------------

CommandOutput cmd_simulate(const Options& o) {
  if (!o.seed) throw UsageError("simulate requires an explicit --seed");
  const auto cfg = maybe_config(o);
  MechanismSpec mech = mechanism_from(o, cfg);
  if (!o.backgrounds.empty()) {
    if (o.backgrounds.size() != 1) {
      throw UsageError("simulate takes a single background prevalence");
    }
    mech.background_prev = o.backgrounds.front();
    if (mech.dependence) mech = with_dependence(mech, *mech.dependence);
  }
  if (cfg && cfg->simulation && cfg->simulation->seed &&
      *cfg->simulation->seed != *o.seed) {
    throw UsageError("--seed " + std::to_string(*o.seed) +
                     " differs from the config seed " +
                     std::to_string(*cfg->simulation->seed));
  }
  std::size_t n = 0;
  if (o.n) {
    n = *o.n;
  } else if (cfg && cfg->simulation) {
    n = cfg->simulation->n;
  } else {
    throw UsageError("simulate needs --n or a simulation block in --config");
  }
  const RiskPair analytic = analytic_risks(mech);
  const SimulationResult sim = simulate(mech, n, *o.seed, o.individuals, o.threads);
  CommandOutput output;
  output.seed = o.seed;
  output.result = Json{{"mechanism", mech},
                       {"analytic", analytic},
                       {"simulation", sim}};
  output.table.columns = {"n", "seed", "events0", "events1", "p0_hat", "p1_hat",
                          "p0_analytic", "p1_analytic"};
  output.table.rows.push_back({cell(sim.n), std::to_string(sim.seed),
                               cell(sim.events0), cell(sim.events1),
                               cell(sim.p0_hat()), cell(sim.p1_hat()),
                               cell(analytic.p0.value()), cell(analytic.p1.value())});
  return output;
}

// --- bounds ----------------------------------------------------------------

CommandOutput cmd_bounds(const Options& o) {
  const auto cfg = maybe_config(o);
  std::optional<io::BoundsBlock> block;
  if (cfg && cfg->bounds) block = cfg->bounds;
  if (o.p0 || o.p1) {
    if (!o.p0 || !o.p1) throw UsageError("bounds needs both --p0 and --p1");
    if (!o.max_opposing && !block) throw UsageError("bounds needs --max-opposing");
    io::BoundsBlock b = block.value_or(io::BoundsBlock{});
    b.observed = RiskPair(*o.p0, *o.p1);
    block = b;
  }
  if (!block) throw UsageError("bounds needs --p0/--p1 or a bounds block in --config");
  if (o.max_opposing) block->max_opposing_prev = *o.max_opposing;
  if (o.resolution) block->resolution = *o.resolution;

  const EffectBounds bounds =
      bounds_nonmonotone(block->observed, block->max_opposing_prev, block->resolution);
  CommandOutput output;
  output.result = Json{{"observed", block->observed},
                       {"max_opposing_prev", block->max_opposing_prev},
                       {"resolution", block->resolution},
                       {"bounds", bounds}};
  output.table.columns = {"kind", "lower", "upper", "feasible", "matches"};
  output.table.rows.push_back({cell(to_string(bounds.kind)), cell(bounds.lower),
                               cell(bounds.upper), cell(bounds.feasible),
                               cell(bounds.matches)});
  return output;
}

// --- orcheck ---------------------------------------------------------------

SearchFamily parse_family(const std::string& text) {
  if (text == "unrestricted") return SearchFamily::Unrestricted;
  if (text == "setting_equal") return SearchFamily::SettingEqual;
  if (text == "null") return SearchFamily::Null;
  throw UsageError("unknown --family '" + text + "'");
}

CommandOutput cmd_orcheck(const Options& o) {
  if (!o.seed) throw UsageError("orcheck requires an explicit --seed");
  CommandOutput output;
  output.seed = o.seed;
  if (!o.audit.empty()) {
    const CollapsibilityReport report =
        collapsibility_audit(parse_measure_kind(o.audit), o.trials, *o.seed);
    output.result = Json{{"audit", report}};
    output.table.columns = {"kind", "trials", "collapsible", "worst_violation"};
    output.table.rows.push_back({cell(to_string(report.kind)), cell(report.trials),
                                 cell(report.collapsible),
                                 cell(report.worst_violation)});
    return output;
  }
  const SearchResult result =
      counterexample_search(o.trials, *o.seed, o.tol.value_or(1e-10),
                            o.degeneracy_tol, parse_family(o.family), o.threads);
  output.result = Json{{"family", o.family},
                       {"residual_tol", o.tol.value_or(1e-10)},
                       {"degeneracy_tol", o.degeneracy_tol},
                       {"search", result}};
  output.table.columns = {"trials", "near_equal", "min_residual", "max_residual",
                          "counterexample"};
  output.table.rows.push_back({cell(result.trials), cell(result.near_equal),
                               cell(result.min_residual), cell(result.max_residual),
                               cell(result.counterexample.has_value())});
  return output;
}

// --- curves ----------------------------------------------------------------

CommandOutput cmd_curves(const Options& o) {
  if (o.kind.empty() || !o.value) throw UsageError("curves needs --kind and --value");
  const EffectMeasure measure{parse_measure_kind(o.kind), *o.value};
  validate_measure(measure);
  const std::size_t points = o.points.value_or(kDefaultGridSize);
  if (points < 2) throw UsageError("--points must be at least 2");

  CommandOutput output;
  output.table.columns = {"p", "g", "raw", "valid"};
  Json rows = Json::array();
  for (std::size_t i = 0; i < points; ++i) {
    const double p = grid_point(i, points);
    const double raw = effect_function_raw(measure, p);
    const bool valid = raw >= -kRiskTol && raw <= 1.0 + kRiskTol;
    const std::optional<double> g =
        valid ? std::optional<double>(std::clamp(raw, 0.0, 1.0)) : std::nullopt;
    rows.push_back(Json{{"p", p}, {"g", optional_number(g)}, {"raw", raw}, {"valid", valid}});
    output.table.rows.push_back({cell(p), cell(g), cell(raw), cell(valid)});
  }
  output.result = Json{{"measure", measure},
                       {"closure", closure_check(measure.kind, measure.value, points)},
                       {"points", std::move(rows)}};
  return output;
}

// --- sensitivity -----------------------------------------------------------

CommandOutput cmd_sensitivity(const Options& o) {
  const auto cfg = maybe_config(o);
  if (!cfg || !cfg->sensitivity) {
    throw UsageError("sensitivity needs --config with a sensitivity block");
  }
  const MechanismSpec mech = mechanism_from(o, cfg);
  const auto& s = *cfg->sensitivity;
  const SensitivityReport report = correlation_sensitivity(mech, s.lower, s.upper, s.steps);
  CommandOutput output;
  output.result = report;
  output.table.columns = {"given_background", "given_no_background", "p0", "p1",
                          std::string(to_string(report.kind))};
  for (const auto& row : report.rows) {
    output.table.rows.push_back({cell(row.given_background),
                                 cell(row.given_no_background),
                                 cell(row.pair.p0.value()), cell(row.pair.p1.value()),
                                 cell(row.measure_value)});
  }
  return output;
}

// --- emission --------------------------------------------------------------

void write_tsv(std::ostream& out, const std::string& command,
               const std::optional<std::uint64_t>& seed, const Table& table) {
  out << "# schema_version\t" << kReportSchemaVersion << "\n";
  out << "# command\t" << command << "\n";
  out << "# status\tok\n";
  if (seed) out << "# seed\t" << *seed << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "\t" : "") << table.columns[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << row[i];
    out << "\n";
  }
}

void write_error(std::ostream& out, bool tsv, const std::string& command,
                 const std::optional<std::uint64_t>& seed, const std::string& name,
                 const std::string& message) {
  if (tsv) {
    out << "# schema_version\t" << kReportSchemaVersion << "\n";
    out << "# command\t" << command << "\n";
    out << "# status\terror\n";
    if (seed) out << "# seed\t" << *seed << "\n";
    out << "# error\t" << name << "\n";
    out << "# message\t" << message << "\n";
    return;
  }
  Json j{{"schema_version", kReportSchemaVersion}, {"command", command}};
  if (seed) j["seed"] = *seed;
  j["status"] = "error";
  j["error"] = Json{{"name", name}, {"message", message}};
  out << j.dump(2) << "\n";
}

using Handler = std::function<CommandOutput(const Options&)>;

void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"json", "tsv"}));
  sub->add_option("--out", o.out_path, "Write the report to PATH instead of stdout");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Effect-measure algebra, switch mechanisms and odds-ratio checks",
               "effstab"};
  app.require_subcommand(1);
  std::map<CLI::App*, std::pair<std::string, Handler>> handlers;

  auto* measure = app.add_subcommand("measure", "Compute all effect measures");
  measure->add_option("--p0", o.p0);
  measure->add_option("--p1", o.p1);
  measure->add_option("--kind", o.kind, "Also report this measure (rd, rr, or, sr, switch)");
  measure->add_option("--input", o.input_path, "Trial-summary CSV");
  measure->add_flag("--pool", o.pool, "Pool weighted strata within each setting");
  handlers[measure] = {"measure", cmd_measure};

  auto* predict = app.add_subcommand("predict", "Transport an effect to a baseline risk");
  predict->add_option("--p0", o.p0, "Target baseline risk");
  predict->add_option("--kind", o.kind);
  predict->add_option("--value", o.value);
  predict->add_option("--modifier", o.modifiers, "KEY=VALUE entry of a modifier table");
  predict->add_option("--key", o.modifier_key, "Modifier key to look up");
  predict->add_option("--ref-p0", o.ref_p0, "Reference p0 for a divergence report");
  predict->add_option("--ref-p1", o.ref_p1, "Reference p1 for a divergence report");
  handlers[predict] = {"predict", cmd_predict};

  const auto add_mechanism_flags = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Scenario config (JSON)");
    sub->add_option("--representation", o.representation)
        ->check(CLI::IsMember({"outcome_pies", "complement_pies"}));
    sub->add_option("--switch-prev-increase", o.switch_inc, "Pr(B) or Pr(E)");
    sub->add_option("--switch-prev-decrease", o.switch_dec, "Pr(C) or Pr(D)");
    sub->add_option("--backgrounds", o.backgrounds, "Background prevalences")
        ->delimiter(',');
  };

  auto* stability = app.add_subcommand("stability", "Measures across background risks");
  add_mechanism_flags(stability);
  handlers[stability] = {"stability", cmd_stability};

  auto* sim = app.add_subcommand("simulate", "Monte Carlo draw of a mechanism");
  add_mechanism_flags(sim);
  sim->add_option("--n", o.n, "Number of individuals");
  sim->add_option("--seed", o.seed, "64-bit master seed (required)");
  sim->add_flag("--individuals", o.individuals, "Include every drawn individual");
  sim->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  handlers[sim] = {"simulate", cmd_simulate};

  auto* bounds = app.add_subcommand("bounds", "Bounds on Pr(~B) without monotonicity");
  bounds->add_option("--config", o.config_path);
  bounds->add_option("--p0", o.p0);
  bounds->add_option("--p1", o.p1);
  bounds->add_option("--max-opposing", o.max_opposing, "Upper limit on Pr(C)");
  bounds->add_option("--resolution", o.resolution, "Grid points per axis");
  handlers[bounds] = {"bounds", cmd_bounds};

  auto* orcheck = app.add_subcommand("orcheck", "Odds-ratio impossibility search or audit");
  orcheck->add_option("--trials", o.trials);
  orcheck->add_option("--seed", o.seed, "64-bit master seed (required)");
  orcheck->add_option("--tol", o.tol, "Residual tolerance (default 1e-10)");
  orcheck->add_option("--degeneracy-tol", o.degeneracy_tol);
  orcheck->add_option("--family", o.family)
      ->check(CLI::IsMember({"unrestricted", "setting_equal", "null"}));
  orcheck->add_option("--audit", o.audit, "Run a collapsibility audit for KIND instead");
  orcheck->add_option("--threads", o.threads);
  handlers[orcheck] = {"orcheck", cmd_orcheck};

  auto* curves = app.add_subcommand("curves", "Sample an effect function on [0,1]");
  curves->add_option("--kind", o.kind);
  curves->add_option("--value", o.value);
  curves->add_option("--points", o.points);
  handlers[curves] = {"curves", cmd_curves};

  auto* sens = app.add_subcommand("sensitivity", "Switch-background correlation sweep");
  sens->add_option("--config", o.config_path)->required();
  handlers[sens] = {"sensitivity", cmd_sensitivity};

  for (auto& [sub, entry] : handlers) add_output_flags(sub, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto& [command, handler] = handlers.at(chosen);
  // Flags win over the config's output block.
  std::string format = o.format;
  std::string out_path = o.out_path;
  if (!o.config_path.empty()) {
    try {
      const auto cfg = io::load_config(o.config_path);
      if (chosen->get_option("--format")->count() == 0) {
        format = cfg.output.format == io::OutputFormat::Tsv ? "tsv" : "json";
      }
      if (out_path.empty() && cfg.output.path) out_path = *cfg.output.path;
    } catch (const Error&) {
      // Reported by the handler below.
    }
  }
  const bool tsv = format == "tsv";

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "error: cannot write " << out_path << "\n";
      return kExitUsage;
    }
  }
  std::ostream& sink = out_path.empty() ? out : file;

  try {
    const CommandOutput output = handler(o);
    if (tsv) {
      write_tsv(sink, command, output.seed, output.table);
    } else {
      Json j{{"schema_version", kReportSchemaVersion}, {"command", command}};
      if (output.seed) j["seed"] = *output.seed;
      j["status"] = "ok";
      j["result"] = output.result;
      sink << j.dump(2) << "\n";
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << chosen->help();
    return kExitUsage;
  } catch (const Error& e) {
    write_error(sink, tsv, command, o.seed, e.name(), e.what());
    err << e.name() << ": " << e.what() << "\n";
    return kExitDomainError;
  }
}

}  // namespace effstab::cli
