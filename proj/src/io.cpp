#include "effstab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <utility>

#include "effstab/serialize.hpp"

namespace effstab::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_real(std::string_view text, std::size_t line, const char* column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(std::string("column ") + column + ": '" + std::string(text) +
                         "' is not a number",
                     line);
  }
  return value;
}

std::uint64_t parse_count(std::string_view text, std::size_t line,
                          const char* column) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(std::string("column ") + column + ": '" + std::string(text) +
                         "' is not a non-negative integer",
                     line);
  }
  return value;
}

enum class Layout { Counts, Risks, Combined };

struct Header {
  Layout layout = Layout::Counts;
  bool has_weight = false;
  std::size_t columns = 0;
};

Header detect_layout(const std::vector<std::string_view>& fields,
                     std::size_t line) {
  const std::vector<std::string_view> counts = {"setting", "stratum", "n0",
                                                "events0", "n1", "events1"};
  const std::vector<std::string_view> risks = {"setting", "stratum", "p0", "p1"};
  std::vector<std::string_view> combined = counts;
  combined.push_back("p0");
  combined.push_back("p1");

  for (const auto& [layout, names] :
       {std::pair{Layout::Combined, combined}, std::pair{Layout::Counts, counts},
        std::pair{Layout::Risks, risks}}) {
    for (const bool weighted : {false, true}) {
      std::vector<std::string_view> expect = names;
      if (weighted) expect.push_back("weight");
      if (fields == expect) return {layout, weighted, expect.size()};
    }
  }
  throw ParseError("unrecognised header; expected "
                   "setting,stratum,n0,events0,n1,events1[,weight] or "
                   "setting,stratum,p0,p1[,weight]",
                   line);
}

RiskPair risks_from_counts(const ArmCounts& c, std::size_t line) {
  if (c.n0 == 0 || c.n1 == 0) {
    throw ValidationError("line " + std::to_string(line) +
                          ": arm size n must be positive");
  }
  if (c.events0 > c.n0 || c.events1 > c.n1) {
    throw ValidationError("line " + std::to_string(line) +
                          ": events exceed arm size (events <= n)");
  }
  return {static_cast<double>(c.events0) / static_cast<double>(c.n0),
          static_cast<double>(c.events1) / static_cast<double>(c.n1)};
}

RiskPair direct_risks(std::string_view p0, std::string_view p1,
                      std::size_t line) {
  const double r0 = parse_real(p0, line, "p0");
  const double r1 = parse_real(p1, line, "p1");
  if (!(r0 >= 0.0 && r0 <= 1.0) || !(r1 >= 0.0 && r1 <= 1.0)) {
    throw ValidationError("line " + std::to_string(line) +
                          ": risks must lie in [0,1]");
  }
  return {r0, r1};
}

}  // namespace

std::vector<TrialRow> ingest_csv(std::istream& in) {
  std::vector<TrialRow> rows;
  std::set<std::pair<std::string, std::string>> keys;
  std::optional<Header> header;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = trim(raw);
    if (line == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split(text);
    if (!header) {
      header = detect_layout(fields, line);
      continue;
    }
    if (fields.size() != header->columns) {
      throw ParseError("expected " + std::to_string(header->columns) +
                           " fields, found " + std::to_string(fields.size()),
                       line);
    }
    TrialRow row;
    row.setting = std::string(fields[0]);
    row.stratum = std::string(fields[1]);
    if (row.setting.empty() || row.stratum.empty()) {
      throw ParseError("setting and stratum must be non-empty", line);
    }
    switch (header->layout) {
      case Layout::Counts: {
        ArmCounts c{parse_count(fields[2], line, "n0"),
                    parse_count(fields[3], line, "events0"),
                    parse_count(fields[4], line, "n1"),
                    parse_count(fields[5], line, "events1")};
        row.pair = risks_from_counts(c, line);
        row.counts = c;
        break;
      }
      case Layout::Risks:
        row.pair = direct_risks(fields[2], fields[3], line);
        break;
      case Layout::Combined: {
        const bool any_count = !fields[2].empty() || !fields[3].empty() ||
                               !fields[4].empty() || !fields[5].empty();
        const bool any_risk = !fields[6].empty() || !fields[7].empty();
        if (any_count == any_risk) {
          throw ValidationError("line " + std::to_string(line) +
                                ": give either the four counts or p0,p1");
        }
        if (any_count) {
          ArmCounts c{parse_count(fields[2], line, "n0"),
                      parse_count(fields[3], line, "events0"),
                      parse_count(fields[4], line, "n1"),
                      parse_count(fields[5], line, "events1")};
          row.pair = risks_from_counts(c, line);
          row.counts = c;
        } else {
          row.pair = direct_risks(fields[6], fields[7], line);
        }
        break;
      }
    }
    if (header->has_weight && !fields.back().empty()) {
      const double w = parse_real(fields.back(), line, "weight");
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw ValidationError("line " + std::to_string(line) +
                              ": weight must be finite and >= 0");
      }
      row.weight = w;
    }
    if (!keys.emplace(row.setting, row.stratum).second) {
      throw ValidationError("line " + std::to_string(line) + ": duplicate key (" +
                            row.setting + ", " + row.stratum + ")");
    }
    rows.push_back(std::move(row));
  }
  if (!header) throw ParseError("missing header", line == 0 ? 1 : line);
  return rows;
}

std::vector<TrialRow> ingest(const std::filesystem::path& path,
                             std::string_view format) {
  if (format != "csv") {
    throw ValidationError("unsupported input format '" + std::string(format) + "'");
  }
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return ingest_csv(in);
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "json") return OutputFormat::Json;
  if (text == "tsv") return OutputFormat::Tsv;
  throw ValidationError("unknown output format '" + std::string(text) + "'");
}

namespace {

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const auto k : known) ok = ok || key == k;
    if (!ok) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

const Json& require_object(const Json& parent, const char* key) {
  const auto it = parent.find(key);
  if (it == parent.end() || !it->is_object()) {
    throw ValidationError(std::string("config needs an object '") + key + "'");
  }
  return *it;
}

MechanismSpec parse_mechanism(const Json& j) {
  reject_unknown(j,
                 {"representation", "background_prev", "switch_prev_increase",
                  "switch_prev_decrease", "dependence"},
                 "mechanism");
  MechanismSpec mech;
  mech.representation =
      parse_representation(j.value("representation", std::string("outcome_pies")));
  mech.background_prev = j.value("background_prev", 0.0);
  mech.switch_prev_increase = j.value("switch_prev_increase", 0.0);
  mech.switch_prev_decrease = j.value("switch_prev_decrease", 0.0);
  if (const auto it = j.find("dependence"); it != j.end() && !it->is_null()) {
    reject_unknown(*it, {"target", "given_background", "given_no_background"},
                   "mechanism.dependence");
    const Dependence dep{
        parse_switch_role(it->value("target", std::string("increase"))),
        it->at("given_background").get<double>(),
        it->at("given_no_background").get<double>()};
    const char* marginal_key = dep.target == SwitchRole::Increase
                                   ? "switch_prev_increase"
                                   : "switch_prev_decrease";
    if (j.contains(marginal_key)) {
      mech.dependence = dep;
    } else {
      mech = with_dependence(mech, dep);
    }
  }
  mech.validate();
  return mech;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset -> line number
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line =
        1 + static_cast<std::size_t>(
                std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
    throw ParseError(e.what(), line);
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  try {
    reject_unknown(j,
                   {"schema_version", "mechanism", "background_prevs",
                    "simulation", "bounds", "sensitivity", "output"},
                   "config");
    if (j.value("schema_version", 1) != 1) {
      throw ValidationError("unsupported config schema_version");
    }
    ScenarioConfig cfg;
    cfg.mechanism = parse_mechanism(require_object(j, "mechanism"));
    if (const auto it = j.find("background_prevs"); it != j.end()) {
      cfg.background_prevs = it->get<std::vector<double>>();
      for (const double bg : cfg.background_prevs) {
        if (!(bg >= 0.0 && bg <= 1.0)) {
          throw ValidationError("background_prevs entries must lie in [0,1]");
        }
      }
    }
    if (const auto it = j.find("simulation"); it != j.end()) {
      reject_unknown(*it, {"n", "seed"}, "simulation");
      SimulationBlock sim;
      sim.n = it->at("n").get<std::size_t>();
      if (it->contains("seed")) sim.seed = it->at("seed").get<std::uint64_t>();
      if (sim.n == 0) throw ValidationError("simulation.n must be >= 1");
      cfg.simulation = sim;
    }
    if (const auto it = j.find("bounds"); it != j.end()) {
      reject_unknown(*it, {"p0", "p1", "max_opposing_prev", "resolution"}, "bounds");
      BoundsBlock b;
      b.observed = RiskPair(it->at("p0").get<double>(), it->at("p1").get<double>());
      b.max_opposing_prev = it->at("max_opposing_prev").get<double>();
      b.resolution = it->value("resolution", kDefaultBoundsResolution);
      cfg.bounds = b;
    }
    if (const auto it = j.find("sensitivity"); it != j.end()) {
      reject_unknown(*it, {"lower", "upper", "steps"}, "sensitivity");
      SensitivityBlock s;
      s.lower = it->at("lower").get<double>();
      s.upper = it->at("upper").get<double>();
      s.steps = it->value("steps", std::size_t{11});
      cfg.sensitivity = s;
    }
    if (const auto it = j.find("output"); it != j.end()) {
      reject_unknown(*it, {"format", "path"}, "output");
      cfg.output.format = parse_output_format(it->value("format", std::string("json")));
      if (it->contains("path")) cfg.output.path = it->at("path").get<std::string>();
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace effstab::io
