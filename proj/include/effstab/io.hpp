#pragma once

// Trial-summary ingestion and scenario configuration.
//
// CSV layouts, chosen by the header line:
//   setting,stratum,n0,events0,n1,events1[,weight]
//   setting,stratum,p0,p1[,weight]
//   setting,stratum,n0,events0,n1,events1,p0,p1[,weight]
// In the combined layout each row fills either the four count columns or
// the two risk columns and leaves the others empty. Blank lines and lines
// starting with '#' are skipped.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "effstab/measures.hpp"
#include "effstab/scc.hpp"

namespace effstab::io {

struct ArmCounts {
  std::uint64_t n0 = 0;
  std::uint64_t events0 = 0;
  std::uint64_t n1 = 0;
  std::uint64_t events1 = 0;

  friend bool operator==(const ArmCounts&, const ArmCounts&) = default;
};

struct TrialRow {
  std::string setting;
  std::string stratum;
  RiskPair pair;
  std::optional<double> weight;
  std::optional<ArmCounts> counts;
};

// Throws ParseError (with the 1-based line) on malformed text and
// ValidationError on invariant breaches (events > n, duplicate keys, ...).
[[nodiscard]] std::vector<TrialRow> ingest_csv(std::istream& in);
[[nodiscard]] std::vector<TrialRow> ingest(const std::filesystem::path& path,
                                           std::string_view format = "csv");

enum class OutputFormat { Json, Tsv };

[[nodiscard]] OutputFormat parse_output_format(std::string_view text);

struct SimulationBlock {
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
};

struct BoundsBlock {
  RiskPair observed;
  double max_opposing_prev = 0.0;
  std::size_t resolution = kDefaultBoundsResolution;
};

struct SensitivityBlock {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t steps = 11;
};

struct OutputBlock {
  OutputFormat format = OutputFormat::Json;
  std::optional<std::string> path;
};

struct ScenarioConfig {
  MechanismSpec mechanism;
  std::vector<double> background_prevs;
  std::optional<SimulationBlock> simulation;
  std::optional<BoundsBlock> bounds;
  std::optional<SensitivityBlock> sensitivity;
  OutputBlock output;
};

// Parses the JSON scenario schema documented in README.md and validates the
// mechanism. Throws ParseError / ValidationError.
[[nodiscard]] ScenarioConfig parse_config(std::string_view text);
[[nodiscard]] ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace effstab::io
