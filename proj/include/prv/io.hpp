#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "prv/estimators.hpp"
#include "prv/simulator.hpp"

namespace prv {

struct IngestOptions {
  /// Cells hold raw prices; take logs before differencing.
  bool raw_prices = false;
};

/// Reads a price panel: header row `time,<asset>...`, one row per observation
/// with an integer index or ISO-8601 timestamp followed by log-prices. Rows
/// must be complete, strictly increasing in time and equally spaced (1%
/// relative tolerance). The window is normalized to [0, 1], so delta = 1 / n.
ReturnPanel parse_price_csv(std::istream& in, const IngestOptions& options = {});
ReturnPanel ingest_csv(const std::string& path, const IngestOptions& options = {});

/// Writes the panel as cumulative log-prices starting at 0 with an integer
/// time index, in the format parse_price_csv reads.
void write_price_csv(const ReturnPanel& panel, std::ostream& out);
void export_csv(const ReturnPanel& panel, const std::string& path);

using ScenarioConfig = std::variant<FactorModelConfig, CoxScenarioConfig>;

/// Key/value scenario file; see README for the schema.
ScenarioConfig parse_scenario_config(std::istream& in);
ScenarioConfig load_scenario_config(const std::string& path);

}  // namespace prv
