// results.csv and the per-run JSON sidecar.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "rnm/engine.hpp"
#include "rnm/sweep.hpp"

namespace rnm {

inline constexpr const char* kResultsHeader =
    "lanes,nodes_per_lane,tx_range_m,protocol,seeds,delivery_ratio,mean_retransmitters,"
    "energy_per_delivered,delay_per_delivered_s,drops";

struct ResultRow {
  std::uint32_t lanes = 0;
  std::uint32_t nodes_per_lane = 0;
  double tx_range_m = 0.0;
  std::string protocol;
  std::uint32_t seeds = 0;
  std::optional<double> delivery_ratio;
  std::optional<double> mean_retransmitters;
  std::optional<double> energy_per_delivered;
  std::optional<double> delay_per_delivered_s;
  std::optional<std::uint64_t> drops;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ResultRow to_result_row(const SweepRow& row);

/// Header plus one line per row, rows in the given order. Undelivered cells
/// leave energy and delay empty.
void write_results_csv(std::ostream& out, std::span<const ResultRow> rows);

/// Parses a file written by write_results_csv. Throws SchemaError.
std::vector<ResultRow> read_results_csv(std::istream& in);

nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const RunMetrics& metrics, bool with_messages);
nlohmann::json to_json(const AveragedMetrics& metrics, std::uint64_t base_seed);

}  // namespace rnm
