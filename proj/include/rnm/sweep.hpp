// Parameter sweeps over (lanes, density, range, protocol) cells.
//
// run_sweep_parallel distributes every (cell, seed) run over an OpenMP team;
// run_sweep_serial is the single-threaded reference it is tested against.
// Both return rows in the same canonical order and must agree exactly.
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rnm/core_model.hpp"
#include "rnm/engine.hpp"

namespace rnm {

struct SweepSpec {
  std::vector<std::uint32_t> lanes{1, 2};
  std::vector<std::uint32_t> nodes_per_lane{30, 45, 60};
  std::vector<double> tx_ranges;
  std::vector<ProtocolKind> protocols{ProtocolKind::Flooding, ProtocolKind::Rnmdp};
  std::uint32_t n_seeds = 5;
  ScenarioConfig base;

  /// 2 lane options x 3 densities x 16 ranges (250..1000 step 50) x 2 protocols.
  static SweepSpec paper_grid();
};

struct SweepCell {
  std::uint32_t lanes = 1;
  std::uint32_t nodes_per_lane = 60;
  double tx_range_m = 400.0;
  ProtocolKind protocol = ProtocolKind::Rnmdp;

  friend std::partial_ordering operator<=>(const SweepCell& a, const SweepCell& b) {
    if (auto c = a.lanes <=> b.lanes; c != 0) return c;
    if (auto c = a.nodes_per_lane <=> b.nodes_per_lane; c != 0) return c;
    if (auto c = a.tx_range_m <=> b.tx_range_m; c != 0) return c;
    return to_string(a.protocol) <=> to_string(b.protocol);
  }
  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct SweepRow {
  SweepCell cell;
  AveragedMetrics metrics;
  std::optional<std::string> error;  // set when the cell failed; metrics are then empty
};

/// Cells in canonical (lanes, density, range, protocol) order, duplicates removed.
std::vector<SweepCell> expand(const SweepSpec& spec);

ScenarioConfig cell_config(const SweepSpec& spec, const SweepCell& cell);

std::vector<SweepRow> run_sweep_serial(const SweepSpec& spec);

/// `threads` <= 0 uses the OpenMP default team size.
std::vector<SweepRow> run_sweep_parallel(const SweepSpec& spec, int threads = 0);

}  // namespace rnm
