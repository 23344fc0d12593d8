// Scenario and sweep files: INI-style sections, or the same layout as JSON.
//
//   [scenario]  lanes, nodes_per_lane, tx_range_m, protocol (all required in a
//               run file), lane_width_m, highway_length_m, risk_zone
//               ("x_min y_min x_max y_max"), target_zone ("x y"), seed, n_seeds
//   [radio]     bandwidth_bps, payload_bytes, queue_capacity, collisions,
//               charge_collided_rx
//   [mac]       slot_us, ifs_us, contention_window
//   [protocol]  max_wait_s, max_hops, directions
//   [traffic]   messages_total, message_interval_s, quiescence_s
//   [mobility]  speed_min_mph, speed_max_mph, min_gap_m, tick_s, accel_mps2,
//               decel_mps2, frozen
//   [sweep]     lanes, nodes_per_lane, protocols (lists), tx_ranges (list or
//               "start:stop:step"), n_seeds                    (sweep files only)
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "rnm/core_model.hpp"
#include "rnm/sweep.hpp"

namespace rnm {

/// Flattened "section.key" -> text value.
using ConfigEntries = std::map<std::string, std::string>;

ConfigEntries parse_ini(const std::string& text);
ConfigEntries parse_json(const std::string& text);
/// Picks the parser by extension (.json) or by a leading '{'.
ConfigEntries load_entries(const std::filesystem::path& path);

struct RunSpec {
  ScenarioConfig config;
  std::uint32_t n_seeds = 1;
};

/// Throws ConfigError naming the missing or malformed field.
RunSpec run_spec_from(const ConfigEntries& entries);
SweepSpec sweep_spec_from(const ConfigEntries& entries);

RunSpec load_run_spec(const std::filesystem::path& path);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

}  // namespace rnm
