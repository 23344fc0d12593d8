// Highway placement and car-following motion on a per-lane torus.
#pragma once

#include <cstdint>
#include <vector>

#include "rnm/core_model.hpp"
#include "rnm/rng.hpp"

namespace rnm {

class InfeasiblePlacement : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct MobilityState {
  std::vector<Vehicle> vehicles;
  // Per lane, indices into `vehicles` in cyclic travel order: the leader of
  // lane_order[l][i] is lane_order[l][(i + 1) % n].
  std::vector<std::vector<std::size_t>> lane_order;
  double highway_length_m = 8000.0;
  double time = 0.0;
};

/// Lane centre line x coordinate (lane 0 is the one adjacent to x = 0).
double lane_center_x(std::uint32_t lane, double lane_width_m) noexcept;

/// Lane 0 travels toward -y (toward a Risk Zone at the origin); lane 1, when
/// present, toward +y.
Vec2 lane_heading(std::uint32_t lane) noexcept;

/// Draws nodes_per_lane vehicles per lane with every same-lane gap (including
/// the wrap-around gap) at least min_gap_m. Node ids start at `first_node_id`.
MobilityState initial_placement(const ScenarioConfig& config, Rng& rng, NodeId first_node_id = 0);

/// Advances every vehicle by dt seconds under the car-following rule and wraps
/// positions onto [0, highway_length).
[[nodiscard]] MobilityState advance(MobilityState state, double dt, const MobilityParams& params);

/// Gap from a vehicle to its leader, measured along the follower's heading on
/// the torus.
double forward_gap(const Vehicle& follower, const Vehicle& leader, double highway_length_m) noexcept;

/// Position `dt` seconds after the state's sample time, assuming constant speed.
Vec2 extrapolate(const Vehicle& v, double dt, double highway_length_m) noexcept;

bool heads_toward_risk_zone(const Vehicle& v, const RiskZoneBounds& risk) noexcept;

}  // namespace rnm
