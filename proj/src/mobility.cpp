#include "rnm/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rnm {

namespace {

double wrap(double y, double length) noexcept {
  double w = std::fmod(y, length);
  if (w < 0.0) w += length;
  if (w >= length) w -= length;
  return w;
}

}  // namespace

double lane_center_x(std::uint32_t lane, double lane_width_m) noexcept {
  return (static_cast<double>(lane) + 0.5) * lane_width_m;
}

Vec2 lane_heading(std::uint32_t lane) noexcept {
  return lane % 2 == 0 ? Vec2{0.0, -1.0} : Vec2{0.0, 1.0};
}

MobilityState initial_placement(const ScenarioConfig& config, Rng& rng, NodeId first_node_id) {
  const double length = config.highway_length_m;
  const double gap = config.mobility.min_gap_m;
  const std::uint32_t n = config.nodes_per_lane;
  if (static_cast<double>(n) * gap > length) {
    throw InfeasiblePlacement("nodes_per_lane: " + std::to_string(n) + " vehicles with min gap " +
                              std::to_string(gap) + " m do not fit in " + std::to_string(length) +
                              " m");
  }
  const double v_min = config.mobility.speed_min_mph * kMetersPerSecondPerMph;
  const double v_max = config.mobility.speed_max_mph * kMetersPerSecondPerMph;
  const double free_space = length - static_cast<double>(n) * gap;

  MobilityState state;
  state.highway_length_m = length;
  state.lane_order.resize(config.lanes);
  NodeId next_id = first_node_id;

  for (std::uint32_t lane = 0; lane < config.lanes; ++lane) {
    std::vector<double> offsets(n);
    for (auto& u : offsets) u = rng.uniform() * free_space;
    std::sort(offsets.begin(), offsets.end());

    const Vec2 heading = lane_heading(lane);
    const std::size_t base = state.vehicles.size();
    for (std::uint32_t i = 0; i < n; ++i) {
      Vehicle v;
      v.node_id = next_id++;
      v.lane = lane;
      v.position = {lane_center_x(lane, config.lane_width_m),
                    wrap(offsets[i] + static_cast<double>(i) * gap, length)};
      v.desired_speed = rng.uniform(v_min, v_max);
      v.speed = v.desired_speed;
      v.heading = heading;
      state.vehicles.push_back(v);
    }
    // Vehicles were generated in ascending y; travel order follows the heading.
    auto& order = state.lane_order[lane];
    order.resize(n);
    std::iota(order.begin(), order.end(), base);
    if (heading.y < 0.0) std::reverse(order.begin(), order.end());
  }
  return state;
}

double forward_gap(const Vehicle& follower, const Vehicle& leader, double highway_length_m) noexcept {
  if (&follower == &leader) return highway_length_m;
  const double along = (leader.position.y - follower.position.y) * follower.heading.y;
  return wrap(along, highway_length_m);
}

Vec2 extrapolate(const Vehicle& v, double dt, double highway_length_m) noexcept {
  return {v.position.x, wrap(v.position.y + v.heading.y * v.speed * dt, highway_length_m)};
}

MobilityState advance(MobilityState state, double dt, const MobilityParams& params) {
  const double length = state.highway_length_m;
  std::vector<double> gaps;
  std::vector<double> moves;

  for (const auto& order : state.lane_order) {
    const std::size_t n = order.size();
    if (n == 0) continue;
    gaps.assign(n, length);
    moves.assign(n, 0.0);

    // Decide every speed from the pre-tick state before anyone moves.
    for (std::size_t i = 0; i < n; ++i) {
      Vehicle& self = state.vehicles[order[i]];
      const Vehicle& leader = state.vehicles[order[(i + 1) % n]];
      double speed = self.speed;
      if (n > 1) gaps[i] = forward_gap(self, leader, length);
      if (n > 1 && gaps[i] < params.min_gap_m) {
        speed = std::max(0.0, std::min(speed, leader.speed) - params.decel_mps2 * dt);
      } else {
        speed = std::min(self.desired_speed, speed + params.accel_mps2 * dt);
      }
      moves[i] = speed * dt;
      if (n > 1 && moves[i] > gaps[i]) moves[i] = gaps[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      Vehicle& self = state.vehicles[order[i]];
      self.speed = moves[i] / dt;
      self.position.y = wrap(self.position.y + self.heading.y * moves[i], length);
    }
  }
  state.time += dt;
  return state;
}

bool heads_toward_risk_zone(const Vehicle& v, const RiskZoneBounds& risk) noexcept {
  const Vec2 c = risk.centroid();
  const Vec2 to_risk{c.x - v.position.x, c.y - v.position.y};
  return dot(v.heading, to_risk) > 0.0;
}

}  // namespace rnm
