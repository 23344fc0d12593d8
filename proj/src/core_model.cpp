#include "rnm/core_model.hpp"

#include <cmath>
#include <numbers>

namespace rnm {

double distance(Vec2 a, Vec2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }

Direction bearing_between(Vec2 from, Vec2 to) noexcept {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  if (dx == 0.0 && dy == 0.0) return Direction::North;
  // clockwise from North, in [0, 2pi)
  double angle = std::atan2(dx, dy);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  const auto sector = static_cast<int>(std::lround(angle / (std::numbers::pi / 4.0))) % 8;
  return static_cast<Direction>(sector);
}

bool direction_allows(std::uint8_t mask, Direction bearing) noexcept {
  if (mask == kAllDirections) return true;
  if (mask > 7) return false;
  return mask == static_cast<std::uint8_t>(bearing);
}

std::string_view to_string(ProtocolKind kind) noexcept {
  return kind == ProtocolKind::Rnmdp ? "rnmdp" : "flooding";
}

ProtocolKind parse_protocol(std::string_view text) {
  if (text == "rnmdp" || text == "RNMDP") return ProtocolKind::Rnmdp;
  if (text == "flooding" || text == "FLOODING") return ProtocolKind::Flooding;
  throw ConfigError("protocol: expected 'rnmdp' or 'flooding', got '" + std::string(text) + "'");
}

MessageKey message_key(const RiskNotificationMessage& msg) noexcept {
  return {msg.risk_zone, msg.origin_time, msg.sequence_number};
}

std::uint64_t serialized_size_bits(const RiskNotificationMessage& msg, ProtocolKind protocol) noexcept {
  const std::uint64_t payload_bits = std::uint64_t{msg.payload_bytes} * 8;
  if (protocol == ProtocolKind::Rnmdp) return std::uint64_t{kRnmdpHeaderBytes} * 8 + payload_bits;
  return kFloodingHeaderBits + payload_bits;
}

std::uint32_t header_wire_bytes(ProtocolKind protocol) noexcept {
  if (protocol == ProtocolKind::Rnmdp) return kRnmdpHeaderBytes;
  return (kFloodingHeaderBits + 7) / 8;
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(lanes == 1 || lanes == 2, "lanes", "must be 1 or 2");
  require(lane_width_m > 0.0, "lane_width_m", "must be positive");
  require(highway_length_m > 0.0, "highway_length_m", "must be positive");
  require(nodes_per_lane >= 1, "nodes_per_lane", "must be at least 1");
  require(mobility.min_gap_m >= 0.0, "min_gap_m", "must be non-negative");
  require(nodes_per_lane * mobility.min_gap_m <= highway_length_m, "nodes_per_lane",
          "infeasible density: nodes_per_lane * min_gap_m exceeds highway_length_m");
  require(risk_zone.valid(), "risk_zone", "requires x_min <= x_max and y_min <= y_max");
  require(target_zone_point.x >= 0.0 && target_zone_point.x <= highway_width_m() &&
              target_zone_point.y >= 0.0 && target_zone_point.y <= highway_length_m,
          "target_zone", "must lie within the highway bounds");
  require(tx_range_m > 0.0, "tx_range_m", "must be positive");
  require(bandwidth_bps > 0.0, "bandwidth_bps", "must be positive");
  require(queue_capacity >= 1, "queue_capacity", "must be at least 1");
  require(mac.slot_s > 0.0, "slot_s", "must be positive");
  require(mac.ifs_s >= 0.0, "ifs_s", "must be non-negative");
  require(mac.contention_window >= 1, "contention_window", "must be at least 1");
  require(max_wait_s > 0.0, "max_wait_s", "must be positive");
  require(max_hops >= 1, "max_hops", "must be at least 1");
  require(directions <= 7 || directions == kAllDirections, "directions",
          "must be 0-7 or 15 (all directions)");
  require(messages_total >= 1, "messages_total", "must be at least 1");
  require(message_interval_s > 0.0, "message_interval_s", "must be positive");
  require(quiescence_s >= 0.0, "quiescence_s", "must be non-negative");
  require(mobility.speed_min_mph >= 0.0 && mobility.speed_min_mph <= mobility.speed_max_mph,
          "speed_min_mph", "requires 0 <= speed_min_mph <= speed_max_mph");
  require(mobility.tick_s > 0.0, "tick_s", "must be positive");
  require(mobility.accel_mps2 >= 0.0, "accel_mps2", "must be non-negative");
  require(mobility.decel_mps2 >= 0.0, "decel_mps2", "must be non-negative");
}

}  // namespace rnm
