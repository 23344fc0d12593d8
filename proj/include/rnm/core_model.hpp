// Shared domain types: geometry, risk notification messages, vehicles and
// the scenario description every other module consumes.
#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rnm {

using NodeId = std::uint32_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
  friend constexpr auto operator<=>(const Vec2&, const Vec2&) = default;
};

double distance(Vec2 a, Vec2 b) noexcept;
double dot(Vec2 a, Vec2 b) noexcept;

/// Axis-aligned rectangle describing the hazardous stretch of road.
struct RiskZoneBounds {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  static RiskZoneBounds point(Vec2 p) noexcept { return {p.x, p.y, p.x, p.y}; }

  [[nodiscard]] bool valid() const noexcept { return x_min <= x_max && y_min <= y_max; }
  [[nodiscard]] Vec2 centroid() const noexcept {
    return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)};
  }

  friend constexpr bool operator==(const RiskZoneBounds&, const RiskZoneBounds&) = default;
  friend constexpr auto operator<=>(const RiskZoneBounds&, const RiskZoneBounds&) = default;
};

// Compass directions carried in the 4-bit Directions field. North is +y,
// East is +x. All bits set means "propagate everywhere".
enum class Direction : std::uint8_t {
  North = 0,
  NorthEast = 1,
  East = 2,
  SouthEast = 3,
  South = 4,
  SouthWest = 5,
  West = 6,
  NorthWest = 7,
  All = 15,
};

inline constexpr std::uint8_t kAllDirections = static_cast<std::uint8_t>(Direction::All);

/// Quantizes the bearing from `from` to `to` onto the eight compass points.
/// Coincident points map to North.
Direction bearing_between(Vec2 from, Vec2 to) noexcept;

/// True when a message restricted to `mask` may be relayed by a node whose
/// bearing toward the Target Zone is `bearing`.
bool direction_allows(std::uint8_t mask, Direction bearing) noexcept;

enum class ProtocolKind { Rnmdp, Flooding };

std::string_view to_string(ProtocolKind kind) noexcept;
ProtocolKind parse_protocol(std::string_view text);

inline constexpr std::uint16_t kRnmMessageId = 0x524E;  // "RN"

struct RiskNotificationMessage {
  std::uint16_t message_id = kRnmMessageId;
  RiskZoneBounds risk_zone;
  double origin_time = 0.0;
  std::uint32_t sequence_number = 0;
  std::uint8_t directions = kAllDirections;
  std::uint32_t hops_remaining = 0;
  Vec2 sender_location;
  NodeId sender_node_id = 0;
  std::uint32_t payload_bytes = 512;
};

/// Identity of an RNM for duplicate detection. Sender fields and the hop
/// counter are deliberately not part of it.
struct MessageKey {
  RiskZoneBounds risk_zone;
  double origin_time = 0.0;
  std::uint32_t sequence_number = 0;

  friend constexpr bool operator==(const MessageKey&, const MessageKey&) = default;
  friend constexpr auto operator<=>(const MessageKey&, const MessageKey&) = default;
};

MessageKey message_key(const RiskNotificationMessage& msg) noexcept;

inline constexpr std::uint32_t kRnmdpHeaderBytes = 69;
inline constexpr std::uint32_t kFloodingHeaderBits = 48 * 8 + 4;

/// Exact on-air size in bits (header + payload).
std::uint64_t serialized_size_bits(const RiskNotificationMessage& msg, ProtocolKind protocol) noexcept;

/// Header size rounded up to whole bytes, as it would be laid out in a buffer.
std::uint32_t header_wire_bytes(ProtocolKind protocol) noexcept;

/// Kinematic state of one vehicle. Protocol state, queues and energy
/// tallies live in the protocol and channel modules, keyed by node_id.
struct Vehicle {
  NodeId node_id = 0;
  std::uint32_t lane = 0;
  Vec2 position;
  double speed = 0.0;          // m/s
  double desired_speed = 0.0;  // m/s, drawn at placement
  Vec2 heading{0.0, 1.0};      // unit vector along the lane
};

inline constexpr double kMetersPerSecondPerMph = 0.44704;

struct MacParams {
  double slot_s = 20e-6;
  double ifs_s = 50e-6;
  std::uint32_t contention_window = 32;
};

struct MobilityParams {
  double speed_min_mph = 65.0;
  double speed_max_mph = 70.0;
  double min_gap_m = 92.0;
  double tick_s = 0.1;
  double accel_mps2 = 1.5;
  double decel_mps2 = 3.0;
  bool frozen = false;  // static topology (test mode)
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  // geometry
  std::uint32_t lanes = 1;
  double lane_width_m = 5.0;
  double highway_length_m = 8000.0;
  std::uint32_t nodes_per_lane = 60;
  RiskZoneBounds risk_zone = RiskZoneBounds::point({0.0, 0.0});
  Vec2 target_zone_point{5.0, 5000.0};

  // radio
  double tx_range_m = 400.0;
  double bandwidth_bps = 2'000'000.0;
  std::uint32_t payload_bytes = 512;
  std::uint32_t queue_capacity = 200;
  MacParams mac;
  bool collisions = true;
  bool charge_collided_rx = true;

  // protocol
  ProtocolKind protocol = ProtocolKind::Rnmdp;
  double max_wait_s = 1.0;
  std::uint32_t max_hops = 120;
  std::uint8_t directions = kAllDirections;

  // traffic
  std::uint32_t messages_total = 100;
  double message_interval_s = 1.0;
  double quiescence_s = 30.0;

  MobilityParams mobility;
  std::uint64_t rng_seed = 1;

  [[nodiscard]] double highway_width_m() const noexcept { return lanes * lane_width_m; }
  [[nodiscard]] double horizon_s() const noexcept {
    return message_interval_s * messages_total + quiescence_s;
  }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

}  // namespace rnm
