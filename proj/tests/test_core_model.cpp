#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rnm/core_model.hpp"
#include "rnm/mobility.hpp"
#include "rnm/rng.hpp"

using namespace rnm;

namespace {

RiskNotificationMessage sample_message() {
  RiskNotificationMessage m;
  m.risk_zone = RiskZoneBounds::point({0, 0});
  m.origin_time = 0.0;
  m.sequence_number = 5;
  m.hops_remaining = 10;
  m.sender_location = {1, 2};
  m.sender_node_id = 7;
  return m;
}

}  // namespace

TEST_CASE("message keys ignore sender fields and hop counter") {
  RiskNotificationMessage a = sample_message();
  RiskNotificationMessage b = a;
  b.sender_location = {100, 200};
  b.sender_node_id = 9;
  b.hops_remaining = 3;
  CHECK(message_key(a) == message_key(b));

  b = a;
  b.sequence_number = 6;
  CHECK(message_key(a) != message_key(b));

  b = a;
  b.origin_time = 12.0;  // a different risk event
  CHECK(message_key(a) != message_key(b));
}

TEST_CASE("serialized sizes") {
  RiskNotificationMessage m = sample_message();
  m.payload_bytes = 512;
  CHECK(serialized_size_bits(m, ProtocolKind::Rnmdp) == 4648);    // (69 + 512) * 8
  CHECK(serialized_size_bits(m, ProtocolKind::Flooding) == 4484);  // 48*8 + 4 + 512*8
  m.payload_bytes = 0;
  CHECK(serialized_size_bits(m, ProtocolKind::Rnmdp) == 552);
  CHECK(header_wire_bytes(ProtocolKind::Rnmdp) == 69);
  CHECK(header_wire_bytes(ProtocolKind::Flooding) == 49);
}

TEST_CASE("direction gating") {
  CHECK(direction_allows(kAllDirections, Direction::South));
  CHECK(direction_allows(static_cast<std::uint8_t>(Direction::North), Direction::North));
  CHECK_FALSE(direction_allows(static_cast<std::uint8_t>(Direction::North), Direction::South));
  for (int d = 0; d < 8; ++d) CHECK(direction_allows(kAllDirections, static_cast<Direction>(d)));
}

TEST_CASE("bearings are clockwise from +y") {
  const Vec2 o{0, 0};
  CHECK(bearing_between(o, {0, 10}) == Direction::North);
  CHECK(bearing_between(o, {10, 10}) == Direction::NorthEast);
  CHECK(bearing_between(o, {10, 0}) == Direction::East);
  CHECK(bearing_between(o, {10, -10}) == Direction::SouthEast);
  CHECK(bearing_between(o, {0, -10}) == Direction::South);
  CHECK(bearing_between(o, {-10, -10}) == Direction::SouthWest);
  CHECK(bearing_between(o, {-10, 0}) == Direction::West);
  CHECK(bearing_between(o, {-10, 10}) == Direction::NorthWest);
  CHECK(bearing_between(o, o) == Direction::North);
  // A car on the highway looking up the road at the Target Zone.
  CHECK(bearing_between({2.5, 100}, {5, 5000}) == Direction::North);
}

TEST_CASE("protocol names round trip") {
  CHECK(parse_protocol(to_string(ProtocolKind::Rnmdp)) == ProtocolKind::Rnmdp);
  CHECK(parse_protocol(to_string(ProtocolKind::Flooding)) == ProtocolKind::Flooding);
  CHECK_THROWS_AS(parse_protocol("gossip"), ConfigError);
}

TEST_CASE("default scenario is valid") {
  ScenarioConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.horizon_s() == doctest::Approx(130.0));
}

TEST_CASE("validation names the offending field") {
  auto message_of = [](const ScenarioConfig& c) {
    try {
      c.validate();
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  ScenarioConfig c;
  c.lanes = 3;
  CHECK(message_of(c).rfind("lanes", 0) == 0);
  c = {};
  c.tx_range_m = 0;
  CHECK(message_of(c).rfind("tx_range_m", 0) == 0);
  c = {};
  c.nodes_per_lane = 87;  // 87 * 92 = 8004 > 8000
  CHECK(message_of(c).rfind("nodes_per_lane", 0) == 0);
  c = {};
  c.directions = 9;
  CHECK(message_of(c).rfind("directions", 0) == 0);
  c = {};
  c.target_zone_point = {5, 9000};
  CHECK(message_of(c).rfind("target_zone", 0) == 0);
}

TEST_CASE("rng is reproducible and streams are independent") {
  Rng a(42, kMobilityStream), b(42, kMobilityStream), c(42, kMacStream);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    if (x != c.uniform()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("rng below() covers its range without bias") {
  Rng r(7, 3);
  std::vector<int> counts(32, 0);
  const int n = 64000;
  for (int i = 0; i < n; ++i) ++counts[r.below(32)];
  // Each bucket expects 2000; 5 sigma is about 220.
  for (int k : counts) CHECK(std::abs(k - 2000) < 250);
}

TEST_CASE("rng output is pinned across platforms") {
  // Regression value for the raw engine seeding; a change here changes every
  // recorded result.
  Rng r(1, kMobilityStream);
  const double first = r.uniform();
  Rng again(1, kMobilityStream);
  CHECK(first == again.uniform());
  std::seed_seq seq{1u, 0u, 1u, 0u};
  std::mt19937_64 ref(seq);
  CHECK(first == static_cast<double>(ref() >> 11) * 0x1.0p-53);
}
