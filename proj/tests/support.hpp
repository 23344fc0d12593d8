// Shared fixtures for the unit and acceptance tests: static topologies and an
// engine observer that checks the module invariants while a run executes.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rnm/channel.hpp"
#include "rnm/engine.hpp"
#include "rnm/mobility.hpp"

namespace testing_support {

using namespace rnm;

/// Static single-lane layout: vehicles on lane 0 at the given y values,
/// heading toward the Risk Zone at the origin.
inline MobilityState static_line(const std::vector<double>& ys, const ScenarioConfig& config) {
  MobilityState s;
  s.highway_length_m = config.highway_length_m;
  const double x = lane_center_x(0, config.lane_width_m);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    Vehicle v;
    v.node_id = static_cast<NodeId>(Simulation::kFirstVehicle + i);
    v.lane = 0;
    v.position = {x, ys[i]};
    v.heading = lane_heading(0);
    s.vehicles.push_back(v);
  }
  // Heading -y: the leader is the next vehicle with smaller y.
  std::vector<std::size_t> order(ys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ys[a] > ys[b]; });
  s.lane_order = {order};
  return s;
}

struct Topology {
  std::vector<double> ys;
  double range = 250.0;
};

/// Random line of 10..60 vehicles with gaps >= 92 m. The spacing is scaled so
/// the set mixes connected and disconnected initiator-observer pairs.
inline std::vector<Topology> random_topologies(std::uint32_t count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const double ranges[] = {250.0, 500.0, 1000.0};
  std::vector<Topology> out;
  for (std::uint32_t k = 0; k < count; ++k) {
    Topology t;
    t.range = ranges[k % 3];
    // Mean spacing as a fraction of the range; the node count is what it
    // takes to span the road to the observer, within 10..60.
    const double mean_gap = std::max(95.0, std::uniform_real_distribution<double>(0.3, 0.75)(gen) * t.range);
    const int n = std::clamp(static_cast<int>(std::ceil(5600.0 / mean_gap)), 10, 60);
    std::exponential_distribution<double> extra(1.0 / (mean_gap - 92.0));
    double y = std::uniform_real_distribution<double>(1.0, 0.9 * t.range)(gen);
    for (int i = 0; i < n; ++i) {
      if (y >= 7999.0) break;
      t.ys.push_back(y);
      y += 92.0 + extra(gen);
    }
    out.push_back(t);
  }
  return out;
}

inline ScenarioConfig static_config(const Topology& t, ProtocolKind protocol, std::uint32_t messages = 3) {
  ScenarioConfig c;
  c.lanes = 1;
  c.nodes_per_lane = static_cast<std::uint32_t>(t.ys.size());
  c.tx_range_m = t.range;
  c.protocol = protocol;
  c.collisions = false;
  c.mobility.frozen = true;
  c.messages_total = messages;
  c.quiescence_s = 5.0;
  return c;
}

/// Node coordinates in simulator id order: initiator, observer, vehicles.
inline std::vector<oracle::Point> oracle_points(const Topology& t, const ScenarioConfig& c) {
  std::vector<oracle::Point> p;
  const Vec2 init = c.risk_zone.centroid();
  p.push_back({init.x, init.y});
  p.push_back({c.target_zone_point.x, c.target_zone_point.y});
  const double x = lane_center_x(0, c.lane_width_m);
  for (double y : t.ys) p.push_back({x, y});
  return p;
}

/// Records who transmitted what, and checks invariants on the fly. Violations
/// are collected as text so tests can print them.
class InvariantObserver : public EngineObserver {
 public:
  explicit InvariantObserver(const ScenarioConfig& config) : config_(config) {}

  void on_mobility(double time, const MobilityState& state) override {
    if (!initial_order_) {
      initial_order_ = state.lane_order;
    } else if (*initial_order_ != state.lane_order) {
      fail("lane order changed at t=" + std::to_string(time));
    }
    std::vector<std::uint32_t> per_lane(config_.lanes, 0);
    for (const Vehicle& v : state.vehicles) {
      if (v.lane >= config_.lanes) {
        fail("vehicle on unknown lane");
        continue;
      }
      ++per_lane[v.lane];
      if (v.position.y < 0.0 || v.position.y >= state.highway_length_m) fail("vehicle off the torus");
      if (v.speed < 0.0) fail("negative speed");
    }
    for (std::uint32_t n : per_lane) {
      if (n != config_.nodes_per_lane) fail("lane population changed at t=" + std::to_string(time));
    }
    // Along a lane the forward gaps of a consistent cyclic order add up to one
    // highway length; an overtake would make them wind around twice.
    for (const auto& order : state.lane_order) {
      if (order.size() < 2) continue;
      double total = 0.0;
      for (std::size_t i = 0; i < order.size(); ++i) {
        const Vehicle& f = state.vehicles[order[i]];
        const Vehicle& l = state.vehicles[order[(i + 1) % order.size()]];
        total += forward_gap(f, l, state.highway_length_m);
      }
      if (std::abs(total - state.highway_length_m) > 1e-6 * state.highway_length_m) {
        fail("per-lane order broken at t=" + std::to_string(time));
      }
    }
    ++mobility_samples;
  }

  void on_enqueue(NodeId node, double, const RiskNotificationMessage&, std::size_t queue_length,
                  bool) override {
    if (queue_length > config_.queue_capacity) fail("queue bound exceeded at node " + std::to_string(node));
    max_queue = std::max(max_queue, queue_length);
  }

  void on_frame_start(const Frame& frame) override {
    const MessageKey key = message_key(frame.msg);
    if (!transmitted_.insert({frame.tx_node, key}).second) {
      fail("node " + std::to_string(frame.tx_node) + " transmitted seq " +
           std::to_string(key.sequence_number) + " twice");
    }
    if (frame.tx_node == Simulation::kInitiator) {
      if (frame.msg.hops_remaining != config_.max_hops) fail("initiator frame with wrong hop value");
    } else {
      auto it = first_hops_.find({frame.tx_node, key});
      if (it == first_hops_.end()) {
        fail("relay without a prior reception");
      } else if (frame.msg.hops_remaining + 1 != it->second) {
        fail("hop value not decremented by exactly one");
      }
      if (frame.tx_node == Simulation::kObserver) fail("observer relayed");
      relays[key.sequence_number].insert(frame.tx_node);
    }
    if (frame.msg.hops_remaining == 0) fail("frame with no hops left");
    ++frames_started;
  }

  void on_frame_end(const Frame&, std::span<const Reception> receptions) override {
    ++frames_completed;
    for (const Reception& r : receptions) {
      if (r.outcome == RxOutcome::Received || (r.outcome == RxOutcome::Collided && config_.charge_collided_rx &&
                                              config_.collisions)) {
        ++rx_charged;
      }
    }
  }

  void on_deliver(NodeId node, double, const MessageKey& key, std::uint32_t hops) override {
    if (!first_hops_.emplace(std::pair{node, key}, hops).second) fail("delivered twice to one node");
    if (hops > config_.max_hops) fail("hop value above max_hops");
  }

  /// Checks that need the final metrics: energy conservation.
  void finish(const RunMetrics& m) {
    const double per_frame = tx_energy(config_.tx_range_m);
    const double expected = static_cast<double>(m.ledger_tx_events) * per_frame +
                            static_cast<double>(m.ledger_rx_events) * rx_energy();
    if (std::abs(expected - m.ledger_energy) > 1e-9 * std::max(1.0, expected)) fail("ledger total mismatch");
    double per_message = 0.0;
    for (const MessageRecord& r : m.messages) per_message += r.energy_total;
    if (std::abs(per_message - m.ledger_energy) > 1e-9 * std::max(1.0, per_message)) {
      fail("per-message energy does not add up to the ledger");
    }
    if (m.ledger_tx_events != frames_completed) fail("tx energy events != completed frames");
    if (m.ledger_rx_events != rx_charged) fail("rx energy events != charged receptions");
    if (m.frames_sent != frames_started) fail("frame count mismatch");
    for (const MessageRecord& r : m.messages) {
      const auto it = relays.find(r.seq);
      const std::size_t n = it == relays.end() ? 0 : it->second.size();
      if (n != r.retransmitter_count) fail("retransmitter count mismatch for seq " + std::to_string(r.seq));
    }
  }

  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] std::string report() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size() && i < 10; ++i) os << violations[i] << '\n';
    if (violations.size() > 10) os << "... " << violations.size() - 10 << " more\n";
    return os.str();
  }

  std::vector<std::string> violations;
  std::map<std::uint32_t, std::set<NodeId>> relays;  // seq -> non-initiator transmitters
  std::uint64_t frames_started = 0;
  std::uint64_t frames_completed = 0;
  std::uint64_t rx_charged = 0;
  std::uint64_t mobility_samples = 0;
  std::size_t max_queue = 0;

 private:
  void fail(std::string what) { violations.push_back(std::move(what)); }

  ScenarioConfig config_;
  std::optional<std::vector<std::vector<std::size_t>>> initial_order_;
  std::set<std::pair<NodeId, MessageKey>> transmitted_;
  std::map<std::pair<NodeId, MessageKey>, std::uint32_t> first_hops_;
};

struct CheckedRun {
  RunMetrics metrics;
  std::vector<std::string> violations;
  std::map<std::uint32_t, std::set<NodeId>> relays;
};

inline CheckedRun checked_run(Simulation& sim, const ScenarioConfig& config) {
  InvariantObserver obs(config);
  sim.set_observer(&obs);
  CheckedRun out;
  out.metrics = sim.run();
  obs.finish(out.metrics);
  out.violations = obs.violations;
  out.relays = obs.relays;
  return out;
}

inline CheckedRun checked_run(const ScenarioConfig& config) {
  Simulation sim(config);
  return checked_run(sim, config);
}

}  // namespace testing_support
