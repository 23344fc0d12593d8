// Discrete-event engine tying mobility, channel and protocols together.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rnm/channel.hpp"
#include "rnm/core_model.hpp"
#include "rnm/event_queue.hpp"
#include "rnm/mobility.hpp"
#include "rnm/protocols.hpp"

namespace rnm {

struct MessageRecord {
  std::uint32_t seq = 0;
  double originated_at = 0.0;
  bool delivered = false;
  double first_arrival_at_target = 0.0;  // meaningful only when delivered
  std::uint32_t hops_at_target = 0;      // hops_remaining on the first copy at the target
  std::uint32_t retransmitter_count = 0;
  std::uint32_t informed_nodes = 0;      // distinct nodes that received the message
  double energy_total = 0.0;

  [[nodiscard]] double delay() const noexcept { return first_arrival_at_target - originated_at; }
};

struct RunMetrics {
  std::vector<MessageRecord> messages;

  double delivery_ratio = 0.0;
  double mean_retransmitters = 0.0;  // over every originated message
  std::optional<double> mean_energy_per_delivered;
  std::optional<double> mean_delay_per_delivered;

  std::uint64_t queue_drops = 0;
  std::uint64_t anomalies = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t collided_receptions = 0;
  std::uint64_t clamped_distances = 0;
  std::uint64_t events_processed = 0;
  double ledger_energy = 0.0;
  std::uint64_t ledger_tx_events = 0;
  std::uint64_t ledger_rx_events = 0;
  double tx_energy_per_frame = 0.0;

  /// Recomputes the aggregates from `messages`.
  void finalize();
};

/// Optional hooks for tracing and invariant checking. All callbacks run on
/// the engine thread in event order.
class EngineObserver {
 public:
  virtual ~EngineObserver() = default;
  virtual void on_mobility(double /*time*/, const MobilityState& /*state*/) {}
  virtual void on_enqueue(NodeId /*node*/, double /*time*/, const RiskNotificationMessage& /*msg*/,
                          std::size_t /*queue_length*/, bool /*accepted*/) {}
  virtual void on_frame_start(const Frame& /*frame*/) {}
  virtual void on_frame_end(const Frame& /*frame*/, std::span<const Reception> /*receptions*/) {}
  virtual void on_deliver(NodeId /*node*/, double /*time*/, const MessageKey& /*key*/,
                          std::uint32_t /*hops_remaining*/) {}
};

class Simulation {
 public:
  static constexpr NodeId kInitiator = 0;
  static constexpr NodeId kObserver = 1;
  static constexpr NodeId kFirstVehicle = 2;

  explicit Simulation(const ScenarioConfig& config);
  /// Runs on a caller-provided vehicle layout. Vehicle node ids must be
  /// kFirstVehicle + index.
  Simulation(const ScenarioConfig& config, MobilityState initial);

  void set_observer(EngineObserver* observer) noexcept { observer_ = observer; }

  [[nodiscard]] const MobilityState& mobility() const noexcept { return mobility_; }
  [[nodiscard]] std::size_t node_count() const noexcept { return protocols_.size(); }

  /// Runs to quiescence (or the horizon). Call once.
  RunMetrics run();

 private:
  void refresh_positions(double now);
  NodeContext context(NodeId node, double now);
  void apply(NodeId node, const Actions& actions, double now);
  void push_mac(const std::vector<MacEvent>& events);
  void push(Event e);
  std::size_t message_index(const MessageKey& key) const;

  ScenarioConfig config_;
  MobilityState mobility_;
  Channel channel_;
  std::vector<std::unique_ptr<DisseminationProtocol>> protocols_;
  std::vector<std::vector<std::pair<MessageKey, std::uint64_t>>> timers_;
  EventQueue queue_;
  std::vector<Vec2> positions_;
  double positions_time_ = -1.0;
  std::uint64_t next_timer_id_ = 0;
  std::uint64_t live_protocol_events_ = 0;
  RunMetrics metrics_;
  EngineObserver* observer_ = nullptr;
  bool ran_ = false;
};

RunMetrics run(const ScenarioConfig& config);

struct AveragedMetrics {
  std::uint32_t seeds = 0;
  double delivery_ratio = 0.0;
  double mean_retransmitters = 0.0;
  std::optional<double> energy_per_delivered;  // mean over seeds with deliveries
  std::optional<double> delay_per_delivered;
  std::uint64_t drops = 0;  // summed over seeds
  std::vector<RunMetrics> per_seed;
};

/// Averages `n_seeds` runs with seeds rng_seed, rng_seed + 1, ...
AveragedMetrics run_averaged(const ScenarioConfig& config, std::uint32_t n_seeds);

AveragedMetrics average(std::vector<RunMetrics> runs);

}  // namespace rnm
