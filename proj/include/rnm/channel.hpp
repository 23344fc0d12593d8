// Wireless medium: closed-disk reception, a slotted CSMA MAC with backoff
// freezing, per-node FIFO queues and transmit/receive energy accounting.
//
// The channel never touches the event queue. Every entry point returns the
// MAC events the caller has to schedule; a Wake carries a generation token and
// must be dropped by on_wake() when stale.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <vector>

#include "rnm/core_model.hpp"
#include "rnm/rng.hpp"

namespace rnm {

bool in_range(Vec2 a, Vec2 b, double range_m) noexcept;

/// Seconds needed to put `bits` on a channel of `bandwidth_bps`.
double airtime(std::uint64_t bits, double bandwidth_bps) noexcept;

/// Energy units charged per broadcast: 1.1182 + 7.2e-11 * R^4.
double tx_energy(double range_m) noexcept;

/// Energy units charged per frame heard by a listener.
double rx_energy() noexcept;

struct Frame {
  std::uint64_t id = 0;
  RiskNotificationMessage msg;
  NodeId tx_node = 0;
  double enqueued_at = 0.0;
  double tx_start = 0.0;
  double tx_end = 0.0;
  Vec2 origin_position;
  std::vector<NodeId> listeners;  // sorted; everyone in range at tx_start except tx_node
  bool completed = false;
};

enum class RxOutcome : std::uint8_t {
  Received,
  Collided,      // another in-range transmitter overlapped the frame
  Transmitting,  // the listener was itself on air (half duplex)
};

struct Reception {
  NodeId node = 0;
  RxOutcome outcome = RxOutcome::Received;
};

/// Resolves what each listener of `frame` got, given every other frame whose
/// airtime overlapped it. With collisions off every listener receives.
std::vector<Reception> deliver(const Frame& frame, std::span<const Frame* const> overlapping,
                               bool collisions);

class EnergyLedger {
 public:
  explicit EnergyLedger(std::size_t node_count) : tx_(node_count, 0.0), rx_(node_count, 0.0) {}

  void charge_tx(NodeId node, double energy) {
    tx_.at(node) += energy;
    ++tx_events_;
  }
  void charge_rx(NodeId node, double energy) {
    rx_.at(node) += energy;
    ++rx_events_;
  }

  [[nodiscard]] double tx(NodeId node) const { return tx_.at(node); }
  [[nodiscard]] double rx(NodeId node) const { return rx_.at(node); }
  [[nodiscard]] double total() const noexcept;
  [[nodiscard]] std::uint64_t tx_events() const noexcept { return tx_events_; }
  [[nodiscard]] std::uint64_t rx_events() const noexcept { return rx_events_; }
  [[nodiscard]] std::size_t size() const noexcept { return tx_.size(); }

 private:
  std::vector<double> tx_;
  std::vector<double> rx_;
  std::uint64_t tx_events_ = 0;
  std::uint64_t rx_events_ = 0;
};

struct ChannelParams {
  double tx_range_m = 400.0;
  double bandwidth_bps = 2'000'000.0;
  std::uint32_t queue_capacity = 200;
  MacParams mac;
  ProtocolKind protocol = ProtocolKind::Rnmdp;
  bool collisions = true;
  bool charge_collided_rx = true;

  static ChannelParams from(const ScenarioConfig& config);
};

struct MacEvent {
  enum class Kind : std::uint8_t { Wake, FrameEnd };
  Kind kind = Kind::Wake;
  NodeId node = 0;
  double time = 0.0;
  std::uint64_t token = 0;  // wake generation, or frame id for FrameEnd
};

class Channel {
 public:
  Channel(const ChannelParams& params, std::size_t node_count, std::uint64_t seed);

  struct EnqueueResult {
    bool accepted = false;
    std::vector<MacEvent> events;
  };
  EnqueueResult enqueue_broadcast(NodeId node, const RiskNotificationMessage& msg, double now);

  struct WakeResult {
    std::vector<MacEvent> events;
    const Frame* started = nullptr;  // valid until the next channel call
  };
  /// `positions` is indexed by node id and sampled at `now`.
  WakeResult on_wake(NodeId node, std::uint64_t token, double now, std::span<const Vec2> positions);

  struct Completion {
    Frame frame;
    std::vector<Reception> receptions;  // every listener, with its outcome
    std::vector<MacEvent> events;
    double tx_energy = 0.0;
    std::uint32_t rx_charged = 0;
  };
  Completion complete_frame(std::uint64_t frame_id, double now);

  [[nodiscard]] const EnergyLedger& ledger() const noexcept { return ledger_; }
  [[nodiscard]] std::uint64_t drops() const noexcept { return drops_; }
  [[nodiscard]] std::size_t queue_length(NodeId node) const { return macs_.at(node).queue.size(); }
  [[nodiscard]] std::size_t frames_in_flight() const noexcept { return in_flight_; }
  [[nodiscard]] const ChannelParams& params() const noexcept { return params_; }

 private:
  enum class Phase : std::uint8_t { Idle, Deferring, Countdown, Transmitting };

  struct Pending {
    RiskNotificationMessage msg;
    double enqueued_at = 0.0;
  };

  struct NodeMac {
    std::deque<Pending> queue;
    Phase phase = Phase::Idle;
    std::uint32_t backoff_remaining = 0;
    double countdown_start = 0.0;
    double wake_time = 0.0;
    std::uint64_t token = 0;
    std::uint64_t frame_id = 0;
  };

  // Latest end among in-flight frames this node can hear, or a negative value
  // when idle. Frames starting exactly at `now` count only if `inclusive`.
  double busy_until(NodeId node, double now, bool inclusive) const;
  MacEvent schedule_wake(NodeId node, double at);
  void start_contention(NodeId node, double now, std::vector<MacEvent>& out);
  void resume_or_defer(NodeId node, double now, std::vector<MacEvent>& out);
  void prune();

  ChannelParams params_;
  std::vector<NodeMac> macs_;
  std::map<std::uint64_t, Frame> frames_;
  EnergyLedger ledger_;
  Rng rng_;
  double tx_energy_;
  std::uint64_t next_frame_id_ = 1;
  std::uint64_t drops_ = 0;
  std::size_t in_flight_ = 0;
};

}  // namespace rnm
