// Dissemination protocols as per-node state machines. Each entry point takes
// the node's view of the world and returns the actions the engine must apply;
// protocols never schedule anything themselves.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "rnm/core_model.hpp"

namespace rnm {

struct NodeContext {
  NodeId self = 0;
  Vec2 position;
  bool toward_risk = false;
  bool is_sink = false;  // receives, never relays
  double now = 0.0;
};

struct ProtocolParams {
  double tx_range_m = 400.0;
  double max_wait_s = 1.0;
  Vec2 target_zone;

  static ProtocolParams from(const ScenarioConfig& config);
};

struct ScheduleTimer {
  MessageKey key;
  double delay = 0.0;
};
struct CancelTimer {
  MessageKey key;
};
struct EnqueueBroadcast {
  RiskNotificationMessage msg;
};
struct DeliverToApp {
  MessageKey key;
  std::uint32_t hops_remaining = 0;
};

using Action = std::variant<ScheduleTimer, CancelTimer, EnqueueBroadcast, DeliverToApp>;
using Actions = std::vector<Action>;

class DisseminationProtocol {
 public:
  virtual ~DisseminationProtocol() = default;

  virtual Actions on_receive(const NodeContext& ctx, const RiskNotificationMessage& msg) = 0;
  virtual Actions on_timer(const NodeContext& ctx, const MessageKey& key) = 0;
  virtual Actions on_originate(const NodeContext& ctx, const RiskNotificationMessage& msg) = 0;

  /// Frames that arrived with no hops left (never produced by a correct peer).
  [[nodiscard]] std::uint64_t anomalies() const noexcept { return anomalies_; }

 protected:
  std::uint64_t anomalies_ = 0;
};

/// Rebroadcast-Wait-Time. Nodes heading toward the Risk Zone wait in
/// [0, D/2], the others in [D/2, D]; the farther from the sender, the shorter.
/// R slightly above R_max (receiver moved during the frame) is clamped.
double rnmdp_wait_time(double distance_m, double max_range_m, bool toward_risk, double max_wait_s);

class RnmdpNode final : public DisseminationProtocol {
 public:
  struct Record {
    std::uint32_t received_hops = 0;
    // Decremented hop value carried by the pending rebroadcast, if armed.
    std::optional<std::uint32_t> pending_hops;
    std::optional<RiskNotificationMessage> pending_msg;
    // Set once the node has decided: relayed, cancelled, or chose not to.
    bool rebroadcast_done = false;
  };

  explicit RnmdpNode(const ProtocolParams& params) : params_(params) {}

  Actions on_receive(const NodeContext& ctx, const RiskNotificationMessage& msg) override;
  Actions on_timer(const NodeContext& ctx, const MessageKey& key) override;
  Actions on_originate(const NodeContext& ctx, const RiskNotificationMessage& msg) override;

  [[nodiscard]] const Record* record(const MessageKey& key) const;
  [[nodiscard]] std::uint64_t clamped_distances() const noexcept { return clamped_; }

 private:
  ProtocolParams params_;
  std::map<MessageKey, Record> records_;
  std::uint64_t clamped_ = 0;
};

class FloodingNode final : public DisseminationProtocol {
 public:
  explicit FloodingNode(const ProtocolParams& params) : params_(params) {}

  Actions on_receive(const NodeContext& ctx, const RiskNotificationMessage& msg) override;
  Actions on_timer(const NodeContext& ctx, const MessageKey& key) override;
  Actions on_originate(const NodeContext& ctx, const RiskNotificationMessage& msg) override;

  /// Highest sequence number seen for the risk event, if any.
  [[nodiscard]] std::optional<std::uint32_t> highest_seq(const RiskZoneBounds& zone, double origin_time) const;

 private:
  struct EventKey {
    RiskZoneBounds zone;
    double origin_time = 0.0;
    friend constexpr auto operator<=>(const EventKey&, const EventKey&) = default;
  };

  ProtocolParams params_;
  std::map<EventKey, std::uint32_t> highest_seq_;
  std::set<MessageKey> delivered_;
};

std::unique_ptr<DisseminationProtocol> make_protocol(ProtocolKind kind, const ProtocolParams& params);

/// Builds the seq-th RNM of the run's single risk event. `first_origin_time`
/// is stamped into every message of the event.
RiskNotificationMessage originate(const ScenarioConfig& config, std::uint32_t seq,
                                  double first_origin_time, NodeId initiator, Vec2 initiator_position);

}  // namespace rnm
