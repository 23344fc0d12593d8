#include "rnm/protocols.hpp"

#include <stdexcept>

namespace rnm {

ProtocolParams ProtocolParams::from(const ScenarioConfig& config) {
  return {config.tx_range_m, config.max_wait_s, config.target_zone_point};
}

double rnmdp_wait_time(double distance_m, double max_range_m, bool toward_risk, double max_wait_s) {
  if (max_range_m <= 0.0) throw std::invalid_argument("rnmdp_wait_time: max range must be positive");
  if (max_wait_s <= 0.0) throw std::invalid_argument("rnmdp_wait_time: D must be positive");
  if (distance_m < 0.0) throw std::invalid_argument("rnmdp_wait_time: negative distance");
  const double ratio = distance_m >= max_range_m ? 1.0 : distance_m / max_range_m;
  const double half = max_wait_s / 2.0;
  const double spread = half * (1.0 - ratio);
  return toward_risk ? spread : half + spread;
}

// --- RNMDP -----------------------------------------------------------------

Actions RnmdpNode::on_receive(const NodeContext& ctx, const RiskNotificationMessage& msg) {
  if (msg.hops_remaining == 0) {
    ++anomalies_;
    return {};
  }
  const MessageKey key = message_key(msg);
  auto [it, first] = records_.try_emplace(key);
  Record& rec = it->second;

  if (!first) {
    // Overhearing a peer at the same or a deeper relay level means this
    // neighbourhood is covered.
    if (rec.pending_hops && msg.hops_remaining <= *rec.pending_hops) {
      rec.pending_hops.reset();
      rec.pending_msg.reset();
      rec.rebroadcast_done = true;
      return {CancelTimer{key}};
    }
    return {};
  }

  rec.received_hops = msg.hops_remaining;
  Actions actions{DeliverToApp{key, msg.hops_remaining}};
  const std::uint32_t hops = msg.hops_remaining - 1;
  if (ctx.is_sink || hops == 0 ||
      !direction_allows(msg.directions, bearing_between(ctx.position, params_.target_zone))) {
    rec.rebroadcast_done = true;
    return actions;
  }

  double r = distance(ctx.position, msg.sender_location);
  if (r > params_.tx_range_m) {
    ++clamped_;
    r = params_.tx_range_m;
  }
  const double wait = rnmdp_wait_time(r, params_.tx_range_m, ctx.toward_risk, params_.max_wait_s);

  RiskNotificationMessage relay = msg;
  relay.hops_remaining = hops;
  rec.pending_hops = hops;
  rec.pending_msg = relay;
  actions.emplace_back(ScheduleTimer{key, wait});
  return actions;
}

Actions RnmdpNode::on_timer(const NodeContext& ctx, const MessageKey& key) {
  auto it = records_.find(key);
  if (it == records_.end() || !it->second.pending_msg) return {};
  Record& rec = it->second;
  RiskNotificationMessage out = *rec.pending_msg;
  out.sender_location = ctx.position;
  out.sender_node_id = ctx.self;
  rec.pending_hops.reset();
  rec.pending_msg.reset();
  rec.rebroadcast_done = true;
  return {EnqueueBroadcast{out}};
}

Actions RnmdpNode::on_originate(const NodeContext&, const RiskNotificationMessage& msg) {
  Record& rec = records_[message_key(msg)];
  rec.received_hops = msg.hops_remaining;
  rec.rebroadcast_done = true;
  return {EnqueueBroadcast{msg}};
}

const RnmdpNode::Record* RnmdpNode::record(const MessageKey& key) const {
  auto it = records_.find(key);
  return it == records_.end() ? nullptr : &it->second;
}

// --- Flooding --------------------------------------------------------------

Actions FloodingNode::on_receive(const NodeContext& ctx, const RiskNotificationMessage& msg) {
  if (msg.hops_remaining == 0) {
    ++anomalies_;
    return {};
  }
  const MessageKey key = message_key(msg);
  Actions actions;
  if (delivered_.insert(key).second) actions.emplace_back(DeliverToApp{key, msg.hops_remaining});

  auto [it, first] = highest_seq_.try_emplace(EventKey{msg.risk_zone, msg.origin_time}, msg.sequence_number);
  const bool fresh = first || msg.sequence_number > it->second;
  if (!fresh) return actions;
  it->second = msg.sequence_number;

  const std::uint32_t hops = msg.hops_remaining - 1;
  if (hops == 0 || ctx.is_sink) return actions;
  RiskNotificationMessage out = msg;
  out.hops_remaining = hops;
  out.sender_location = ctx.position;
  out.sender_node_id = ctx.self;
  actions.emplace_back(EnqueueBroadcast{out});
  return actions;
}

Actions FloodingNode::on_timer(const NodeContext&, const MessageKey&) { return {}; }

Actions FloodingNode::on_originate(const NodeContext&, const RiskNotificationMessage& msg) {
  delivered_.insert(message_key(msg));
  auto& seq = highest_seq_[EventKey{msg.risk_zone, msg.origin_time}];
  seq = std::max(seq, msg.sequence_number);
  return {EnqueueBroadcast{msg}};
}

std::optional<std::uint32_t> FloodingNode::highest_seq(const RiskZoneBounds& zone, double origin_time) const {
  auto it = highest_seq_.find(EventKey{zone, origin_time});
  if (it == highest_seq_.end()) return std::nullopt;
  return it->second;
}

std::unique_ptr<DisseminationProtocol> make_protocol(ProtocolKind kind, const ProtocolParams& params) {
  if (kind == ProtocolKind::Rnmdp) return std::make_unique<RnmdpNode>(params);
  return std::make_unique<FloodingNode>(params);
}

RiskNotificationMessage originate(const ScenarioConfig& config, std::uint32_t seq,
                                  double first_origin_time, NodeId initiator, Vec2 initiator_position) {
  RiskNotificationMessage msg;
  msg.risk_zone = config.risk_zone;
  msg.origin_time = first_origin_time;
  msg.sequence_number = seq;
  msg.directions = config.directions;
  msg.hops_remaining = config.max_hops;
  msg.sender_location = initiator_position;
  msg.sender_node_id = initiator;
  msg.payload_bytes = config.payload_bytes;
  return msg;
}

}  // namespace rnm
