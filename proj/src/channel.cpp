#include "rnm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rnm {

bool in_range(Vec2 a, Vec2 b, double range_m) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy <= range_m * range_m;
}

double airtime(std::uint64_t bits, double bandwidth_bps) noexcept {
  return static_cast<double>(bits) / bandwidth_bps;
}

double tx_energy(double range_m) noexcept {
  const double r2 = range_m * range_m;
  return 1.1182 + 7.2e-11 * r2 * r2;
}

double rx_energy() noexcept { return 1.0; }

std::vector<Reception> deliver(const Frame& frame, std::span<const Frame* const> overlapping,
                               bool collisions) {
  std::vector<Reception> out;
  out.reserve(frame.listeners.size());
  for (NodeId listener : frame.listeners) {
    RxOutcome outcome = RxOutcome::Received;
    if (collisions) {
      for (const Frame* other : overlapping) {
        if (other->tx_node == frame.tx_node) continue;
        if (other->tx_node == listener) {
          outcome = RxOutcome::Transmitting;
          break;
        }
        if (std::binary_search(other->listeners.begin(), other->listeners.end(), listener)) {
          outcome = RxOutcome::Collided;
        }
      }
    }
    out.push_back({listener, outcome});
  }
  return out;
}

double EnergyLedger::total() const noexcept {
  return std::accumulate(tx_.begin(), tx_.end(), 0.0) + std::accumulate(rx_.begin(), rx_.end(), 0.0);
}

ChannelParams ChannelParams::from(const ScenarioConfig& config) {
  ChannelParams p;
  p.tx_range_m = config.tx_range_m;
  p.bandwidth_bps = config.bandwidth_bps;
  p.queue_capacity = config.queue_capacity;
  p.mac = config.mac;
  p.protocol = config.protocol;
  p.collisions = config.collisions;
  p.charge_collided_rx = config.charge_collided_rx;
  return p;
}

Channel::Channel(const ChannelParams& params, std::size_t node_count, std::uint64_t seed)
    : params_(params),
      macs_(node_count),
      ledger_(node_count),
      rng_(seed, kMacStream),
      tx_energy_(rnm::tx_energy(params.tx_range_m)) {}

double Channel::busy_until(NodeId node, double now, bool inclusive) const {
  double until = -1.0;
  for (const auto& [id, f] : frames_) {
    if (f.completed || f.tx_end <= now) continue;
    if (f.tx_start > now || (!inclusive && f.tx_start == now)) continue;
    if (std::binary_search(f.listeners.begin(), f.listeners.end(), node)) {
      until = std::max(until, f.tx_end);
    }
  }
  return until;
}

MacEvent Channel::schedule_wake(NodeId node, double at) {
  NodeMac& mac = macs_[node];
  mac.wake_time = at;
  return {MacEvent::Kind::Wake, node, at, ++mac.token};
}

void Channel::resume_or_defer(NodeId node, double now, std::vector<MacEvent>& out) {
  NodeMac& mac = macs_[node];
  const double busy = busy_until(node, now, true);
  if (busy >= 0.0) {
    mac.phase = Phase::Deferring;
    out.push_back(schedule_wake(node, busy));
    return;
  }
  mac.phase = Phase::Countdown;
  mac.countdown_start = now + params_.mac.ifs_s;
  out.push_back(schedule_wake(node, mac.countdown_start + mac.backoff_remaining * params_.mac.slot_s));
}

void Channel::start_contention(NodeId node, double now, std::vector<MacEvent>& out) {
  macs_[node].backoff_remaining = static_cast<std::uint32_t>(rng_.below(params_.mac.contention_window));
  resume_or_defer(node, now, out);
}

Channel::EnqueueResult Channel::enqueue_broadcast(NodeId node, const RiskNotificationMessage& msg,
                                                  double now) {
  EnqueueResult result;
  NodeMac& mac = macs_.at(node);
  if (mac.queue.size() >= params_.queue_capacity) {
    ++drops_;
    return result;
  }
  result.accepted = true;
  mac.queue.push_back({msg, now});
  if (mac.phase == Phase::Idle) start_contention(node, now, result.events);
  return result;
}

Channel::WakeResult Channel::on_wake(NodeId node, std::uint64_t token, double now,
                                     std::span<const Vec2> positions) {
  WakeResult result;
  NodeMac& mac = macs_.at(node);
  if (token != mac.token) return result;

  if (mac.phase == Phase::Deferring) {
    resume_or_defer(node, now, result.events);
    return result;
  }
  if (mac.phase != Phase::Countdown) return result;

  // Backoff expired with the medium idle: go on air.
  const Pending& head = mac.queue.front();
  Frame frame;
  frame.id = next_frame_id_++;
  frame.msg = head.msg;
  frame.tx_node = node;
  frame.enqueued_at = head.enqueued_at;
  frame.tx_start = now;
  frame.tx_end = now + airtime(serialized_size_bits(head.msg, params_.protocol), params_.bandwidth_bps);
  frame.origin_position = positions[node];
  for (NodeId other = 0; other < positions.size(); ++other) {
    if (other != node && in_range(frame.origin_position, positions[other], params_.tx_range_m)) {
      frame.listeners.push_back(other);
    }
  }
  mac.phase = Phase::Transmitting;
  mac.frame_id = frame.id;
  ++mac.token;  // nothing else may wake this node while on air
  result.events.push_back({MacEvent::Kind::FrameEnd, node, frame.tx_end, frame.id});

  // Freeze the backoff of every contender that hears this frame. A contender
  // whose countdown ends in this same instant cannot sense it and transmits too.
  for (NodeId listener : frame.listeners) {
    NodeMac& other = macs_[listener];
    if (other.phase != Phase::Countdown || other.wake_time <= now) continue;
    if (now > other.countdown_start) {
      const auto elapsed =
          static_cast<std::uint32_t>(std::floor((now - other.countdown_start) / params_.mac.slot_s + 1e-6));
      other.backoff_remaining -= std::min(elapsed, other.backoff_remaining);
    }
    other.phase = Phase::Deferring;
    result.events.push_back(schedule_wake(listener, frame.tx_end));
  }

  ++in_flight_;
  auto [it, inserted] = frames_.emplace(frame.id, std::move(frame));
  result.started = &it->second;
  return result;
}

Channel::Completion Channel::complete_frame(std::uint64_t frame_id, double now) {
  Completion result;
  Frame& frame = frames_.at(frame_id);
  frame.completed = true;
  --in_flight_;

  std::vector<const Frame*> overlapping;
  for (const auto& [id, other] : frames_) {
    if (id == frame_id) continue;
    if (other.tx_start < frame.tx_end && other.tx_end > frame.tx_start) overlapping.push_back(&other);
  }
  result.receptions = deliver(frame, overlapping, params_.collisions);

  ledger_.charge_tx(frame.tx_node, tx_energy_);
  result.tx_energy = tx_energy_;
  for (const Reception& r : result.receptions) {
    const bool charged = r.outcome == RxOutcome::Received ||
                         (r.outcome == RxOutcome::Collided && params_.charge_collided_rx);
    if (charged) {
      ledger_.charge_rx(r.node, rx_energy());
      ++result.rx_charged;
    }
  }

  NodeMac& mac = macs_[frame.tx_node];
  mac.queue.pop_front();
  mac.phase = Phase::Idle;
  if (!mac.queue.empty()) start_contention(frame.tx_node, now, result.events);

  result.frame = frame;
  prune();
  return result;
}

void Channel::prune() {
  double horizon = INFINITY;
  for (const auto& [id, f] : frames_) {
    if (!f.completed) horizon = std::min(horizon, f.tx_start);
  }
  std::erase_if(frames_, [&](const auto& entry) {
    return entry.second.completed && entry.second.tx_end <= horizon;
  });
}

}  // namespace rnm
