#include "rnm/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace rnm {

namespace {

MobilityState place(const ScenarioConfig& config) {
  config.validate();
  Rng rng(config.rng_seed, kMobilityStream);
  return initial_placement(config, rng, Simulation::kFirstVehicle);
}

}  // namespace

void RunMetrics::finalize() {
  const auto originated = static_cast<double>(messages.size());
  std::size_t delivered = 0;
  double retrans = 0.0;
  double energy = 0.0;
  double delay = 0.0;
  for (const MessageRecord& m : messages) {
    retrans += m.retransmitter_count;
    if (!m.delivered) continue;
    ++delivered;
    energy += m.energy_total;
    delay += m.delay();
  }
  delivery_ratio = originated > 0 ? static_cast<double>(delivered) / originated : 0.0;
  mean_retransmitters = originated > 0 ? retrans / originated : 0.0;
  if (delivered > 0) {
    mean_energy_per_delivered = energy / static_cast<double>(delivered);
    mean_delay_per_delivered = delay / static_cast<double>(delivered);
  } else {
    mean_energy_per_delivered.reset();
    mean_delay_per_delivered.reset();
  }
}

Simulation::Simulation(const ScenarioConfig& config) : Simulation(config, place(config)) {}

Simulation::Simulation(const ScenarioConfig& config, MobilityState initial)
    : config_(config),
      mobility_(std::move(initial)),
      channel_(ChannelParams::from(config), kFirstVehicle + mobility_.vehicles.size(), config.rng_seed) {
  config_.validate();
  for (std::size_t i = 0; i < mobility_.vehicles.size(); ++i) {
    if (mobility_.vehicles[i].node_id != kFirstVehicle + i) {
      throw std::invalid_argument("Simulation: vehicle node ids must be kFirstVehicle + index");
    }
  }
  const std::size_t n = kFirstVehicle + mobility_.vehicles.size();
  const ProtocolParams params = ProtocolParams::from(config_);
  protocols_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) protocols_.push_back(make_protocol(config_.protocol, params));
  timers_.resize(n);
  positions_.resize(n);
}

void Simulation::refresh_positions(double now) {
  if (now == positions_time_) return;
  positions_[kInitiator] = config_.risk_zone.centroid();
  positions_[kObserver] = config_.target_zone_point;
  const double dt = config_.mobility.frozen ? 0.0 : now - mobility_.time;
  for (std::size_t i = 0; i < mobility_.vehicles.size(); ++i) {
    positions_[kFirstVehicle + i] = extrapolate(mobility_.vehicles[i], dt, mobility_.highway_length_m);
  }
  positions_time_ = now;
}

NodeContext Simulation::context(NodeId node, double now) {
  refresh_positions(now);
  NodeContext ctx;
  ctx.self = node;
  ctx.position = positions_[node];
  ctx.now = now;
  ctx.is_sink = node == kObserver;
  if (node >= kFirstVehicle) {
    Vehicle v = mobility_.vehicles[node - kFirstVehicle];
    v.position = ctx.position;
    ctx.toward_risk = heads_toward_risk_zone(v, config_.risk_zone);
  }
  return ctx;
}

std::size_t Simulation::message_index(const MessageKey& key) const {
  if (key.sequence_number == 0 || key.sequence_number > metrics_.messages.size()) {
    throw std::logic_error("message key outside the run's sequence range");
  }
  return key.sequence_number - 1;
}

void Simulation::push(Event e) {
  if (e.kind != EventKind::MobilityTick) ++live_protocol_events_;
  queue_.push(e);
}

void Simulation::push_mac(const std::vector<MacEvent>& events) {
  for (const MacEvent& m : events) {
    Event e;
    e.time = m.time;
    e.kind = m.kind == MacEvent::Kind::Wake ? EventKind::MacSlot : EventKind::FrameEnd;
    e.node = m.node;
    e.token = m.token;
    push(e);
  }
}

void Simulation::apply(NodeId node, const Actions& actions, double now) {
  auto& timers = timers_[node];
  for (const Action& action : actions) {
    if (const auto* s = std::get_if<ScheduleTimer>(&action)) {
      const std::uint64_t id = ++next_timer_id_;
      std::erase_if(timers, [&](const auto& t) { return t.first == s->key; });
      timers.emplace_back(s->key, id);
      Event e;
      e.time = now + s->delay;
      e.kind = EventKind::ProtocolTimer;
      e.node = node;
      e.token = id;
      e.key = s->key;
      push(e);
    } else if (const auto* c = std::get_if<CancelTimer>(&action)) {
      std::erase_if(timers, [&](const auto& t) { return t.first == c->key; });
    } else if (const auto* b = std::get_if<EnqueueBroadcast>(&action)) {
      auto result = channel_.enqueue_broadcast(node, b->msg, now);
      if (observer_) observer_->on_enqueue(node, now, b->msg, channel_.queue_length(node), result.accepted);
      push_mac(result.events);
    } else if (const auto* d = std::get_if<DeliverToApp>(&action)) {
      MessageRecord& rec = metrics_.messages[message_index(d->key)];
      ++rec.informed_nodes;
      if (node == kObserver && !rec.delivered) {
        rec.delivered = true;
        rec.first_arrival_at_target = now;
        rec.hops_at_target = d->hops_remaining;
      }
      if (observer_) observer_->on_deliver(node, now, d->key, d->hops_remaining);
    }
  }
}

RunMetrics Simulation::run() {
  if (ran_) throw std::logic_error("Simulation::run called twice");
  ran_ = true;

  metrics_.messages.resize(config_.messages_total);
  for (std::uint32_t i = 0; i < config_.messages_total; ++i) {
    metrics_.messages[i].seq = i + 1;
    metrics_.messages[i].originated_at = i * config_.message_interval_s;
  }
  metrics_.tx_energy_per_frame = tx_energy(config_.tx_range_m);

  // Originations are generated lazily, one outstanding at a time.
  Event first;
  first.time = 0.0;
  first.kind = EventKind::Originate;
  first.token = 1;
  push(first);
  std::uint64_t tick_index = 0;
  if (!config_.mobility.frozen) {
    Event tick;
    tick.time = config_.mobility.tick_s;
    tick.kind = EventKind::MobilityTick;
    queue_.push(tick);
  }
  if (observer_) observer_->on_mobility(0.0, mobility_);

  const double horizon = config_.horizon_s();
  bool all_originated = false;

  while (!queue_.empty()) {
    if (all_originated && live_protocol_events_ == 0) break;
    Event e = queue_.pop();
    if (e.time > horizon) break;
    if (e.kind != EventKind::MobilityTick) --live_protocol_events_;
    ++metrics_.events_processed;
    const double now = e.time;

    switch (e.kind) {
      case EventKind::MobilityTick: {
        mobility_ = advance(std::move(mobility_), config_.mobility.tick_s, config_.mobility);
        ++tick_index;
        // Re-anchor on the tick grid to avoid accumulating rounding.
        mobility_.time = static_cast<double>(tick_index) * config_.mobility.tick_s;
        positions_time_ = -1.0;
        if (observer_) observer_->on_mobility(now, mobility_);
        Event next;
        next.time = static_cast<double>(tick_index + 1) * config_.mobility.tick_s;
        next.kind = EventKind::MobilityTick;
        queue_.push(next);
        break;
      }
      case EventKind::Originate: {
        const auto seq = static_cast<std::uint32_t>(e.token);
        refresh_positions(now);
        const RiskNotificationMessage msg = originate(config_, seq, 0.0, kInitiator, positions_[kInitiator]);
        apply(kInitiator, protocols_[kInitiator]->on_originate(context(kInitiator, now), msg), now);
        if (seq < config_.messages_total) {
          Event next;
          next.time = seq * config_.message_interval_s;
          next.kind = EventKind::Originate;
          next.token = seq + 1;
          push(next);
        } else {
          all_originated = true;
        }
        break;
      }
      case EventKind::MacSlot: {
        refresh_positions(now);
        auto result = channel_.on_wake(e.node, e.token, now, positions_);
        if (result.started) {
          ++metrics_.frames_sent;
          const MessageKey key = message_key(result.started->msg);
          if (e.node != kInitiator) ++metrics_.messages[message_index(key)].retransmitter_count;
          if (observer_) observer_->on_frame_start(*result.started);
        }
        push_mac(result.events);
        break;
      }
      case EventKind::FrameEnd: {
        auto done = channel_.complete_frame(e.token, now);
        MessageRecord& rec = metrics_.messages[message_index(message_key(done.frame.msg))];
        rec.energy_total += done.tx_energy + done.rx_charged * rx_energy();
        push_mac(done.events);
        if (observer_) observer_->on_frame_end(done.frame, done.receptions);
        for (const Reception& r : done.receptions) {
          if (r.outcome != RxOutcome::Received) {
            if (r.outcome == RxOutcome::Collided) ++metrics_.collided_receptions;
            continue;
          }
          apply(r.node, protocols_[r.node]->on_receive(context(r.node, now), done.frame.msg), now);
        }
        break;
      }
      case EventKind::ProtocolTimer: {
        auto& timers = timers_[e.node];
        auto it = std::find_if(timers.begin(), timers.end(), [&](const auto& t) { return t.first == e.key; });
        if (it == timers.end() || it->second != e.token) break;  // cancelled
        timers.erase(it);
        apply(e.node, protocols_[e.node]->on_timer(context(e.node, now), e.key), now);
        break;
      }
    }
  }

  metrics_.queue_drops = channel_.drops();
  for (const auto& p : protocols_) {
    metrics_.anomalies += p->anomalies();
    if (const auto* r = dynamic_cast<const RnmdpNode*>(p.get())) metrics_.clamped_distances += r->clamped_distances();
  }
  metrics_.ledger_energy = channel_.ledger().total();
  metrics_.ledger_tx_events = channel_.ledger().tx_events();
  metrics_.ledger_rx_events = channel_.ledger().rx_events();
  metrics_.finalize();
  return std::move(metrics_);
}

RunMetrics run(const ScenarioConfig& config) {
  Simulation sim(config);
  return sim.run();
}

AveragedMetrics average(std::vector<RunMetrics> runs) {
  AveragedMetrics out;
  out.seeds = static_cast<std::uint32_t>(runs.size());
  if (runs.empty()) return out;
  double energy = 0.0;
  double delay = 0.0;
  std::size_t with_delivery = 0;
  for (const RunMetrics& r : runs) {
    out.delivery_ratio += r.delivery_ratio;
    out.mean_retransmitters += r.mean_retransmitters;
    out.drops += r.queue_drops;
    if (r.mean_energy_per_delivered) {
      ++with_delivery;
      energy += *r.mean_energy_per_delivered;
      delay += *r.mean_delay_per_delivered;
    }
  }
  const auto n = static_cast<double>(runs.size());
  out.delivery_ratio /= n;
  out.mean_retransmitters /= n;
  if (with_delivery > 0) {
    out.energy_per_delivered = energy / static_cast<double>(with_delivery);
    out.delay_per_delivered = delay / static_cast<double>(with_delivery);
  }
  out.per_seed = std::move(runs);
  return out;
}

AveragedMetrics run_averaged(const ScenarioConfig& config, std::uint32_t n_seeds) {
  if (n_seeds == 0) throw std::invalid_argument("run_averaged: n_seeds must be at least 1");
  std::vector<RunMetrics> runs;
  runs.reserve(n_seeds);
  for (std::uint32_t i = 0; i < n_seeds; ++i) {
    ScenarioConfig c = config;
    c.rng_seed = config.rng_seed + i;
    runs.push_back(run(c));
  }
  return average(std::move(runs));
}

}  // namespace rnm
