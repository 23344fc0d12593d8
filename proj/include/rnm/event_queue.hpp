#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "rnm/core_model.hpp"

namespace rnm {

enum class EventKind : std::uint8_t { MobilityTick, Originate, FrameEnd, MacSlot, ProtocolTimer };

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;  // insertion order, breaks ties
  EventKind kind = EventKind::MobilityTick;
  NodeId node = 0;
  std::uint64_t token = 0;  // MAC wake generation, frame id, timer id, or message seq
  MessageKey key;           // ProtocolTimer only
};

/// Min-heap on (time, seq): a total, deterministic execution order.
class EventQueue {
 public:
  void push(Event e) {
    e.seq = next_seq_++;
    heap_.push(e);
  }
  [[nodiscard]] bool empty() const noexcept { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return heap_.size(); }
  [[nodiscard]] const Event& top() const { return heap_.top(); }
  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace rnm
