#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "srsim/units.hpp"

namespace srsim {

struct EventHandle {
  std::uint64_t seq = 0;
  bool valid() const { return seq != 0; }
  void clear() { seq = 0; }
};

/// Min-heap event queue. Events dequeue in nondecreasing timestamp order;
/// equal timestamps dequeue in insertion order (monotonic sequence number).
/// Cancellation is lazy: cancelled sequence numbers are skipped on pop.
template <typename Payload>
class EventQueue {
 public:
  struct Entry {
    Micros at;
    std::uint64_t seq;
    Payload payload;
  };

  Micros now() const { return now_; }
  std::size_t pending() const { return heap_.size() - cancelled_.size(); }

  EventHandle schedule(Micros at, Payload payload)
  {
    if (at < now_) throw std::logic_error("EventQueue: schedule in the past");
    const std::uint64_t seq = ++seq_;
    heap_.push(Entry{at, seq, std::move(payload)});
    return EventHandle{seq};
  }

  void cancel(EventHandle& h)
  {
    if (h.valid()) {
      cancelled_.insert(h.seq);
      h.clear();
    }
  }

  /// Timestamp of the next live event, if any.
  std::optional<Micros> peek_time()
  {
    prune();
    if (heap_.empty()) return std::nullopt;
    return heap_.top().at;
  }

  /// Pops the next live event strictly before `horizon` and advances the
  /// clock to it. Returns nullopt when the queue is drained or the head is
  /// at/after the horizon.
  std::optional<Entry> pop(Micros horizon)
  {
    prune();
    if (heap_.empty() || heap_.top().at >= horizon) return std::nullopt;
    Entry e = heap_.top();
    heap_.pop();
    now_ = e.at;
    return e;
  }

  /// Forces the clock forward (used when the run ends at the horizon).
  void advance_to(Micros t)
  {
    if (t < now_) throw std::logic_error("EventQueue: clock must not go backwards");
    now_ = t;
  }

 private:
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const
    {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  void prune()
  {
    while (!heap_.empty()) {
      auto it = cancelled_.find(heap_.top().seq);
      if (it == cancelled_.end()) break;
      cancelled_.erase(it);
      heap_.pop();
    }
  }

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::uint64_t seq_ = 0;
  Micros now_ = 0;
};

} // namespace srsim
