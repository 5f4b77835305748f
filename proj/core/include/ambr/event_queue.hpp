#ifndef AMBR_EVENT_QUEUE_HPP
#define AMBR_EVENT_QUEUE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ambr {

using Time = double;

// Deterministic discrete-event scheduler. Pending events are ordered by
// (fire_time, insertion seq); equal-time events dispatch in insertion order.
class EventQueue {
 public:
  using Handle = std::uint64_t;

  // Throws std::logic_error if t < now().
  Handle schedule(Time t, std::function<void()> fn);

  // A canceled event never dispatches. Unknown/expired handles are ignored.
  void cancel(Handle h);

  // Dispatches every pending event with fire_time <= t_end, then advances the
  // clock to t_end. Returns the final clock value.
  Time run_until(Time t_end);

  Time now() const { return now_; }
  std::uint64_t dispatched() const { return dispatched_; }
  bool empty() const { return heap_.size() == canceled_.size(); }

 private:
  struct Entry {
    Time t;
    std::uint64_t seq;
    Handle id;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.t != b.t) return a.t > b.t;
      return a.seq > b.seq;
    }
  };

  Time now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::unordered_map<Handle, std::function<void()>> actions_;
  std::unordered_set<Handle> canceled_;
};

}  // namespace ambr

#endif
