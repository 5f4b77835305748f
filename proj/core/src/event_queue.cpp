#include "ambr/event_queue.hpp"

#include <stdexcept>
#include <utility>

namespace ambr {

EventQueue::Handle EventQueue::schedule(Time t, std::function<void()> fn) {
  if (t < now_) throw std::logic_error("EventQueue::schedule: fire time in the past");
  Handle id = next_seq_;
  heap_.push(Entry{t, next_seq_, id});
  actions_.emplace(id, std::move(fn));
  ++next_seq_;
  return id;
}

void EventQueue::cancel(Handle h) {
  if (actions_.count(h)) canceled_.insert(h);
}

Time EventQueue::run_until(Time t_end) {
  if (t_end < now_) throw std::logic_error("EventQueue::run_until: t_end before clock");
  while (!heap_.empty() && heap_.top().t <= t_end) {
    Entry e = heap_.top();
    heap_.pop();
    auto it = actions_.find(e.id);
    if (it == actions_.end()) continue;
    std::function<void()> fn = std::move(it->second);
    actions_.erase(it);
    if (canceled_.erase(e.id)) continue;
    now_ = e.t;
    ++dispatched_;
    fn();
  }
  now_ = t_end;
  return now_;
}

}  // namespace ambr
