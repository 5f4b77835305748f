#include "ambr/radio.hpp"

namespace ambr {

Radio::Radio(const RadioConfig& cfg, EventQueue& kernel, MobilityModel& mobility,
             RngStream& loss_rng, Metrics& metrics)
    : cfg_(cfg),
      kernel_(kernel),
      mobility_(mobility),
      loss_rng_(loss_rng),
      metrics_(metrics),
      tx_count_(mobility.node_count(), 0) {}

bool Radio::in_range(int a, int b, Time t) const {
  return dist(mobility_.position_at(a, t), mobility_.position_at(b, t)) <= cfg_.range;
}

std::vector<int> Radio::neighbors_of(int node, Time t) const {
  std::vector<int> out;
  for (int u = 0; u < mobility_.node_count(); ++u)
    if (u != node && in_range(node, u, t)) out.push_back(u);
  return out;
}

void Radio::deliver(int receiver, Packet p, Time at) {
  kernel_.schedule(at, [this, receiver, p = std::move(p)] {
    if (handler_) handler_(receiver, p);
  });
}

void Radio::broadcast(int sender, Packet p) {
  metrics_.record_tx(p.kind);
  ++tx_count_[sender];
  p.from = sender;
  Time now = kernel_.now();
  Time at = now + airtime(p.size_bytes) + cfg_.propagation_delay;
  for (int u : neighbors_of(sender, now)) {
    if (cfg_.loss_prob > 0.0 && loss_rng_.bernoulli(cfg_.loss_prob)) continue;
    deliver(u, p, at);
  }
}

void Radio::unicast(int sender, int target, Packet p, std::function<void(bool)> on_result) {
  metrics_.record_tx(p.kind);
  ++tx_count_[sender];
  p.from = sender;
  Time now = kernel_.now();
  double air = airtime(p.size_bytes);
  bool ok = in_range(sender, target, now) &&
            !(cfg_.loss_prob > 0.0 && loss_rng_.bernoulli(cfg_.loss_prob));
  if (ok) {
    Time at = now + air + cfg_.propagation_delay;
    deliver(target, std::move(p), at);
    if (on_result) kernel_.schedule(at, [cb = std::move(on_result)] { cb(true); });
  } else if (on_result) {
    Time at = now + 2.0 * air + cfg_.ack_timeout_extra;
    kernel_.schedule(at, [cb = std::move(on_result)] { cb(false); });
  }
}

std::uint64_t Radio::total_tx() const {
  std::uint64_t total = 0;
  for (auto c : tx_count_) total += c;
  return total;
}

}  // namespace ambr
