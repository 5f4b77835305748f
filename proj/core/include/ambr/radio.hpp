#ifndef AMBR_RADIO_HPP
#define AMBR_RADIO_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "ambr/event_queue.hpp"
#include "ambr/metrics.hpp"
#include "ambr/mobility.hpp"
#include "ambr/packet.hpp"
#include "ambr/rng.hpp"

namespace ambr {

struct RadioConfig {
  double range = 250.0;        // meters
  double bandwidth = 5000.0;   // bits/second
  double loss_prob = 0.0;
  double propagation_delay = 0.0;
  double ack_timeout_extra = 0.1;  // failure latency = 2*airtime + this
};

// Idealized disk radio: a broadcast reaches exactly the nodes within range at
// start time; per-receiver losses are independent; serialization delay is
// size/bandwidth. No contention or collisions.
class Radio {
 public:
  Radio(const RadioConfig& cfg, EventQueue& kernel, MobilityModel& mobility,
        RngStream& loss_rng, Metrics& metrics);

  void set_handler(std::function<void(int node, const Packet&)> h) { handler_ = std::move(h); }

  std::vector<int> neighbors_of(int node, Time t) const;
  bool in_range(int a, int b, Time t) const;

  double airtime(int size_bytes) const { return size_bytes * 8.0 / cfg_.bandwidth; }

  // Every call counts one transmission against the sender, regardless of how
  // many receivers exist or whether the packet is lost.
  void broadcast(int sender, Packet p);

  // on_result(true) fires at delivery time; on_result(false) fires after the
  // ack timeout when the target was out of range or the packet was lost.
  void unicast(int sender, int target, Packet p, std::function<void(bool)> on_result = {});

  std::uint64_t total_tx() const;
  std::uint64_t tx_of(int node) const { return tx_count_.at(node); }

  const RadioConfig& config() const { return cfg_; }

 private:
  void deliver(int receiver, Packet p, Time at);

  RadioConfig cfg_;
  EventQueue& kernel_;
  MobilityModel& mobility_;
  RngStream& loss_rng_;
  Metrics& metrics_;
  std::function<void(int, const Packet&)> handler_;
  std::vector<std::uint64_t> tx_count_;
};

}  // namespace ambr

#endif
