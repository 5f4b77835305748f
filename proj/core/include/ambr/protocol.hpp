#ifndef AMBR_PROTOCOL_HPP
#define AMBR_PROTOCOL_HPP

#include <cstdio>
#include <string>
#include <vector>

#include "ambr/config.hpp"
#include "ambr/event_queue.hpp"
#include "ambr/metrics.hpp"
#include "ambr/mobility.hpp"
#include "ambr/packet.hpp"
#include "ambr/radio.hpp"
#include "ambr/rng.hpp"

namespace ambr {

// Accumulates protocol-invariant violations; a clean run ends with none.
class InvariantChecker {
 public:
  template <typename... Args>
  void fail(const char* fmt, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    violations_.push_back(buf);
  }
  void check(bool ok, const char* what) {
    if (!ok) violations_.push_back(what);
  }
  const std::vector<std::string>& violations() const { return violations_; }
  bool clean() const { return violations_.empty(); }

 private:
  std::vector<std::string> violations_;
};

struct TraceRow {
  Time t;
  int node;
  PacketKind kind;
  const char* action;  // send | recv | drop | elect | demote | repair
};

using TraceSink = std::function<void(const TraceRow&)>;

struct SimContext {
  const SimConfig& cfg;
  EventQueue& kernel;
  MobilityModel& mobility;
  Radio& radio;
  Metrics& metrics;
  RngStream& proto_rng;
  InvariantChecker& checker;
  const TraceSink* trace = nullptr;  // owned by the simulation; may be empty
};

// Event-driven node state machine shared interface. The traffic generator
// calls send_data; the radio calls on_packet through the simulation.
class Protocol {
 public:
  explicit Protocol(SimContext ctx) : ctx_(std::move(ctx)) {}
  virtual ~Protocol() = default;

  virtual void start() = 0;
  virtual void on_packet(int node, const Packet& p) = 0;
  virtual void send_data(int source, int destination) = 0;
  virtual std::string name() const = 0;

 protected:
  void trace(int node, PacketKind kind, const char* action) {
    if (ctx_.trace && *ctx_.trace) (*ctx_.trace)({ctx_.kernel.now(), node, kind, action});
  }

  SimContext ctx_;
};

}  // namespace ambr

#endif
