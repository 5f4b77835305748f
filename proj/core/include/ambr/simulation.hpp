#ifndef AMBR_SIMULATION_HPP
#define AMBR_SIMULATION_HPP

#include <memory>
#include <string>
#include <vector>

#include "ambr/ambr_protocol.hpp"
#include "ambr/config.hpp"
#include "ambr/flood_protocol.hpp"
#include "ambr/protocol.hpp"

namespace ambr {

struct RunResult {
  MetricsReport report;
  std::vector<std::string> violations;
  std::uint64_t radio_tx_total = 0;
};

// One complete simulation run: kernel + mobility + radio + one protocol +
// shared traffic generation, all derived deterministically from (cfg, seed).
// Mobility and traffic use their own RNG substreams, so every protocol sees
// identical trajectories and arrivals under the same seed.
class Simulation {
 public:
  Simulation(const SimConfig& cfg, std::uint64_t seed);

  void set_trace_sink(TraceSink sink);
  void set_leg_sink(std::function<void(const LegRecord&)> sink);

  RunResult run();

  // Pre-run access for scripted tests.
  MobilityModel& mobility() { return *mobility_; }
  EventQueue& kernel() { return kernel_; }
  Radio& radio() { return *radio_; }
  Metrics& metrics() { return metrics_; }
  Protocol& protocol() { return *protocol_; }
  AmbrProtocol* ambr() { return dynamic_cast<AmbrProtocol*>(protocol_.get()); }

  // Runs the kernel without scheduling CBR traffic (tests drive send_data).
  RunResult run_without_traffic();

 private:
  void schedule_traffic();
  RunResult finish();

  SimConfig cfg_;
  EventQueue kernel_;
  RngStream mobility_rng_;
  RngStream traffic_rng_;
  RngStream loss_rng_;
  RngStream proto_rng_;
  Metrics metrics_;
  InvariantChecker checker_;
  std::unique_ptr<MobilityModel> mobility_;
  std::unique_ptr<Radio> radio_;
  std::unique_ptr<Protocol> protocol_;
  TraceSink trace_;
};

}  // namespace ambr

#endif
