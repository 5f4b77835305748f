#ifndef AMBR_METRICS_HPP
#define AMBR_METRICS_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "ambr/packet.hpp"

namespace ambr {

struct MetricsReport {
  std::map<PacketKind, std::uint64_t> control_tx;
  std::uint64_t control_tx_total = 0;
  std::uint64_t data_tx = 0;
  std::uint64_t flows_generated = 0;
  std::uint64_t flows_delivered = 0;
  std::vector<int> hop_counts;
  std::vector<double> latencies;
  double overhead_per_node = 0.0;
  double delivery_ratio = 0.0;
};

// Per-run transmission and delivery accounting. record_tx is called exactly
// once per radio transmission, including forwards and lossy sends.
class Metrics {
 public:
  void record_tx(PacketKind kind);
  void record_generated() { ++flows_generated_; }
  void record_delivered(int hops, double latency);

  std::uint64_t control_total() const;
  std::uint64_t data_total() const { return data_tx_; }

  // n = 0 is rejected. The report is a value; the collector may keep counting
  // only in new runs.
  MetricsReport finalize(int n) const;

 private:
  std::map<PacketKind, std::uint64_t> control_tx_;
  std::uint64_t data_tx_ = 0;
  std::uint64_t flows_generated_ = 0;
  std::uint64_t flows_delivered_ = 0;
  std::vector<int> hop_counts_;
  std::vector<double> latencies_;
};

}  // namespace ambr

#endif
