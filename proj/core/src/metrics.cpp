#include "ambr/metrics.hpp"

#include <stdexcept>

namespace ambr {

void Metrics::record_tx(PacketKind kind) {
  if (classify(kind) == PacketClass::Control)
    ++control_tx_[kind];
  else
    ++data_tx_;
}

void Metrics::record_delivered(int hops, double latency) {
  ++flows_delivered_;
  hop_counts_.push_back(hops);
  latencies_.push_back(latency);
}

std::uint64_t Metrics::control_total() const {
  std::uint64_t total = 0;
  for (const auto& [kind, count] : control_tx_) total += count;
  return total;
}

MetricsReport Metrics::finalize(int n) const {
  if (n <= 0) throw std::invalid_argument("Metrics::finalize: n must be positive");
  MetricsReport r;
  r.control_tx = control_tx_;
  r.control_tx_total = control_total();
  r.data_tx = data_tx_;
  r.flows_generated = flows_generated_;
  r.flows_delivered = flows_delivered_;
  r.hop_counts = hop_counts_;
  r.latencies = latencies_;
  r.overhead_per_node = static_cast<double>(r.control_tx_total) / n;
  r.delivery_ratio = flows_generated_ == 0
                         ? 0.0
                         : static_cast<double>(flows_delivered_) / flows_generated_;
  return r;
}

}  // namespace ambr
