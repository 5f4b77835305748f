#include "ambr/simulation.hpp"

namespace ambr {

Simulation::Simulation(const SimConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      mobility_rng_(seed, "mobility"),
      traffic_rng_(seed, "traffic"),
      loss_rng_(seed, "loss"),
      proto_rng_(seed, "protocol-jitter") {
  cfg_.validate();
  MobilityConfig mc;
  mc.width = cfg_.area_width;
  mc.height = cfg_.area_height;
  mc.n = cfg_.n;
  mc.v_min = cfg_.v_min;
  mc.v_max = cfg_.v_max;
  mc.pause = cfg_.pause;
  mc.randomize_pause = cfg_.randomize_pause;
  for (auto [x, y] : cfg_.initial_positions) mc.initial_positions.push_back({x, y});
  mobility_ = std::make_unique<MobilityModel>(mc, kernel_, mobility_rng_);

  RadioConfig rc;
  rc.range = cfg_.range;
  rc.bandwidth = cfg_.bandwidth;
  rc.loss_prob = cfg_.loss_prob;
  rc.ack_timeout_extra = cfg_.ack_timeout_extra;
  radio_ = std::make_unique<Radio>(rc, kernel_, *mobility_, loss_rng_, metrics_);

  SimContext ctx{cfg_, kernel_, *mobility_, *radio_, metrics_, proto_rng_, checker_, &trace_};
  switch (cfg_.protocol) {
    case ProtocolId::Ambr:
      protocol_ = std::make_unique<AmbrProtocol>(ctx);
      break;
    case ProtocolId::FloodReactive:
      protocol_ = std::make_unique<FloodReactiveProtocol>(ctx, false);
      break;
    case ProtocolId::FloodReactiveLr:
      protocol_ = std::make_unique<FloodReactiveProtocol>(ctx, true);
      break;
    case ProtocolId::Proactive:
      protocol_ = std::make_unique<ProactiveProtocol>(ctx);
      break;
  }
  radio_->set_handler([this](int node, const Packet& p) { protocol_->on_packet(node, p); });
}

void Simulation::set_trace_sink(TraceSink sink) { trace_ = std::move(sink); }

void Simulation::set_leg_sink(std::function<void(const LegRecord&)> sink) {
  mobility_->set_leg_sink(std::move(sink));
}

void Simulation::schedule_traffic() {
  double period = 1.0 / cfg_.cbr_rate;
  for (int f = 0; f < cfg_.num_flows; ++f) {
    int src = static_cast<int>(traffic_rng_.uniform_int(0, cfg_.n - 1));
    int dst = static_cast<int>(traffic_rng_.uniform_int(0, cfg_.n - 2));
    if (dst >= src) ++dst;
    double t = cfg_.traffic_start + traffic_rng_.uniform(0.0, period);
    while (t < cfg_.sim_time) {
      kernel_.schedule(t, [this, src, dst] {
        metrics_.record_generated();
        protocol_->send_data(src, dst);
      });
      t += period;
    }
  }
}

RunResult Simulation::finish() {
  RunResult r;
  r.report = metrics_.finalize(cfg_.n);
  r.radio_tx_total = radio_->total_tx();
  // Cross-module reconciliation: every transmission incremented exactly one
  // metrics counter.
  checker_.check(r.report.control_tx_total + r.report.data_tx == r.radio_tx_total,
                 "metrics totals disagree with radio transmission counters");
  r.violations = checker_.violations();
  return r;
}

RunResult Simulation::run() {
  mobility_->start();
  protocol_->start();
  schedule_traffic();
  kernel_.run_until(cfg_.sim_time);
  return finish();
}

RunResult Simulation::run_without_traffic() {
  mobility_->start();
  protocol_->start();
  kernel_.run_until(cfg_.sim_time);
  return finish();
}

}  // namespace ambr
