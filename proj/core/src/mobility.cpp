#include "ambr/mobility.hpp"

#include <algorithm>
#include <stdexcept>

namespace ambr {

MobilityModel::MobilityModel(const MobilityConfig& cfg, EventQueue& kernel, RngStream& rng)
    : cfg_(cfg), kernel_(kernel), rng_(rng), nodes_(cfg.n), script_(cfg.n) {}

void MobilityModel::set_script(std::vector<ScriptedLeg> legs) {
  scripted_ = true;
  for (auto& l : legs) script_[l.node].push_back(l);
  for (auto& s : script_)
    std::stable_sort(s.begin(), s.end(),
                     [](const ScriptedLeg& a, const ScriptedLeg& b) { return a.depart < b.depart; });
}

void MobilityModel::start() {
  for (int i = 0; i < cfg_.n; ++i) {
    Vec2 p;
    if (!cfg_.initial_positions.empty())
      p = cfg_.initial_positions.at(i);
    else
      p = {rng_.uniform(0.0, cfg_.width), rng_.uniform(0.0, cfg_.height)};
    nodes_[i].moving = false;
    nodes_[i].origin = p;
    nodes_[i].target = p;
  }
  if (scripted_) {
    for (int i = 0; i < cfg_.n; ++i)
      if (!script_[i].empty()) {
        int node = i;
        kernel_.schedule(script_[i][0].depart, [this, node] { run_script(node, 0); });
      }
    return;
  }
  if (cfg_.v_max <= 0.0) return;  // static topology
  for (int i = 0; i < cfg_.n; ++i) begin_pause(i);
}

void MobilityModel::run_script(int node, std::size_t idx) {
  const ScriptedLeg& leg = script_[node][idx];
  NodeState& s = nodes_[node];
  Vec2 from = position_at(node, kernel_.now());
  double d = dist(from, leg.target);
  s.moving = true;
  s.origin = from;
  s.target = leg.target;
  s.speed = leg.speed;
  s.depart = kernel_.now();
  s.arrive = kernel_.now() + (leg.speed > 0.0 ? d / leg.speed : 0.0);
  if (leg_sink_) leg_sink_({node, s.depart, s.origin, s.target, s.speed});
  Time arrive = s.arrive;
  kernel_.schedule(arrive, [this, node, idx] {
    NodeState& st = nodes_[node];
    st.moving = false;
    st.origin = st.target;
    if (idx + 1 < script_[node].size()) {
      Time next = std::max(script_[node][idx + 1].depart, kernel_.now());
      kernel_.schedule(next, [this, node, idx] { run_script(node, idx + 1); });
    }
  });
}

void MobilityModel::begin_pause(int node) {
  NodeState& s = nodes_[node];
  s.moving = false;
  s.origin = s.target;
  double p = cfg_.randomize_pause ? rng_.uniform(0.0, 2.0 * cfg_.pause) : cfg_.pause;
  kernel_.schedule(kernel_.now() + p, [this, node] { begin_leg(node); });
}

void MobilityModel::begin_leg(int node) {
  NodeState& s = nodes_[node];
  Vec2 target{rng_.uniform(0.0, cfg_.width), rng_.uniform(0.0, cfg_.height)};
  double speed = cfg_.v_min == cfg_.v_max ? cfg_.v_max : rng_.uniform(cfg_.v_min, cfg_.v_max);
  if (speed <= 0.0) speed = cfg_.v_max;
  double d = dist(s.origin, target);
  s.moving = true;
  s.target = target;
  s.speed = speed;
  s.depart = kernel_.now();
  s.arrive = kernel_.now() + d / speed;
  if (leg_sink_) leg_sink_({node, s.depart, s.origin, s.target, s.speed});
  kernel_.schedule(s.arrive, [this, node] { begin_pause(node); });
}

Vec2 MobilityModel::position_at(int node, Time t) const {
  const NodeState& s = nodes_.at(node);
  if (!s.moving || t <= s.depart) return s.origin;
  if (t >= s.arrive) return s.target;
  double f = (t - s.depart) / (s.arrive - s.depart);
  return {s.origin.x + f * (s.target.x - s.origin.x),
          s.origin.y + f * (s.target.y - s.origin.y)};
}

}  // namespace ambr
