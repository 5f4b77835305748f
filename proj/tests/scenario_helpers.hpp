#ifndef AMBR_TESTS_SCENARIO_HELPERS_HPP
#define AMBR_TESTS_SCENARIO_HELPERS_HPP

#include <utility>
#include <vector>

#include "ambr/simulation.hpp"

namespace helpers {

using Positions = std::vector<std::pair<double, double>>;

// Six mutually-in-range nodes around a center; tight enough (radius <= 8.5 m)
// that any member can win the election without changing reachability.
inline void add_cluster(Positions& out, double cx, double cy) {
  out.push_back({cx, cy});
  out.push_back({cx + 8, cy});
  out.push_back({cx - 8, cy});
  out.push_back({cx, cy + 8});
  out.push_back({cx, cy - 8});
  out.push_back({cx + 6, cy + 6});
}

inline ambr::SimConfig static_config(Positions positions, double sim_time) {
  ambr::SimConfig cfg;
  cfg.n = static_cast<int>(positions.size());
  cfg.v_min = 0.0;
  cfg.v_max = 0.0;
  cfg.loss_prob = 0.0;
  cfg.sim_time = sim_time;
  cfg.initial_positions = std::move(positions);
  return cfg;
}

// True when the current monitor set is exactly one per expected center, each
// within 50 m of it.
inline bool monitors_near(ambr::Simulation& sim, const std::vector<ambr::Vec2>& centers,
                          double t) {
  ambr::AmbrProtocol* p = sim.ambr();
  if (!p) return false;
  std::vector<int> ms = p->current_monitors();
  if (ms.size() != centers.size()) return false;
  std::vector<bool> used(centers.size(), false);
  for (int m : ms) {
    ambr::Vec2 pos = sim.mobility().position_at(m, t);
    bool matched = false;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (!used[i] && ambr::dist(pos, centers[i]) < 50.0) {
        used[i] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace helpers

#endif
