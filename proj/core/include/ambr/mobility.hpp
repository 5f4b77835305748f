#ifndef AMBR_MOBILITY_HPP
#define AMBR_MOBILITY_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ambr/event_queue.hpp"
#include "ambr/rng.hpp"

namespace ambr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct MobilityConfig {
  double width = 1300.0;
  double height = 1300.0;
  int n = 50;
  double v_min = 1.0;
  double v_max = 10.0;          // 0 disables movement entirely
  double pause = 10.0;
  bool randomize_pause = false; // uniform in [0, 2p] instead of exactly p
  // When set, overrides uniform random initial placement.
  std::vector<Vec2> initial_positions;
};

// One scripted movement leg, used by tests to force topology changes.
struct ScriptedLeg {
  int node = 0;
  Time depart = 0.0;
  Vec2 target;
  double speed = 1.0;
};

// Record of one completed or in-progress leg, for trajectory dumps.
struct LegRecord {
  int node;
  Time depart;
  Vec2 origin;
  Vec2 target;
  double speed;
};

// Random-waypoint movement inside the rectangular arena. Each node alternates
// pause periods with straight constant-speed legs to uniform random targets.
class MobilityModel {
 public:
  MobilityModel(const MobilityConfig& cfg, EventQueue& kernel, RngStream& rng);

  // Samples initial positions (unless given) and schedules the first legs.
  void start();

  // Replaces random-waypoint behavior with an explicit leg script; nodes not
  // mentioned stay put. Call before start().
  void set_script(std::vector<ScriptedLeg> legs);

  void set_leg_sink(std::function<void(const LegRecord&)> sink) { leg_sink_ = std::move(sink); }

  Vec2 position_at(int node, Time t) const;
  int node_count() const { return cfg_.n; }
  const MobilityConfig& config() const { return cfg_; }

 private:
  struct NodeState {
    bool moving = false;
    Vec2 origin;       // segment start point (also the paused position)
    Vec2 target;
    double speed = 0.0;
    Time depart = 0.0;
    Time arrive = 0.0;
  };

  void begin_pause(int node);
  void begin_leg(int node);
  void run_script(int node, std::size_t idx);

  MobilityConfig cfg_;
  EventQueue& kernel_;
  RngStream& rng_;
  std::vector<NodeState> nodes_;
  bool scripted_ = false;
  std::vector<std::vector<ScriptedLeg>> script_;
  std::function<void(const LegRecord&)> leg_sink_;
};

}  // namespace ambr

#endif
