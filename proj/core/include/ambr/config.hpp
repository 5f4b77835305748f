#ifndef AMBR_CONFIG_HPP
#define AMBR_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ambr {

enum class ProtocolId { Ambr, FloodReactive, FloodReactiveLr, Proactive };

const char* protocol_name(ProtocolId id);
ProtocolId protocol_from_name(const std::string& name);  // throws on unknown

// All run tunables. Defaults reproduce the published simulation parameters
// where a value exists (1300 m x 1300 m arena, 250 m range, 5 kbps, 512 B
// data); everything else is an artifact default.
struct SimConfig {
  double area_width = 1300.0;
  double area_height = 1300.0;
  int n = 50;
  double range = 250.0;
  double bandwidth = 5000.0;  // bits/s
  int data_size = 512;        // bytes
  double v_min = 1.0;
  double v_max = 10.0;
  double pause = 10.0;
  bool randomize_pause = false;
  double sim_time = 200.0;
  double cbr_rate = 10.0;  // packets/s per flow
  int num_flows = 10;
  double traffic_start = 5.0;
  ProtocolId protocol = ProtocolId::Ambr;

  // Monitor protocol knobs
  int monitor_threshold = 5;  // T
  int dl_max = 5;
  double alive_period = 10.0;
  double cache_ttl = 30.0;
  double query_timeout = 2.0;
  double hello_retry = 3.0;
  int hello_max_tries = 5;
  double hello_backoff = 15.0;
  double piggyback_window = 10.0;
  double queue_timeout = 5.0;
  double member_timeout = 25.0;
  double neighbor_timeout = 25.0;

  // Flood-reactive baseline knobs
  int rreq_ttl = 16;
  int repair_ttl = 2;
  double route_timeout = 30.0;
  double rreq_timeout = 2.0;

  // Proactive baseline knobs
  double update_period = 2.0;
  double entry_timeout = 6.0;

  // Radio
  double loss_prob = 0.0;
  double ack_timeout_extra = 0.1;

  std::uint64_t seed = 1;
  int replications = 5;

  // Optional fixed placement (tests / frozen scenarios); empty = uniform.
  std::vector<std::pair<double, double>> initial_positions;

  void validate() const;  // throws std::invalid_argument with the field name
};

// Parses the line-oriented key=value format ('#' comments). Unknown keys and
// out-of-range values raise a diagnostic naming the key and line number.
SimConfig parse_config(std::istream& in);
SimConfig load_config_file(const std::string& path);
void apply_key_value(SimConfig& cfg, const std::string& key, const std::string& value,
                     int line_no = 0);

struct ScenarioPreset {
  std::string name;
  std::string swept_param;
  std::vector<double> values;
  SimConfig base;
  std::vector<ProtocolId> protocols;
};

// fig8-size-sweep | fig9-mobility-sweep | fig10-pause-sweep, with the
// published sweep bindings; throws on unknown name.
ScenarioPreset preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

// Applies one swept value to a copy of the preset base config.
SimConfig bind_sweep_value(const ScenarioPreset& preset, double value);

}  // namespace ambr

#endif
