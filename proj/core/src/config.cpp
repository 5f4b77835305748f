#include "ambr/config.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace ambr {

const char* protocol_name(ProtocolId id) {
  switch (id) {
    case ProtocolId::Ambr: return "ambr";
    case ProtocolId::FloodReactive: return "flood-reactive";
    case ProtocolId::FloodReactiveLr: return "flood-reactive-lr";
    case ProtocolId::Proactive: return "proactive";
  }
  return "?";
}

ProtocolId protocol_from_name(const std::string& name) {
  if (name == "ambr") return ProtocolId::Ambr;
  if (name == "flood-reactive") return ProtocolId::FloodReactive;
  if (name == "flood-reactive-lr") return ProtocolId::FloodReactiveLr;
  if (name == "proactive") return ProtocolId::Proactive;
  throw std::invalid_argument("unknown protocol: " + name);
}

namespace {

[[noreturn]] void bad(const std::string& key, int line_no, const std::string& why) {
  std::ostringstream os;
  os << "config error";
  if (line_no > 0) os << " (line " << line_no << ")";
  os << ": key '" << key << "': " << why;
  throw std::invalid_argument(os.str());
}

double parse_num(const std::string& key, const std::string& v, int line_no) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing junk");
    return d;
  } catch (const std::exception&) {
    bad(key, line_no, "not a number: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v, int line_no) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, line_no, "not a boolean: '" + v + "'");
}

}  // namespace

void apply_key_value(SimConfig& cfg, const std::string& key, const std::string& value,
                     int line_no) {
  auto num = [&] { return parse_num(key, value, line_no); };
  if (key == "area_width") cfg.area_width = num();
  else if (key == "area_height") cfg.area_height = num();
  else if (key == "n") cfg.n = static_cast<int>(num());
  else if (key == "range") cfg.range = num();
  else if (key == "bandwidth") cfg.bandwidth = num();
  else if (key == "data_size") cfg.data_size = static_cast<int>(num());
  else if (key == "v_min") cfg.v_min = num();
  else if (key == "v_max") cfg.v_max = num();
  else if (key == "pause") cfg.pause = num();
  else if (key == "randomize_pause") cfg.randomize_pause = parse_bool(key, value, line_no);
  else if (key == "sim_time") cfg.sim_time = num();
  else if (key == "cbr_rate") cfg.cbr_rate = num();
  else if (key == "num_flows") cfg.num_flows = static_cast<int>(num());
  else if (key == "traffic_start") cfg.traffic_start = num();
  else if (key == "protocol") {
    try {
      cfg.protocol = protocol_from_name(value);
    } catch (const std::exception&) {
      bad(key, line_no, "unknown protocol '" + value + "'");
    }
  }
  else if (key == "monitor_threshold") cfg.monitor_threshold = static_cast<int>(num());
  else if (key == "dl_max") cfg.dl_max = static_cast<int>(num());
  else if (key == "alive_period") cfg.alive_period = num();
  else if (key == "cache_ttl") cfg.cache_ttl = num();
  else if (key == "query_timeout") cfg.query_timeout = num();
  else if (key == "hello_retry") cfg.hello_retry = num();
  else if (key == "hello_max_tries") cfg.hello_max_tries = static_cast<int>(num());
  else if (key == "hello_backoff") cfg.hello_backoff = num();
  else if (key == "piggyback_window") cfg.piggyback_window = num();
  else if (key == "queue_timeout") cfg.queue_timeout = num();
  else if (key == "member_timeout") cfg.member_timeout = num();
  else if (key == "neighbor_timeout") cfg.neighbor_timeout = num();
  else if (key == "rreq_ttl") cfg.rreq_ttl = static_cast<int>(num());
  else if (key == "repair_ttl") cfg.repair_ttl = static_cast<int>(num());
  else if (key == "route_timeout") cfg.route_timeout = num();
  else if (key == "rreq_timeout") cfg.rreq_timeout = num();
  else if (key == "update_period") cfg.update_period = num();
  else if (key == "entry_timeout") cfg.entry_timeout = num();
  else if (key == "loss_prob") cfg.loss_prob = num();
  else if (key == "ack_timeout_extra") cfg.ack_timeout_extra = num();
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(num());
  else if (key == "replications") cfg.replications = static_cast<int>(num());
  else bad(key, line_no, "unknown key");
}

void SimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config error: ") + what);
  };
  require(area_width > 0.0 && area_height > 0.0, "area dimensions must be positive");
  require(n > 0, "n must be positive");
  require(range > 0.0, "range must be positive");
  require(bandwidth > 0.0, "bandwidth must be positive");
  require(data_size > 0, "data_size must be positive");
  require(v_min >= 0.0 && v_max >= 0.0, "v_min and v_max must be nonnegative");
  require(v_min <= v_max, "v_min must not exceed v_max");
  require(pause >= 0.0, "pause must be nonnegative");
  require(sim_time > 0.0, "sim_time must be positive");
  require(cbr_rate > 0.0, "cbr_rate must be positive");
  require(num_flows > 0, "num_flows must be positive");
  require(monitor_threshold > 0, "monitor_threshold must be positive");
  require(dl_max >= 0, "dl_max must be nonnegative");
  require(alive_period > 0.0, "alive_period must be positive");
  require(rreq_ttl >= 1, "rreq_ttl must be >= 1");
  require(update_period > 0.0, "update_period must be positive");
  require(loss_prob >= 0.0 && loss_prob <= 1.0, "loss_prob must be in [0,1]");
  require(replications >= 1, "replications must be >= 1");
  if (!initial_positions.empty())
    require(static_cast<int>(initial_positions.size()) == n,
            "initial_positions must list exactly n points");
}

SimConfig parse_config(std::istream& in) {
  SimConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string token;
    while (ls >> token) {
      auto eq = token.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config error (line " + std::to_string(line_no) +
                                    "): expected key=value, got '" + token + "'");
      apply_key_value(cfg, token.substr(0, eq), token.substr(eq + 1), line_no);
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

std::vector<std::string> preset_names() {
  return {"fig8-size-sweep", "fig9-mobility-sweep", "fig10-pause-sweep"};
}

ScenarioPreset preset_by_name(const std::string& name) {
  ScenarioPreset p;
  p.name = name;
  if (name == "fig8-size-sweep") {
    p.swept_param = "n";
    p.values = {80, 90, 100, 150, 200};
    p.base.v_max = 10.0;
    p.base.pause = 10.0;
    p.base.sim_time = 200.0;
    p.base.cbr_rate = 10.0;
    p.protocols = {ProtocolId::Ambr, ProtocolId::FloodReactive, ProtocolId::Proactive};
  } else if (name == "fig9-mobility-sweep") {
    p.swept_param = "v_max";
    p.values = {10, 20, 30, 40, 50};
    p.base.n = 100;
    p.base.pause = 10.0;
    p.base.sim_time = 200.0;
    p.base.cbr_rate = 10.0;
    p.protocols = {ProtocolId::Ambr, ProtocolId::FloodReactive, ProtocolId::Proactive};
  } else if (name == "fig10-pause-sweep") {
    p.swept_param = "pause";
    p.values = {50, 100, 150, 200, 250, 300, 350};
    p.base.n = 50;
    p.base.sim_time = 7500.0;
    p.base.cbr_rate = 5.0;
    p.protocols = {ProtocolId::Ambr, ProtocolId::FloodReactiveLr, ProtocolId::FloodReactive,
                   ProtocolId::Proactive};
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return p;
}

SimConfig bind_sweep_value(const ScenarioPreset& preset, double value) {
  SimConfig cfg = preset.base;
  if (preset.swept_param == "n") cfg.n = static_cast<int>(value);
  else if (preset.swept_param == "v_max") cfg.v_max = value;
  else if (preset.swept_param == "pause") cfg.pause = value;
  else throw std::logic_error("unknown swept param: " + preset.swept_param);
  cfg.validate();
  return cfg;
}

}  // namespace ambr
