#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ambr/scenario.hpp"

namespace {

std::vector<double> parse_range(const std::string& spec) {
  // "a" | "a,b,c" | "lo:hi:step"
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream is(spec);
    if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
      throw CLI::ValidationError("range", "expected lo:hi:step with step > 0: " + spec);
    for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
    return out;
  }
  std::istringstream is(spec);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) throw CLI::ValidationError("range", "empty range: " + spec);
  return out;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw CLI::ValidationError("--out", "cannot write " + path);
  return file;
}

ambr::SimConfig config_from(const std::string& config_path,
                            const std::vector<std::string>& sets) {
  ambr::SimConfig cfg;
  if (!config_path.empty()) cfg = ambr::load_config_file(config_path);
  for (const std::string& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--set", "expected key=value: " + kv);
    ambr::apply_key_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monitor-based ad hoc routing simulator and analytic model"};
  app.require_subcommand(1);

  // ---- run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run a scenario sweep or a single configuration");
  std::string preset_name, config_path, out_path, trace_path, mobility_path;
  std::vector<std::string> sets;
  int replications = 0;
  std::uint64_t base_seed = 1;
  run->add_option("--preset", preset_name,
                  "Scenario preset: fig8-size-sweep | fig9-mobility-sweep | fig10-pause-sweep");
  run->add_option("--config", config_path, "key=value configuration file");
  run->add_option("--set", sets, "Inline key=value override (repeatable)");
  run->add_option("--replications", replications, "Seeds per sweep point (default from config)");
  run->add_option("--base-seed", base_seed, "First replication seed");
  run->add_option("--out", out_path, "Output CSV path (default stdout)");
  run->add_option("--trace-out", trace_path, "Protocol event trace CSV (single-config runs)");
  run->add_option("--mobility-out", mobility_path, "Trajectory leg dump CSV (single-config runs)");

  // ---- analytic -----------------------------------------------------------
  auto* analytic = app.add_subcommand("analytic", "Closed-form parameter sweep table");
  std::string r_lambda = "1", r_mu = "1", r_el = "2", r_k = "1", r_kk = "1", r_en = "1",
              r_p0 = "0.5", a_out;
  analytic->add_option("--lambda", r_lambda, "Packet arrival rate range (a,b,c or lo:hi:step)");
  analytic->add_option("--mu", r_mu, "Location change rate range");
  analytic->add_option("--el", r_el, "Expected route length range");
  analytic->add_option("--k", r_k, "Failure hop index range");
  analytic->add_option("--kk", r_kk, "Self-diagnosis hop count range");
  analytic->add_option("--en", r_en, "Monitor count range");
  analytic->add_option("--p0", r_p0, "Next-node-found probability range");
  analytic->add_option("--out", a_out, "Output CSV path (default stdout)");

  // ---- validate-config ----------------------------------------------------
  auto* validate = app.add_subcommand("validate-config", "Parse and validate a config file");
  std::string v_path;
  validate->add_option("path", v_path, "Config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::ofstream file;
      std::ostream& out = open_out(file, out_path);
      std::vector<ambr::ResultRow> rows;
      if (!preset_name.empty()) {
        ambr::ScenarioPreset preset = ambr::preset_by_name(preset_name);
        int reps = replications > 0 ? replications : preset.base.replications;
        rows = ambr::run_scenario(preset, reps, base_seed);
      } else {
        ambr::SimConfig cfg = config_from(config_path, sets);
        int reps = replications > 0 ? replications : cfg.replications;
        if (!trace_path.empty() || !mobility_path.empty()) {
          // Traced single run, then the usual aggregate table.
          std::ofstream tf, mf;
          if (!trace_path.empty()) {
            tf.open(trace_path);
            if (!tf) throw std::runtime_error("cannot write " + trace_path);
            tf << "time,node,packet,action\n";
          }
          if (!mobility_path.empty()) {
            mf.open(mobility_path);
            if (!mf) throw std::runtime_error("cannot write " + mobility_path);
            mf << "node,depart,origin_x,origin_y,target_x,target_y,speed\n";
          }
          ambr::Simulation sim(cfg, base_seed);
          if (tf.is_open())
            sim.set_trace_sink([&tf](const ambr::TraceRow& r) {
              tf << r.t << ',' << r.node << ',' << ambr::kind_name(r.kind) << ',' << r.action
                 << '\n';
            });
          if (mf.is_open())
            sim.set_leg_sink([&mf](const ambr::LegRecord& l) {
              mf << l.node << ',' << l.depart << ',' << l.origin.x << ',' << l.origin.y << ','
                 << l.target.x << ',' << l.target.y << ',' << l.speed << '\n';
            });
          sim.run();
        }
        rows = ambr::run_custom(cfg, reps, base_seed);
      }
      ambr::emit_csv(rows, out);
    } else if (*analytic) {
      ambr::AnalyticSweepSpec spec;
      spec.lambda = parse_range(r_lambda);
      spec.mu = parse_range(r_mu);
      spec.e_l = parse_range(r_el);
      spec.k = parse_range(r_k);
      spec.kk = parse_range(r_kk);
      spec.e_n = parse_range(r_en);
      spec.p0 = parse_range(r_p0);
      std::ofstream file;
      std::ostream& out = open_out(file, a_out);
      ambr::emit_analytic_csv(spec, out);
    } else if (*validate) {
      ambr::SimConfig cfg = ambr::load_config_file(v_path);
      std::cout << "ok: n=" << cfg.n << " protocol=" << ambr::protocol_name(cfg.protocol)
                << " area=" << cfg.area_width << "x" << cfg.area_height << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
