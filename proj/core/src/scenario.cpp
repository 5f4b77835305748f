#include "ambr/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ambr {

SweepStats stats_of(const std::vector<double>& xs) {
  SweepStats s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (xs.size() - 1));
  }
  return s;
}

RunResult run_point(const SimConfig& cfg, ProtocolId protocol, std::uint64_t seed) {
  SimConfig c = cfg;
  c.protocol = protocol;
  Simulation sim(c, seed);
  RunResult r = sim.run();
  if (!r.violations.empty()) {
    std::ostringstream os;
    os << "invariant violation (protocol=" << protocol_name(protocol) << ", seed=" << seed
       << "): " << r.violations.front();
    throw std::runtime_error(os.str());
  }
  return r;
}

namespace {

std::vector<ResultRow> run_sweep(const std::string& scenario, const std::string& swept_param,
                                 const std::vector<double>& values, const SimConfig& base,
                                 const ScenarioPreset* preset,
                                 const std::vector<ProtocolId>& protocols, int replications,
                                 std::uint64_t base_seed) {
  std::vector<ResultRow> rows;
  for (double v : values) {
    SimConfig cfg = preset ? bind_sweep_value(*preset, v) : base;
    for (ProtocolId proto : protocols) {
      std::vector<double> overheads, ratios;
      for (int rep = 0; rep < replications; ++rep) {
        RunResult r = run_point(cfg, proto, base_seed + rep);
        overheads.push_back(r.report.overhead_per_node);
        ratios.push_back(r.report.delivery_ratio);
      }
      SweepStats o = stats_of(overheads);
      SweepStats d = stats_of(ratios);
      rows.push_back({scenario, swept_param, v, protocol_name(proto), replications, o.mean,
                      o.sd, d.mean, d.sd});
    }
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_scenario(const ScenarioPreset& preset, int replications,
                                    std::uint64_t base_seed) {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  return run_sweep(preset.name, preset.swept_param, preset.values, preset.base, &preset,
                   preset.protocols, replications, base_seed);
}

std::vector<ResultRow> run_custom(const SimConfig& cfg, int replications,
                                  std::uint64_t base_seed) {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  return run_sweep("custom", "none", {0.0}, cfg, nullptr, {cfg.protocol}, replications,
                   base_seed);
}

namespace {
std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}
}  // namespace

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "scenario,swept_param,value,protocol,seed_count,overhead_per_node_mean,"
         "overhead_per_node_sd,delivery_ratio_mean,delivery_ratio_sd\n";
  for (const ResultRow& r : rows) {
    out << r.scenario << ',' << r.swept_param << ',' << fmt(r.value) << ',' << r.protocol << ','
        << r.seed_count << ',' << fmt(r.overhead_per_node_mean) << ','
        << fmt(r.overhead_per_node_sd) << ',' << fmt(r.delivery_ratio_mean) << ','
        << fmt(r.delivery_ratio_sd) << '\n';
  }
}

std::vector<ResultRow> parse_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    ResultRow r;
    std::getline(ls, r.scenario, ',');
    std::getline(ls, r.swept_param, ',');
    std::getline(ls, field, ',');
    r.value = std::stod(field);
    std::getline(ls, r.protocol, ',');
    std::getline(ls, field, ',');
    r.seed_count = std::stoi(field);
    std::getline(ls, field, ',');
    r.overhead_per_node_mean = std::stod(field);
    std::getline(ls, field, ',');
    r.overhead_per_node_sd = std::stod(field);
    std::getline(ls, field, ',');
    r.delivery_ratio_mean = std::stod(field);
    std::getline(ls, field, ',');
    r.delivery_ratio_sd = std::stod(field);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_analytic_csv(const AnalyticSweepSpec& spec, std::ostream& out) {
  auto nonempty = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw std::invalid_argument(std::string("empty range for ") + name);
  };
  nonempty(spec.lambda, "lambda");
  nonempty(spec.mu, "mu");
  nonempty(spec.e_l, "e_l");
  nonempty(spec.k, "k");
  nonempty(spec.kk, "kk");
  nonempty(spec.e_n, "e_n");
  nonempty(spec.p0, "p0");

  out << "lambda,mu,e_l,k,kk,e_n,p0,P_B,P_N,P_F0,P_F1,P_R,P_S_literal,P_S_dedup,"
         "term1,term2,term3\n";
  for (double lambda : spec.lambda)
    for (double mu : spec.mu)
      for (double e_l : spec.e_l)
        for (double k : spec.k)
          for (double kk : spec.kk)
            for (double e_n : spec.e_n)
              for (double p0 : spec.p0) {
                double pb = analytic::eval_pb(lambda, mu);
                double pn = analytic::eval_pn(pb, static_cast<int>(e_n));
                double pf0 = analytic::eval_pf0(p0, kk);
                double pf1 = analytic::eval_pf1(p0, kk, e_n);
                double pr = analytic::eval_pr(p0, kk, e_n);
                analytic::PsParams ps{e_l, k, kk, e_n, p0, pb};
                auto lit = analytic::eval_ps(ps, analytic::PsMode::Literal);
                auto ded = analytic::eval_ps(ps, analytic::PsMode::Dedup);
                out << fmt(lambda) << ',' << fmt(mu) << ',' << fmt(e_l) << ',' << fmt(k) << ','
                    << fmt(kk) << ',' << fmt(e_n) << ',' << fmt(p0) << ',' << fmt(pb) << ','
                    << fmt(pn) << ',' << fmt(pf0) << ',' << fmt(pf1) << ',' << fmt(pr) << ','
                    << fmt(lit.value) << ',' << fmt(ded.value) << ',' << fmt(lit.term1) << ','
                    << fmt(lit.term2) << ',' << fmt(lit.term3) << '\n';
              }
}

}  // namespace ambr
