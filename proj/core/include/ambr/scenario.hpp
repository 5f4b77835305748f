#ifndef AMBR_SCENARIO_HPP
#define AMBR_SCENARIO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "ambr/analytic.hpp"
#include "ambr/config.hpp"
#include "ambr/simulation.hpp"

namespace ambr {

struct ResultRow {
  std::string scenario;
  std::string swept_param;
  double value = 0.0;
  std::string protocol;
  int seed_count = 0;
  double overhead_per_node_mean = 0.0;
  double overhead_per_node_sd = 0.0;
  double delivery_ratio_mean = 0.0;
  double delivery_ratio_sd = 0.0;
};

struct SweepStats {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single value
};

SweepStats stats_of(const std::vector<double>& xs);

// One (config, protocol, seed) run. Throws std::runtime_error when the
// protocol-invariant suite reports a violation.
RunResult run_point(const SimConfig& cfg, ProtocolId protocol, std::uint64_t seed);

// Full sweep: every swept value x protocol x replication seed (base..base+r-1).
// Rows are ordered by (value, protocol) and are deterministic for equal
// (preset, base_seed, replications).
std::vector<ResultRow> run_scenario(const ScenarioPreset& preset, int replications,
                                    std::uint64_t base_seed);

// Single-config run table (scenario name "custom").
std::vector<ResultRow> run_custom(const SimConfig& cfg, int replications,
                                  std::uint64_t base_seed);

// Header + one row per (sweep value, protocol). Byte-identical for identical
// inputs.
void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out);
std::vector<ResultRow> parse_results_csv(std::istream& in);

// Cartesian closed-form sweep.
struct AnalyticSweepSpec {
  std::vector<double> lambda{1.0};
  std::vector<double> mu{1.0};
  std::vector<double> e_l{2.0};
  std::vector<double> k{1.0};
  std::vector<double> kk{1.0};
  std::vector<double> e_n{1.0};
  std::vector<double> p0{0.5};
};

void emit_analytic_csv(const AnalyticSweepSpec& spec, std::ostream& out);

}  // namespace ambr

#endif
