#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ambr/scenario.hpp"

using namespace ambr;

TEST_CASE("empty config gives the published defaults") {
  std::istringstream in("");
  SimConfig cfg = parse_config(in);
  CHECK(cfg.area_width == 1300.0);
  CHECK(cfg.area_height == 1300.0);
  CHECK(cfg.range == 250.0);
  CHECK(cfg.bandwidth == 5000.0);
  CHECK(cfg.data_size == 512);
  CHECK(cfg.n == 50);
  CHECK(cfg.protocol == ProtocolId::Ambr);
}

TEST_CASE("overrides and comments parse") {
  std::istringstream in(
      "# experiment\n"
      "n=200 protocol=proactive\n"
      "v_max=25 pause=30  # trailing comment\n");
  SimConfig cfg = parse_config(in);
  CHECK(cfg.n == 200);
  CHECK(cfg.protocol == ProtocolId::Proactive);
  CHECK(cfg.v_max == 25.0);
  CHECK(cfg.pause == 30.0);
}

TEST_CASE("bad values are rejected with the key and line number") {
  std::istringstream in("n=50\nv_max=-1\n");
  try {
    parse_config(in);
    FAIL("expected a diagnostic");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("v_") != std::string::npos);
  }

  std::istringstream unknown("wibble=3\n");
  try {
    parse_config(unknown);
    FAIL("expected a diagnostic");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("wibble") != std::string::npos);
    CHECK(msg.find("line 1") != std::string::npos);
  }

  std::istringstream junk("n fifty\n");
  CHECK_THROWS_AS(parse_config(junk), std::invalid_argument);
}

TEST_CASE("validation covers the numeric preconditions") {
  SimConfig cfg;
  cfg.n = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SimConfig{};
  cfg.v_min = 5.0;
  cfg.v_max = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SimConfig{};
  cfg.loss_prob = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SimConfig{};
  cfg.initial_positions = {{0, 0}};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("presets carry the published sweep bindings") {
  ScenarioPreset fig8 = preset_by_name("fig8-size-sweep");
  CHECK(fig8.swept_param == "n");
  CHECK(fig8.values == std::vector<double>{80, 90, 100, 150, 200});
  CHECK(fig8.base.v_max == 10.0);
  CHECK(fig8.base.pause == 10.0);
  CHECK(fig8.base.sim_time == 200.0);
  CHECK(fig8.base.cbr_rate == 10.0);
  CHECK(fig8.protocols.size() == 3);

  ScenarioPreset fig9 = preset_by_name("fig9-mobility-sweep");
  CHECK(fig9.swept_param == "v_max");
  CHECK(fig9.values == std::vector<double>{10, 20, 30, 40, 50});
  CHECK(fig9.base.n == 100);
  CHECK(fig9.base.sim_time == 200.0);

  ScenarioPreset fig10 = preset_by_name("fig10-pause-sweep");
  CHECK(fig10.swept_param == "pause");
  CHECK(fig10.values == std::vector<double>{50, 100, 150, 200, 250, 300, 350});
  CHECK(fig10.base.n == 50);
  CHECK(fig10.base.sim_time == 7500.0);
  CHECK(fig10.base.cbr_rate == 5.0);
  CHECK(fig10.protocols.size() == 4);

  CHECK_THROWS_AS(preset_by_name("fig11"), std::invalid_argument);
  SimConfig bound = bind_sweep_value(fig8, 150);
  CHECK(bound.n == 150);
}

TEST_CASE("sweep statistics use the sample standard deviation") {
  SweepStats s = stats_of({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
  CHECK(s.mean == doctest::Approx(5.0));
  CHECK(s.sd == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(stats_of({3.0}).sd == 0.0);
  CHECK(stats_of({}).mean == 0.0);
}

TEST_CASE("csv emission: header only when empty, one row per result") {
  std::ostringstream out;
  emit_csv({}, out);
  CHECK(out.str() ==
        "scenario,swept_param,value,protocol,seed_count,overhead_per_node_mean,"
        "overhead_per_node_sd,delivery_ratio_mean,delivery_ratio_sd\n");

  std::ostringstream one;
  ResultRow row{"custom", "none", 0.0, "ambr", 5, 12.25, 0.5, 0.98, 0.01};
  emit_csv({row}, one);
  std::istringstream back(one.str());
  auto parsed = parse_results_csv(back);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].scenario == "custom");
  CHECK(parsed[0].protocol == "ambr");
  CHECK(parsed[0].seed_count == 5);
  CHECK(parsed[0].overhead_per_node_mean == doctest::Approx(12.25));
  CHECK(parsed[0].delivery_ratio_mean == doctest::Approx(0.98));
}

TEST_CASE("single-config run yields one deterministic row per protocol") {
  SimConfig cfg;
  cfg.n = 12;
  cfg.sim_time = 30.0;
  cfg.num_flows = 3;
  cfg.cbr_rate = 1.0;
  cfg.protocol = ProtocolId::FloodReactive;
  auto rows_a = run_custom(cfg, 2, 1);
  auto rows_b = run_custom(cfg, 2, 1);
  REQUIRE(rows_a.size() == 1);
  CHECK(rows_a[0].seed_count == 2);
  CHECK(rows_a[0].protocol == "flood-reactive");
  std::ostringstream csv_a, csv_b;
  emit_csv(rows_a, csv_a);
  emit_csv(rows_b, csv_b);
  CHECK(csv_a.str() == csv_b.str());  // byte-identical reruns
}

TEST_CASE("paired runs see identical traffic under one seed") {
  SimConfig cfg;
  cfg.n = 12;
  cfg.sim_time = 30.0;
  cfg.num_flows = 3;
  cfg.cbr_rate = 1.0;
  RunResult ambr_run = run_point(cfg, ProtocolId::Ambr, 4);
  RunResult flood_run = run_point(cfg, ProtocolId::FloodReactive, 4);
  RunResult pro_run = run_point(cfg, ProtocolId::Proactive, 4);
  CHECK(ambr_run.report.flows_generated == flood_run.report.flows_generated);
  CHECK(flood_run.report.flows_generated == pro_run.report.flows_generated);
}

TEST_CASE("analytic sweep table carries consistent columns") {
  AnalyticSweepSpec spec;
  spec.lambda = {1.0};
  spec.mu = {1.0};
  spec.e_n = {1.0, 2.0, 3.0, 4.0, 5.0};
  spec.p0 = {0.5};
  std::ostringstream out;
  emit_analytic_csv(spec, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header.find("P_B") != std::string::npos);
  double prev_pn = -1.0;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ls(line);
    std::vector<double> f;
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(std::stod(cell));
    REQUIRE(f.size() == 17);
    CHECK(f[7] == doctest::Approx(0.5));         // P_B at mu = lambda
    CHECK(f[8] >= prev_pn);                      // P_N nondecreasing in E_N
    prev_pn = f[8];
    CHECK(f[11] == doctest::Approx(1.0 - f[9] * f[10]));  // P_R identity
  }
  CHECK(rows == 5);

  AnalyticSweepSpec bad;
  bad.p0.clear();
  std::ostringstream sink;
  CHECK_THROWS_AS(emit_analytic_csv(bad, sink), std::invalid_argument);
}
