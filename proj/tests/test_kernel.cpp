#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ambr/event_queue.hpp"
#include "ambr/rng.hpp"

using ambr::EventQueue;
using ambr::RngStream;

TEST_CASE("schedule at current time fires first") {
  EventQueue q;
  std::vector<int> order;
  q.schedule(0.0, [&] { order.push_back(1); });
  q.schedule(1.0, [&] { order.push_back(2); });
  q.run_until(2.0);
  CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("equal fire times dispatch in insertion order") {
  EventQueue q;
  std::vector<int> order;
  q.schedule(3.0, [&] { order.push_back(1); });
  q.schedule(3.0, [&] { order.push_back(2); });
  q.schedule(3.0, [&] { order.push_back(3); });
  q.run_until(10.0);
  CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("canceled event never fires") {
  EventQueue q;
  int fired = 0;
  auto h = q.schedule(5.0, [&] { ++fired; });
  q.cancel(h);
  q.run_until(10.0);
  CHECK(fired == 0);
  CHECK(q.dispatched() == 0);
}

TEST_CASE("scheduling in the past is rejected") {
  EventQueue q;
  q.schedule(1.0, [] {});
  q.run_until(5.0);
  CHECK_THROWS_AS(q.schedule(4.0, [] {}), std::logic_error);
}

TEST_CASE("run_until on empty queue just advances the clock") {
  EventQueue q;
  CHECK(q.run_until(200.0) == 200.0);
  CHECK(q.dispatched() == 0);
}

TEST_CASE("run_until horizon is exclusive of later events, inclusive at t_end") {
  EventQueue q;
  std::vector<int> order;
  q.schedule(1.0, [&] { order.push_back(1); });
  q.schedule(1.0, [&] { order.push_back(2); });
  q.schedule(3.0, [&] { order.push_back(3); });
  q.run_until(2.0);
  CHECK(order == std::vector<int>{1, 2});
  CHECK(q.now() == 2.0);
  q.run_until(3.0);
  CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("events scheduled during dispatch run in the same sweep") {
  EventQueue q;
  std::vector<int> order;
  q.schedule(1.0, [&] {
    order.push_back(1);
    q.schedule(1.5, [&] { order.push_back(2); });
  });
  q.run_until(2.0);
  CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("rng streams reproduce per (seed, label)") {
  RngStream a(42, "mobility"), b(42, "mobility");
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("different labels give different streams") {
  RngStream a(42, "mobility"), b(42, "traffic");
  int same = 0;
  for (int i = 0; i < 1000; ++i)
    if (a.uniform() == b.uniform()) ++same;
  CHECK(same == 0);
}

TEST_CASE("uniform stays in [0,1) and uniform(lo,hi) in range") {
  RngStream r(7, "x");
  for (int i = 0; i < 100000; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 10000; ++i) {
    double u = r.uniform(2.0, 5.0);
    CHECK(u >= 2.0);
    CHECK(u < 5.0);
  }
}

TEST_CASE("exponential sample mean matches 1/rate within 1%") {
  RngStream r(11, "exp");
  for (double rate : {1.0, 4.0}) {
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += r.exponential(rate);
    CHECK(std::abs(sum / n - 1.0 / rate) < 0.01 / rate);
  }
}

TEST_CASE("exponential rejects nonpositive rate") {
  RngStream r(1, "exp");
  CHECK_THROWS_AS(r.exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(r.exponential(-1.0), std::invalid_argument);
}

TEST_CASE("uniform_int covers the inclusive range") {
  RngStream r(3, "int");
  std::vector<int> seen(6, 0);
  for (int i = 0; i < 60000; ++i) {
    auto v = r.uniform_int(2, 7);
    REQUIRE(v >= 2);
    REQUIRE(v <= 7);
    ++seen[v - 2];
  }
  for (int c : seen) CHECK(c > 8000);
}
