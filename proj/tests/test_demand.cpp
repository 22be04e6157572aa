#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "rmcap/demand.hpp"
#include "rmcap/util.hpp"
#include "test_support.hpp"

using namespace rmcap;

TEST_CASE("stream seeds are deterministic and distinct") {
  CHECK(stream_seed(42, 0) == stream_seed(42, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 64; ++i) seen.insert(stream_seed(42, i));
  CHECK(seen.size() == 64);
  CHECK(stream_seed(42, 0) != stream_seed(43, 0));
}

TEST_CASE("zero dispersion reproduces the rounded means") {
  Rng rng(1);
  auto totals = sample_totals(testsup::pad({2.0, 0.0, 3.49}), 0.0, rng);
  CHECK(totals[1] == 2);
  CHECK(totals[2] == 0);
  CHECK(totals[3] == 3);
}

TEST_CASE("sampled totals stay nonnegative and track the mean") {
  Rng rng(7);
  const double mu = 4.0, cv = 0.25;
  long long sum = 0;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) {
    auto totals = sample_totals(testsup::pad({mu}), cv, rng);
    REQUIRE(totals[1] >= 0);
    sum += totals[1];
  }
  double mean = static_cast<double>(sum) / reps;
  CHECK(mean == doctest::Approx(mu).epsilon(0.025));
}

TEST_CASE("paths spread totals over distinct increasing periods") {
  Rng rng(11);
  auto totals = testsup::padi({3, 0, 2});
  RequestPath path = sample_path(totals, 20, rng);
  CHECK(path.horizon == 20);
  REQUIRE(path.events.size() == 5);
  int prev = 0;
  int c1 = 0, c3 = 0;
  for (const auto& e : path.events) {
    CHECK(e.period > prev);
    prev = e.period;
    CHECK(e.period <= 20);
    if (e.node == 1) ++c1;
    if (e.node == 3) ++c3;
  }
  CHECK(c1 == 3);
  CHECK(c3 == 2);
  CHECK_THROWS_AS(sample_path(testsup::padi({5}), 4, rng),
                  std::invalid_argument);
}

TEST_CASE("period choice is close to uniform") {
  Rng rng(13);
  const int horizon = 10, reps = 40000;
  std::vector<int> hits(horizon + 1, 0);
  for (int i = 0; i < reps; ++i) {
    RequestPath p = sample_path(testsup::padi({2}), horizon, rng);
    for (const auto& e : p.events) ++hits[e.period];
  }
  // Each period should carry about reps * 2 / horizon events.
  double expect = reps * 2.0 / horizon;
  for (int t = 1; t <= horizon; ++t)
    CHECK(hits[t] == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("arrival-model sampling respects the probabilities") {
  ArrivalModel m;
  m.horizon = 2;
  m.n = 2;
  m.lambda = {{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}};
  Rng rng(3);
  RequestPath p = sample_path_from_arrivals(m, rng);
  REQUIRE(p.events.size() == 1);
  CHECK(p.events[0].period == 1);
  CHECK(p.events[0].node == 1);

  // Frequency check on a fair three-way split.
  ArrivalModel f;
  f.horizon = 1;
  f.n = 2;
  f.lambda = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
  int none = 0, zone1 = 0, zone2 = 0;
  const int reps = 60000;
  for (int i = 0; i < reps; ++i) {
    RequestPath q = sample_path_from_arrivals(f, rng);
    if (q.events.empty()) ++none;
    else if (q.events[0].node == 1) ++zone1;
    else ++zone2;
  }
  CHECK(none == doctest::Approx(reps / 3.0).epsilon(0.05));
  CHECK(zone1 == doctest::Approx(reps / 3.0).epsilon(0.05));
  CHECK(zone2 == doctest::Approx(reps / 3.0).epsilon(0.05));
}

TEST_CASE("arrival models require one request per period at most") {
  auto m = arrival_probabilities(testsup::pad({2.0, 3.0}), 10);
  CHECK(m.horizon == 10);
  CHECK(m.n == 2);
  CHECK(m.lambda[0][1] == doctest::Approx(0.2));
  CHECK(m.lambda[0][2] == doctest::Approx(0.3));
  CHECK(m.lambda[0][0] == doctest::Approx(0.5));
  CHECK(m.lambda.size() == 10);
  CHECK_THROWS_AS(arrival_probabilities(testsup::pad({6.0, 5.0}), 10),
                  std::invalid_argument);
}

TEST_CASE("expected remaining demand decays linearly") {
  auto mu = testsup::pad({2.0, 4.0});
  auto at1 = expected_future_demand(mu, 1, 10);
  CHECK(at1[1] == doctest::Approx(2.0));
  CHECK(at1[2] == doctest::Approx(4.0));
  auto at6 = expected_future_demand(mu, 6, 10);
  CHECK(at6[1] == doctest::Approx(1.0));
  CHECK(at6[2] == doctest::Approx(2.0));
  CHECK_THROWS_AS(expected_future_demand(mu, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(expected_future_demand(mu, 11, 10), std::invalid_argument);
}

TEST_CASE("realized remaining demand counts events from t onward") {
  RequestPath p;
  p.horizon = 6;
  p.events = {{1, 1}, {3, 2}, {5, 1}};
  p.totals = testsup::padi({2, 1});
  auto at1 = realized_future_demand(p, 1, 2);
  CHECK(at1[1] == doctest::Approx(2.0));
  CHECK(at1[2] == doctest::Approx(1.0));
  auto at4 = realized_future_demand(p, 4, 2);
  CHECK(at4[1] == doctest::Approx(1.0));
  CHECK(at4[2] == doctest::Approx(0.0));
  auto done = realized_future_demand(p, 7, 2);
  CHECK(done[1] == 0.0);
  CHECK_THROWS_AS(realized_future_demand(p, 8, 2), std::invalid_argument);
}

TEST_CASE("path validation rejects malformed sequences") {
  RequestPath p;
  p.horizon = 5;
  p.events = {{2, 1}, {2, 1}};
  p.totals = testsup::padi({2});
  CHECK_THROWS_AS(validate(p, 1), std::invalid_argument);  // repeated period
  p.events = {{2, 1}, {6, 1}};
  CHECK_THROWS_AS(validate(p, 1), std::invalid_argument);  // beyond horizon
  p.events = {{1, 1}, {2, 2}};
  CHECK_THROWS_AS(validate(p, 1), std::invalid_argument);  // zone range
  p.events = {{1, 1}, {2, 1}};
  CHECK_NOTHROW(validate(p, 1));
  p.totals = testsup::padi({1});
  CHECK_THROWS_AS(validate(p, 1), std::invalid_argument);  // totals mismatch
}

TEST_CASE("path files round trip") {
  Rng rng(21);
  RequestPath path = sample_path(testsup::padi({2, 3}), 12, rng);
  const std::string file = "test_demand_path.txt";
  save_path(path, "R.2", 77, file);
  RequestPath back = load_path(file, 2);
  CHECK(back.horizon == path.horizon);
  REQUIRE(back.events.size() == path.events.size());
  for (std::size_t i = 0; i < back.events.size(); ++i) {
    CHECK(back.events[i].period == path.events[i].period);
    CHECK(back.events[i].node == path.events[i].node);
  }
  CHECK(back.totals == path.totals);

  write_text_file(file, "horizon 5\nevents 2\n1 1\n");
  CHECK_THROWS_AS(load_path(file, 2), std::runtime_error);  // count mismatch
  write_text_file(file, "horizon 5\n1 9\n");
  CHECK_THROWS_AS(load_path(file, 2), std::runtime_error);  // zone range
  write_text_file(file, "horizon 5\nnonsense here\n");
  CHECK_THROWS_AS(load_path(file, 2), std::runtime_error);
  std::remove(file.c_str());
}
