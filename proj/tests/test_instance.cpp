#include <doctest.h>

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "rmcap/instance.hpp"
#include "test_support.hpp"

using namespace rmcap;

namespace {

const char* kDataDir = RMCAP_DATA_DIR;

Instance tiny_instance() {
  return testsup::make_instance(
      2,
      {{0, 1, 2}, {1, 0, 1.5}, {2, 1.5, 0}},
      {10.0},
      testsup::pad({4.0, 2.0}),
      testsup::pad({1.0, 2.0}),
      10);
}

}  // namespace

TEST_CASE("straight-line costs are rounded to 4 decimals") {
  CHECK(euclidean_cost(0, 0, 3, 4) == 5.0);
  CHECK(euclidean_cost(0, 0, 1, 1) == 1.4142);
  CHECK(euclidean_cost(2, 2, 2, 2) == 0.0);
}

TEST_CASE("prices are inversely proportional to mean demand") {
  auto price = set_prices(testsup::pad({1.0, 2.0, 4.0}), 4.0);
  REQUIRE(price.size() == 4);
  CHECK(price[1] == doctest::Approx(4.0));
  CHECK(price[2] == doctest::Approx(2.0));
  CHECK(price[3] == doctest::Approx(1.0));
  CHECK_THROWS_AS(set_prices(testsup::pad({2.0, 0.0}), 4.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(set_prices(testsup::pad({1.0}), 0.0), std::invalid_argument);
}

TEST_CASE("fleet sizing picks the largest count inside the band") {
  // 30 / (3 * 10) = 1.0 sits on the lower edge.
  CHECK(select_fleet(testsup::pad({10, 10, 10}), 10, 1.0, 1.5) == 3);
  // 15 / 10 = 1.5 on the upper edge with a single vehicle.
  CHECK(select_fleet(testsup::pad({7, 8}), 10, 1.0, 1.5) == 1);
  // Even one vehicle is underloaded: no valid count.
  CHECK_THROWS_AS(select_fleet(testsup::pad({5, 5}), 100, 1.0, 1.5),
                  std::invalid_argument);
}

TEST_CASE("load factor is demand over fleet capacity") {
  Instance inst = tiny_instance();
  CHECK(load_factor(inst) == doctest::Approx(0.3));
}

TEST_CASE("structural validation rejects malformed instances") {
  Instance inst = tiny_instance();
  CHECK_NOTHROW(validate(inst));

  Instance bad = inst;
  bad.label = "X.2";
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = inst;
  bad.label = "RC.";
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = inst;
  bad.price[1] = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = inst;
  bad.cost[1][2] = -1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = inst;
  bad.cost.pop_back();
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = inst;
  bad.fleet.clear();
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = inst;
  bad.horizon = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("customer data files parse with their fleet header") {
  SolomonData d = parse_solomon_file(std::string(kDataDir) + "/solomon/c101_25.txt");
  CHECK(d.name == "C101");
  CHECK(d.vehicle_count == 25);
  CHECK(d.capacity == 200.0);
  REQUIRE(d.customers.size() == 25);
  CHECK(d.depot.x == 40.0);
  CHECK(d.depot.y == 50.0);
  CHECK(d.customers[0].demand == 10.0);
  CHECK(d.customers[1].demand == 30.0);
}

TEST_CASE("customer data parse errors carry line numbers") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_solomon(in);
  };
  CHECK_THROWS_AS(parse(""), ParseError);
  // Missing NUMBER/CAPACITY row.
  CHECK_THROWS_AS(parse("name\n\nVEHICLE\nNUMBER CAPACITY\n\nCUSTOMER\n0 0 0 0\n1 1 1 1\n"),
                  ParseError);
  // Ids must be consecutive.
  try {
    parse("name\nVEHICLE\nNUMBER CAPACITY\n5 100\nCUSTOMER\nID X Y D\n0 0 0 0\n2 1 1 1\n");
    FAIL("expected a parse failure");
  } catch (const ParseError& e) {
    CHECK(e.line == 8);
  }
  // Too few columns.
  try {
    parse("name\nVEHICLE\nNUMBER CAPACITY\n5 100\nCUSTOMER\n0 0 0\n");
    FAIL("expected a parse failure");
  } catch (const ParseError& e) {
    CHECK(e.line == 6);
  }
}

TEST_CASE("instances are built from the first n customers") {
  SolomonData d = parse_solomon_file(std::string(kDataDir) + "/solomon/c101_25.txt");
  GenOptions opt;
  opt.n = 15;
  Instance inst = build_instance(d, opt, "c101_25.txt");
  CHECK(inst.label == "C.15");
  CHECK(inst.n == 15);
  CHECK(inst.vehicles() == 1);
  CHECK(inst.fleet[0] == 200.0);
  CHECK(inst.total_mean_demand() == doctest::Approx(260.0));
  CHECK(load_factor(inst) == doctest::Approx(1.3));
  CHECK(inst.horizon == 1300);  // 5x the rounded-up total mean demand
  // Prices follow kappa / mu.
  for (int j = 1; j <= inst.n; ++j)
    CHECK(inst.price[j] == doctest::Approx(inst.kappa / inst.mean_demand[j]));
  // Costs are symmetric rounded distances with an empty diagonal.
  CHECK(inst.cost[0][1] == inst.cost[1][0]);
  CHECK(inst.cost[3][3] == 0.0);
}

TEST_CASE("capacity falls back when the file value fits no fleet size") {
  SolomonData d = parse_solomon_file(std::string(kDataDir) + "/solomon/rc101_25.txt");
  GenOptions opt;
  opt.n = 15;  // total demand 320: K=1 gives 1.6, K=2 gives 0.8 at Q=200
  Instance inst = build_instance(d, opt, "rc101_25.txt");
  CHECK(inst.label == "RC.15");
  CHECK(inst.vehicles() == 1);
  CHECK(inst.fleet[0] == 256.0);  // ceil(320 / 1.25)
  CHECK(load_factor(inst) == doctest::Approx(1.25));

  GenOptions strict = opt;
  strict.capacity_mode = GenOptions::CapacityMode::File;
  CHECK_THROWS_AS(build_instance(d, strict, "rc101_25.txt"),
                  std::invalid_argument);

  GenOptions expl = opt;
  expl.capacity_mode = GenOptions::CapacityMode::Explicit;
  expl.capacity = 160.0;
  Instance two = build_instance(d, expl, "rc101_25.txt");
  CHECK(two.vehicles() == 2);  // 320 / (2 * 160) = 1.0
}

TEST_CASE("topology class comes from the file name unless overridden") {
  SolomonData d = parse_solomon_file(std::string(kDataDir) + "/solomon/r101_25.txt");
  GenOptions opt;
  opt.n = 5;
  opt.horizon = 50;
  Instance inst = build_instance(d, opt, "some/dir/r101_25.txt");
  CHECK(inst.label == "R.5");
  opt.label_class = "RC";
  CHECK(build_instance(d, opt, "r101_25.txt").label == "RC.5");
  opt.label_class = "";
  CHECK_THROWS_AS(build_instance(d, opt, "weird_name.txt"),
                  std::invalid_argument);
}

TEST_CASE("instance JSON round trips exactly") {
  SolomonData d = parse_solomon_file(std::string(kDataDir) + "/solomon/r101_25.txt");
  GenOptions opt;
  opt.n = 8;
  opt.seed = 99;
  Instance inst = build_instance(d, opt, "r101_25.txt");
  const std::string path = "test_instance_roundtrip.json";
  save_instance(inst, path);
  Instance back = load_instance(path);
  std::remove(path.c_str());

  CHECK(back.label == inst.label);
  CHECK(back.n == inst.n);
  CHECK(back.horizon == inst.horizon);
  CHECK(back.seed == inst.seed);
  CHECK(back.kappa == inst.kappa);  // bit-exact through JSON
  CHECK(back.fleet == inst.fleet);
  CHECK(back.cost == inst.cost);
  CHECK(back.price == inst.price);
  CHECK(back.mean_demand == inst.mean_demand);
  CHECK(back.source_class == inst.source_class);
}

TEST_CASE("instance JSON rejects foreign or broken content") {
  CHECK_THROWS_AS(instance_from_json("not json at all"), std::invalid_argument);
  CHECK_THROWS_AS(instance_from_json("{\"format\": \"something-else\"}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(instance_from_json("{\"format\": \"rmcap-instance-v1\"}"),
                  std::invalid_argument);
}
