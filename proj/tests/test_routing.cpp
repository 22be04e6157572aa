#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rmcap/routing.hpp"
#include "test_support.hpp"

using namespace rmcap;

namespace {

// 3-4-5 right triangle: depot at the right angle.
Instance triangle_instance(std::vector<double> fleet) {
  return testsup::euclid_instance({{0, 0}, {3, 0}, {0, 4}}, std::move(fleet),
                                  testsup::pad({1.0, 1.0}),
                                  testsup::pad({1.0, 1.0}), 10);
}

}  // namespace

TEST_CASE("collectability is whole-zone bin packing") {
  Instance inst = testsup::make_instance(
      2, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, {5.0},
      testsup::pad({1.0, 1.0}), testsup::pad({1.0, 1.0}), 10);
  CHECK(feasible(inst, testsup::padi({3, 2})));
  CHECK_FALSE(feasible(inst, testsup::padi({3, 3})));
  CHECK(feasible(inst, testsup::padi({0, 0})));

  // Two vehicles: each zone's load must fit one vehicle whole.
  Instance two = testsup::make_instance(
      2, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, {3.0, 3.0},
      testsup::pad({1.0, 1.0}), testsup::pad({1.0, 1.0}), 10);
  CHECK(two.total_capacity() == 6.0);
  CHECK(feasible(two, testsup::padi({3, 3})));
  CHECK_FALSE(feasible(two, testsup::padi({4, 2})));  // 4 fits no vehicle
  CHECK(feasible(two, testsup::padi({2, 2})));

  CHECK_THROWS_AS(feasible(two, testsup::padi({-1, 0})), std::invalid_argument);
  SystemState bad = {1, 0, 0};
  CHECK_THROWS_AS(feasible(two, bad), std::invalid_argument);  // depot slot
}

TEST_CASE("single tours visit zones at minimum cost") {
  Instance inst = triangle_instance({10.0});
  TourResult one = tsp_cost(inst, {1});
  CHECK(one.cost == 6.0);  // 3 out, 3 back
  CHECK(one.order == std::vector<int>{0, 1, 0});
  TourResult both = tsp_cost(inst, {1, 2});
  CHECK(both.cost == 12.0);  // 3 + 5 + 4
  TourResult none = tsp_cost(inst, {});
  CHECK(none.cost == 0.0);
  CHECK(none.order.empty());

  CHECK_THROWS_AS(tsp_cost(inst, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(tsp_cost(inst, {3}), std::invalid_argument);
  CHECK_THROWS_AS(tsp_cost(inst, {1, 2}, 1), std::invalid_argument);
}

TEST_CASE("tour search matches permutation enumeration") {
  Rng rng(101);
  for (int rep = 0; rep < 30; ++rep) {
    testsup::RandomOptions o;
    o.min_n = 6;
    o.max_n = 6;
    o.max_vehicles = 1;
    Instance inst = testsup::random_instance(rng, o);
    std::vector<int> nodes = {1, 2, 3, 4, 5, 6};
    double expect = testsup::tsp_oracle(inst, nodes);
    CHECK(tsp_cost(inst, nodes).cost == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("minimum-cost collection on a hand-checked case") {
  Instance inst = triangle_instance({2.0});
  OperationalSolution sol = solve_cvrp(inst, testsup::padi({1, 1}));
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.cost == 12.0);
  REQUIRE(sol.routes.size() == 1);
  CHECK(sol.routes[0].size() == 4);
  CHECK(sol.collected[0][1] == doctest::Approx(1.0));
  CHECK(sol.collected[0][2] == doctest::Approx(1.0));

  // Empty state: nothing to do.
  OperationalSolution idle = solve_cvrp(inst, testsup::padi({0, 0}));
  CHECK(idle.status == SolveStatus::Optimal);
  CHECK(idle.cost == 0.0);
  CHECK(idle.routes[0].empty());

  // Over capacity: no plan at all.
  OperationalSolution bad = solve_cvrp(inst, testsup::padi({3, 0}));
  CHECK(bad.status == SolveStatus::Infeasible);
  CHECK(bad.routes[0].empty());
}

TEST_CASE("two vehicles split loads that one cannot carry") {
  Instance inst = triangle_instance({1.0, 1.0});
  OperationalSolution sol = solve_cvrp(inst, testsup::padi({1, 1}));
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.cost == 14.0);  // 6 + 8, forced split
  int used = 0;
  for (const auto& r : sol.routes)
    if (!r.empty()) ++used;
  CHECK(used == 2);
}

TEST_CASE("collection search matches assignment enumeration") {
  Rng rng(202);
  int infeasible_seen = 0;
  for (int rep = 0; rep < 200; ++rep) {
    Instance inst = testsup::random_instance(rng);
    SystemState w = testsup::random_state(inst, rng);
    auto expect = testsup::cvrp_oracle(inst, w);
    OperationalSolution got = solve_cvrp(inst, w);
    if (!expect) {
      CHECK(got.status == SolveStatus::Infeasible);
      ++infeasible_seen;
    } else {
      REQUIRE(got.status == SolveStatus::Optimal);
      CHECK(got.cost == doctest::Approx(*expect).epsilon(1e-9));
    }
  }
  CHECK(infeasible_seen > 0);  // the sweep should exercise both outcomes
}

TEST_CASE("profit search matches assignment enumeration") {
  Rng rng(303);
  for (int rep = 0; rep < 150; ++rep) {
    Instance inst = testsup::random_instance(rng);
    SystemState w = testsup::random_state(inst, rng, 2);
    std::vector<double> mu_t(inst.n + 1, 0.0);
    std::uniform_real_distribution<double> md(0.0, 3.0);
    for (int j = 1; j <= inst.n; ++j) mu_t[j] = md(rng);
    auto expect = testsup::pmvrp_oracle(inst, w, mu_t);
    PmvrpSolution got = solve_pmvrp(inst, w, mu_t);
    if (!expect) {
      CHECK(got.status == SolveStatus::Infeasible);
    } else {
      REQUIRE(got.status == SolveStatus::Optimal);
      CHECK(got.objective == doctest::Approx(*expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("profit plan on a hand-checked single-zone case") {
  Instance inst = testsup::make_instance(
      1, {{0, 1}, {1, 0}}, {10.0}, testsup::pad({10.0}), testsup::pad({5.0}),
      10);
  PmvrpSolution sol = solve_pmvrp(inst, testsup::padi({0}), testsup::pad({5.0}));
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.y[1] == doctest::Approx(5.0));
  CHECK(sol.objective == doctest::Approx(48.0));  // 5 * 10 - 2

  // Nothing worth collecting: the empty plan wins.
  PmvrpSolution idle =
      solve_pmvrp(inst, testsup::padi({0}), testsup::pad({0.05}));
  CHECK(idle.objective == doctest::Approx(0.0));
  CHECK(idle.y[1] == 0.0);
}

TEST_CASE("extra pickups top up committed loads first by price") {
  // One vehicle of capacity 6 already carries 2 committed units at zone 1;
  // zone 2 is cheaper per unit, so the leftover 4 go to zone 1 first.
  Instance inst = testsup::make_instance(
      2, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, {6.0},
      testsup::pad({5.0, 1.0}), testsup::pad({1.0, 1.0}), 10);
  PmvrpSolution sol =
      solve_pmvrp(inst, testsup::padi({2, 0}), testsup::pad({10.0, 10.0}));
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.y[1] == doctest::Approx(4.0));
  CHECK(sol.y[2] == doctest::Approx(0.0));
  // Revenue 4*5 = 20 minus the out-and-back cost 2.
  CHECK(sol.objective == doctest::Approx(18.0));
}

TEST_CASE("profit plans never lose to the bare collection plan") {
  Rng rng(404);
  for (int rep = 0; rep < 40; ++rep) {
    Instance inst = testsup::random_instance(rng);
    SystemState w = testsup::random_state(inst, rng, 2);
    std::vector<double> mu_t(inst.n + 1, 1.0);
    mu_t[0] = 0.0;
    OperationalSolution plain = solve_cvrp(inst, w);
    PmvrpSolution profit = solve_pmvrp(inst, w, mu_t);
    REQUIRE(plain.status == profit.status);
    if (plain.status == SolveStatus::Optimal)
      CHECK(profit.objective >= -plain.cost - 1e-9);
  }
}

TEST_CASE("plans from both tour engines agree") {
  // hk_limit 2 forces the depth-first tour search for larger groups.
  Rng rng(505);
  for (int rep = 0; rep < 25; ++rep) {
    testsup::RandomOptions o;
    o.min_n = 4;
    o.max_n = 5;
    o.max_vehicles = 2;
    Instance inst = testsup::random_instance(rng, o);
    SystemState w = testsup::random_state(inst, rng, 2);
    SolveOptions table;
    SolveOptions dfs;
    dfs.hk_limit = 2;
    OperationalSolution a = solve_cvrp(inst, w, table);
    OperationalSolution b = solve_cvrp(inst, w, dfs);
    REQUIRE(a.status == b.status);
    if (a.status == SolveStatus::Optimal)
      CHECK(a.cost == doctest::Approx(b.cost).epsilon(1e-9));
  }
}

TEST_CASE("deterministic replays produce identical plans") {
  Rng rng(606);
  Instance inst = testsup::random_instance(rng);
  SystemState w = testsup::random_state(inst, rng);
  OperationalSolution a = solve_cvrp(inst, w);
  OperationalSolution b = solve_cvrp(inst, w);
  CHECK(a.routes == b.routes);
  CHECK(a.cost == b.cost);
  CHECK(a.nodes_explored == b.nodes_explored);
}

TEST_CASE("equal vehicles are used in index order") {
  Instance inst = testsup::make_instance(
      2, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, {2.0, 2.0},
      testsup::pad({1.0, 1.0}), testsup::pad({1.0, 1.0}), 10);
  OperationalSolution sol = solve_cvrp(inst, testsup::padi({1, 0}));
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_FALSE(sol.routes[0].empty());  // first of the equal pair carries it
  CHECK(sol.routes[1].empty());
}

TEST_CASE("node budgets give anytime plans that only improve") {
  Rng rng(707);
  testsup::RandomOptions o;
  o.min_n = 6;
  o.max_n = 6;
  o.max_vehicles = 3;
  Instance inst = testsup::random_instance(rng, o);
  SystemState w;
  do {
    w = testsup::random_state(inst, rng, 2);
  } while (!feasible(inst, w));

  SolveOptions unlimited;
  OperationalSolution full = solve_cvrp(inst, w, unlimited);
  REQUIRE(full.status == SolveStatus::Optimal);

  double prev = std::numeric_limits<double>::infinity();
  for (long long nodes : {1LL, 50LL, 200LL, 5000LL}) {
    SolveOptions opt;
    opt.max_nodes = nodes;
    OperationalSolution sol = solve_cvrp(inst, w, opt);
    REQUIRE(sol.routes.size() == inst.fleet.size());
    CHECK(sol.cost >= full.cost - 1e-9);   // never better than optimal
    CHECK(sol.cost <= prev + 1e-9);        // larger budgets never hurt
    prev = sol.cost;
  }
}

TEST_CASE("an exhausted budget still yields a usable plan") {
  // Find a state whose search explores more than one node, so a one-node
  // budget is guaranteed to expire mid-search.
  Rng rng(808);
  Instance inst;
  SystemState w;
  OperationalSolution full;
  do {
    inst = testsup::random_instance(rng);
    w = testsup::random_state(inst, rng, 2);
    if (!feasible(inst, w)) continue;
    full = solve_cvrp(inst, w);
  } while (full.nodes_explored < 2);

  SolveOptions opt;
  opt.budget_s = 1e-12;  // already expired; node cap makes the cut exact
  opt.max_nodes = 1;
  OperationalSolution sol = solve_cvrp(inst, w, opt);
  CHECK(sol.status == SolveStatus::Incumbent);
  CHECK(sol.cost >= full.cost - 1e-9);
  std::vector<double> amounts(w.begin(), w.end());
  CHECK_NOTHROW(verify_solution(inst, amounts, sol));
}

TEST_CASE("plan verification catches corrupted plans") {
  Instance inst = triangle_instance({2.0});
  SystemState w = testsup::padi({1, 1});
  OperationalSolution sol = solve_cvrp(inst, w);
  std::vector<double> amounts(w.begin(), w.end());
  CHECK_NOTHROW(verify_solution(inst, amounts, sol));

  OperationalSolution tampered = sol;
  tampered.collected[0][1] += 1.0;
  CHECK_THROWS_AS(verify_solution(inst, amounts, tampered), std::logic_error);

  tampered = sol;
  tampered.cost += 0.5;
  CHECK_THROWS_AS(verify_solution(inst, amounts, tampered), std::logic_error);

  tampered = sol;
  tampered.routes[0] = {0, 1, 0};  // zone 2 still has collected amount
  CHECK_THROWS_AS(verify_solution(inst, amounts, tampered), std::logic_error);

  tampered = sol;
  tampered.routes[0].push_back(7);  // no longer ends at the depot
  CHECK_THROWS_AS(verify_solution(inst, amounts, tampered), std::logic_error);
}

TEST_CASE("solver inputs are validated") {
  Instance inst = triangle_instance({2.0});
  SystemState short_state = {0, 1};
  CHECK_THROWS_AS(solve_cvrp(inst, short_state), std::invalid_argument);
  CHECK_THROWS_AS(solve_pmvrp(inst, testsup::padi({0, 0}), {0.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      solve_pmvrp(inst, testsup::padi({0, 0}), testsup::pad({-1.0, 0.0})),
      std::invalid_argument);
}
