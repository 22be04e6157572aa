#pragma once

#include <string>
#include <vector>

#include "rmcap/instance.hpp"

namespace rmcap {

// Accepted requests per zone, node-indexed (entry 0 unused).
using SystemState = std::vector<int>;

enum class SolveStatus { Optimal, Incumbent, Infeasible };
const char* to_string(SolveStatus s);

struct SolveOptions {
  double budget_s = 60.0;   // wall-clock budget per solve; <= 0 disables
  long long max_nodes = 0;  // deterministic search-node budget; 0 disables
  int hk_limit = 15;        // largest route solved by the exact subset DP
};

// One collection plan: per-vehicle depot-anchored routes plus the amount
// picked up at each visited zone.
struct OperationalSolution {
  std::vector<std::vector<int>> routes;        // [0, j1, .., jm, 0]; empty = unused vehicle
  std::vector<std::vector<double>> collected;  // vehicles x (n+1) amounts
  double cost = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  double seconds = 0.0;
  long long nodes_explored = 0;
};

struct PmvrpSolution {
  std::vector<double> y;  // node-indexed planned extra acceptances
  OperationalSolution plan;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  double seconds = 0.0;
};

// Whether the accepted load can be collected at all: every zone's load must
// be assigned whole to one vehicle, so this is an exact bin-packing check of
// {w_j} into the fleet capacities.
bool feasible(const Instance& inst, const SystemState& w);

// Exact minimum-cost collection of state w (branch and bound over
// zone-to-vehicle assignments; optimal route per vehicle by subset DP).
// When the budget expires first, the best plan found so far is returned with
// status Incumbent; an infeasible w yields status Infeasible.
OperationalSolution solve_cvrp(const Instance& inst, const SystemState& w,
                               const SolveOptions& opt = {});

// Profit-maximizing collection with optional extra pickups: chooses
// 0 <= y_j <= mu_t[j] on top of the committed w to maximize
// sum(price * y) - routing cost.  mu_t is node-indexed.
PmvrpSolution solve_pmvrp(const Instance& inst, const SystemState& w,
                          const std::vector<double>& mu_t,
                          const SolveOptions& opt = {});

struct TourResult {
  double cost = 0.0;
  std::vector<int> order;  // [0, j1, .., jm, 0]
};

// Optimal single-vehicle tour through the given distinct zones (subset DP,
// exact).  Sizes beyond hk_limit are refused with std::invalid_argument
// since the table grows as 2^size.
TourResult tsp_cost(const Instance& inst, const std::vector<int>& nodes,
                    int hk_limit = 15);

// Independent recomputation of every plan invariant: route shape, one
// vehicle per zone, capacities, collected amounts equal to `amounts`
// (node-indexed), and cost.  Throws std::logic_error on any violation.
void verify_solution(const Instance& inst, const std::vector<double>& amounts,
                     const OperationalSolution& sol);

}  // namespace rmcap
