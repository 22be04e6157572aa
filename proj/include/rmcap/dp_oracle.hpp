#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rmcap/demand.hpp"
#include "rmcap/instance.hpp"
#include "rmcap/routing.hpp"

namespace rmcap {

struct DpOptions {
  // Hard cap on stored (period, state) entries per query; exceeding it
  // throws instead of silently grinding.
  std::size_t state_cap = 2'000'000;
  SolveOptions solve;  // used for the terminal collection costs
};

// Exact expected-profit recursion over (period, accepted-state), usable as a
// ground-truth oracle on small instances.  Values are computed lazily for
// the states reachable from a query and memoized; an operationally
// infeasible state has no value (nullopt).
class ValueTable {
 public:
  ValueTable(const Instance& inst, const ArrivalModel& arrivals,
             DpOptions opt = {});

  // Expected profit collected from period t (1..horizon+1) onward when the
  // accepted state is w.  At horizon+1 this is minus the collection cost.
  std::optional<double> value(int t, const SystemState& w);

  // Whether the optimal policy accepts a request for zone j arriving at
  // period t in state w: the post-acceptance state must stay feasible and
  // the price must cover the expected displacement.
  bool optimal_control(int t, const SystemState& w, int j);

  struct Entry {
    int t;
    SystemState w;
    std::optional<double> pi;
  };
  // All memoized entries in (t, w) order, for reporting and invariant scans.
  std::vector<Entry> entries() const;

  std::size_t stored_states() const { return memo_.size(); }

 private:
  std::optional<double> terminal(const SystemState& w);
  void check_state(const SystemState& w) const;

  const Instance& inst_;
  const ArrivalModel& arrivals_;
  DpOptions opt_;
  std::vector<int> wmax_;  // per-zone acceptance cap implied by max capacity
  std::map<std::pair<int, SystemState>, std::optional<double>> memo_;
  std::map<SystemState, std::optional<double>> terminal_;
};

}  // namespace rmcap
