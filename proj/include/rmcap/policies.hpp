#pragma once

#include <string>
#include <vector>

#include "rmcap/demand.hpp"
#include "rmcap/instance.hpp"
#include "rmcap/routing.hpp"

namespace rmcap {

enum class PolicyKind { BLP, BLPR, FCFS, PKP };
const char* to_string(PolicyKind k);
PolicyKind policy_from_string(const std::string& name);

struct DecisionRecord {
  int period = 0;
  int node = 0;
  bool accepted = false;
  // Remaining booking allowance for the zone when the request arrived;
  // meaningful only for limit-based policies.
  double residual_before = 0.0;
  bool has_residual = false;
};

struct SolveRecord {
  int period = 0;       // horizon+1 marks the final collection solve
  double objective = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  double seconds = 0.0;
};

struct PolicyRunResult {
  PolicyKind kind = PolicyKind::BLP;
  SystemState final_state;
  std::vector<DecisionRecord> decisions;
  double profit = 0.0;                // price revenue minus final routing cost
  OperationalSolution operational;    // collection plan for the final state
  std::vector<SolveRecord> solve_log;
};

// Maps horizon fractions to re-planning periods: fraction f becomes period
// floor(f * horizon) + 1, deduplicated and sorted.  {0} -> {1};
// {0, 0.5} -> {1, floor(T/2)+1}.
std::vector<int> solution_periods(const std::vector<double>& fractions,
                                  int horizon);

// Booking-limit policy: at each period in s_periods solve the
// profit-maximizing plan against expected remaining demand and take its
// extra-pickup vector as booking limits; accept a request while its limit
// has at least one unit left.  After the horizon the accepted state is
// collected at minimum cost.  s_periods must contain period 1.
PolicyRunResult run_booking_limit(const Instance& inst,
                                  const RequestPath& path,
                                  const std::vector<int>& s_periods,
                                  const SolveOptions& opt = {},
                                  PolicyKind label = PolicyKind::BLP);

// Accepts any request whose acceptance keeps the state collectable.
PolicyRunResult run_fcfs(const Instance& inst, const RequestPath& path,
                         const SolveOptions& opt = {});

// Booking limits recomputed from the path's realized remaining demand
// rather than its expectation — a hindsight reference, not an implementable
// policy.
PolicyRunResult run_pkp(const Instance& inst, const RequestPath& path,
                        const std::vector<int>& s_periods,
                        const SolveOptions& opt = {});

}  // namespace rmcap
