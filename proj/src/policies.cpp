#include "rmcap/policies.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace rmcap {

namespace {

// Acceptance threshold: a request is taken while the zone's remaining
// booking allowance is at least one whole unit (up to float dust).
constexpr double kUnitEps = 1e-9;

using BoundsFn = std::function<std::vector<double>(int)>;

void check_inputs(const Instance& inst, const RequestPath& path,
                  const std::vector<int>& s_periods) {
  validate(inst);
  validate(path, inst.n);
  if (path.horizon != inst.horizon)
    throw std::invalid_argument("path horizon differs from instance horizon");
  if (s_periods.empty())
    throw std::invalid_argument("need at least one planning period");
  int prev = 0;
  for (int t : s_periods) {
    if (t < 1 || t > inst.horizon)
      throw std::invalid_argument("planning period out of range: " +
                                  std::to_string(t));
    if (t <= prev)
      throw std::invalid_argument("planning periods must be strictly increasing");
    prev = t;
  }
  if (s_periods.front() != 1)
    throw std::invalid_argument("planning periods must include period 1");
}

PolicyRunResult run_limit_policy(const Instance& inst, const RequestPath& path,
                                 const std::vector<int>& s_periods,
                                 const SolveOptions& opt, PolicyKind kind,
                                 const BoundsFn& bounds_at) {
  check_inputs(inst, path, s_periods);
  PolicyRunResult res;
  res.kind = kind;
  SystemState w(inst.n + 1, 0);
  std::vector<double> ybar(inst.n + 1, 0.0);

  std::size_t next_event = 0;
  std::size_t next_plan = 0;
  for (int t = 1; t <= inst.horizon; ++t) {
    if (next_plan < s_periods.size() && s_periods[next_plan] == t) {
      ++next_plan;
      PmvrpSolution plan = solve_pmvrp(inst, w, bounds_at(t), opt);
      if (plan.status == SolveStatus::Infeasible)
        throw std::logic_error(
            "accepted state became uncollectable; acceptance control is broken");
      ybar = plan.y;
      res.solve_log.push_back({t, plan.objective, plan.status, plan.seconds});
    }
    if (next_event < path.events.size() && path.events[next_event].period == t) {
      int j = path.events[next_event].node;
      ++next_event;
      DecisionRecord rec;
      rec.period = t;
      rec.node = j;
      rec.residual_before = ybar[j];
      rec.has_residual = true;
      if (ybar[j] >= 1.0 - kUnitEps) {
        ++w[j];
        ybar[j] -= 1.0;
        rec.accepted = true;
      }
      res.decisions.push_back(rec);
    }
  }

  res.final_state = w;
  res.operational = solve_cvrp(inst, w, opt);
  if (res.operational.status == SolveStatus::Infeasible)
    throw std::logic_error("final accepted state is uncollectable");
  res.solve_log.push_back({inst.horizon + 1, -res.operational.cost,
                           res.operational.status, res.operational.seconds});
  double revenue = 0;
  for (int j = 1; j <= inst.n; ++j) revenue += inst.price[j] * w[j];
  res.profit = revenue - res.operational.cost;
  return res;
}

}  // namespace

const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::BLP: return "BLP";
    case PolicyKind::BLPR: return "BLPR";
    case PolicyKind::FCFS: return "FCFS";
    case PolicyKind::PKP: return "PKP";
  }
  return "?";
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "BLP") return PolicyKind::BLP;
  if (name == "BLPR") return PolicyKind::BLPR;
  if (name == "FCFS") return PolicyKind::FCFS;
  if (name == "PKP") return PolicyKind::PKP;
  throw std::invalid_argument("unknown policy '" + name +
                              "' (expected BLP, BLPR, FCFS or PKP)");
}

std::vector<int> solution_periods(const std::vector<double>& fractions,
                                  int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (fractions.empty())
    throw std::invalid_argument("need at least one horizon fraction");
  std::vector<int> periods;
  for (double f : fractions) {
    if (!(f >= 0) || !(f < 1))
      throw std::invalid_argument("horizon fractions must lie in [0, 1)");
    periods.push_back(static_cast<int>(std::floor(f * horizon)) + 1);
  }
  std::sort(periods.begin(), periods.end());
  periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
  return periods;
}

PolicyRunResult run_booking_limit(const Instance& inst, const RequestPath& path,
                                  const std::vector<int>& s_periods,
                                  const SolveOptions& opt, PolicyKind label) {
  if (label != PolicyKind::BLP && label != PolicyKind::BLPR)
    throw std::invalid_argument("booking-limit runs are labeled BLP or BLPR");
  return run_limit_policy(inst, path, s_periods, opt, label, [&](int t) {
    return expected_future_demand(inst.mean_demand, t, inst.horizon);
  });
}

PolicyRunResult run_pkp(const Instance& inst, const RequestPath& path,
                        const std::vector<int>& s_periods,
                        const SolveOptions& opt) {
  return run_limit_policy(inst, path, s_periods, opt, PolicyKind::PKP,
                          [&](int t) {
                            return realized_future_demand(path, t, inst.n);
                          });
}

PolicyRunResult run_fcfs(const Instance& inst, const RequestPath& path,
                         const SolveOptions& opt) {
  validate(inst);
  validate(path, inst.n);
  if (path.horizon != inst.horizon)
    throw std::invalid_argument("path horizon differs from instance horizon");
  PolicyRunResult res;
  res.kind = PolicyKind::FCFS;
  SystemState w(inst.n + 1, 0);
  for (const auto& e : path.events) {
    DecisionRecord rec;
    rec.period = e.period;
    rec.node = e.node;
    ++w[e.node];
    if (feasible(inst, w)) {
      rec.accepted = true;
    } else {
      --w[e.node];
    }
    res.decisions.push_back(rec);
  }
  res.final_state = w;
  res.operational = solve_cvrp(inst, w, opt);
  if (res.operational.status == SolveStatus::Infeasible)
    throw std::logic_error("final accepted state is uncollectable");
  res.solve_log.push_back({inst.horizon + 1, -res.operational.cost,
                           res.operational.status, res.operational.seconds});
  double revenue = 0;
  for (int j = 1; j <= inst.n; ++j) revenue += inst.price[j] * w[j];
  res.profit = revenue - res.operational.cost;
  return res;
}

}  // namespace rmcap
