#include "rmcap/dp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rmcap {

ValueTable::ValueTable(const Instance& inst, const ArrivalModel& arrivals,
                       DpOptions opt)
    : inst_(inst), arrivals_(arrivals), opt_(opt) {
  validate(inst);
  validate(arrivals);
  if (arrivals.n != inst.n)
    throw std::invalid_argument("arrival model zone count differs from instance");
  if (arrivals.horizon != inst.horizon)
    throw std::invalid_argument("arrival model horizon differs from instance");
  // No zone can ever hold more than the largest vehicle, so acceptance
  // counts beyond that are dead states.
  wmax_.assign(inst.n + 1, 0);
  int cap = static_cast<int>(std::floor(inst.max_capacity()));
  for (int j = 1; j <= inst.n; ++j) wmax_[j] = cap;
}

void ValueTable::check_state(const SystemState& w) const {
  if (w.size() != static_cast<std::size_t>(inst_.n) + 1)
    throw std::invalid_argument("state must be node-indexed (n+1)");
  if (w[0] != 0) throw std::invalid_argument("state entry 0 must be zero");
  for (int x : w)
    if (x < 0) throw std::invalid_argument("state entries must be nonnegative");
}

std::optional<double> ValueTable::terminal(const SystemState& w) {
  auto it = terminal_.find(w);
  if (it != terminal_.end()) return it->second;
  std::optional<double> value;
  if (feasible(inst_, w)) {
    OperationalSolution sol = solve_cvrp(inst_, w, opt_.solve);
    value = -sol.cost;
  }
  terminal_.emplace(w, value);
  return value;
}

std::optional<double> ValueTable::value(int t, const SystemState& w) {
  const int T = inst_.horizon;
  if (t < 1 || t > T + 1)
    throw std::invalid_argument("period out of range: " + std::to_string(t));
  check_state(w);
  auto hit = memo_.find({t, w});
  if (hit != memo_.end()) return hit->second;
  for (int j = 1; j <= inst_.n; ++j)
    if (w[j] > wmax_[j]) {
      // More accepted than the largest vehicle can ever collect.
      memo_.emplace(std::make_pair(t, w), std::nullopt);
      return std::nullopt;
    }

  // Budget check before enumerating: box of states reachable from w by the
  // remaining periods, times the number of layers.
  const int periods_left = T - t + 1;
  double box = 1;
  for (int j = 1; j <= inst_.n; ++j) {
    int hi = std::min(wmax_[j], w[j] + periods_left);
    box *= hi - w[j] + 1;
    if (box * (periods_left + 1) > static_cast<double>(opt_.state_cap))
      throw std::runtime_error(
          "state space exceeds the configured cap (" +
          std::to_string(opt_.state_cap) + " entries); shrink the instance");
  }

  // Enumerate reachable states: componentwise at least w, at most wmax, and
  // at most periods_left acceptances in total.
  std::vector<SystemState> states;
  SystemState cur = w;
  auto enumerate = [&](auto&& self, int j, int budget) -> void {
    if (j > inst_.n) {
      states.push_back(cur);
      return;
    }
    int hi = std::min(wmax_[j], w[j] + budget);
    for (int x = w[j]; x <= hi; ++x) {
      cur[j] = x;
      self(self, j + 1, budget - (x - w[j]));
    }
    cur[j] = w[j];
  };
  enumerate(enumerate, 1, periods_left);

  auto increments = [&](const SystemState& s) {
    int d = 0;
    for (int j = 1; j <= inst_.n; ++j) d += s[j] - w[j];
    return d;
  };

  // Terminal layer, then the acceptance recursion backwards in time.  The
  // layer for period tau only needs states reachable by tau - t rejections
  // or acceptances, so deeper layers shrink toward the query state.
  for (const auto& s : states) {
    auto key = std::make_pair(T + 1, s);
    if (memo_.find(key) == memo_.end()) memo_.emplace(key, terminal(s));
  }
  for (int tau = T; tau >= t; --tau) {
    const auto& lam = arrivals_.lambda[tau - 1];
    for (const auto& s : states) {
      if (increments(s) > tau - t) continue;  // unreachable this early
      auto key = std::make_pair(tau, s);
      if (memo_.find(key) != memo_.end()) continue;
      auto stay_it = memo_.find({tau + 1, s});
      if (stay_it == memo_.end())
        throw std::logic_error("missing continuation value");
      const std::optional<double>& stay = stay_it->second;
      if (!stay) {
        memo_.emplace(key, std::nullopt);
        continue;
      }
      double total = lam[0] * *stay;
      SystemState next = s;
      for (int j = 1; j <= inst_.n; ++j) {
        if (lam[j] == 0) continue;
        double best = *stay;  // reject
        if (s[j] < wmax_[j]) {
          next[j] = s[j] + 1;
          auto acc_it = memo_.find({tau + 1, next});
          next[j] = s[j];
          if (acc_it != memo_.end() && acc_it->second) {
            double acc = inst_.price[j] + *acc_it->second;
            best = std::max(best, acc);
          }
        }
        total += lam[j] * best;
      }
      memo_.emplace(key, total);
    }
  }
  auto out = memo_.find({t, w});
  if (out == memo_.end()) throw std::logic_error("value not computed");
  return out->second;
}

bool ValueTable::optimal_control(int t, const SystemState& w, int j) {
  const int T = inst_.horizon;
  if (t < 1 || t > T)
    throw std::invalid_argument("period out of range: " + std::to_string(t));
  if (j < 1 || j > inst_.n)
    throw std::invalid_argument("zone out of range: " + std::to_string(j));
  check_state(w);
  std::optional<double> stay = value(t + 1, w);
  if (!stay) return false;  // the current state is already uncollectable
  if (w[j] >= wmax_[j]) return false;
  SystemState next = w;
  ++next[j];
  std::optional<double> acc = value(t + 1, next);
  if (!acc) return false;  // acceptance would make collection impossible
  return inst_.price[j] >= *stay - *acc - 1e-12;
}

std::vector<ValueTable::Entry> ValueTable::entries() const {
  std::vector<Entry> out;
  out.reserve(memo_.size());
  for (const auto& [key, pi] : memo_)
    out.push_back({key.first, key.second, pi});
  return out;
}

}  // namespace rmcap
