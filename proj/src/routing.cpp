#include "rmcap/routing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace rmcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLoadEps = 1e-9;   // capacity comparisons
constexpr double kImprove = 1e-9;   // strict objective improvement
constexpr double kTieEps = 1e-12;   // exact-tie detection
constexpr int kHardHkMax = 20;      // 2^20 * 20 doubles is the table ceiling

struct Budget {
  std::chrono::steady_clock::time_point deadline;
  bool use_clock = false;
  long long max_nodes = 0;
  long long nodes = 0;
  bool hit = false;

  explicit Budget(const SolveOptions& opt) {
    if (opt.budget_s > 0) {
      use_clock = true;
      deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(opt.budget_s));
    }
    max_nodes = opt.max_nodes;
  }

  // One search node; the wall clock is polled every 1024 nodes.
  bool tick() {
    if (hit) return true;
    ++nodes;
    if (max_nodes > 0 && nodes > max_nodes) hit = true;
    else if (use_clock && (nodes & 1023) == 0 &&
             std::chrono::steady_clock::now() > deadline)
      hit = true;
    return hit;
  }
};

void check_state(const Instance& inst, const SystemState& w) {
  if (w.size() != static_cast<std::size_t>(inst.n) + 1)
    throw std::invalid_argument("state must be node-indexed (n+1)");
  if (w[0] != 0) throw std::invalid_argument("state entry 0 must be zero");
  for (int x : w)
    if (x < 0) throw std::invalid_argument("state entries must be nonnegative");
}

// Exact bin packing of loads into capacities.  Returns a bin index per load
// or nullopt.  First-fit-decreasing is tried first; the fallback search
// skips bins whose residual equals one already tried at the same level,
// which is exhaustive because remaining feasibility depends on residuals
// only.
std::optional<std::vector<int>> pack_assignment(const std::vector<double>& loads,
                                                const std::vector<double>& caps) {
  const int m = static_cast<int>(loads.size());
  const int k = static_cast<int>(caps.size());
  if (m == 0) return std::vector<int>{};
  if (k == 0) return std::nullopt;

  std::vector<int> load_order(m), cap_order(k);
  std::iota(load_order.begin(), load_order.end(), 0);
  std::iota(cap_order.begin(), cap_order.end(), 0);
  std::sort(load_order.begin(), load_order.end(), [&](int a, int b) {
    if (loads[a] != loads[b]) return loads[a] > loads[b];
    return a < b;
  });
  std::sort(cap_order.begin(), cap_order.end(), [&](int a, int b) {
    if (caps[a] != caps[b]) return caps[a] > caps[b];
    return a < b;
  });

  double total_load = 0, total_cap = 0;
  for (double x : loads) total_load += x;
  for (double c : caps) total_cap += c;
  if (total_load > total_cap + kLoadEps) return std::nullopt;
  if (loads[load_order[0]] > caps[cap_order[0]] + kLoadEps) return std::nullopt;

  std::vector<double> residual(k);
  for (int b = 0; b < k; ++b) residual[b] = caps[cap_order[b]];
  std::vector<int> assign(m, -1);

  // First fit decreasing.
  bool ffd_ok = true;
  for (int it = 0; it < m && ffd_ok; ++it) {
    double x = loads[load_order[it]];
    ffd_ok = false;
    for (int b = 0; b < k; ++b) {
      if (residual[b] + kLoadEps >= x) {
        residual[b] -= x;
        assign[it] = b;
        ffd_ok = true;
        break;
      }
    }
  }
  if (!ffd_ok) {
    for (int b = 0; b < k; ++b) residual[b] = caps[cap_order[b]];
    std::fill(assign.begin(), assign.end(), -1);
    std::vector<double> tried;
    auto dfs = [&](auto&& self, int it) -> bool {
      if (it == m) return true;
      double x = loads[load_order[it]];
      std::size_t tried_from = tried.size();
      for (int b = 0; b < k; ++b) {
        if (residual[b] + kLoadEps < x) continue;
        bool dup = false;
        for (std::size_t q = tried_from; q < tried.size(); ++q)
          if (std::abs(tried[q] - residual[b]) <= kTieEps) {
            dup = true;
            break;
          }
        if (dup) continue;
        tried.push_back(residual[b]);
        residual[b] -= x;
        assign[it] = b;
        if (self(self, it + 1)) return true;
        residual[b] += x;
        assign[it] = -1;
      }
      tried.resize(tried_from);
      return false;
    };
    if (!dfs(dfs, 0)) return std::nullopt;
  }

  std::vector<int> out(m, -1);
  for (int it = 0; it < m; ++it) out[load_order[it]] = cap_order[assign[it]];
  return out;
}

// Exact tour DP over a candidate list: dp[mask*s + i] is the cheapest path
// from the depot through exactly `mask` that ends at candidate i.
struct HkTable {
  int s = 0;
  std::vector<int> cand;
  std::vector<double> dp;
  std::vector<signed char> parent;
  const Instance* inst = nullptr;

  void build(const Instance& in, std::vector<int> nodes) {
    inst = &in;
    cand = std::move(nodes);
    s = static_cast<int>(cand.size());
    if (s > kHardHkMax) throw std::invalid_argument("tour table too large");
    const std::size_t total = (std::size_t{1} << s) * static_cast<std::size_t>(s);
    dp.assign(total, kInf);
    parent.assign(total, -2);
    for (int i = 0; i < s; ++i) {
      dp[(std::size_t{1} << i) * s + i] = in.cost[0][cand[i]];
      parent[(std::size_t{1} << i) * s + i] = -1;
    }
    const std::uint64_t full = (std::uint64_t{1} << s) - 1;
    for (std::uint64_t mask = 1; mask <= full; ++mask) {
      for (int i = 0; i < s; ++i) {
        if (!((mask >> i) & 1)) continue;
        double d = dp[mask * s + i];
        if (d == kInf) continue;
        for (int j = 0; j < s; ++j) {
          if ((mask >> j) & 1) continue;
          std::uint64_t nm = mask | (std::uint64_t{1} << j);
          double nd = d + inst->cost[cand[i]][cand[j]];
          if (nd < dp[nm * s + j]) {
            dp[nm * s + j] = nd;
            parent[nm * s + j] = static_cast<signed char>(i);
          }
        }
      }
    }
  }

  double tour_cost(std::uint64_t mask, int* end_out = nullptr) const {
    if (mask == 0) {
      if (end_out) *end_out = -1;
      return 0.0;
    }
    double best = kInf;
    int end = -1;
    for (int i = 0; i < s; ++i) {
      if (!((mask >> i) & 1)) continue;
      double c = dp[mask * s + i] + inst->cost[cand[i]][0];
      if (c < best) {
        best = c;
        end = i;
      }
    }
    if (end_out) *end_out = end;
    return best;
  }

  std::vector<int> tour_seq(std::uint64_t mask) const {
    std::vector<int> seq;
    if (mask == 0) return seq;
    int i = -1;
    tour_cost(mask, &i);
    std::uint64_t cur = mask;
    while (i >= 0) {
      seq.push_back(cand[i]);
      int p = parent[cur * s + i];
      cur ^= (std::uint64_t{1} << i);
      i = p;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  }
};

// Exact depth-first tour search for groups too large for the subset DP.
// Seeds itself with a nearest-neighbour tour, prunes with per-node cheapest
// outgoing arcs, and degrades to the incumbent when the budget expires.
struct TspBb {
  const Instance& inst;
  std::vector<int> nodes;
  Budget& budget;
  int s;
  std::vector<double> min_out;
  double best_cost = kInf;
  std::vector<int> best_seq;
  std::vector<int> cur;
  std::vector<char> used;

  TspBb(const Instance& in, std::vector<int> ns, Budget& b)
      : inst(in), nodes(std::move(ns)), budget(b),
        s(static_cast<int>(nodes.size())) {
    min_out.assign(s, kInf);
    for (int i = 0; i < s; ++i) {
      min_out[i] = inst.cost[nodes[i]][0];
      for (int j = 0; j < s; ++j)
        if (j != i) min_out[i] = std::min(min_out[i], inst.cost[nodes[i]][nodes[j]]);
    }
  }

  void seed_nearest_neighbour() {
    std::vector<char> vis(s, 0);
    std::vector<int> seq;
    int from = 0;  // depot
    double cost = 0;
    for (int step = 0; step < s; ++step) {
      int pick = -1;
      double best = kInf;
      for (int i = 0; i < s; ++i) {
        if (vis[i]) continue;
        double c = inst.cost[from][nodes[i]];
        if (c < best) {
          best = c;
          pick = i;
        }
      }
      vis[pick] = 1;
      seq.push_back(nodes[pick]);
      cost += best;
      from = nodes[pick];
    }
    cost += inst.cost[from][0];
    best_cost = cost;
    best_seq = std::move(seq);
  }

  void dfs(int last, int count, double partial) {
    if (budget.tick()) return;
    double bound = partial + min_out[last];
    for (int i = 0; i < s; ++i)
      if (!used[i]) bound += min_out[i];
    if (bound >= best_cost - kTieEps) return;
    if (count == s) {
      double cost = partial + inst.cost[nodes[last]][0];
      if (cost < best_cost - kImprove) {
        best_cost = cost;
        best_seq.assign(cur.begin(), cur.end());
      }
      return;
    }
    std::vector<int> order;
    order.reserve(s - count);
    for (int i = 0; i < s; ++i)
      if (!used[i]) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double ca = inst.cost[nodes[last]][nodes[a]];
      double cb = inst.cost[nodes[last]][nodes[b]];
      if (ca != cb) return ca < cb;
      return nodes[a] < nodes[b];
    });
    for (int i : order) {
      used[i] = 1;
      cur.push_back(nodes[i]);
      dfs(i, count + 1, partial + inst.cost[nodes[last]][nodes[i]]);
      cur.pop_back();
      used[i] = 0;
      if (budget.hit) return;
    }
  }

  void run() {
    seed_nearest_neighbour();
    if (s == 0) return;
    used.assign(s, 0);
    cur.clear();
    std::vector<int> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double ca = inst.cost[0][nodes[a]];
      double cb = inst.cost[0][nodes[b]];
      if (ca != cb) return ca < cb;
      return nodes[a] < nodes[b];
    });
    for (int i : order) {
      used[i] = 1;
      cur.push_back(nodes[i]);
      dfs(i, 1, inst.cost[0][nodes[i]]);
      cur.pop_back();
      used[i] = 0;
      if (budget.hit) return;
    }
  }
};

struct GroupTour {
  double cost = 0;
  std::vector<int> seq;  // customer ids in visit order
};

struct Candidate {
  int node = 0;
  double load = 0;     // committed amount that must be collected
  double cap = 0;      // extra amount the plan may add (profit mode)
  double price = 0;
  bool mandatory = true;
};

// Branch and bound over zone-to-vehicle assignments shared by the
// cost-minimizing and profit-maximizing solves.  Vehicles are explored in
// nonincreasing capacity order; for zones the order is mandatory by load,
// then optional by revenue potential.
class RouteSearch {
 public:
  RouteSearch(const Instance& inst, const SystemState& w,
              const std::vector<double>* mu_t, const SolveOptions& opt)
      : inst_(inst), w_(w), profit_mode_(mu_t != nullptr), opt_(opt),
        budget_(opt) {
    k_ = inst.vehicles();
    perm_.resize(k_);
    std::iota(perm_.begin(), perm_.end(), 0);
    std::sort(perm_.begin(), perm_.end(), [&](int a, int b) {
      if (inst.fleet[a] != inst.fleet[b]) return inst.fleet[a] > inst.fleet[b];
      return a < b;
    });
    vcap_.resize(k_);
    for (int v = 0; v < k_; ++v) vcap_[v] = inst.fleet[perm_[v]];

    std::vector<int> mand;
    for (int j = 1; j <= inst.n; ++j)
      if (w[j] > 0) mand.push_back(j);
    std::sort(mand.begin(), mand.end(), [&](int a, int b) {
      if (w[a] != w[b]) return w[a] > w[b];
      return a < b;
    });
    for (int j : mand)
      cands_.push_back({j, static_cast<double>(w[j]),
                        profit_mode_ ? std::max(0.0, (*mu_t)[j]) : 0.0,
                        inst.price[j], true});
    if (profit_mode_) {
      std::vector<int> opts;
      for (int j = 1; j <= inst.n; ++j) {
        if (w[j] > 0 || !((*mu_t)[j] > kTieEps)) continue;
        // A zone only worth visiting for extra pickups must at least pay
        // for the cheapest possible detour through it.
        if (inst.price[j] * (*mu_t)[j] + kTieEps < detour_floor(j)) continue;
        opts.push_back(j);
      }
      std::sort(opts.begin(), opts.end(), [&](int a, int b) {
        double ra = inst.price[a] * (*mu_t)[a];
        double rb = inst.price[b] * (*mu_t)[b];
        if (ra != rb) return ra > rb;
        return a < b;
      });
      for (int j : opts)
        cands_.push_back({j, 0.0, (*mu_t)[j], inst.price[j], false});
    }
    s_ = static_cast<int>(cands_.size());
    if (s_ > 62)
      throw std::invalid_argument(
          "route search supports at most 62 candidate zones");

    // Price-ordered candidate indices drive both the revenue bound and the
    // per-vehicle extra-pickup fill.
    price_order_.resize(s_);
    std::iota(price_order_.begin(), price_order_.end(), 0);
    std::sort(price_order_.begin(), price_order_.end(), [&](int a, int b) {
      if (cands_[a].price != cands_[b].price)
        return cands_[a].price > cands_[b].price;
      return cands_[a].node < cands_[b].node;
    });

    // Half in/out arc bounds per candidate and for the depot.
    half_.assign(s_, 0.0);
    for (int i = 0; i < s_; ++i) {
      int j = cands_[i].node;
      double cin = kInf, cout = kInf;
      for (int v = 0; v <= inst.n; ++v) {
        if (v == j) continue;
        cin = std::min(cin, inst.cost[v][j]);
        cout = std::min(cout, inst.cost[j][v]);
      }
      half_[i] = 0.5 * (cin + cout);
      if (cands_[i].mandatory) mand_half_sum_ += half_[i];
    }
    {
      double cin = kInf, cout = kInf;
      for (int j = 1; j <= inst.n; ++j) {
        cin = std::min(cin, inst.cost[j][0]);
        cout = std::min(cout, inst.cost[0][j]);
      }
      depot_half_ = inst.n >= 1 ? 0.5 * (cin + cout) : 0.0;
    }

    suffix_mand_load_.assign(s_ + 1, 0.0);
    for (int i = s_ - 1; i >= 0; --i)
      suffix_mand_load_[i] =
          suffix_mand_load_[i + 1] + (cands_[i].mandatory ? cands_[i].load : 0.0);

    use_full_hk_ = s_ <= std::min(opt.hk_limit, kHardHkMax) && s_ > 0;
    if (use_full_hk_) {
      std::vector<int> ids(s_);
      for (int i = 0; i < s_; ++i) ids[i] = cands_[i].node;
      hk_.build(inst, ids);
    }
  }

  // Returns false when the committed load cannot be collected at all.
  bool run() {
    std::vector<double> mand_loads;
    std::vector<int> mand_idx;
    for (int i = 0; i < s_; ++i)
      if (cands_[i].mandatory) {
        mand_loads.push_back(cands_[i].load);
        mand_idx.push_back(i);
      }
    auto packing = pack_assignment(mand_loads, vcap_);
    if (!packing) return false;

    // Warm start from the packing so a usable plan exists from the first
    // moment, whatever the budget.
    std::vector<std::uint64_t> warm(k_, 0);
    for (std::size_t i = 0; i < mand_idx.size(); ++i)
      warm[(*packing)[i]] |= std::uint64_t{1} << mand_idx[i];
    consider(warm);

    veh_mask_.assign(k_, 0);
    veh_load_.assign(k_, 0.0);
    veh_count_.assign(k_, 0);
    skipped_.assign(s_, 0);
    opened_ = 0;
    opt_half_sum_ = 0;
    dfs(0);
    return true;
  }

  bool proved_optimal() const { return !budget_.hit; }
  long long nodes() const { return budget_.nodes; }
  double best_value() const { return best_value_; }

  // Final plan in original fleet order, with per-zone collected amounts.
  void assemble(OperationalSolution& sol, std::vector<double>* y_out) {
    auto seqs = canonical_groups(best_masks_);
    sol.routes.assign(k_, {});
    sol.collected.assign(k_, std::vector<double>(inst_.n + 1, 0.0));
    if (y_out) y_out->assign(inst_.n + 1, 0.0);
    double cost = 0;
    for (int v = 0; v < k_; ++v) {
      int orig = perm_[v];
      if (seqs[v].empty()) continue;
      std::vector<int>& route = sol.routes[orig];
      route.push_back(0);
      int prev = 0;
      double residual = vcap_[v];
      for (int j : seqs[v]) {
        route.push_back(j);
        cost += inst_.cost[prev][j];
        prev = j;
        residual -= w_[j];
        sol.collected[orig][j] = w_[j];
      }
      route.push_back(0);
      cost += inst_.cost[prev][0];
      if (profit_mode_ && y_out) {
        // Exact continuous-knapsack fill of the residual capacity, highest
        // price first.
        for (int ci : price_order_) {
          int j = cands_[ci].node;
          if (std::find(seqs[v].begin(), seqs[v].end(), j) == seqs[v].end())
            continue;
          double take = std::min(cands_[ci].cap, std::max(0.0, residual));
          (*y_out)[j] = take;
          residual -= take;
          sol.collected[orig][j] += take;
        }
      }
    }
    sol.cost = cost;
  }

 private:
  double detour_floor(int j) const {
    // Cheapest way any tour can absorb zone j: either inserted between two
    // other nodes (c_ij + c_jl - c_il) or served alone from the depot.
    double best = inst_.cost[0][j] + inst_.cost[j][0];
    for (int i = 0; i <= inst_.n; ++i) {
      if (i == j) continue;
      for (int l = 0; l <= inst_.n; ++l) {
        if (l == j || l == i) continue;
        best = std::min(best, inst_.cost[i][j] + inst_.cost[j][l] - inst_.cost[i][l]);
      }
    }
    return std::max(0.0, best);
  }

  double group_cost(std::uint64_t mask) {
    if (mask == 0) return 0.0;
    if (use_full_hk_) return hk_.tour_cost(mask);
    return lazy_group(mask).cost;
  }

  std::vector<int> group_seq(std::uint64_t mask) {
    if (mask == 0) return {};
    if (use_full_hk_) return hk_.tour_seq(mask);
    return lazy_group(mask).seq;
  }

  const GroupTour& lazy_group(std::uint64_t mask) {
    auto it = group_memo_.find(mask);
    if (it != group_memo_.end()) return it->second;
    std::vector<int> ids;
    for (int i = 0; i < s_; ++i)
      if ((mask >> i) & 1) ids.push_back(cands_[i].node);
    GroupTour g;
    if (static_cast<int>(ids.size()) <= std::min(opt_.hk_limit, kHardHkMax)) {
      HkTable t;
      t.build(inst_, ids);
      std::uint64_t full = (std::uint64_t{1} << ids.size()) - 1;
      g.cost = t.tour_cost(full);
      g.seq = t.tour_seq(full);
    } else {
      TspBb bb(inst_, ids, budget_);
      bb.run();
      g.cost = bb.best_cost;
      g.seq = bb.best_seq;
    }
    return group_memo_.emplace(mask, std::move(g)).first->second;
  }

  // Canonical orientation: when the reversed walk costs the same, keep the
  // lexicographically smaller direction.
  std::vector<int> canon_orient(std::vector<int> seq) const {
    if (seq.size() < 2) return seq;
    double fwd = inst_.cost[0][seq.front()];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
      fwd += inst_.cost[seq[i]][seq[i + 1]];
    fwd += inst_.cost[seq.back()][0];
    std::vector<int> rev(seq.rbegin(), seq.rend());
    double bwd = inst_.cost[0][rev.front()];
    for (std::size_t i = 0; i + 1 < rev.size(); ++i)
      bwd += inst_.cost[rev[i]][rev[i + 1]];
    bwd += inst_.cost[rev.back()][0];
    if (std::abs(fwd - bwd) <= kTieEps && rev < seq) return rev;
    return seq;
  }

  static bool seq_less(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.empty() != b.empty()) return b.empty();  // used vehicles first
    return a < b;
  }

  std::vector<std::vector<int>> canonical_groups(
      const std::vector<std::uint64_t>& masks) {
    std::vector<std::vector<int>> seqs(k_);
    for (int v = 0; v < k_; ++v) seqs[v] = canon_orient(group_seq(masks[v]));
    // Vehicles of equal capacity are interchangeable; fix their order.
    int a = 0;
    while (a < k_) {
      int b = a + 1;
      while (b < k_ && std::abs(vcap_[b] - vcap_[a]) <= kTieEps) ++b;
      std::sort(seqs.begin() + a, seqs.begin() + b, seq_less);
      a = b;
    }
    return seqs;
  }

  // Objective of a complete assignment: routing cost, and in profit mode the
  // exact per-vehicle greedy fill of extra pickups.
  double evaluate(const std::vector<std::uint64_t>& masks) {
    double cost = 0;
    for (int v = 0; v < k_; ++v) cost += group_cost(masks[v]);
    if (!profit_mode_) return cost;
    double revenue = 0;
    for (int v = 0; v < k_; ++v) {
      if (masks[v] == 0) continue;
      double residual = vcap_[v];
      for (int i = 0; i < s_; ++i)
        if ((masks[v] >> i) & 1) residual -= cands_[i].load;
      for (int ci : price_order_) {
        if (!((masks[v] >> ci) & 1)) continue;
        if (residual <= 0) break;
        double take = std::min(cands_[ci].cap, residual);
        revenue += cands_[ci].price * take;
        residual -= take;
      }
    }
    return revenue - cost;
  }

  void consider(const std::vector<std::uint64_t>& masks) {
    double value = evaluate(masks);
    bool better;
    if (!have_best_) better = true;
    else if (profit_mode_) better = value > best_value_ + kImprove;
    else better = value < best_value_ - kImprove;
    if (better) {
      best_masks_ = masks;
      best_value_ = value;
      have_best_ = true;
      best_canon_.reset();
      return;
    }
    if (std::abs(value - best_value_) <= kImprove) {
      auto canon = canonical_groups(masks);
      if (!best_canon_) best_canon_ = canonical_groups(best_masks_);
      if (canon < *best_canon_) {
        best_masks_ = masks;
        best_canon_ = std::move(canon);
      }
    }
  }

  // Whether no completion of the current partial assignment (candidates
  // before `next` placed or skipped) can beat the incumbent.
  bool prunable(int next) {
    if (!have_best_) return false;
    double cost_lb = mand_half_sum_ + opt_half_sum_ + opened_ * depot_half_;
    if (!profit_mode_) return cost_lb >= best_value_ - kTieEps;
    // Aggregate revenue ceiling: all unskipped zones share the fleet's
    // leftover capacity after every committed load is placed.
    double residual = 0;
    for (int v = 0; v < k_; ++v) residual += vcap_[v] - veh_load_[v];
    residual -= suffix_mand_load_[next];
    if (residual < -kLoadEps) return true;  // committed loads cannot fit
    double revenue = 0;
    double room = std::max(0.0, residual);
    for (int ci : price_order_) {
      if (skipped_[ci]) continue;
      if (room <= 0) break;
      double take = std::min(cands_[ci].cap, room);
      revenue += cands_[ci].price * take;
      room -= take;
    }
    return revenue - cost_lb <= best_value_ + kTieEps;
  }

  void dfs(int idx) {
    if (budget_.tick()) return;
    if (idx == s_) {
      consider(veh_mask_);
      return;
    }
    const Candidate& cd = cands_[idx];
    double tried_empty_cap = -1.0;
    for (int v = 0; v < k_; ++v) {
      bool was_empty = veh_count_[v] == 0;
      if (was_empty && tried_empty_cap >= 0 &&
          std::abs(vcap_[v] - tried_empty_cap) <= kTieEps)
        continue;  // interchangeable with an empty vehicle already tried
      if (veh_load_[v] + cd.load > vcap_[v] + kLoadEps) continue;
      if (was_empty) tried_empty_cap = vcap_[v];
      veh_mask_[v] |= std::uint64_t{1} << idx;
      veh_load_[v] += cd.load;
      ++veh_count_[v];
      if (was_empty) ++opened_;
      if (!cd.mandatory) opt_half_sum_ += half_[idx];
      if (!prunable(idx + 1)) dfs(idx + 1);
      if (!cd.mandatory) opt_half_sum_ -= half_[idx];
      if (was_empty) --opened_;
      --veh_count_[v];
      veh_load_[v] -= cd.load;
      veh_mask_[v] &= ~(std::uint64_t{1} << idx);
      if (budget_.hit) return;
    }
    if (!cd.mandatory) {
      skipped_[idx] = 1;
      if (!prunable(idx + 1)) dfs(idx + 1);
      skipped_[idx] = 0;
    }
  }

  const Instance& inst_;
  const SystemState& w_;
  bool profit_mode_;
  SolveOptions opt_;
  Budget budget_;

  int k_ = 0;
  std::vector<int> perm_;
  std::vector<double> vcap_;
  std::vector<Candidate> cands_;
  int s_ = 0;
  std::vector<int> price_order_;
  std::vector<double> half_;
  double mand_half_sum_ = 0;
  double depot_half_ = 0;
  std::vector<double> suffix_mand_load_;

  bool use_full_hk_ = false;
  HkTable hk_;
  std::unordered_map<std::uint64_t, GroupTour> group_memo_;

  std::vector<std::uint64_t> veh_mask_;
  std::vector<double> veh_load_;
  std::vector<int> veh_count_;
  std::vector<char> skipped_;
  int opened_ = 0;
  double opt_half_sum_ = 0;

  bool have_best_ = false;
  double best_value_ = 0;
  std::vector<std::uint64_t> best_masks_;
  std::optional<std::vector<std::vector<int>>> best_canon_;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

OperationalSolution infeasible_solution(const Instance& inst) {
  OperationalSolution sol;
  sol.routes.assign(inst.vehicles(), {});
  sol.collected.assign(inst.vehicles(),
                       std::vector<double>(inst.n + 1, 0.0));
  sol.cost = 0;
  sol.status = SolveStatus::Infeasible;
  return sol;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Incumbent: return "incumbent";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

bool feasible(const Instance& inst, const SystemState& w) {
  check_state(inst, w);
  std::vector<double> loads;
  for (int j = 1; j <= inst.n; ++j)
    if (w[j] > 0) loads.push_back(static_cast<double>(w[j]));
  return pack_assignment(loads, inst.fleet).has_value();
}

OperationalSolution solve_cvrp(const Instance& inst, const SystemState& w,
                               const SolveOptions& opt) {
  validate(inst);
  check_state(inst, w);
  auto t0 = std::chrono::steady_clock::now();
  RouteSearch search(inst, w, nullptr, opt);
  if (!search.run()) {
    OperationalSolution sol = infeasible_solution(inst);
    sol.seconds = elapsed_s(t0);
    return sol;
  }
  OperationalSolution sol;
  search.assemble(sol, nullptr);
  sol.status = search.proved_optimal() ? SolveStatus::Optimal
                                       : SolveStatus::Incumbent;
  sol.nodes_explored = search.nodes();
  sol.seconds = elapsed_s(t0);
  if (std::abs(sol.cost - search.best_value()) > 1e-6)
    throw std::logic_error("assembled plan cost drifted from search value");
  std::vector<double> amounts(w.begin(), w.end());
  verify_solution(inst, amounts, sol);
  return sol;
}

PmvrpSolution solve_pmvrp(const Instance& inst, const SystemState& w,
                          const std::vector<double>& mu_t,
                          const SolveOptions& opt) {
  validate(inst);
  check_state(inst, w);
  if (mu_t.size() != static_cast<std::size_t>(inst.n) + 1)
    throw std::invalid_argument("mu_t must be node-indexed (n+1)");
  for (double v : mu_t)
    if (!(v >= 0) || !std::isfinite(v))
      throw std::invalid_argument("mu_t entries must be nonnegative");

  auto t0 = std::chrono::steady_clock::now();
  PmvrpSolution out;
  RouteSearch search(inst, w, &mu_t, opt);
  if (!search.run()) {
    out.plan = infeasible_solution(inst);
    out.status = SolveStatus::Infeasible;
    out.y.assign(inst.n + 1, 0.0);
    out.seconds = elapsed_s(t0);
    out.plan.seconds = out.seconds;
    return out;
  }
  search.assemble(out.plan, &out.y);
  out.plan.status = search.proved_optimal() ? SolveStatus::Optimal
                                            : SolveStatus::Incumbent;
  out.status = out.plan.status;
  out.plan.nodes_explored = search.nodes();
  out.seconds = elapsed_s(t0);
  out.plan.seconds = out.seconds;
  double revenue = 0;
  for (int j = 1; j <= inst.n; ++j) {
    if (out.y[j] < -kTieEps || out.y[j] > mu_t[j] + 1e-9)
      throw std::logic_error("extra pickups outside [0, mu_t]");
    revenue += inst.price[j] * out.y[j];
  }
  out.objective = revenue - out.plan.cost;
  if (std::abs(out.objective - search.best_value()) > 1e-6)
    throw std::logic_error("assembled plan objective drifted from search value");
  std::vector<double> amounts(inst.n + 1, 0.0);
  for (int j = 1; j <= inst.n; ++j) amounts[j] = w[j] + out.y[j];
  verify_solution(inst, amounts, out.plan);
  return out;
}

TourResult tsp_cost(const Instance& inst, const std::vector<int>& nodes,
                    int hk_limit) {
  validate(inst);
  const int limit = std::min(hk_limit, kHardHkMax);
  if (static_cast<int>(nodes.size()) > limit)
    throw std::invalid_argument(
        "tour has " + std::to_string(nodes.size()) +
        " zones; the exact table handles at most " + std::to_string(limit) +
        " (route larger groups through solve_cvrp)");
  std::vector<char> seen(inst.n + 1, 0);
  for (int j : nodes) {
    if (j < 1 || j > inst.n)
      throw std::invalid_argument("zone out of range: " + std::to_string(j));
    if (seen[j]++) throw std::invalid_argument("duplicate zone in tour");
  }
  TourResult out;
  if (nodes.empty()) return out;
  HkTable t;
  t.build(inst, nodes);
  std::uint64_t full = (std::uint64_t{1} << nodes.size()) - 1;
  out.cost = t.tour_cost(full);
  std::vector<int> seq = t.tour_seq(full);
  out.order.push_back(0);
  out.order.insert(out.order.end(), seq.begin(), seq.end());
  out.order.push_back(0);
  return out;
}

void verify_solution(const Instance& inst, const std::vector<double>& amounts,
                     const OperationalSolution& sol) {
  const int k = inst.vehicles();
  if (static_cast<int>(sol.routes.size()) != k ||
      static_cast<int>(sol.collected.size()) != k)
    throw std::logic_error("plan must have one route slot per vehicle");
  if (amounts.size() != static_cast<std::size_t>(inst.n) + 1)
    throw std::logic_error("amounts must be node-indexed (n+1)");
  std::vector<char> visited(inst.n + 1, 0);
  double cost = 0;
  for (int v = 0; v < k; ++v) {
    const auto& route = sol.routes[v];
    const auto& q = sol.collected[v];
    if (q.size() != static_cast<std::size_t>(inst.n) + 1)
      throw std::logic_error("collected amounts must be node-indexed (n+1)");
    std::vector<char> on_route(inst.n + 1, 0);
    if (!route.empty()) {
      if (route.size() < 3 || route.front() != 0 || route.back() != 0)
        throw std::logic_error("routes must run depot to depot");
      double load = 0;
      for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        int a = route[i], b = route[i + 1];
        if (i > 0) {
          if (a < 1 || a > inst.n) throw std::logic_error("zone out of range");
          if (visited[a]++) throw std::logic_error("zone visited twice");
          on_route[a] = 1;
          load += q[a];
        }
        cost += inst.cost[a][b];
      }
      if (load > inst.fleet[v] + kLoadEps)
        throw std::logic_error("vehicle over capacity");
    }
    for (int j = 1; j <= inst.n; ++j) {
      if (q[j] < -kTieEps) throw std::logic_error("negative collected amount");
      if (q[j] > kTieEps && !on_route[j])
        throw std::logic_error("amount collected off-route");
    }
  }
  for (int j = 1; j <= inst.n; ++j) {
    double got = 0;
    for (int v = 0; v < k; ++v) got += sol.collected[v][j];
    if (std::abs(got - amounts[j]) > 1e-9)
      throw std::logic_error("collected amount mismatch at zone " +
                             std::to_string(j));
  }
  if (std::abs(cost - sol.cost) > 1e-6)
    throw std::logic_error("plan cost mismatch");
}

}  // namespace rmcap
