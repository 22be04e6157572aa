#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rmcap {

using Rng = std::mt19937_64;

// Derives the seed for logical stream `index` from a master seed so that
// paths, instances and policies can each consume randomness independently of
// how many draws the others make.  SplitMix64 finalizer over
// master + (index+1) * golden-ratio increment.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

struct RequestEvent {
  int period = 0;  // 1..horizon
  int node = 0;    // 1..n
};

// One realized booking horizon: at most one request per period.
struct RequestPath {
  int horizon = 0;
  std::vector<RequestEvent> events;  // strictly increasing periods
  std::vector<int> totals;           // node-indexed realized request counts
};

// Throws std::invalid_argument on malformed paths (period order/range, node
// range, totals mismatch, more events than periods).
void validate(const RequestPath& path, int n);

// Time-dependent arrival probabilities.  lambda[t-1][j] is the chance that
// period t carries a request for zone j; column 0 is the no-request chance.
struct ArrivalModel {
  int horizon = 0;
  int n = 0;
  std::vector<std::vector<double>> lambda;
};

void validate(const ArrivalModel& m);

// Realized per-zone totals: truncated-normal draws with mean mu[j] and
// standard deviation cv * mu[j] (resampled while negative), rounded to the
// nearest integer.  mu is node-indexed; totals[0] stays 0.
std::vector<int> sample_totals(const std::vector<double>& mu, double cv,
                               Rng& rng);

// Spreads the given totals over distinct periods chosen uniformly from
// 1..horizon, with request labels uniformly shuffled over those periods.
// Throws when totals exceed the horizon.
RequestPath sample_path(const std::vector<int>& totals, int horizon, Rng& rng);

// Draws each period independently from an arrival model (categorical over
// no-request and the n zones).
RequestPath sample_path_from_arrivals(const ArrivalModel& m, Rng& rng);

// Mean demand still to arrive from period t through the end of the horizon
// under stationary arrivals: mu[j] * (horizon - t + 1) / horizon.
std::vector<double> expected_future_demand(const std::vector<double>& mu,
                                           int t, int horizon);

// Stationary arrival model with per-period probability mu[j] / horizon.
// Throws when sum(mu) exceeds the horizon (one request per period at most).
ArrivalModel arrival_probabilities(const std::vector<double>& mu, int horizon);

// Requests of the path that arrive at period t or later, per zone.
std::vector<double> realized_future_demand(const RequestPath& path, int t,
                                           int n);

// Plain-text path files (see docs/FORMATS.md).
void save_path(const RequestPath& path, const std::string& instance_label,
               std::uint64_t seed, const std::string& file);
RequestPath load_path(const std::string& file, int n);

}  // namespace rmcap
