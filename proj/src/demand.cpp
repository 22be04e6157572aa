#include "rmcap/demand.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rmcap/util.hpp"

namespace rmcap {

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void validate(const RequestPath& path, int n) {
  if (path.horizon < 1) throw std::invalid_argument("path horizon must be at least 1");
  if (static_cast<int>(path.events.size()) > path.horizon)
    throw std::invalid_argument("more requests than periods");
  int prev = 0;
  std::vector<int> counts(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& e : path.events) {
    if (e.period <= prev)
      throw std::invalid_argument("event periods must be strictly increasing");
    if (e.period > path.horizon)
      throw std::invalid_argument("event period beyond the horizon");
    if (e.node < 1 || e.node > n)
      throw std::invalid_argument("event zone out of range: " + std::to_string(e.node));
    prev = e.period;
    ++counts[e.node];
  }
  if (path.totals.size() != counts.size())
    throw std::invalid_argument("totals must be node-indexed (n+1)");
  for (std::size_t j = 0; j < counts.size(); ++j)
    if (path.totals[j] != counts[j])
      throw std::invalid_argument("totals do not match events at zone " +
                                  std::to_string(j));
}

void validate(const ArrivalModel& m) {
  if (m.horizon < 1) throw std::invalid_argument("arrival model horizon must be >= 1");
  if (m.n < 1) throw std::invalid_argument("arrival model needs at least one zone");
  if (static_cast<int>(m.lambda.size()) != m.horizon)
    throw std::invalid_argument("arrival model needs one row per period");
  for (const auto& row : m.lambda) {
    if (static_cast<int>(row.size()) != m.n + 1)
      throw std::invalid_argument("arrival rows must have n+1 entries");
    double sum = 0;
    for (double p : row) {
      if (!(p >= 0) || !(p <= 1))
        throw std::invalid_argument("arrival probabilities must lie in [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("arrival row must sum to 1");
  }
}

std::vector<int> sample_totals(const std::vector<double>& mu, double cv, Rng& rng) {
  if (!(cv >= 0)) throw std::invalid_argument("cv must be nonnegative");
  if (mu.size() < 2) throw std::invalid_argument("mu must be node-indexed (n+1)");
  std::vector<int> totals(mu.size(), 0);
  for (std::size_t j = 1; j < mu.size(); ++j) {
    if (!(mu[j] >= 0)) throw std::invalid_argument("mean demand must be nonnegative");
    double sigma = cv * mu[j];
    double x = mu[j];
    if (sigma > 0) {
      std::normal_distribution<double> dist(mu[j], sigma);
      do {
        x = dist(rng);
      } while (x < 0.0);
    }
    totals[j] = static_cast<int>(std::llround(x));
  }
  return totals;
}

RequestPath sample_path(const std::vector<int>& totals, int horizon, Rng& rng) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (totals.size() < 2) throw std::invalid_argument("totals must be node-indexed (n+1)");
  long long m = 0;
  for (std::size_t j = 1; j < totals.size(); ++j) {
    if (totals[j] < 0) throw std::invalid_argument("totals must be nonnegative");
    m += totals[j];
  }
  if (totals[0] != 0) throw std::invalid_argument("totals[0] must be zero");
  if (m > horizon)
    throw std::invalid_argument("total requests (" + std::to_string(m) +
                                ") exceed the horizon (" + std::to_string(horizon) +
                                ")");

  // Uniform m-subset of periods (Floyd's algorithm), then a uniform shuffle
  // of the request labels over those periods.
  std::set<int> periods;
  for (int j = horizon - static_cast<int>(m) + 1; j <= horizon; ++j) {
    std::uniform_int_distribution<int> pick(1, j);
    int t = pick(rng);
    if (!periods.insert(t).second) periods.insert(j);
  }

  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(m));
  for (std::size_t j = 1; j < totals.size(); ++j)
    labels.insert(labels.end(), static_cast<std::size_t>(totals[j]),
                  static_cast<int>(j));
  std::shuffle(labels.begin(), labels.end(), rng);

  RequestPath path;
  path.horizon = horizon;
  path.totals = totals;
  path.events.reserve(labels.size());
  std::size_t idx = 0;
  for (int t : periods) path.events.push_back({t, labels[idx++]});
  validate(path, static_cast<int>(totals.size()) - 1);
  return path;
}

RequestPath sample_path_from_arrivals(const ArrivalModel& m, Rng& rng) {
  validate(m);
  RequestPath path;
  path.horizon = m.horizon;
  path.totals.assign(static_cast<std::size_t>(m.n) + 1, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 1; t <= m.horizon; ++t) {
    double u = unit(rng);
    double acc = 0;
    int drawn = m.n;  // fallback guards against trailing rounding
    for (int j = 0; j <= m.n; ++j) {
      acc += m.lambda[t - 1][j];
      if (u < acc) {
        drawn = j;
        break;
      }
    }
    if (drawn >= 1) {
      path.events.push_back({t, drawn});
      ++path.totals[drawn];
    }
  }
  validate(path, m.n);
  return path;
}

std::vector<double> expected_future_demand(const std::vector<double>& mu, int t,
                                           int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (t < 1 || t > horizon)
    throw std::invalid_argument("period out of range: " + std::to_string(t));
  std::vector<double> out(mu.size(), 0.0);
  double frac = static_cast<double>(horizon - t + 1) / horizon;
  for (std::size_t j = 1; j < mu.size(); ++j) out[j] = mu[j] * frac;
  return out;
}

ArrivalModel arrival_probabilities(const std::vector<double>& mu, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (mu.size() < 2) throw std::invalid_argument("mu must be node-indexed (n+1)");
  double total = 0;
  for (std::size_t j = 1; j < mu.size(); ++j) {
    if (!(mu[j] >= 0)) throw std::invalid_argument("mean demand must be nonnegative");
    total += mu[j];
  }
  if (total > horizon + 1e-9)
    throw std::invalid_argument(
        "total mean demand exceeds the horizon; at most one request per period");
  ArrivalModel m;
  m.horizon = horizon;
  m.n = static_cast<int>(mu.size()) - 1;
  std::vector<double> row(mu.size(), 0.0);
  double sum = 0;
  for (std::size_t j = 1; j < mu.size(); ++j) {
    row[j] = mu[j] / horizon;
    sum += row[j];
  }
  row[0] = std::max(0.0, 1.0 - sum);
  m.lambda.assign(static_cast<std::size_t>(horizon), row);
  validate(m);
  return m;
}

std::vector<double> realized_future_demand(const RequestPath& path, int t, int n) {
  if (t < 1 || t > path.horizon + 1)
    throw std::invalid_argument("period out of range: " + std::to_string(t));
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  for (const auto& e : path.events)
    if (e.period >= t) out[e.node] += 1.0;
  return out;
}

void save_path(const RequestPath& path, const std::string& instance_label,
               std::uint64_t seed, const std::string& file) {
  std::ostringstream out;
  out << "# " << kToolName << " path v1\n";
  out << "instance " << instance_label << "\n";
  out << "seed " << seed << "\n";
  out << "horizon " << path.horizon << "\n";
  out << "events " << path.events.size() << "\n";
  for (const auto& e : path.events) out << e.period << " " << e.node << "\n";
  write_text_file(file, out.str());
}

RequestPath load_path(const std::string& file, int n) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open file: " + file);
  RequestPath path;
  long long expected_events = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    try {
      if (first == "instance") {
        std::string ignored;
        ls >> ignored;
      } else if (first == "seed") {
        std::uint64_t ignored;
        ls >> ignored;
      } else if (first == "horizon") {
        if (!(ls >> path.horizon)) throw std::invalid_argument("horizon");
      } else if (first == "events") {
        if (!(ls >> expected_events)) throw std::invalid_argument("events");
      } else {
        RequestEvent e;
        e.period = std::stoi(first);
        if (!(ls >> e.node)) throw std::invalid_argument("zone");
        path.events.push_back(e);
      }
    } catch (const std::exception&) {
      throw std::runtime_error(file + ":" + std::to_string(line_no) +
                               ": malformed path line");
    }
  }
  if (expected_events >= 0 &&
      expected_events != static_cast<long long>(path.events.size()))
    throw std::runtime_error(file + ": event count mismatch");
  path.totals.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& e : path.events) {
    if (e.node < 1 || e.node > n)
      throw std::runtime_error(file + ": event zone out of range");
    ++path.totals[e.node];
  }
  validate(path, n);
  return path;
}

}  // namespace rmcap
