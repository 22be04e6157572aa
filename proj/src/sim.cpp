#include "rmcap/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "rmcap/util.hpp"

namespace rmcap {

std::vector<double> default_fractions(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::BLPR: return {0.0, 0.5};
    case PolicyKind::BLP:
    case PolicyKind::PKP: return {0.0};
    case PolicyKind::FCFS: return {};
  }
  return {};
}

ExperimentSpec load_experiment_spec(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open file: " + file);
  ExperimentSpec spec;
  bool have_instance = false;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(file + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "instance") {
      if (!(ls >> spec.instance_path)) fail("instance needs a path");
      have_instance = true;
    } else if (key == "paths") {
      if (!(ls >> spec.path_count) || spec.path_count < 1)
        fail("paths needs a positive count");
    } else if (key == "cv") {
      if (!(ls >> spec.cv) || spec.cv < 0) fail("cv needs a nonnegative value");
    } else if (key == "seed") {
      if (!(ls >> spec.seed)) fail("seed needs an integer");
    } else if (key == "budget_s") {
      if (!(ls >> spec.budget_s)) fail("budget_s needs a number");
    } else if (key == "max_nodes") {
      if (!(ls >> spec.max_nodes) || spec.max_nodes < 0)
        fail("max_nodes needs a nonnegative integer");
    } else if (key == "policy") {
      std::string name;
      if (!(ls >> name)) fail("policy needs a name");
      PolicySpec p;
      p.kind = policy_from_string(name);
      double f;
      while (ls >> f) p.fractions.push_back(f);
      spec.policies.push_back(p);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!have_instance) throw std::runtime_error(file + ": missing 'instance' line");
  if (spec.policies.empty())
    throw std::runtime_error(file + ": needs at least one 'policy' line");
  for (std::size_t i = 0; i < spec.policies.size(); ++i)
    for (std::size_t j = i + 1; j < spec.policies.size(); ++j)
      if (spec.policies[i].kind == spec.policies[j].kind)
        throw std::runtime_error(file + ": duplicate policy " +
                                 to_string(spec.policies[i].kind));
  // Relative instance paths are resolved against the spec file's directory.
  std::filesystem::path inst(spec.instance_path);
  if (inst.is_relative()) {
    std::filesystem::path base = std::filesystem::path(file).parent_path();
    spec.instance_path = (base / inst).string();
  }
  return spec;
}

std::vector<EcdfPoint> ecdf(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("empirical distribution of an empty sample");
  std::sort(values.begin(), values.end());
  std::vector<EcdfPoint> points;
  const double n = static_cast<double>(values.size());
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j + 1 < values.size() && values[j + 1] == values[i]) ++j;
    points.push_back({values[i], static_cast<double>(j + 1) / n});
    i = j + 1;
  }
  return points;
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty())
    throw std::invalid_argument("summary of an empty sample");
  Summary s;
  s.min = values[0];
  s.max = values[0];
  double sum = 0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RMCAP_WORKERS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

ExperimentResult run_experiment(const Instance& inst, const ExperimentSpec& spec,
                                int workers) {
  validate(inst);
  if (spec.path_count < 1) throw std::invalid_argument("need at least one path");
  if (spec.policies.empty()) throw std::invalid_argument("need at least one policy");
  auto t0 = std::chrono::steady_clock::now();

  ExperimentResult result;
  result.workers = std::max(1, workers);

  // One deterministic stream per path index: the draws for path i never
  // depend on how many paths run or in what order.
  result.paths.reserve(spec.path_count);
  for (int i = 0; i < spec.path_count; ++i) {
    Rng rng(stream_seed(spec.seed, static_cast<std::uint64_t>(i)));
    std::vector<int> totals = sample_totals(inst.mean_demand, spec.cv, rng);
    result.paths.push_back(sample_path(totals, inst.horizon, rng));
  }

  SolveOptions opt;
  opt.budget_s = spec.budget_s;
  opt.max_nodes = spec.max_nodes;

  const int np = static_cast<int>(spec.policies.size());
  result.runs.assign(np, std::vector<PolicyRunResult>(spec.path_count));
  result.run_seconds.assign(np, std::vector<double>(spec.path_count, 0.0));

  struct Job {
    int policy;
    int path;
  };
  std::vector<Job> jobs;
  jobs.reserve(static_cast<std::size_t>(np) * spec.path_count);
  for (int p = 0; p < np; ++p)
    for (int i = 0; i < spec.path_count; ++i) jobs.push_back({p, i});

  auto run_one = [&](const Job& job) {
    const PolicySpec& ps = spec.policies[job.policy];
    const RequestPath& path = result.paths[job.path];
    auto s0 = std::chrono::steady_clock::now();
    PolicyRunResult r;
    if (ps.kind == PolicyKind::FCFS) {
      r = run_fcfs(inst, path, opt);
    } else {
      std::vector<double> fr =
          ps.fractions.empty() ? default_fractions(ps.kind) : ps.fractions;
      std::vector<int> periods = solution_periods(fr, inst.horizon);
      if (ps.kind == PolicyKind::PKP)
        r = run_pkp(inst, path, periods, opt);
      else
        r = run_booking_limit(inst, path, periods, opt, ps.kind);
    }
    result.runs[job.policy][job.path] = std::move(r);
    result.run_seconds[job.policy][job.path] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - s0)
            .count();
  };

  if (result.workers <= 1) {
    for (const Job& job : jobs) run_one(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        try {
          run_one(jobs[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    int count = std::min<int>(result.workers, static_cast<int>(jobs.size()));
    pool.reserve(count);
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  result.reports.resize(np);
  for (int p = 0; p < np; ++p) {
    PolicyReport& rep = result.reports[p];
    rep.spec = spec.policies[p];
    rep.label = to_string(spec.policies[p].kind);
    rep.profits.reserve(spec.path_count);
    for (int i = 0; i < spec.path_count; ++i)
      rep.profits.push_back(result.runs[p][i].profit);
    rep.points = ecdf(rep.profits);
    rep.summary = summarize(rep.profits);
  }
  result.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

void write_results_csv(const Instance& inst, const ExperimentSpec& spec,
                       const ExperimentResult& result, std::ostream& out) {
  out << "# " << kToolName << " " << kVersion << " results\n";
  out << "# instance " << inst.label << " seed " << spec.seed << " paths "
      << spec.path_count << " cv " << fmt_fixed(spec.cv, 6) << "\n";
  out << "path,policy,profit,accepted,solves,statuses\n";
  for (std::size_t p = 0; p < result.runs.size(); ++p) {
    const std::string label = result.reports[p].label;
    for (std::size_t i = 0; i < result.runs[p].size(); ++i) {
      const PolicyRunResult& r = result.runs[p][i];
      int accepted = 0;
      for (std::size_t j = 1; j < r.final_state.size(); ++j)
        accepted += r.final_state[j];
      std::string statuses;
      for (std::size_t s = 0; s < r.solve_log.size(); ++s) {
        if (s) statuses += "|";
        statuses += to_string(r.solve_log[s].status);
      }
      out << i << "," << label << "," << fmt_fixed(r.profit) << "," << accepted
          << "," << r.solve_log.size() << "," << statuses << "\n";
    }
  }
}

void write_timings_csv(const ExperimentResult& result, std::ostream& out) {
  out << "# wall-clock times; expect run-to-run variation\n";
  out << "path,policy,seconds\n";
  for (std::size_t p = 0; p < result.runs.size(); ++p)
    for (std::size_t i = 0; i < result.run_seconds[p].size(); ++i)
      out << i << "," << result.reports[p].label << ","
          << fmt_fixed(result.run_seconds[p][i], 6) << "\n";
}

void write_ecdf_dat(const PolicyReport& report, std::ostream& out) {
  out << "# policy " << report.label << "\n";
  out << "# profit fraction\n";
  // Distinct profits can still collide once rounded to the output precision;
  // emitting both rows would make the step function multivalued at that
  // abscissa.  Merge such rows, keeping the last (cumulative) fraction.
  std::vector<std::pair<std::string, double>> rows;
  for (const EcdfPoint& pt : report.points) {
    std::string value = fmt_fixed(pt.value);
    if (!rows.empty() && rows.back().first == value)
      rows.back().second = pt.fraction;
    else
      rows.emplace_back(std::move(value), pt.fraction);
  }
  for (const auto& [value, fraction] : rows)
    out << value << " " << fmt_fixed(fraction) << "\n";
}

void write_ecdf_grid7(const PolicyReport& report, std::ostream& out) {
  out << "# policy " << report.label << "\n";
  out << "# profit fraction (7-point grid over [min, max])\n";
  const Summary& s = report.summary;
  const std::vector<double>& sorted = [&] {
    std::vector<double> v = report.profits;
    std::sort(v.begin(), v.end());
    return v;
  }();
  const double n = static_cast<double>(sorted.size());
  for (int i = 0; i <= 6; ++i) {
    double x = s.min + (s.max - s.min) * i / 6.0;
    double fraction;
    if (i == 6) {
      fraction = 1.0;
      x = s.max;
    } else {
      auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
      fraction = static_cast<double>(it - sorted.begin()) / n;
    }
    out << fmt_fixed(x) << " " << fmt_fixed(fraction) << "\n";
  }
}

void write_summary(const std::vector<PolicyReport>& reports, std::ostream& out) {
  out << "policy mean stddev min max\n";
  for (const PolicyReport& rep : reports) {
    const Summary& s = rep.summary;
    out << rep.label << " " << fmt_fixed(s.mean) << " " << fmt_fixed(s.stddev)
        << " " << fmt_fixed(s.min) << " " << fmt_fixed(s.max) << "\n";
  }
  auto ranking = [&](auto key, const char* name) {
    std::vector<std::size_t> order(reports.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return key(reports[a].summary) > key(reports[b].summary);
    });
    out << name << ":";
    for (std::size_t i : order) out << " " << reports[i].label;
    out << "\n";
  };
  ranking([](const Summary& s) { return s.mean; }, "mean_ranking_desc");
  ranking([](const Summary& s) { return -s.stddev; }, "stability_ranking");
}

ResultsTable read_results_csv(std::istream& in) {
  ResultsTable table;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("path,policy,profit", 0) != 0)
        throw std::runtime_error("results CSV: unexpected header at line " +
                                 std::to_string(line_no));
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() < 3)
      throw std::runtime_error("results CSV: short row at line " +
                               std::to_string(line_no));
    const std::string& label = fields[1];
    double profit = 0;
    try {
      profit = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw std::runtime_error("results CSV: bad profit at line " +
                               std::to_string(line_no));
    }
    std::size_t idx = 0;
    for (; idx < table.labels.size(); ++idx)
      if (table.labels[idx] == label) break;
    if (idx == table.labels.size()) {
      table.labels.push_back(label);
      table.profits.emplace_back();
    }
    table.profits[idx].push_back(profit);
  }
  if (!header_seen) throw std::runtime_error("results CSV: missing header");
  return table;
}

}  // namespace rmcap
