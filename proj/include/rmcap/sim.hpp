#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmcap/demand.hpp"
#include "rmcap/instance.hpp"
#include "rmcap/policies.hpp"

namespace rmcap {

struct PolicySpec {
  PolicyKind kind = PolicyKind::BLP;
  // Horizon fractions for the re-planning periods of limit-based policies;
  // empty selects the policy default (BLP/PKP {0}, BLPR {0, 0.5}).
  std::vector<double> fractions;
};

std::vector<double> default_fractions(PolicyKind kind);

struct ExperimentSpec {
  std::string instance_path;
  int path_count = 50;
  double cv = 0.1;
  std::uint64_t seed = 1;
  double budget_s = 60.0;
  long long max_nodes = 0;
  std::vector<PolicySpec> policies;
};

// Key/value text file, one entry per line (see docs/FORMATS.md).  Relative
// instance paths resolve against the spec file's directory.
ExperimentSpec load_experiment_spec(const std::string& file);

struct EcdfPoint {
  double value = 0.0;
  double fraction = 0.0;  // share of observations <= value
};

// Step points of the empirical distribution, one per distinct value; the
// last fraction is exactly 1.  Throws on an empty sample.
std::vector<EcdfPoint> ecdf(std::vector<double> values);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n-1); 0 for n < 2
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(const std::vector<double>& values);

struct PolicyReport {
  PolicySpec spec;
  std::string label;
  std::vector<double> profits;      // by path index
  std::vector<EcdfPoint> points;
  Summary summary;
};

struct ExperimentResult {
  std::vector<RequestPath> paths;
  std::vector<std::vector<PolicyRunResult>> runs;  // [policy][path]
  std::vector<std::vector<double>> run_seconds;    // wall time per run
  std::vector<PolicyReport> reports;               // one per policy
  double total_seconds = 0.0;
  int workers = 1;
};

// Samples path_count demand paths (one deterministic stream per path index)
// and replays every policy on every path.  Results are identical for any
// worker count; wall times are reported separately from the deterministic
// outputs.
ExperimentResult run_experiment(const Instance& inst,
                                const ExperimentSpec& spec, int workers = 1);

// Worker count resolution: explicit argument, else the RMCAP_WORKERS
// environment variable, else 1.
int resolve_workers(int requested);

// Deterministic per-run table (profit, acceptances, solve statuses).
void write_results_csv(const Instance& inst, const ExperimentSpec& spec,
                       const ExperimentResult& result, std::ostream& out);
// Wall-clock sidecar, intentionally separate from the reproducible outputs.
void write_timings_csv(const ExperimentResult& result, std::ostream& out);
// Full step function, "value fraction" per line.  Points whose values are
// equal at output precision are merged into one row (last fraction wins) so
// the printed abscissae are strictly increasing.
void write_ecdf_dat(const PolicyReport& report, std::ostream& out);
// Seven-point grid over [min, max] for compact distribution tables.
void write_ecdf_grid7(const PolicyReport& report, std::ostream& out);
// Per-policy moments and cross-policy rankings; wall time lives in
// run.json/timings.csv so this file stays reproducible.
void write_summary(const std::vector<PolicyReport>& reports, std::ostream& out);

// Re-reads a results CSV (profits by policy) for offline report generation.
struct ResultsTable {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> profits;  // [policy][row]
};
ResultsTable read_results_csv(std::istream& in);

}  // namespace rmcap
