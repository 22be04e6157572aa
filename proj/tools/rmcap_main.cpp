// Command-line front end: instance generation, path sampling, one-shot
// solves, the exact expected-profit recursion, policy simulation and report
// regeneration.  Exit codes: 0 ok, 2 bad usage or malformed input, 3
// infeasible model, 4 budget exhausted without proven optimality under
// --strict.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmcap/demand.hpp"
#include "rmcap/dp_oracle.hpp"
#include "rmcap/instance.hpp"
#include "rmcap/milp_export.hpp"
#include "rmcap/policies.hpp"
#include "rmcap/routing.hpp"
#include "rmcap/sim.hpp"
#include "rmcap/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTruncated = 4;

std::string path_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "path_%04d.txt", index);
  return buf;
}

// State / bound files carry one value per zone (an optional leading zero for
// the depot slot is accepted).
std::vector<double> read_zone_file(const std::string& path, int n,
                                   const char* what) {
  std::vector<double> raw = rmcap::read_number_file(path);
  if (static_cast<int>(raw.size()) == n + 1 && raw[0] == 0)
    raw.erase(raw.begin());
  if (static_cast<int>(raw.size()) != n)
    throw std::invalid_argument(std::string(what) + " file " + path + " has " +
                                std::to_string(raw.size()) + " values, expected " +
                                std::to_string(n));
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  for (int j = 1; j <= n; ++j) out[j] = raw[j - 1];
  return out;
}

rmcap::SystemState read_state_file(const std::string& path, int n) {
  std::vector<double> vals = read_zone_file(path, n, "state");
  rmcap::SystemState w(static_cast<std::size_t>(n) + 1, 0);
  for (int j = 1; j <= n; ++j) {
    if (vals[j] < 0 || vals[j] != std::floor(vals[j]))
      throw std::invalid_argument("state entries must be nonnegative integers");
    w[j] = static_cast<int>(vals[j]);
  }
  return w;
}

json solution_json(const rmcap::Instance& inst, const rmcap::SystemState& w,
                   const rmcap::OperationalSolution& plan,
                   const rmcap::SolveOptions& opt) {
  json j;
  j["format"] = "rmcap-solution-v1";
  j["version"] = rmcap::kVersion;
  j["instance"] = inst.label;
  j["state"] = w;
  j["status"] = rmcap::to_string(plan.status);
  if (plan.status == rmcap::SolveStatus::Infeasible)
    j["cost"] = nullptr;  // no plan exists, so no cost to report
  else
    j["cost"] = plan.cost;
  j["routes"] = plan.routes;
  j["collected"] = plan.collected;
  j["seconds"] = plan.seconds;
  j["nodes_explored"] = plan.nodes_explored;
  j["config"] = {{"budget_s", opt.budget_s},
                 {"max_nodes", opt.max_nodes},
                 {"hk_limit", opt.hk_limit}};
  return j;
}

void emit(const json& j, const std::string& out_path) {
  std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    rmcap::write_text_file(out_path, text);
}

struct GenArgs {
  std::string data;
  std::string out;
  int n = 15;
  std::string cls;
  double kappa = 0;
  std::string capacity = "auto";
  double lf_min = 1.0;
  double lf_max = 1.5;
  int horizon = 0;
  std::uint64_t seed = 0;
};

int run_gen(const GenArgs& a) {
  rmcap::SolomonData data = rmcap::parse_solomon_file(a.data);
  rmcap::GenOptions opt;
  opt.n = a.n;
  opt.lf_min = a.lf_min;
  opt.lf_max = a.lf_max;
  opt.kappa = a.kappa;
  opt.horizon = a.horizon;
  opt.seed = a.seed;
  opt.label_class = a.cls;
  if (a.capacity == "file") {
    opt.capacity_mode = rmcap::GenOptions::CapacityMode::File;
  } else if (a.capacity == "auto") {
    opt.capacity_mode = rmcap::GenOptions::CapacityMode::Auto;
  } else {
    opt.capacity_mode = rmcap::GenOptions::CapacityMode::Explicit;
    try {
      std::size_t used = 0;
      opt.capacity = std::stod(a.capacity, &used);
      if (used != a.capacity.size()) throw std::invalid_argument(a.capacity);
    } catch (const std::exception&) {
      throw std::invalid_argument("--q expects 'file', 'auto' or a number, got '" +
                                  a.capacity + "'");
    }
  }
  rmcap::Instance inst = rmcap::build_instance(data, opt, a.data);
  rmcap::save_instance(inst, a.out);
  std::cout << "instance " << inst.label << ": zones " << inst.n << ", vehicles "
            << inst.vehicles() << " x Q=" << rmcap::fmt_g(inst.fleet[0])
            << ", load factor " << rmcap::fmt_g(rmcap::load_factor(inst))
            << ", horizon " << inst.horizon << ", kappa "
            << rmcap::fmt_g(inst.kappa) << " -> " << a.out << "\n";
  return kExitOk;
}

struct PathsArgs {
  std::string instance;
  std::string out_dir;
  int count = 50;
  double cv = 0.1;
  std::uint64_t seed = 1;
};

int run_paths(const PathsArgs& a) {
  rmcap::Instance inst = rmcap::load_instance(a.instance);
  fs::create_directories(a.out_dir);
  json manifest;
  manifest["format"] = "rmcap-paths-v1";
  manifest["version"] = rmcap::kVersion;
  manifest["instance"] = inst.label;
  manifest["count"] = a.count;
  manifest["cv"] = a.cv;
  manifest["seed"] = a.seed;
  std::vector<std::string> files;
  for (int i = 0; i < a.count; ++i) {
    std::uint64_t s = rmcap::stream_seed(a.seed, static_cast<std::uint64_t>(i));
    rmcap::Rng rng(s);
    std::vector<int> totals = rmcap::sample_totals(inst.mean_demand, a.cv, rng);
    rmcap::RequestPath path = rmcap::sample_path(totals, inst.horizon, rng);
    std::string name = path_file_name(i);
    rmcap::save_path(path, inst.label, s, (fs::path(a.out_dir) / name).string());
    files.push_back(name);
  }
  manifest["files"] = files;
  emit(manifest, (fs::path(a.out_dir) / "manifest.json").string());
  std::cout << "wrote " << a.count << " paths to " << a.out_dir << "\n";
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string state;
  std::string out;
  bool pmvrp = false;
  std::string mu_t_file;
  int t = 1;
  double budget_s = 60.0;
  long long max_nodes = 0;
  int hk_limit = 15;
  bool strict = false;
  std::string export_lp;
  bool export_only = false;
};

int run_solve(const SolveArgs& a) {
  rmcap::Instance inst = rmcap::load_instance(a.instance);
  rmcap::SystemState w = a.state.empty()
                             ? rmcap::SystemState(inst.n + 1, 0)
                             : read_state_file(a.state, inst.n);
  std::optional<std::vector<double>> mu_t;
  if (a.pmvrp) {
    if (!a.mu_t_file.empty())
      mu_t = read_zone_file(a.mu_t_file, inst.n, "bounds");
    else
      mu_t = rmcap::expected_future_demand(inst.mean_demand, a.t, inst.horizon);
  }
  if (!a.export_lp.empty()) {
    rmcap::export_milp_file(inst, w, mu_t ? &*mu_t : nullptr, a.export_lp);
    std::cout << "model -> " << a.export_lp << "\n";
    if (a.export_only) return kExitOk;
  }
  rmcap::SolveOptions opt;
  opt.budget_s = a.budget_s;
  opt.max_nodes = a.max_nodes;
  opt.hk_limit = a.hk_limit;

  rmcap::SolveStatus status;
  json j;
  if (a.pmvrp) {
    rmcap::PmvrpSolution sol = rmcap::solve_pmvrp(inst, w, *mu_t, opt);
    status = sol.status;
    j = solution_json(inst, w, sol.plan, opt);
    j["mode"] = "pmvrp";
    if (sol.status == rmcap::SolveStatus::Infeasible)
      j["objective"] = nullptr;
    else
      j["objective"] = sol.objective;
    j["y"] = sol.y;
    j["mu_t"] = *mu_t;
  } else {
    rmcap::OperationalSolution sol = rmcap::solve_cvrp(inst, w, opt);
    status = sol.status;
    j = solution_json(inst, w, sol, opt);
    j["mode"] = "cvrp";
  }
  emit(j, a.out);
  if (status == rmcap::SolveStatus::Infeasible) {
    std::cerr << "accepted state cannot be collected by the fleet\n";
    return kExitInfeasible;
  }
  if (a.strict && status == rmcap::SolveStatus::Incumbent) {
    std::cerr << "budget exhausted before optimality was proven\n";
    return kExitTruncated;
  }
  return kExitOk;
}

struct DpArgs {
  std::string instance;
  std::string state;
  std::string out;
  int t = 1;
  int control = 0;
  std::size_t state_cap = 2'000'000;
  double budget_s = 60.0;
};

int run_dp(const DpArgs& a) {
  rmcap::Instance inst = rmcap::load_instance(a.instance);
  rmcap::SystemState w = a.state.empty()
                             ? rmcap::SystemState(inst.n + 1, 0)
                             : read_state_file(a.state, inst.n);
  rmcap::ArrivalModel arrivals =
      rmcap::arrival_probabilities(inst.mean_demand, inst.horizon);
  rmcap::DpOptions opt;
  opt.state_cap = a.state_cap;
  opt.solve.budget_s = a.budget_s;
  rmcap::ValueTable table(inst, arrivals, opt);
  std::optional<double> pi = table.value(a.t, w);
  json j;
  j["format"] = "rmcap-dp-v1";
  j["version"] = rmcap::kVersion;
  j["instance"] = inst.label;
  j["t"] = a.t;
  j["state"] = w;
  if (pi)
    j["value"] = *pi;
  else
    j["value"] = nullptr;
  if (a.control >= 1) {
    if (a.t > inst.horizon)
      throw std::invalid_argument("--control needs t within the booking horizon");
    j["control"] = {{"zone", a.control},
                    {"accept", table.optimal_control(a.t, w, a.control)}};
  }
  j["stored_states"] = table.stored_states();
  emit(j, a.out);
  return kExitOk;
}

struct SimArgs {
  std::string spec;
  std::string out_dir;
  int workers = 0;
  bool strict = false;
  std::optional<std::uint64_t> seed;
};

int run_simulate(const SimArgs& a) {
  rmcap::ExperimentSpec spec = rmcap::load_experiment_spec(a.spec);
  if (a.seed) spec.seed = *a.seed;
  rmcap::Instance inst = rmcap::load_instance(spec.instance_path);
  int workers = rmcap::resolve_workers(a.workers);
  rmcap::ExperimentResult result = rmcap::run_experiment(inst, spec, workers);

  fs::path out(a.out_dir);
  fs::create_directories(out);
  fs::create_directories(out / "paths");
  for (std::size_t i = 0; i < result.paths.size(); ++i) {
    std::uint64_t s = rmcap::stream_seed(spec.seed, i);
    rmcap::save_path(result.paths[i], inst.label, s,
                     (out / "paths" / path_file_name(static_cast<int>(i))).string());
  }
  {
    std::ostringstream ss;
    rmcap::write_results_csv(inst, spec, result, ss);
    rmcap::write_text_file((out / "results.csv").string(), ss.str());
  }
  {
    std::ostringstream ss;
    rmcap::write_timings_csv(result, ss);
    rmcap::write_text_file((out / "timings.csv").string(), ss.str());
  }
  for (const rmcap::PolicyReport& rep : result.reports) {
    std::ostringstream full, grid;
    rmcap::write_ecdf_dat(rep, full);
    rmcap::write_ecdf_grid7(rep, grid);
    rmcap::write_text_file((out / ("ecdf_" + rep.label + ".dat")).string(),
                           full.str());
    rmcap::write_text_file((out / ("ecdf7_" + rep.label + ".dat")).string(),
                           grid.str());
  }
  {
    std::ostringstream ss;
    rmcap::write_summary(result.reports, ss);
    rmcap::write_text_file((out / "summary.txt").string(), ss.str());
  }
  json run;
  run["format"] = "rmcap-run-v1";
  run["version"] = rmcap::kVersion;
  run["instance"] = inst.label;
  run["instance_path"] = spec.instance_path;
  run["paths"] = spec.path_count;
  run["cv"] = spec.cv;
  run["seed"] = spec.seed;
  run["budget_s"] = spec.budget_s;
  run["max_nodes"] = spec.max_nodes;
  run["workers"] = result.workers;
  run["total_seconds"] = result.total_seconds;
  json pols = json::array();
  for (const rmcap::PolicyReport& rep : result.reports) {
    json p;
    p["policy"] = rep.label;
    p["fractions"] = rep.spec.fractions.empty()
                         ? rmcap::default_fractions(rep.spec.kind)
                         : rep.spec.fractions;
    p["mean"] = rep.summary.mean;
    p["stddev"] = rep.summary.stddev;
    p["min"] = rep.summary.min;
    p["max"] = rep.summary.max;
    pols.push_back(p);
  }
  run["policies"] = pols;
  emit(run, (out / "run.json").string());
  std::cout << "simulated " << result.paths.size() << " paths x "
            << result.reports.size() << " policies -> " << a.out_dir << " ("
            << rmcap::fmt_fixed(result.total_seconds, 2) << "s, " << workers
            << (workers == 1 ? " worker)" : " workers)") << "\n";

  if (a.strict) {
    for (const auto& policy_runs : result.runs)
      for (const auto& r : policy_runs)
        for (const auto& rec : r.solve_log)
          if (rec.status == rmcap::SolveStatus::Incumbent) {
            std::cerr << "at least one solve hit its budget before optimality\n";
            return kExitTruncated;
          }
  }
  return kExitOk;
}

struct ReportArgs {
  std::string results;
  std::string out_dir;
};

int run_report(const ReportArgs& a) {
  std::ifstream in(a.results);
  if (!in) throw std::runtime_error("cannot open file: " + a.results);
  rmcap::ResultsTable table = rmcap::read_results_csv(in);
  fs::path out(a.out_dir);
  fs::create_directories(out);
  std::vector<rmcap::PolicyReport> reports;
  for (std::size_t i = 0; i < table.labels.size(); ++i) {
    rmcap::PolicyReport rep;
    rep.label = table.labels[i];
    rep.profits = table.profits[i];
    rep.points = rmcap::ecdf(rep.profits);
    rep.summary = rmcap::summarize(rep.profits);
    std::ostringstream full, grid;
    rmcap::write_ecdf_dat(rep, full);
    rmcap::write_ecdf_grid7(rep, grid);
    rmcap::write_text_file((out / ("ecdf_" + rep.label + ".dat")).string(),
                           full.str());
    rmcap::write_text_file((out / ("ecdf7_" + rep.label + ".dat")).string(),
                           grid.str());
    reports.push_back(std::move(rep));
  }
  std::ostringstream ss;
  rmcap::write_summary(reports, ss);
  rmcap::write_text_file((out / "summary.txt").string(), ss.str());
  std::cout << "report for " << reports.size() << " policies -> " << a.out_dir
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"booking control and collection planning toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rmcap::kToolName) + " " +
                                        rmcap::kVersion);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "build a booking instance from a customer data file");
  gen->add_option("--data", gen_args.data, "customer data file (VEHICLE/CUSTOMER layout)")
      ->required();
  gen->add_option("--out", gen_args.out, "instance JSON to write")->required();
  gen->add_option("--n", gen_args.n, "number of customer zones");
  gen->add_option("--class", gen_args.cls, "topology class label (C, R or RC)");
  gen->add_option("--kappa", gen_args.kappa,
                  "pricing constant (default: mean demand x mean arc cost)");
  gen->add_option("--q", gen_args.capacity,
                  "vehicle capacity: 'file', 'auto' or a number");
  gen->add_option("--lf-min", gen_args.lf_min, "smallest acceptable load factor");
  gen->add_option("--lf-max", gen_args.lf_max, "largest acceptable load factor");
  gen->add_option("--t", gen_args.horizon,
                  "booking horizon (default: 5 x ceil(total mean demand))");
  gen->add_option("--seed", gen_args.seed, "generation seed to record");

  PathsArgs paths_args;
  auto* paths = app.add_subcommand("paths", "sample booking request paths");
  paths->add_option("--instance", paths_args.instance, "instance JSON")->required();
  paths->add_option("--out", paths_args.out_dir, "output directory")->required();
  paths->add_option("--count", paths_args.count, "number of paths");
  paths->add_option("--cv", paths_args.cv, "coefficient of variation of totals");
  paths->add_option("--seed", paths_args.seed, "master seed");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "solve one collection problem");
  solve->add_option("--instance", solve_args.instance, "instance JSON")->required();
  solve->add_option("--state", solve_args.state,
                    "accepted-state file (one integer per zone; default all zero)");
  solve->add_option("--out", solve_args.out, "solution JSON (stdout if omitted)");
  solve->add_flag("--pmvrp", solve_args.pmvrp,
                  "maximize profit with extra pickups instead of minimizing cost");
  solve->add_option("--mu-t", solve_args.mu_t_file,
                    "extra-pickup bounds file (default: expected remaining demand)");
  solve->add_option("--t", solve_args.t,
                    "period for the default extra-pickup bounds");
  solve->add_option("--budget-s", solve_args.budget_s, "wall-clock budget per solve");
  solve->add_option("--max-nodes", solve_args.max_nodes,
                    "deterministic search-node budget (0 = unlimited)");
  solve->add_option("--hk-limit", solve_args.hk_limit,
                    "largest route size for the exact subset table");
  solve->add_flag("--strict", solve_args.strict,
                  "exit 4 when the budget expires before optimality");
  solve->add_option("--export-lp", solve_args.export_lp,
                    "also write the model in LP format");
  solve->add_flag("--export-only", solve_args.export_only,
                  "write the LP model and skip solving");

  DpArgs dp_args;
  auto* dp = app.add_subcommand("dp", "exact expected-profit value of a booking state");
  dp->add_option("--instance", dp_args.instance, "instance JSON")->required();
  dp->add_option("--state", dp_args.state,
                 "accepted-state file (default all zero)");
  dp->add_option("--t", dp_args.t, "booking period (1..horizon+1)");
  dp->add_option("--control", dp_args.control,
                 "also report the optimal accept/reject for this zone");
  dp->add_option("--state-cap", dp_args.state_cap,
                 "abort if more (period, state) entries would be stored");
  dp->add_option("--budget-s", dp_args.budget_s,
                 "wall-clock budget per collection solve");
  dp->add_option("--out", dp_args.out, "output JSON (stdout if omitted)");

  SimArgs sim_args;
  std::uint64_t sim_seed_opt = 0;
  auto* sim = app.add_subcommand("simulate", "replay policies over sampled demand paths");
  sim->add_option("--spec", sim_args.spec, "experiment spec file")->required();
  sim->add_option("--out", sim_args.out_dir, "output directory")->required();
  sim->add_option("--workers", sim_args.workers,
                  "worker threads (default: RMCAP_WORKERS or 1)");
  auto* seed_opt =
      sim->add_option("--seed", sim_seed_opt, "override the spec's seed");
  sim->add_flag("--strict", sim_args.strict,
                "exit 4 when any solve hit its budget before optimality");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "rebuild distribution files from a results CSV");
  report->add_option("--results", report_args.results, "results.csv from simulate")
      ->required();
  report->add_option("--out", report_args.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return run_gen(gen_args);
    if (*paths) return run_paths(paths_args);
    if (*solve) return run_solve(solve_args);
    if (*dp) return run_dp(dp_args);
    if (*sim) {
      if (seed_opt->count() > 0) sim_args.seed = sim_seed_opt;
      return run_simulate(sim_args);
    }
    if (*report) return run_report(report_args);
  } catch (const rmcap::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
