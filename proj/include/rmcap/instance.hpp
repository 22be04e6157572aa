#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmcap {

// Node 0 is the collection depot; customer zones are 1..n.  Every per-node
// vector in this codebase is sized n+1 and indexed by node id, with entry 0
// unused (kept at zero) so that indices never need shifting.
struct Instance {
  std::string label;                      // e.g. "C.15"
  int n = 0;                              // number of customer zones
  std::vector<std::vector<double>> cost;  // (n+1)x(n+1) arc costs, diagonal unused
  std::vector<double> fleet;              // vehicle capacities Q_k
  std::vector<double> price;              // unit collection price per zone
  std::vector<double> mean_demand;        // mean requests per zone over the horizon
  int horizon = 0;                        // number of booking periods T
  double kappa = 0.0;                     // pricing constant (metadata)
  std::uint64_t seed = 0;                 // generation seed (metadata)
  std::string source_file;                // originating data file, if any
  std::string source_class;               // C, R or RC

  int vehicles() const { return static_cast<int>(fleet.size()); }
  double max_capacity() const;
  double total_capacity() const;
  double total_mean_demand() const;
};

// Throws std::invalid_argument when a structural invariant is violated
// (sizes, signs, label shape).
void validate(const Instance& inst);

struct ParseError : std::runtime_error {
  ParseError(int line_arg, const std::string& what_arg);
  int line;
};

struct SolomonCustomer {
  double x = 0;
  double y = 0;
  double demand = 0;
};

struct SolomonData {
  std::string name;
  int vehicle_count = 0;
  double capacity = 0;
  SolomonCustomer depot;                  // customer id 0
  std::vector<SolomonCustomer> customers; // ids 1..m in file order
};

// Reads the classic VRP text layout: a name line, a VEHICLE section with
// NUMBER/CAPACITY, and a CUSTOMER table whose rows start with a numeric id.
// Columns beyond demand (time windows, service time) are ignored.
// Throws ParseError carrying the offending 1-based line number.
SolomonData parse_solomon(std::istream& in);
SolomonData parse_solomon_file(const std::string& path);

// Unit prices inversely proportional to mean demand: price[j] = kappa / mu[j]
// for j = 1..n.  mu is node-indexed (mu[0] ignored).  Throws when kappa <= 0
// or any priced zone has zero mean demand.
std::vector<double> set_prices(const std::vector<double>& mu, double kappa);

// Total mean demand divided by total fleet capacity.
double load_factor(const Instance& inst);

// Largest vehicle count K such that sum(mu) / (K * q) lies in
// [lf_min, lf_max]; throws std::invalid_argument when no K qualifies,
// listing the load factors that were attainable.
int select_fleet(const std::vector<double>& mu, double q, double lf_min,
                 double lf_max);

// Straight-line arc cost rounded to 4 decimals, which keeps instance files
// and recomputed costs in exact agreement.
double euclidean_cost(double x1, double y1, double x2, double y2);

struct GenOptions {
  enum class CapacityMode { File, Auto, Explicit };

  int n = 15;
  double lf_min = 1.0;
  double lf_max = 1.5;
  double kappa = 0.0;             // <= 0 selects the calibrated default
  CapacityMode capacity_mode = CapacityMode::Auto;
  double capacity = 0.0;          // used when capacity_mode == Explicit
  int horizon = 0;                // <= 0 selects 5 * ceil(total mean demand)
  std::uint64_t seed = 0;
  std::string label_class;        // empty = infer from source name
};

// Builds a booking instance from parsed customer data: the first opt.n
// customers become zones, costs are rounded Euclidean distances, the fleet
// is sized by select_fleet, and prices follow set_prices.  In Auto capacity
// mode the file capacity is tried first and, when no fleet size yields an
// in-range load factor, capacity falls back to ceil(sum(mu) / 1.25) with a
// single vehicle.
Instance build_instance(const SolomonData& data, const GenOptions& opt,
                        const std::string& source_name);

// JSON round trip (schema documented in docs/FORMATS.md).  Numeric fields
// survive save/load exactly.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);
void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace rmcap
