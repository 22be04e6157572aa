#include "rmcap/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "rmcap/util.hpp"

namespace rmcap {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool parse_double(const std::string& tok, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(tok, &used);
    return used == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

}  // namespace

double Instance::max_capacity() const {
  double m = 0;
  for (double q : fleet) m = std::max(m, q);
  return m;
}

double Instance::total_capacity() const {
  double s = 0;
  for (double q : fleet) s += q;
  return s;
}

double Instance::total_mean_demand() const {
  double s = 0;
  for (int j = 1; j <= n; ++j) s += mean_demand[j];
  return s;
}

void validate(const Instance& inst) {
  if (inst.n < 1) throw std::invalid_argument("instance needs at least one zone");
  const std::size_t m = static_cast<std::size_t>(inst.n) + 1;
  if (inst.cost.size() != m)
    throw std::invalid_argument("cost matrix must be (n+1)x(n+1)");
  for (const auto& row : inst.cost) {
    if (row.size() != m)
      throw std::invalid_argument("cost matrix must be (n+1)x(n+1)");
    for (double c : row)
      if (!(c >= 0) || !std::isfinite(c))
        throw std::invalid_argument("arc costs must be finite and nonnegative");
  }
  if (inst.fleet.empty()) throw std::invalid_argument("fleet must be nonempty");
  for (double q : inst.fleet)
    if (!(q > 0) || !std::isfinite(q))
      throw std::invalid_argument("vehicle capacities must be positive");
  if (inst.price.size() != m || inst.mean_demand.size() != m)
    throw std::invalid_argument("price and mean_demand must be node-indexed (n+1)");
  for (int j = 1; j <= inst.n; ++j) {
    if (!(inst.price[j] > 0) || !std::isfinite(inst.price[j]))
      throw std::invalid_argument("zone prices must be positive");
    if (!(inst.mean_demand[j] >= 0) || !std::isfinite(inst.mean_demand[j]))
      throw std::invalid_argument("mean demands must be nonnegative");
  }
  if (inst.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  const std::string& lb = inst.label;
  auto dot = lb.find('.');
  bool ok = dot != std::string::npos && dot > 0 && dot + 1 < lb.size();
  if (ok) {
    std::string cls = lb.substr(0, dot);
    ok = (cls == "C" || cls == "R" || cls == "RC");
    for (std::size_t i = dot + 1; ok && i < lb.size(); ++i)
      ok = std::isdigit(static_cast<unsigned char>(lb[i])) != 0;
  }
  if (!ok)
    throw std::invalid_argument("label must look like C.15 / R.10 / RC.25, got '" +
                                lb + "'");
}

ParseError::ParseError(int line_arg, const std::string& what_arg)
    : std::runtime_error("line " + std::to_string(line_arg) + ": " + what_arg),
      line(line_arg) {}

SolomonData parse_solomon(std::istream& in) {
  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) lines.push_back(raw);

  SolomonData data;
  std::size_t i = 0;
  auto next_nonempty = [&]() -> bool {
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    return i < lines.size();
  };

  if (!next_nonempty()) throw ParseError(1, "empty file");
  data.name = trim(lines[i++]);

  // VEHICLE section: header line, column names, then "NUMBER CAPACITY".
  while (i < lines.size() && upper(trim(lines[i])) != "VEHICLE") ++i;
  if (i == lines.size())
    throw ParseError(static_cast<int>(lines.size()), "missing VEHICLE section");
  ++i;
  bool have_fleet = false;
  for (; i < lines.size(); ++i) {
    std::string t = trim(lines[i]);
    if (t.empty()) continue;
    if (upper(t) == "CUSTOMER") break;
    auto toks = tokens(t);
    double num = 0, cap = 0;
    if (toks.size() >= 2 && parse_double(toks[0], num) && parse_double(toks[1], cap)) {
      if (num < 1 || num != std::floor(num))
        throw ParseError(static_cast<int>(i + 1), "vehicle NUMBER must be a positive integer");
      if (!(cap > 0))
        throw ParseError(static_cast<int>(i + 1), "vehicle CAPACITY must be positive");
      data.vehicle_count = static_cast<int>(num);
      data.capacity = cap;
      have_fleet = true;
      ++i;
      break;
    }
    // otherwise a column header line; keep scanning
  }
  if (!have_fleet)
    throw ParseError(static_cast<int>(std::min(i + 1, lines.size())),
                     "missing NUMBER/CAPACITY row in VEHICLE section");

  while (i < lines.size() && upper(trim(lines[i])) != "CUSTOMER") ++i;
  if (i == lines.size())
    throw ParseError(static_cast<int>(lines.size()), "missing CUSTOMER section");
  ++i;

  bool seen_depot = false;
  bool table_started = false;
  int expected_id = 0;
  for (; i < lines.size(); ++i) {
    std::string t = trim(lines[i]);
    if (t.empty()) continue;
    auto toks = tokens(t);
    double first = 0;
    if (!parse_double(toks[0], first)) {
      if (!table_started) continue;  // column header line(s)
      throw ParseError(static_cast<int>(i + 1), "malformed customer row: '" + t + "'");
    }
    table_started = true;
    if (toks.size() < 4)
      throw ParseError(static_cast<int>(i + 1),
                       "customer row needs at least id, x, y, demand");
    double vals[4];
    for (int k = 0; k < 4; ++k)
      if (!parse_double(toks[k], vals[k]))
        throw ParseError(static_cast<int>(i + 1),
                         "not a number in customer row: '" + toks[k] + "'");
    if (vals[0] != std::floor(vals[0]) || vals[0] < 0)
      throw ParseError(static_cast<int>(i + 1), "customer id must be a nonnegative integer");
    int id = static_cast<int>(vals[0]);
    if (id != expected_id)
      throw ParseError(static_cast<int>(i + 1),
                       "customer ids must be consecutive from 0, expected " +
                           std::to_string(expected_id));
    if (vals[3] < 0)
      throw ParseError(static_cast<int>(i + 1), "demand must be nonnegative");
    SolomonCustomer c{vals[1], vals[2], vals[3]};
    if (id == 0) {
      data.depot = c;
      seen_depot = true;
    } else {
      data.customers.push_back(c);
    }
    ++expected_id;
  }
  if (!table_started)
    throw ParseError(static_cast<int>(lines.size()), "empty CUSTOMER table");
  if (!seen_depot)
    throw ParseError(static_cast<int>(lines.size()), "missing depot row (id 0)");
  if (data.customers.empty())
    throw ParseError(static_cast<int>(lines.size()), "no customer rows after the depot");
  return data;
}

SolomonData parse_solomon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  try {
    return parse_solomon(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line, path + ": " + std::string(e.what()));
  }
}

std::vector<double> set_prices(const std::vector<double>& mu, double kappa) {
  if (!(kappa > 0)) throw std::invalid_argument("kappa must be positive");
  if (mu.size() < 2) throw std::invalid_argument("need at least one zone");
  std::vector<double> price(mu.size(), 0.0);
  for (std::size_t j = 1; j < mu.size(); ++j) {
    if (!(mu[j] > 0))
      throw std::invalid_argument("price undefined for zone " + std::to_string(j) +
                                  ": mean demand is zero");
    price[j] = kappa / mu[j];
  }
  return price;
}

double load_factor(const Instance& inst) {
  double cap = inst.total_capacity();
  if (!(cap > 0)) throw std::invalid_argument("fleet capacity must be positive");
  return inst.total_mean_demand() / cap;
}

int select_fleet(const std::vector<double>& mu, double q, double lf_min,
                 double lf_max) {
  if (!(q > 0)) throw std::invalid_argument("capacity must be positive");
  if (!(lf_min > 0) || lf_max < lf_min)
    throw std::invalid_argument("load-factor band must satisfy 0 < lf_min <= lf_max");
  double total = 0;
  for (std::size_t j = 1; j < mu.size(); ++j) total += mu[j];
  // Largest K with lf_min <= total/(K q) <= lf_max.
  int k_hi = static_cast<int>(std::floor(total / (q * lf_min) + 1e-9));
  int k_lo = static_cast<int>(std::ceil(total / (q * lf_max) - 1e-9));
  k_lo = std::max(k_lo, 1);
  if (k_hi >= k_lo) return k_hi;
  std::ostringstream msg;
  msg << "no fleet size gives a load factor in [" << fmt_g(lf_min) << ", "
      << fmt_g(lf_max) << "] for total demand " << fmt_g(total) << " and capacity "
      << fmt_g(q) << "; attainable:";
  int probe_max = std::max(3, static_cast<int>(std::ceil(total / q)) + 1);
  for (int k = 1; k <= probe_max; ++k)
    msg << " K=" << k << " -> " << fmt_g(total / (k * q));
  throw std::invalid_argument(msg.str());
}

double euclidean_cost(double x1, double y1, double x2, double y2) {
  double d = std::hypot(x2 - x1, y2 - y1);
  return std::round(d * 10000.0) / 10000.0;
}

Instance build_instance(const SolomonData& data, const GenOptions& opt,
                        const std::string& source_name) {
  if (opt.n < 1) throw std::invalid_argument("need at least one zone");
  if (static_cast<int>(data.customers.size()) < opt.n)
    throw std::invalid_argument("data file has only " +
                                std::to_string(data.customers.size()) +
                                " customers, requested " + std::to_string(opt.n));

  Instance inst;
  inst.n = opt.n;
  inst.seed = opt.seed;
  inst.source_file = source_name;

  std::vector<SolomonCustomer> pts;
  pts.push_back(data.depot);
  for (int j = 0; j < opt.n; ++j) pts.push_back(data.customers[j]);

  const int m = opt.n + 1;
  inst.cost.assign(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j)
        inst.cost[i][j] = euclidean_cost(pts[i].x, pts[i].y, pts[j].x, pts[j].y);

  inst.mean_demand.assign(m, 0.0);
  for (int j = 1; j <= opt.n; ++j) inst.mean_demand[j] = pts[j].demand;
  double total_mu = inst.total_mean_demand();

  double q = 0;
  int k = 0;
  switch (opt.capacity_mode) {
    case GenOptions::CapacityMode::Explicit:
      q = opt.capacity;
      k = select_fleet(inst.mean_demand, q, opt.lf_min, opt.lf_max);
      break;
    case GenOptions::CapacityMode::File:
      q = data.capacity;
      k = select_fleet(inst.mean_demand, q, opt.lf_min, opt.lf_max);
      break;
    case GenOptions::CapacityMode::Auto:
      q = data.capacity;
      try {
        k = select_fleet(inst.mean_demand, q, opt.lf_min, opt.lf_max);
      } catch (const std::invalid_argument&) {
        // Fall back to a single vehicle sized for a mid-band load factor.
        q = std::ceil(total_mu / 1.25);
        k = select_fleet(inst.mean_demand, q, opt.lf_min, opt.lf_max);
      }
      break;
  }
  inst.fleet.assign(static_cast<std::size_t>(k), q);

  double kappa = opt.kappa;
  if (!(kappa > 0)) {
    // Default pricing constant: average mean demand times average arc cost,
    // which puts prices and typical detour costs on the same scale.
    double cost_sum = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j) cost_sum += inst.cost[i][j];
    double mean_cost = cost_sum / (static_cast<double>(m) * (m - 1));
    kappa = (total_mu / opt.n) * mean_cost;
  }
  inst.kappa = kappa;
  inst.price = set_prices(inst.mean_demand, kappa);

  inst.horizon = opt.horizon > 0
                     ? opt.horizon
                     : 5 * static_cast<int>(std::ceil(total_mu));

  std::string cls = opt.label_class;
  if (cls.empty()) {
    // Infer the topology class from the source file name (rc before r/c).
    std::string base = source_name;
    if (auto pos = base.find_last_of("/\\"); pos != std::string::npos)
      base = base.substr(pos + 1);
    std::string lower;
    for (char c : base)
      lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower.rfind("rc", 0) == 0) cls = "RC";
    else if (lower.rfind("r", 0) == 0) cls = "R";
    else if (lower.rfind("c", 0) == 0) cls = "C";
    else
      throw std::invalid_argument(
          "cannot infer topology class from '" + source_name +
          "'; pass it explicitly");
  }
  inst.source_class = cls;
  inst.label = cls + "." + std::to_string(opt.n);

  validate(inst);
  return inst;
}

namespace {

using nlohmann::json;

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json j;
  j["format"] = "rmcap-instance-v1";
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["label"] = inst.label;
  j["n"] = inst.n;
  j["cost"] = inst.cost;
  j["fleet"] = inst.fleet;
  j["price"] = inst.price;
  j["mean_demand"] = inst.mean_demand;
  j["horizon"] = inst.horizon;
  j["kappa"] = inst.kappa;
  j["seed"] = inst.seed;
  j["source_file"] = inst.source_file;
  j["source_class"] = inst.source_class;
  return j.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("instance JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "rmcap-instance-v1")
      throw std::invalid_argument("unknown instance format '" +
                                  j.value("format", std::string("<missing>")) + "'");
    Instance inst;
    inst.label = j.at("label").get<std::string>();
    inst.n = j.at("n").get<int>();
    inst.cost = j.at("cost").get<std::vector<std::vector<double>>>();
    inst.fleet = j.at("fleet").get<std::vector<double>>();
    inst.price = j.at("price").get<std::vector<double>>();
    inst.mean_demand = j.at("mean_demand").get<std::vector<double>>();
    inst.horizon = j.at("horizon").get<int>();
    inst.kappa = j.value("kappa", 0.0);
    inst.seed = j.value("seed", std::uint64_t{0});
    inst.source_file = j.value("source_file", "");
    inst.source_class = j.value("source_class", "");
    validate(inst);
    return inst;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance JSON: ") + e.what());
  }
}

void save_instance(const Instance& inst, const std::string& path) {
  validate(inst);
  write_text_file(path, instance_to_json(inst));
}

Instance load_instance(const std::string& path) {
  return instance_from_json(read_text_file(path));
}

}  // namespace rmcap
