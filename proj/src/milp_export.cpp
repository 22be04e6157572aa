#include "rmcap/milp_export.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rmcap/util.hpp"

namespace rmcap {

namespace {

std::string var_a(int k, int i, int j) {
  return "a_" + std::to_string(k) + "_" + std::to_string(i) + "_" + std::to_string(j);
}
std::string var_b(int k, int i) {
  return "b_" + std::to_string(k) + "_" + std::to_string(i);
}
std::string var_q(int k, int j) {
  return "q_" + std::to_string(k) + "_" + std::to_string(j);
}
std::string var_f(int k, int i, int j) {
  return "f_" + std::to_string(k) + "_" + std::to_string(i) + "_" + std::to_string(j);
}
std::string var_y(int j) { return "y_" + std::to_string(j); }

// One linear expression, written as "c1 x1 + c2 x2 - c3 x3".
struct Expr {
  std::ostringstream out;
  bool first = true;

  void add(double coef, const std::string& var) {
    if (coef == 0) return;
    if (first) {
      if (coef < 0) out << "- ";
      first = false;
    } else {
      out << (coef < 0 ? " - " : " + ");
    }
    double mag = std::abs(coef);
    if (mag != 1.0) out << fmt_g(mag) << " ";
    out << var;
  }

  std::string str() const { return first ? "0 " + var_b(1, 0) : out.str(); }
};

}  // namespace

void export_milp(const Instance& inst, const SystemState& w,
                 const std::vector<double>* mu_t, std::ostream& out) {
  validate(inst);
  if (w.size() != static_cast<std::size_t>(inst.n) + 1)
    throw std::invalid_argument("state must be node-indexed (n+1)");
  if (mu_t && mu_t->size() != static_cast<std::size_t>(inst.n) + 1)
    throw std::invalid_argument("mu_t must be node-indexed (n+1)");

  const int n = inst.n;
  const int k = inst.vehicles();
  const bool profit = mu_t != nullptr;

  out << "\\ " << kToolName << " " << kVersion << " "
      << (profit ? "profit-max collection model" : "min-cost collection model")
      << "\n";
  out << "\\ instance " << inst.label << ", zones " << n << ", vehicles " << k
      << "\n";
  out << "\\ connectivity via single-commodity flow (f <= n a)\n";

  // Objective.
  Expr obj;
  if (profit)
    for (int j = 1; j <= n; ++j) obj.add(inst.price[j], var_y(j));
  for (int v = 1; v <= k; ++v)
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        if (i == j) continue;
        obj.add(profit ? -inst.cost[i][j] : inst.cost[i][j], var_a(v, i, j));
      }
  out << (profit ? "Maximize\n" : "Minimize\n");
  out << " obj: " << obj.str() << "\n";

  out << "Subject To\n";
  // Degree constraints: arcs out of and into a node match its visit flag.
  for (int v = 1; v <= k; ++v)
    for (int i = 0; i <= n; ++i) {
      Expr e;
      for (int j = 0; j <= n; ++j)
        if (j != i) e.add(1, var_a(v, i, j));
      e.add(-1, var_b(v, i));
      out << " deg_out_" << v << "_" << i << ": " << e.str() << " = 0\n";
      Expr g;
      for (int j = 0; j <= n; ++j)
        if (j != i) g.add(1, var_a(v, j, i));
      g.add(-1, var_b(v, i));
      out << " deg_in_" << v << "_" << i << ": " << g.str() << " = 0\n";
    }
  // Each zone is served by at most one vehicle.
  for (int j = 1; j <= n; ++j) {
    Expr e;
    for (int v = 1; v <= k; ++v) e.add(1, var_b(v, j));
    out << " visit_" << j << ": " << e.str() << " <= 1\n";
  }
  // At most K vehicles leave the depot.
  {
    Expr e;
    for (int v = 1; v <= k; ++v) e.add(1, var_b(v, 0));
    out << " fleet: " << e.str() << " <= " << k << "\n";
  }
  // Collected amounts need a visit and respect vehicle capacity.
  for (int v = 1; v <= k; ++v) {
    for (int j = 1; j <= n; ++j) {
      Expr e;
      e.add(1, var_q(v, j));
      e.add(-inst.fleet[v - 1], var_b(v, j));
      out << " link_" << v << "_" << j << ": " << e.str() << " <= 0\n";
    }
    Expr e;
    for (int j = 1; j <= n; ++j) e.add(1, var_q(v, j));
    out << " cap_" << v << ": " << e.str() << " <= " << fmt_g(inst.fleet[v - 1])
        << "\n";
  }
  // Every committed unit is collected; extra pickups appear only in the
  // profit model.
  for (int j = 1; j <= n; ++j) {
    Expr e;
    for (int v = 1; v <= k; ++v) e.add(1, var_q(v, j));
    if (profit) e.add(-1, var_y(j));
    out << " serve_" << j << ": " << e.str() << " = " << w[j] << "\n";
  }
  // Flow conservation: each visited zone consumes one unit originating at
  // the depot, which rules out depot-free cycles.
  for (int v = 1; v <= k; ++v)
    for (int i = 1; i <= n; ++i) {
      Expr e;
      for (int j = 0; j <= n; ++j)
        if (j != i) e.add(1, var_f(v, j, i));
      for (int j = 0; j <= n; ++j)
        if (j != i) e.add(-1, var_f(v, i, j));
      e.add(-1, var_b(v, i));
      out << " flow_" << v << "_" << i << ": " << e.str() << " = 0\n";
    }
  for (int v = 1; v <= k; ++v)
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        if (i == j) continue;
        Expr e;
        e.add(1, var_f(v, i, j));
        e.add(-static_cast<double>(n), var_a(v, i, j));
        out << " fcap_" << v << "_" << i << "_" << j << ": " << e.str()
            << " <= 0\n";
      }

  out << "Bounds\n";
  if (profit)
    for (int j = 1; j <= n; ++j)
      out << " 0 <= " << var_y(j) << " <= " << fmt_g(std::max(0.0, (*mu_t)[j]))
          << "\n";

  out << "Binaries\n";
  for (int v = 1; v <= k; ++v) {
    std::ostringstream line;
    for (int i = 0; i <= n; ++i) line << " " << var_b(v, i);
    out << line.str() << "\n";
    std::ostringstream arcs;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        if (i != j) arcs << " " << var_a(v, i, j);
    out << arcs.str() << "\n";
  }
  out << "End\n";
}

void export_milp_file(const Instance& inst, const SystemState& w,
                      const std::vector<double>* mu_t,
                      const std::string& path) {
  std::ostringstream ss;
  export_milp(inst, w, mu_t, ss);
  write_text_file(path, ss.str());
}

}  // namespace rmcap
