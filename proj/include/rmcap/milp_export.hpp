#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rmcap/instance.hpp"
#include "rmcap/routing.hpp"

namespace rmcap {

// Writes the collection problem as a CPLEX-LP-format mixed-integer model so
// the built-in search can be cross-checked against any off-the-shelf solver.
// Connectivity is enforced with single-commodity flow variables instead of
// exponentially many subtour cuts, which keeps the file polynomial in size.
//
// With mu_t == nullptr the model is the minimum-cost collection of w; with
// mu_t set it is the profit-maximizing variant with extra pickups bounded by
// mu_t.  Variables: a_k_i_j arc use, b_k_i visit, q_k_j collected amount,
// f_k_i_j flow, y_j extra pickups.
void export_milp(const Instance& inst, const SystemState& w,
                 const std::vector<double>* mu_t, std::ostream& out);
void export_milp_file(const Instance& inst, const SystemState& w,
                      const std::vector<double>* mu_t,
                      const std::string& path);

}  // namespace rmcap
