#pragma once

#include <limits>
#include <string>
#include <vector>

#include "eisenhart/odeint.hpp"

namespace eisenhart {

// A solved curve.  Two state layouts share this type:
//   base: Hamiltonian solutions, parameter t, state (x1..xn, xdot1..xdotn)
//   lift: geodesics, parameter s, state (v, t, x1..xn, vdot, tdot, xdot1..xdotn)
struct Trajectory {
  SolveOutput sol;
  int n = 0;
  bool is_lift = false;
  std::string metric_id;
  double initial_norm = std::numeric_limits<double>::quiet_NaN();

  double param_start() const { return sol.grid.front(); }
  double param_end() const { return sol.grid.back(); }

  Vec x_at(double p) const;     // spatial position
  Vec xdot_at(double p) const;  // spatial velocity (w.r.t. the curve parameter)
};

// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

// CSV emitters.  One row per grid node, LF endings, headers as documented in
// the README.  Lift schema: s,v,t,x1..xn,vdot,tdot,xdot1..xdotn.
void write_lift_csv(const std::string& path, const Trajectory& tr);
// Base schema: t,x1..xn,xdot1..xdotn.
void write_base_csv(const std::string& path, const Trajectory& tr);
// Generic two-plus column writer for plot data (t,value pairs etc.).
void write_columns_csv(const std::string& path, const std::vector<std::string>& headers,
                       const std::vector<Vec>& rows);

}  // namespace eisenhart
