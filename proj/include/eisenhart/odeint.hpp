#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "eisenhart/linalg.hpp"

namespace eisenhart {

struct OdeSystem {
  int dim = 0;
  // rhs(s, y, dydt) writes dim entries into dydt (preallocated).
  std::function<void(double, const Vec&, Vec&)> rhs;
};

enum class Method { rk4_fixed, dp54_adaptive };

enum class SolveStatus { completed, blowup_suspected, step_limit };

struct IntegratorConfig {
  Method method = Method::dp54_adaptive;
  double h0 = 1e-3;            // initial (adaptive) or nominal (fixed) step
  double rtol = 1e-10;
  double atol = 1e-10;
  double max_step = 0.0;       // 0 means |s1 - s0|
  long max_steps = 1000000;
  double blowup_norm = 1e8;    // sup-norm threshold for blow-up suspicion
};

// Accepted-step grid with states, right-hand sides at the nodes, and a cubic
// Hermite interpolant between them.  The grid is strictly monotone; it runs
// backwards when s1 < s0.
class SolveOutput {
 public:
  std::vector<double> grid;
  std::vector<Vec> states;
  std::vector<Vec> derivs;
  SolveStatus status = SolveStatus::completed;

  // When status is blowup_suspected, the integration is trusted on
  // [grid.front(), grid.back()] and the parameter of the step that was never
  // completed; together they bracket where the solution left control.
  double attempted_next = std::numeric_limits<double>::quiet_NaN();

  bool forward() const { return grid.size() < 2 || grid.back() >= grid.front(); }
  double param_start() const { return grid.front(); }
  double param_end() const { return grid.back(); }

  Vec eval(double s) const;            // dense output (cubic Hermite)
  Vec eval_derivative(double s) const; // d/ds of the interpolant

  // Index k with s between grid[k] and grid[k+1]; throws std::out_of_range
  // beyond the grid (with a tiny roundoff allowance at the ends).
  int locate(double s) const;
};

// Integrates sys from y0 over [s0, s1] (either direction).  Throws
// std::invalid_argument on bad configuration and std::runtime_error when the
// right-hand side returns non-finite values that step control cannot absorb.
SolveOutput integrate(const OdeSystem& sys, Vec y0, double s0, double s1,
                      const IntegratorConfig& cfg);

struct EventSpec {
  std::function<double(double, const Vec&)> g;
  double refine_tol = 1e-10;  // bisection bracket width in the parameter
  int direction = 0;          // -1: + to -, +1: - to +, 0: both
  int subsamples = 6;         // dense samples per grid interval when scanning
};

struct EventHit {
  double s;
  Vec y;
};

// Every sign change of g along the dense output, refined by bisection
// (at most 80 iterations per event).
std::vector<EventHit> locate_events(const SolveOutput& out, const EventSpec& ev);

}  // namespace eisenhart
