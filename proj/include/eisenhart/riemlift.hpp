#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eisenhart/genmetric.hpp"
#include "eisenhart/lift.hpp"
#include "eisenhart/odeint.hpp"
#include "eisenhart/potentials.hpp"
#include "eisenhart/trajectory.hpp"

namespace eisenhart {

// Riemannian metric dual to the pp-wave, coordinates (v, t, x1..xn):
//   gR = 2 dv^2 - 2V (dv dt + dt dv) + (1 + 4V^2)/2 dt^2 + sum_i (dx^i)^2.
// The (v,t) block has unit determinant, so gR is positive definite for any V.
struct RiemannianDualMetric {
  PotentialSpec V;

  int n() const { return V.n; }
  int dim() const { return V.n + 2; }
};

RiemannianDualMetric make_riemannian_dual(PotentialSpec V);

double riem_metric_value(const RiemannianDualMetric& m, const Vec& p, const Vec& X,
                         const Vec& Y);

double riem_norm(const RiemannianDualMetric& m, const LiftState& st);

// c0 = 2 vdot - 2 V tdot, constant along geodesics (Killing field in v).
double riem_c0(const RiemannianDualMetric& m, const LiftState& st);

// Geodesic acceleration with the conserved c0 substituted in:
//   tdd = 2 c0 sum_i V_i xdot_i,  xdd_i = -c0 V_i tdot,
//   vdd = (V_t tdot + sum_i V_i xdot_i) tdot + V tdd.
// c0 must match the state it came from; checked at 1e-12.
LiftState riem_geodesic_rhs(const RiemannianDualMetric& m, const LiftState& st, double c0);

// Integrates the geodesic flow; c0 is read off st0 once and held fixed.
Trajectory integrate_riem_geodesic(const RiemannianDualMetric& m, const LiftState& st0,
                                   double s0, double s1, const IntegratorConfig& cfg);

// Initial data of the square-root lift of a time-independent V:
//   q = (0, 0, x0),  qdot = (V(x0) tdot0 + c0/2,  2 c0 V(x0) + 2 c1,  xdot0),
// whose geodesic projects onto a solution of  xdd = -grad (c0 V + c1)^2.
// c0 = 0 is admissible but degenerate (t stays affine in s); *degenerate
// reports it when supplied.
LiftState sqrt_lift_initial(const PotentialSpec& V, const Vec& x0, const Vec& xdot0,
                            double c0, double c1, bool* degenerate = nullptr);

struct SqrtLiftReport {
  double max_gap = 0.0;       // sup |x_geodesic(s) - x_direct(s)|
  double c0_drift = 0.0;      // sup |riem_c0(state) - c0|
  double sqrt_drift = 0.0;    // sup |tdot^2/4 - (c0 V + c1)^2| vs initial value
  bool pass = false;
};

// Integrates the square-root lift and, independently, xdd = -grad (c0 V+c1)^2
// from the same base data; pass iff max_gap <= tol.
SqrtLiftReport verify_sqrt_lift(const PotentialSpec& V, const Vec& x0, const Vec& xdot0,
                                double c0, double c1, double horizon, double tol,
                                const IntegratorConfig& cfg = {});

struct ShootingConfig {
  double margin_min = 1e-6;  // floor for |v1 - straight-line average of V|
  double bvp_tol = 1e-8;     // Euclidean endpoint gap demanded of Newton
  int max_newton = 50;
  int extra_starts = 8;         // perturbed starts beyond the straight-line guess
  double perturb_scale = -1.0;  // < 0 -> 0.5 * (1 + |x1 - x0|)
  double jac_fd_step = 1e-6;    // forward-difference step scale for the Jacobian
  std::uint64_t seed = 0;
  IntegratorConfig integrator;  // tolerances tightened below the bvp_tol

  ShootingConfig() {
    integrator.rtol = 1e-12;
    integrator.atol = 1e-12;
  }
};

struct ShootingResult {
  Vec initial_velocity;     // converged qdot(0) in the original parametrization
  double terminal_gap = 0.0;
  double v1_margin = 0.0;
  double c0_raw = 0.0;
  bool rescaled = false;
  double c0_rescaled = 0.0;  // 1 within 1e-9 after rescaling
  double c = 0.0;            // taudot(0)/2 of the rescaled curve

  // Rescaled curve gamma~(t) on [0, c0_raw]: coordinate time tau(t) = gamma~^t
  // and the base curve x(t), both in the rescaled affine parameter.
  std::vector<std::array<double, 3>> tau_samples;  // (t, tau, taudot)
  Trajectory x_curve;                              // base layout
  Trajectory geodesic;                             // rescaled lift layout

  double tv_residual = 0.0;  // sup |xdd + 2 (c + I(t)) grad V(tau(t), x)|
  double taudot_gap = 0.0;   // sup |taudot - 2 (c + I(t))|, same identity
  double coe_drift = 0.0;    // sup | |xdot|^2/2 + taudot^2/4 - initial |

  std::vector<Vec> alternates;     // other converged initial velocities
  int converged_start_index = -1;
  int newton_iterations = 0;
};

// Connects (0, 0, x0) to (v1, 1, x1) at s = 1 by damped-Newton shooting on the
// initial velocity, then rescales the affine parameter so c0 = 1 and
// re-integrates with the running integral I(t) = int grad V . xdot dt carried
// as a quadrature state.  Throws std::invalid_argument when v1 sits within
// margin_min of the straight-line average of V (degenerate boundary data) and
// std::runtime_error when no start converges.
ShootingResult shoot_two_point(const PotentialSpec& V, const Vec& x0, const Vec& x1,
                               double v1, const ShootingConfig& cfg = {});

// Energy drift sup |Q - Q(0)|, Q = |xdot|^2/2 + taudot^2/4.
double coe_check(const ShootingResult& r);
double coe_check(const Trajectory& riem_lift);

// CSV columns: t,tau,taudot,x1..xn,xdot1..xdotn over the rescaled curve.
void write_shooting_csv(const ShootingResult& r, const std::string& path);

GenericMetric generic_riem(const RiemannianDualMetric& m);

}  // namespace eisenhart
