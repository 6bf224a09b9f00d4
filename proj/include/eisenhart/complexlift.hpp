#pragma once

#include <complex>

#include "eisenhart/genmetric.hpp"
#include "eisenhart/lift.hpp"
#include "eisenhart/odeint.hpp"
#include "eisenhart/potentials.hpp"
#include "eisenhart/trajectory.hpp"

namespace eisenhart {

// Planar Newton system z'' = F(z) with F = V_x - i V_y for a harmonic V.
// Harmonicity of V is exactly the Cauchy-Riemann system for F, so F is
// holomorphic; both residuals are measured at construction and kept here.
struct HolomorphicSystem {
  PotentialSpec V;  // n = 2, time-independent, harmonic
  double max_laplacian = 0.0;    // harmonicity residual over the sample box
  double max_cr_residual = 0.0;  // Cauchy-Riemann residual of F, same samples

  std::complex<double> F(std::complex<double> z) const;
};

// Builds F from the potential; V -> F is the constructive direction (the
// antiderivative F -> V needs a path integral and is not provided).  Rejects
// non-harmonic V with the worst |Delta V| over 100 samples in [-2,2]^2.
HolomorphicSystem f_from_potential(const PotentialSpec& V);

// Split-signature pp-wave  2 dv dt - 2 V dt^2 - dx^2 + dy^2, signature
// (-,-,+,+).  Realized as the Brinkmann machinery with weights (-1, +1);
// coordinate order and CSV schema are shared with the Lorentzian lift.
struct SplitMetric {
  BrinkmannMetric g;

  const PotentialSpec& V() const { return g.V; }
};

SplitMetric make_split(PotentialSpec V);

double split_metric_value(const SplitMetric& m, const Vec& p, const Vec& X, const Vec& Y);

// v'' = V_t t'^2 + 2 t' (V_x x' + V_y y'),  t'' = 0,  x'' = +V_x t'^2,
// y'' = -V_y t'^2.  The flipped x sign is the -dx^2 term at work.
LiftState split_geodesic_rhs(const SplitMetric& m, const LiftState& st);

// Initial data lifting z(t): z'' = F(z), z(t0) = z0, z'(t0) = zdot0.
// q = (0, t0, x0, y0), qdot = (vdot0, 1, xdot0, ydot0) with
//   vdot0 = V(z0) + xdot0^2/2 - ydot0^2/2 + eps
// so the split-metric norm equals the causal target 2 eps.
LiftState complex_lift_initial(const PotentialSpec& V, double t0, std::complex<double> z0,
                               std::complex<double> zdot0, const CausalClass& c);

Trajectory integrate_split_lift(const SplitMetric& m, const LiftState& st0, double s0,
                                double s1, const IntegratorConfig& cfg);

struct ComplexReport {
  double max_residual = 0.0;
  bool pass = false;
};

// Residual sup |(x'', y'') - F(x, y)| over the dense grid of a base
// trajectory, second derivatives by a 5-point stencil of step fd_step on the
// interpolant.  The stencil stays inside one Hermite interval at the default
// step, so grids coarser than ~1e-3 dominate the residual; integrate with a
// max_step cap when verifying at tight tolerances.
ComplexReport verify_complex_solution(const Trajectory& traj, const HolomorphicSystem& H,
                                      double tol, double fd_step = 1e-4);

struct BlowupReport {
  bool blown_up = false;
  bool has_bracket = false;
  double bracket_lo = 0.0;  // last accepted parameter
  double bracket_hi = 0.0;  // parameter of the rejected attempt
  SolveStatus status = SolveStatus::completed;
  double t_reached = 0.0;
  Trajectory path;  // base layout, valid up to t_reached
};

// Integrates z'' = F(z) up to the horizon; blown_up reports a suspected
// finite-time escape (norm threshold crossed), never a certified blow-up.
BlowupReport detect_blowup(const HolomorphicSystem& H, std::complex<double> z0,
                           std::complex<double> zdot0, double horizon,
                           const IntegratorConfig& cfg = {});

GenericMetric generic_split(const SplitMetric& m);

}  // namespace eisenhart
