#pragma once

#include <string>

#include "eisenhart/odeint.hpp"
#include "eisenhart/potentials.hpp"
#include "eisenhart/trajectory.hpp"

namespace eisenhart {

// Point/velocity on a lifted spacetime; coordinates ordered (v, t, x1..xn).
struct LiftState {
  Vec q;
  Vec qdot;
};

enum class CausalKind { lightlike, unit_timelike, unit_spacelike };

// The vertical-velocity offset epsilon and the target value of g(q',q').
struct CausalClass {
  CausalKind kind = CausalKind::lightlike;
  double epsilon = 0.0;      // 0, -1/2, +1/2
  double norm_target = 0.0;  // 0, -1, +1

  static CausalClass make(CausalKind k);
  static CausalClass lightlike() { return make(CausalKind::lightlike); }
  static CausalClass unit_timelike() { return make(CausalKind::unit_timelike); }
  static CausalClass unit_spacelike() { return make(CausalKind::unit_spacelike); }
};

CausalKind causal_kind_from_string(const std::string& s);

// Brinkmann pp-wave  g = 2 dv dt - 2 V(t,x) dt^2 + sum_i a_i (dx^i)^2.
// a_i are nonzero anisotropy weights; a = 1 is the standard lift.
struct BrinkmannMetric {
  PotentialSpec V;
  Vec a;  // size n; empty means all ones

  int n() const { return V.n; }
  int dim() const { return V.n + 2; }
  double weight(int i) const { return a.empty() ? 1.0 : a[i]; }
};

BrinkmannMetric make_brinkmann(PotentialSpec V, Vec a = {});

// g(X, Y) at p = (v, t, x).
double metric_value(const BrinkmannMetric& m, const Vec& p, const Vec& X, const Vec& Y);

// The only nonvanishing symbols.  For a = 1 these are
//   Gamma^v_{it} = -V_i,  Gamma^v_{tt} = -V_t,  Gamma^i_{tt} = V_i;
// general a rescales the spatial row to Gamma^i_{tt} = V_i / a_i.
struct ChristoffelTable {
  Vec gamma_v_it;      // size n
  double gamma_v_tt = 0.0;
  Vec gamma_i_tt;      // size n
};

ChristoffelTable christoffel(const BrinkmannMetric& m, const Vec& p);

// Geodesic acceleration (v'', t'', x'') of the pp-wave:
//   v'' = V_t t'^2 + 2 t' sum_i V_i x_i',   t'' = 0,   x_i'' = -(V_i / a_i) t'^2.
// Returned LiftState carries (qdot, qddot).
LiftState geodesic_rhs(const BrinkmannMetric& m, const LiftState& st);

// Initial data for the lift of a base solution through (t0, x0, xdot0):
//   q(0) = (v0, t0, x0),  q'(0) = (-|xdot0|^2/2 + V(t0,x0) + eps, 1, xdot0),
// which satisfies g(q',q') = 2 eps (0 / -1 / +1 by causal class).  a = 1.
LiftState eisenhart_lift_initial(const PotentialSpec& V, double t0, const Vec& x0,
                                 const Vec& xdot0, const CausalClass& c, double v0 = 0.0);

double lift_norm(const BrinkmannMetric& m, const LiftState& st);

// Integrates the geodesic flow from st0 over [s0, s1].
Trajectory integrate_lift(const BrinkmannMetric& m, const LiftState& st0, double s0,
                          double s1, const IntegratorConfig& cfg);

// Integrates the base system x_i'' = -(V_i / a_i) from (x0, xdot0) at t0 to t1.
Trajectory integrate_base(const PotentialSpec& V, double t0, const Vec& x0,
                          const Vec& xdot0, double t1, const IntegratorConfig& cfg,
                          const Vec& a = {});

// Projects a lifted geodesic to the base: reparametrizes by the t coordinate
// and drops (v, t).  Throws when |tdot| < 1e-10 anywhere (degenerate lift:
// straight line case).
Trajectory project(const Trajectory& lift);

struct LiftReport {
  double max_x_gap = 0.0;
  double max_norm_drift = 0.0;
  double max_hamiltonian_residual = 0.0;
  bool pass = false;
};

struct LiftVerifyConfig {
  int gap_samples = 600;
  int residual_samples = 200;
  double fd_step = 0.0;  // 0 -> 0.005 * overlap span
  Vec a = {};            // anisotropy of the lift being verified
};

// Checks that `lifted` is the lift of `base`: x-components agree along the
// overlap, the causal norm is conserved, and the base solves its Hamiltonian
// system (5-point finite difference of the stored velocity against -grad V).
LiftReport verify_lift(const PotentialSpec& V, const Trajectory& base,
                       const Trajectory& lifted, double tol,
                       const LiftVerifyConfig& vcfg = {});

}  // namespace eisenhart
