#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>

#include "eisenhart/genmetric.hpp"
#include "eisenhart/lift.hpp"

namespace eisenhart {

// Conformal factor f(t, x) for rescaled metrics e^{2f} g.  The factor never
// depends on the vertical coordinate v (that is what keeps lightlike lifts a
// conformal class), so only f_t and the spatial gradient appear.
struct ConformalFactor {
  std::string name;
  std::function<double(double, const Vec&)> f;
  std::function<double(double, const Vec&)> f_t;
  std::function<Vec(double, const Vec&)> f_grad;
};

ConformalFactor conformal_zero();
ConformalFactor conformal_constant(double c);
ConformalFactor conformal_linear_x(double c);              // f = c * x1
ConformalFactor conformal_gaussian(double c, double sigma);  // f = c exp(-|x|^2 / (2 sigma^2))
ConformalFactor conformal_factor_from_config(const std::string& name,
                                             const std::map<std::string, double>& params);

// Geodesic acceleration of e^{2f} g for the pp-wave g (isotropic a = 1):
//   t''  = -2 (f_t t' + sum_i f_i x_i') t'
//   v''  = (2 dV/ds - V_t t') t' - 2 V f_t t'^2 - sum_i (2 f_i v' - f_t x_i') x_i'
//   x_i'' = -V_i t'^2 + 2 (v' - V t') f_i t'
//           - (x_i'^2 - sum_{j!=i} x_j'^2) f_i - 2 x_i' sum_{j!=i} f_j x_j' - 2 f_t t' x_i'
LiftState conformal_geodesic_rhs(const BrinkmannMetric& m, const ConformalFactor& f,
                                 const LiftState& st);

double conformal_norm(const BrinkmannMetric& m, const ConformalFactor& f,
                      const LiftState& st);

Trajectory integrate_conformal(const BrinkmannMetric& m, const ConformalFactor& f,
                               const LiftState& st0, double s0, double s1,
                               const IntegratorConfig& cfg);

// Strictly increasing arc-parameter map s = tau(t) with its inverse, as cubic
// Hermite interpolants on a refined node set.
struct ReparamMap {
  Vec t_nodes;      // original curve parameter
  Vec s_nodes;      // tau values
  Vec dsdt_nodes;   // e^{2f} along the curve

  double tau(double t) const;
  double tau_inv(double s) const;
  double s_start() const { return s_nodes.front(); }
  double s_end() const { return s_nodes.back(); }
};

// Reparametrizes a lightlike pp-wave geodesic for the factor f:
//   tau(t) = integral_{t0}^{t} e^{2 f(gamma(r))} dr,
//   gamma_f(s) = gamma(tau^{-1}(s)),  gamma_f' = e^{-2f} gamma'.
// t0 must lie in the trajectory's parameter range; the input must be
// lightlike within 1e-6 along its grid.  The returned trajectory carries the
// same points with velocities rescaled analytically (no differencing).
std::pair<ReparamMap, Trajectory> reparametrize(const BrinkmannMetric& m,
                                                const Trajectory& tr,
                                                const ConformalFactor& f, double t0);

struct ConformalReport {
  double max_curve_gap = 0.0;
  double max_conformal_norm = 0.0;
  bool pass = false;
};

struct ConformalVerifyConfig {
  double tol = 1e-6;
  IntegratorConfig integrator;
};

// The conformal-class check, run both ways: lift base_solution lightlike,
// reparametrize via tau, and independently integrate the conformal geodesic
// system from the reparametrized initial state; then compare the curves.
ConformalReport verify_conformal_class(const BrinkmannMetric& m, const ConformalFactor& f,
                                       const Trajectory& base_solution,
                                       const ConformalVerifyConfig& cfg = {});

// Adapter: e^{2f} g as a plain metric-matrix function.
GenericMetric generic_conformal(const BrinkmannMetric& m, const ConformalFactor& f);

}  // namespace eisenhart
