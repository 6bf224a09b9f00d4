#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "eisenhart/linalg.hpp"

namespace eisenhart {

// Scalar potential V(t, x) on R x R^n with analytic (or finite-difference)
// derivatives.  All lifted metrics in this library are built from one of
// these.
struct PotentialSpec {
  std::string name;
  int n = 1;
  bool time_independent = true;

  std::function<double(double, const Vec&)> eval;
  std::function<Vec(double, const Vec&)> grad;         // spatial gradient
  std::function<double(double, const Vec&)> dt;        // partial_t V
  std::function<Mat(double, const Vec&)> hess;         // symmetric spatial Hessian
  std::function<double(double, const Vec&)> laplacian; // spatial Laplacian
};

// Builds a PotentialSpec from an evaluation callback only; derivatives fall
// back to central differences with step fd_step_scale * max(1, |x|_inf).
// Hessians are symmetrized as (H + H^T)/2.
PotentialSpec make_user_potential(const std::string& name, int n,
                                  std::function<double(double, const Vec&)> eval,
                                  bool time_independent = false,
                                  double fd_step_scale = 1e-6);

// Named catalog.  Parameters are named reals; unknown names or parameter keys
// and dimension mismatches throw std::invalid_argument.
//
//   free                 V = 0                               any n
//   linear               V = sum b_i x_i                     any n   (b, or b1..bn)
//   harmonic             V = k/2 |x|^2                       any n   (k)
//   anisotropic_harmonic V = 1/2 sum k_i x_i^2               any n   (k, or k1..kn)
//   quartic_of_harmonic  V = (c0 * |x|^2/2 + c1)^2           any n   (c0, c1)
//   time_harmonic        V = (1 + eps sin(omega t))/2 |x|^2  any n   (epsilon, omega)
//   saddle_harmonic      V = (x^2 - y^2)/2                   n = 2
//   neg_saddle           V = (y^2 - x^2)/2                   n = 2
//   cubic_harmonic_2d    V = x^3/3 - x y^2                   n = 2
PotentialSpec catalog_get(const std::string& name,
                          const std::map<std::string, double>& params, int n);

std::vector<std::string> catalog_names();

struct DerivativeCheck {
  double max_grad_err = 0.0;
  double max_hess_err = 0.0;
  double max_dt_err = 0.0;
  bool pass = false;
};

// Cross-checks analytic derivatives at the given samples: grad and dt against
// central differences of eval with step h; hess against central differences
// of the analytic gradient (a second difference of eval cannot reach 1e-6 in
// double precision at h = 1e-5).
DerivativeCheck check_derivatives(const PotentialSpec& spec,
                                  const std::vector<std::pair<double, Vec>>& samples,
                                  double h, double tol);

}  // namespace eisenhart
