#pragma once

#include <functional>

#include "eisenhart/lift.hpp"
#include "eisenhart/linalg.hpp"
#include "eisenhart/odeint.hpp"

namespace eisenhart {

// A metric given only by its matrix of components.  Christoffel symbols come
// from central differences of the components; the Jacobi (geodesic deviation)
// system differences those once more.  This is the slow, assumption-free
// route used to cross-check the hand-derived symbol tables and the reduced
// conjugate-point detector.
struct GenericMetric {
  int dim = 0;
  std::function<Mat(const Vec&)> value;
  double fd_step = 1e-6;         // step for d(metric), scaled by max(1, |p|_inf)
  double fd_step_jacobi = 4e-4;  // step for d(Christoffel contraction)
};

// Flat rank-3 array of Christoffel symbols, at(a,b,c) = Gamma^a_{bc}.
struct Tensor3 {
  int d = 0;
  std::vector<double> v;

  explicit Tensor3(int dim = 0) : d(dim), v(static_cast<size_t>(dim) * dim * dim, 0.0) {}
  double& at(int a, int b, int c) { return v[(static_cast<size_t>(a) * d + b) * d + c]; }
  double at(int a, int b, int c) const { return v[(static_cast<size_t>(a) * d + b) * d + c]; }
};

Tensor3 christoffels_fd(const GenericMetric& m, const Vec& p);

// Geodesic acceleration -Gamma^a_{bc} v^b v^c with FD symbols.
Vec geodesic_accel(const GenericMetric& m, const Vec& p, const Vec& v);

// First-order geodesic system, state (q, qdot) of size 2*dim.
OdeSystem geodesic_system(const GenericMetric& m);

// Linearized geodesic flow: state (q, qdot, Xi, Xidot) where Xi is the
// dim x dim fundamental matrix of Jacobi fields in coordinate components
// (column j solves the deviation equation with Xi(0)=0, Xidot(0)=e_j).
// Layout: Xi row-major after the 2*dim phase entries.
OdeSystem jacobi_system(const GenericMetric& m);

// Adapter for the pp-wave metric.
GenericMetric generic_brinkmann(const BrinkmannMetric& m);

}  // namespace eisenhart
