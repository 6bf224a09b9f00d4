#pragma once

#include <utility>
#include <vector>

#include "eisenhart/genmetric.hpp"
#include "eisenhart/lift.hpp"
#include "eisenhart/potentials.hpp"

namespace eisenhart {

struct ConjugateEvent {
  double t = 0.0;
  int multiplicity = 0;
  double sigma_min = 0.0;  // smallest singular value at the located event
};

struct ConjugateReport {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<ConjugateEvent> events;
  std::vector<std::pair<double, double>> det_samples;  // (t, det M)
};

struct ConjugateConfig {
  IntegratorConfig integrator;
  double refine_tol = 1e-9;    // bracket width for event refinement
  double rank_rel_tol = 1e-7;  // tau_rank = rank_rel_tol * sqrt(dim) * sup ||M||_2
  int subsamples = 4;          // det samples per accepted step
  double guard = 0.0;          // 0 -> 1e-3 * span; events this close to the start are the
                               // trivial zero of M and are dropped
};

// Conjugate points of the lightlike lift through a base solution, computed
// from the reduced transverse system
//   M'' = -Hess_x V(t, x(t)) M,   M(t0) = 0,  M'(t0) = I  (n x n).
// Events are zeros of det M located by sign change plus minima of the
// smallest singular value (even-multiplicity events never flip the sign);
// multiplicity counts singular values below tau_rank.
ConjugateReport conjugate_points(const PotentialSpec& V, const Trajectory& base,
                                 double t0, double t1, const ConjugateConfig& cfg = {});

// Same events from first principles: the full dim-dimensional fundamental
// matrix of the linearized geodesic flow (Jacobi fields in coordinate
// components) along a geodesic of an arbitrary metric, with symbols and their
// derivatives from finite differences of the metric.  The geodesic is
// restarted from geo's initial state over geo's parameter range.
// Multiplicity counting additionally accepts singular values within a factor
// 10 of the smallest one, which absorbs the finite-difference noise floor.
ConjugateReport generic_conjugate_points(const GenericMetric& m, const Trajectory& geo,
                                         const ConjugateConfig& cfg = {});

// The joint (x, xdot, M, Mdot) solve behind conjugate_points, exposed for
// property tests (Wronskian conservation, kernel directions).
SolveOutput reduced_jacobi_solve(const PotentialSpec& V, const Trajectory& base,
                                 double t0, double t1, const IntegratorConfig& cfg);

// Finite family of base solutions x_s with x_s(t0) = x(t0),
// xdot_s(t0) = xdot(t0) + s * jdot0, s evenly spaced on [-eps, eps].
// k is bumped to the next odd number so s = 0 is always a member.
struct VariationFamily {
  double epsilon = 0.0;
  Vec s_values;
  std::vector<Trajectory> members;

  // eps * max_{i != j} |x_i(t) - x_j(t)|_inf / |s_i - s_j|: the normalized
  // pairwise separation rate scaled back by the family half-width, so a
  // linear-in-s family with x_s = x + s J has spread_at(t) = eps |J(t)|.
  double spread_at(double t) const;
};

VariationFamily variation_family(const PotentialSpec& V, const Trajectory& base,
                                 const Vec& jdot0, double epsilon, int k,
                                 const IntegratorConfig& cfg);

struct FocusingBound {
  bool holds = false;
  double min_laplacian = 0.0;
  double bound = 0.0;  // dim_constant * pi^2 / b^2
};

// Checks the focusing hypothesis Delta_x V >= dim_constant * pi^2 / b^2 along
// the base trajectory on [t_start, t_start + b].  dim_constant < 0 selects
// the default n - 1.
FocusingBound check_focusing_bound(const PotentialSpec& V, const Trajectory& base,
                                   double b, double dim_constant = -1.0);

struct AccumulationHypotheses {
  bool velocity_zero_found = false;
  double t_zero = 0.0;
  int component = -1;           // i with xdot_i(t_zero) = 0
  bool hessian_row_nonzero = false;
  bool laplacian_nonnegative = false;
  double min_laplacian = 0.0;
  bool all_hold = false;
};

// Hypotheses for conjugate-point accumulation along a base trajectory:
// (i) some velocity component vanishes at some time, (ii) the corresponding
// Hessian row is not identically zero there, (iii) Delta_x V >= 0 along the
// whole trajectory.
AccumulationHypotheses check_accumulation_hypotheses(const PotentialSpec& V,
                                                     const Trajectory& base);

}  // namespace eisenhart
