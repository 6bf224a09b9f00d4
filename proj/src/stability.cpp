#include "eisenhart/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eisenhart {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat extract_mat(const Vec& y, int offset, int mdim) {
  Mat m(mdim, mdim);
  for (int i = 0; i < mdim; ++i)
    for (int j = 0; j < mdim; ++j) m(i, j) = y[offset + i * mdim + j];
  return m;
}

// Golden-section minimization of a scalar function on [a, b].
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a,
                                     double b, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, f(t)};
}

// Shared event scan over the fundamental-matrix solution.
ConjugateReport detect_events(const SolveOutput& sol, int offset, int mdim,
                              const ConjugateConfig& cfg, bool cluster_multiplicity) {
  ConjugateReport rep;
  rep.t_start = sol.grid.front();
  rep.t_end = sol.grid.back();
  const double span = std::abs(rep.t_end - rep.t_start);
  const double guard = (cfg.guard > 0.0) ? cfg.guard : 1e-3 * span;
  const double dir = (rep.t_end >= rep.t_start) ? 1.0 : -1.0;

  auto mat_at = [&](double t) { return extract_mat(sol.eval(t), offset, mdim); };
  auto det_at = [&](double t) { return det(mat_at(t)); };
  auto sigma_min_at = [&](double t) { return singular_values(mat_at(t)).back(); };

  // Sample grid: nodes plus subsamples.
  struct Sample { double t, det, smin, smax; };
  std::vector<Sample> samples;
  const int sub = std::max(1, cfg.subsamples);
  for (size_t k = 0; k + 1 < sol.grid.size(); ++k) {
    const double a = sol.grid[k], b = sol.grid[k + 1];
    const int start = (k == 0) ? 0 : 1;
    for (int j = start; j <= sub; ++j) {
      const double t = (j == sub) ? b : a + (b - a) * (static_cast<double>(j) / sub);
      const Mat m = mat_at(t);
      const Vec sv = singular_values(m);
      samples.push_back({t, det(m), sv.back(), sv.front()});
    }
  }
  if (samples.size() < 3) return rep;

  double sigma_sup = 0.0;
  for (const Sample& s : samples) sigma_sup = std::max(sigma_sup, s.smax);
  const double tau_rank = cfg.rank_rel_tol * std::sqrt(static_cast<double>(mdim)) * sigma_sup;

  auto past_guard = [&](double t) { return dir * (t - rep.t_start) > guard; };
  const double dedupe = std::max(50.0 * cfg.refine_tol, 1e-7 * span);

  std::vector<double> event_ts;
  // Sign changes of det M.
  for (size_t k = 0; k + 1 < samples.size(); ++k) {
    const double d0 = samples[k].det, d1 = samples[k + 1].det;
    if (d0 == 0.0 || d1 == 0.0 || (d0 < 0.0) == (d1 < 0.0)) continue;
    double lo = samples[k].t, hi = samples[k + 1].t, dlo = d0;
    for (int it = 0; it < 80 && std::abs(hi - lo) > cfg.refine_tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double dm = det_at(mid);
      if ((dlo < 0.0) == (dm < 0.0)) { lo = mid; dlo = dm; } else { hi = mid; }
    }
    const double t_star = 0.5 * (lo + hi);
    if (past_guard(t_star)) event_ts.push_back(t_star);
  }
  // Minima of sigma_min that dip below tau_rank (rank drops of even order
  // leave det one-signed).
  for (size_t k = 1; k + 1 < samples.size(); ++k) {
    if (!(samples[k].smin < samples[k - 1].smin && samples[k].smin <= samples[k + 1].smin))
      continue;
    // Generous pre-filter: a sample next to a genuine zero still reads
    // O(slope * spacing), so compare against the sigma scale and let the
    // refined test below do the real acceptance.
    if (samples[k].smin > std::max(1e3 * tau_rank, 0.1 * sigma_sup)) continue;
    double a = samples[k - 1].t, b = samples[k + 1].t;
    if (a > b) std::swap(a, b);
    const auto [t_star, smin_star] = golden_min(sigma_min_at, a, b, cfg.refine_tol);
    if (smin_star >= tau_rank || !past_guard(t_star)) continue;
    bool dup = false;
    for (double te : event_ts)
      if (std::abs(te - t_star) < dedupe) { dup = true; break; }
    if (!dup) event_ts.push_back(t_star);
  }

  std::sort(event_ts.begin(), event_ts.end(),
            [dir](double a, double b) { return dir * a < dir * b; });
  for (double t_star : event_ts) {
    const Vec sv = singular_values(mat_at(t_star));
    const double smin = sv.back();
    double thresh = tau_rank;
    if (cluster_multiplicity) thresh = std::max(thresh, 10.0 * smin);
    int mult = 0;
    for (double s : sv)
      if (s < thresh) ++mult;
    mult = std::max(1, mult);
    rep.events.push_back({t_star, mult, smin});
  }

  // Decimated det trace for reports.
  const size_t max_rows = 1024;
  const size_t stride = std::max<size_t>(1, samples.size() / max_rows);
  for (size_t k = 0; k < samples.size(); k += stride)
    rep.det_samples.emplace_back(samples[k].t, samples[k].det);
  if ((samples.size() - 1) % stride != 0)
    rep.det_samples.emplace_back(samples.back().t, samples.back().det);
  return rep;
}

void check_window(const Trajectory& base, double t0, double t1, const char* who) {
  const double lo = std::min(base.param_start(), base.param_end());
  const double hi = std::max(base.param_start(), base.param_end());
  const double slack = 1e-9 * (hi - lo + 1.0);
  if (std::min(t0, t1) < lo - slack || std::max(t0, t1) > hi + slack)
    throw std::invalid_argument(std::string(who) + ": window outside base trajectory range");
}

}  // namespace

SolveOutput reduced_jacobi_solve(const PotentialSpec& V, const Trajectory& base,
                                 double t0, double t1, const IntegratorConfig& cfg) {
  if (base.is_lift) throw std::invalid_argument("reduced_jacobi_solve: base trajectory required");
  if (base.n != V.n) throw std::invalid_argument("reduced_jacobi_solve: dimension mismatch");
  check_window(base, t0, t1, "reduced_jacobi_solve");
  const int n = V.n;

  OdeSystem sys;
  sys.dim = 2 * n + 2 * n * n;
  sys.rhs = [&V, n](double t, const Vec& y, Vec& dy) {
    const Vec x(y.begin(), y.begin() + n);
    const Vec g = V.grad(t, x);
    const Mat h = V.hess(t, x);
    const double* mm = y.data() + 2 * n;
    const double* md = mm + n * n;
    for (int i = 0; i < n; ++i) {
      dy[i] = y[n + i];
      dy[n + i] = -g[i];
    }
    double* dm = dy.data() + 2 * n;
    double* dmd = dm + n * n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        dm[i * n + j] = md[i * n + j];
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += h(i, k) * mm[k * n + j];
        dmd[i * n + j] = -s;
      }
  };

  Vec y0(2 * n + 2 * n * n, 0.0);
  const Vec x0 = base.x_at(t0);
  const Vec xd0 = base.xdot_at(t0);
  for (int i = 0; i < n; ++i) {
    y0[i] = x0[i];
    y0[n + i] = xd0[i];
    y0[2 * n + n * n + i * n + i] = 1.0;  // Mdot(t0) = I
  }
  return integrate(sys, std::move(y0), t0, t1, cfg);
}

ConjugateReport conjugate_points(const PotentialSpec& V, const Trajectory& base,
                                 double t0, double t1, const ConjugateConfig& cfg) {
  const SolveOutput sol = reduced_jacobi_solve(V, base, t0, t1, cfg.integrator);
  return detect_events(sol, 2 * V.n, V.n, cfg, /*cluster_multiplicity=*/false);
}

ConjugateReport generic_conjugate_points(const GenericMetric& m, const Trajectory& geo,
                                         const ConjugateConfig& cfg) {
  if (geo.sol.states.empty())
    throw std::invalid_argument("generic_conjugate_points: empty geodesic");
  const int d = m.dim;
  if (static_cast<int>(geo.sol.states.front().size()) != 2 * d)
    throw std::invalid_argument("generic_conjugate_points: state size does not match metric dim");

  OdeSystem sys = jacobi_system(m);
  Vec y0(sys.dim, 0.0);
  const Vec& start = geo.sol.states.front();
  for (int i = 0; i < 2 * d; ++i) y0[i] = start[i];
  for (int i = 0; i < d; ++i) y0[2 * d + d * d + i * d + i] = 1.0;  // Xidot(0) = I
  const SolveOutput sol =
      integrate(sys, std::move(y0), geo.param_start(), geo.param_end(), cfg.integrator);
  return detect_events(sol, 2 * d, d, cfg, /*cluster_multiplicity=*/true);
}

double VariationFamily::spread_at(double t) const {
  double worst = 0.0;
  for (size_t i = 0; i < members.size(); ++i)
    for (size_t j = i + 1; j < members.size(); ++j) {
      const Vec xi = members[i].x_at(t);
      const Vec xj = members[j].x_at(t);
      double diff = 0.0;
      for (size_t c = 0; c < xi.size(); ++c) diff = std::max(diff, std::abs(xi[c] - xj[c]));
      worst = std::max(worst, diff / std::abs(s_values[i] - s_values[j]));
    }
  return epsilon * worst;
}

VariationFamily variation_family(const PotentialSpec& V, const Trajectory& base,
                                 const Vec& jdot0, double epsilon, int k,
                                 const IntegratorConfig& cfg) {
  if (base.is_lift) throw std::invalid_argument("variation_family: base trajectory required");
  if (static_cast<int>(jdot0.size()) != V.n)
    throw std::invalid_argument("variation_family: jdot0 dimension mismatch");
  if (k < 3) throw std::invalid_argument("variation_family: need at least 3 members");
  if (!(epsilon > 0.0)) throw std::invalid_argument("variation_family: epsilon must be positive");
  if (k % 2 == 0) ++k;  // keep s = 0 in the family

  const double t0 = base.param_start();
  const double t1 = base.param_end();
  const Vec x0 = base.x_at(t0);
  const Vec xd0 = base.xdot_at(t0);

  VariationFamily fam;
  fam.epsilon = epsilon;
  for (int j = 0; j < k; ++j) {
    const double s = -epsilon + 2.0 * epsilon * (static_cast<double>(j) / (k - 1));
    Vec vel = xd0;
    for (int i = 0; i < V.n; ++i) vel[i] += s * jdot0[i];
    fam.s_values.push_back(s);
    fam.members.push_back(integrate_base(V, t0, x0, vel, t1, cfg));
  }
  return fam;
}

FocusingBound check_focusing_bound(const PotentialSpec& V, const Trajectory& base,
                                   double b, double dim_constant) {
  if (base.is_lift) throw std::invalid_argument("check_focusing_bound: base trajectory required");
  if (!(b > 0.0)) throw std::invalid_argument("check_focusing_bound: b must be positive");
  const double t0 = base.param_start();
  check_window(base, t0, t0 + b, "check_focusing_bound");
  if (dim_constant < 0.0) dim_constant = static_cast<double>(V.n - 1);

  FocusingBound out;
  out.bound = dim_constant * kPi * kPi / (b * b);
  out.min_laplacian = std::numeric_limits<double>::infinity();
  const int samples = 400;
  for (int j = 0; j <= samples; ++j) {
    const double t = t0 + b * (static_cast<double>(j) / samples);
    out.min_laplacian = std::min(out.min_laplacian, V.laplacian(t, base.x_at(t)));
  }
  out.holds = out.min_laplacian >= out.bound;
  return out;
}

AccumulationHypotheses check_accumulation_hypotheses(const PotentialSpec& V,
                                                     const Trajectory& base) {
  if (base.is_lift)
    throw std::invalid_argument("check_accumulation_hypotheses: base trajectory required");
  AccumulationHypotheses out;
  const int n = V.n;
  const double t0 = base.param_start(), t1 = base.param_end();

  // Candidate times where some velocity component vanishes: grid-node hits
  // plus sign changes refined by bisection.
  std::vector<std::pair<double, int>> candidates;
  for (int i = 0; i < n; ++i) {
    const int samples = 400;
    double prev_t = t0;
    double prev_v = base.xdot_at(t0)[i];
    if (std::abs(prev_v) <= 1e-9) candidates.push_back({t0, i});
    for (int j = 1; j <= samples; ++j) {
      const double t = t0 + (t1 - t0) * (static_cast<double>(j) / samples);
      const double v = base.xdot_at(t)[i];
      if (std::abs(v) <= 1e-9) {
        candidates.push_back({t, i});
      } else if ((prev_v < 0.0) != (v < 0.0) && std::abs(prev_v) > 1e-9) {
        double lo = prev_t, hi = t, vlo = prev_v;
        for (int it = 0; it < 80 && std::abs(hi - lo) > 1e-12; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double vm = base.xdot_at(mid)[i];
          if ((vlo < 0.0) == (vm < 0.0)) { lo = mid; vlo = vm; } else { hi = mid; }
        }
        candidates.push_back({0.5 * (lo + hi), i});
      }
      prev_t = t;
      prev_v = v;
    }
  }
  std::sort(candidates.begin(), candidates.end());

  for (const auto& [t, i] : candidates) {
    const Mat h = V.hess(t, base.x_at(t));
    bool row_nonzero = false;
    for (int j = 0; j < n; ++j)
      if (std::abs(h(i, j)) > 1e-12) { row_nonzero = true; break; }
    if (!out.velocity_zero_found || (row_nonzero && !out.hessian_row_nonzero)) {
      out.velocity_zero_found = true;
      out.t_zero = t;
      out.component = i;
      out.hessian_row_nonzero = row_nonzero;
    }
    if (out.hessian_row_nonzero) break;
  }

  out.min_laplacian = std::numeric_limits<double>::infinity();
  const int samples = 400;
  for (int j = 0; j <= samples; ++j) {
    const double t = t0 + (t1 - t0) * (static_cast<double>(j) / samples);
    out.min_laplacian = std::min(out.min_laplacian, V.laplacian(t, base.x_at(t)));
  }
  out.laplacian_nonnegative = out.min_laplacian >= -1e-12;
  out.all_hold = out.velocity_zero_found && out.hessian_row_nonzero && out.laplacian_nonnegative;
  return out;
}

}  // namespace eisenhart
