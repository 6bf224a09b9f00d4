#include "eisenhart/riemlift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eisenhart/linalg.hpp"
#include "eisenhart/quadrature.hpp"
#include "eisenhart/rng.hpp"

namespace eisenhart {

namespace {

Vec spatial(const Vec& p, int n) { return Vec(p.begin() + 2, p.begin() + 2 + n); }

void check_state(const RiemannianDualMetric& m, const LiftState& st, const char* who) {
  if (static_cast<int>(st.q.size()) != m.dim() || st.qdot.size() != st.q.size())
    throw std::invalid_argument(std::string(who) + ": state dimension mismatch");
}

}  // namespace

RiemannianDualMetric make_riemannian_dual(PotentialSpec V) {
  return RiemannianDualMetric{std::move(V)};
}

double riem_metric_value(const RiemannianDualMetric& m, const Vec& p, const Vec& X,
                         const Vec& Y) {
  if (static_cast<int>(p.size()) != m.dim() || X.size() != p.size() || Y.size() != p.size())
    throw std::invalid_argument("riem_metric_value: dimension mismatch");
  const int n = m.n();
  const double V = m.V.eval(p[1], spatial(p, n));
  double g = 2.0 * X[0] * Y[0] - 2.0 * V * (X[0] * Y[1] + X[1] * Y[0]) +
             0.5 * (1.0 + 4.0 * V * V) * X[1] * Y[1];
  for (int i = 0; i < n; ++i) g += X[2 + i] * Y[2 + i];
  return g;
}

double riem_norm(const RiemannianDualMetric& m, const LiftState& st) {
  return riem_metric_value(m, st.q, st.qdot, st.qdot);
}

double riem_c0(const RiemannianDualMetric& m, const LiftState& st) {
  check_state(m, st, "riem_c0");
  const double V = m.V.eval(st.q[1], spatial(st.q, m.n()));
  return 2.0 * st.qdot[0] - 2.0 * V * st.qdot[1];
}

LiftState riem_geodesic_rhs(const RiemannianDualMetric& m, const LiftState& st, double c0) {
  check_state(m, st, "riem_geodesic_rhs");
  const int n = m.n();
  const double t = st.q[1];
  const double tdot = st.qdot[1];
  const Vec x = spatial(st.q, n);
  const Vec gi = m.V.grad(t, x);
  const double V = m.V.eval(t, x);
  const double Vt = m.V.dt(t, x);

  double grad_dot_xdot = 0.0;
  for (int i = 0; i < n; ++i) grad_dot_xdot += gi[i] * st.qdot[2 + i];

  Vec qddot(n + 2, 0.0);
  qddot[1] = 2.0 * c0 * grad_dot_xdot;
  qddot[0] = (Vt * tdot + grad_dot_xdot) * tdot + V * qddot[1];
  for (int i = 0; i < n; ++i) qddot[2 + i] = -c0 * gi[i] * tdot;
  return {st.qdot, qddot};
}

Trajectory integrate_riem_geodesic(const RiemannianDualMetric& m, const LiftState& st0,
                                   double s0, double s1, const IntegratorConfig& cfg) {
  check_state(m, st0, "integrate_riem_geodesic");
  const int d = m.dim();
  const double c0 = riem_c0(m, st0);
  OdeSystem sys;
  sys.dim = 2 * d;
  sys.rhs = [&m, c0, d](double, const Vec& y, Vec& dy) {
    LiftState st{Vec(y.begin(), y.begin() + d), Vec(y.begin() + d, y.end())};
    const LiftState r = riem_geodesic_rhs(m, st, c0);
    for (int i = 0; i < d; ++i) {
      dy[i] = r.q[i];
      dy[d + i] = r.qdot[i];
    }
  };
  Vec y0(st0.q);
  y0.insert(y0.end(), st0.qdot.begin(), st0.qdot.end());
  Trajectory tr;
  tr.n = m.n();
  tr.is_lift = true;
  tr.metric_id = "riem:" + m.V.name;
  tr.initial_norm = riem_norm(m, st0);
  tr.sol = integrate(sys, std::move(y0), s0, s1, cfg);
  return tr;
}

LiftState sqrt_lift_initial(const PotentialSpec& V, const Vec& x0, const Vec& xdot0,
                            double c0, double c1, bool* degenerate) {
  if (!V.time_independent)
    throw std::invalid_argument("sqrt_lift_initial: time-independent potential required");
  if (static_cast<int>(x0.size()) != V.n || xdot0.size() != x0.size())
    throw std::invalid_argument("sqrt_lift_initial: dimension mismatch");
  if (degenerate) *degenerate = (c0 == 0.0);

  const double V0 = V.eval(0.0, x0);
  const double tdot0 = 2.0 * c0 * V0 + 2.0 * c1;
  LiftState st;
  st.q.assign(V.n + 2, 0.0);
  st.qdot.assign(V.n + 2, 0.0);
  for (int i = 0; i < V.n; ++i) st.q[2 + i] = x0[i];
  st.qdot[0] = V0 * tdot0 + 0.5 * c0;
  st.qdot[1] = tdot0;
  for (int i = 0; i < V.n; ++i) st.qdot[2 + i] = xdot0[i];
  return st;
}

SqrtLiftReport verify_sqrt_lift(const PotentialSpec& V, const Vec& x0, const Vec& xdot0,
                                double c0, double c1, double horizon, double tol,
                                const IntegratorConfig& cfg) {
  const RiemannianDualMetric m = make_riemannian_dual(V);
  const LiftState st0 = sqrt_lift_initial(V, x0, xdot0, c0, c1);
  if (std::abs(riem_c0(m, st0) - c0) > 1e-12 * std::max(1.0, std::abs(c0)))
    throw std::runtime_error("verify_sqrt_lift: c0 identity violated at setup");

  const Trajectory geo = integrate_riem_geodesic(m, st0, 0.0, horizon, cfg);

  PotentialSpec W = make_user_potential(
      "(" + std::to_string(c0) + "*" + V.name + "+" + std::to_string(c1) + ")^2",
      V.n,
      [V, c0, c1](double, const Vec& x) {
        const double w = c0 * V.eval(0.0, x) + c1;
        return w * w;
      },
      /*time_independent=*/true);
  W.grad = [V, c0, c1](double, const Vec& x) {
    const double w = c0 * V.eval(0.0, x) + c1;
    Vec g = V.grad(0.0, x);
    for (double& gi : g) gi *= 2.0 * c0 * w;
    return g;
  };
  const Trajectory direct = integrate_base(W, 0.0, x0, xdot0, horizon, cfg);

  SqrtLiftReport rep;
  const int samples = 600;
  for (int j = 0; j <= samples; ++j) {
    const double s = horizon * (static_cast<double>(j) / samples);
    const Vec xg = geo.x_at(s);
    const Vec xd = direct.x_at(s);
    for (int i = 0; i < V.n; ++i)
      rep.max_gap = std::max(rep.max_gap, std::abs(xg[i] - xd[i]));
  }
  const int d = m.dim();
  for (size_t k = 0; k < geo.sol.grid.size(); ++k) {
    const Vec& y = geo.sol.states[k];
    LiftState st{Vec(y.begin(), y.begin() + d), Vec(y.begin() + d, y.end())};
    rep.c0_drift = std::max(rep.c0_drift, std::abs(riem_c0(m, st) - c0));
    const double w = c0 * V.eval(st.q[1], spatial(st.q, V.n)) + c1;
    rep.sqrt_drift =
        std::max(rep.sqrt_drift, std::abs(0.25 * st.qdot[1] * st.qdot[1] - w * w));
  }
  rep.pass = rep.max_gap <= tol;
  return rep;
}

namespace {

struct Shot {
  Vec residual;   // endpoint coords minus target
  double norm = std::numeric_limits<double>::infinity();
  bool valid = false;
};

}  // namespace

ShootingResult shoot_two_point(const PotentialSpec& V, const Vec& x0, const Vec& x1,
                               double v1, const ShootingConfig& cfg) {
  const int n = V.n;
  if (static_cast<int>(x0.size()) != n || static_cast<int>(x1.size()) != n)
    throw std::invalid_argument("shoot_two_point: boundary point dimension mismatch");
  const int d = n + 2;

  // Non-degeneracy: v1 must stay clear of the straight-line average of V.
  const double v_avg = adaptive_simpson(
      [&](double u) {
        Vec xu(n);
        for (int i = 0; i < n; ++i) xu[i] = x0[i] + (x1[i] - x0[i]) * u;
        return V.eval(u, xu);
      },
      0.0, 1.0, 1e-10);
  const double margin = std::abs(v1 - v_avg);
  if (margin < cfg.margin_min)
    throw std::invalid_argument(
        "shoot_two_point: v1 = " + format_g17(v1) +
        " is within margin_min of the straight-line potential average " + format_g17(v_avg) +
        "; the boundary data is degenerate");

  const RiemannianDualMetric m = make_riemannian_dual(V);

  Vec q0(d, 0.0);
  for (int i = 0; i < n; ++i) q0[2 + i] = x0[i];
  Vec target(d);
  target[0] = v1;
  target[1] = 1.0;
  for (int i = 0; i < n; ++i) target[2 + i] = x1[i];

  auto shot = [&](const Vec& u) -> Shot {
    Shot s;
    Trajectory tr;
    try {
      tr = integrate_riem_geodesic(m, LiftState{q0, u}, 0.0, 1.0, cfg.integrator);
    } catch (const std::exception&) {
      return s;
    }
    if (tr.sol.status != SolveStatus::completed) return s;
    const Vec y = tr.sol.eval(1.0);
    s.residual.resize(d);
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) {
      s.residual[i] = y[i] - target[i];
      r2 += s.residual[i] * s.residual[i];
    }
    s.norm = std::sqrt(r2);
    s.valid = true;
    return s;
  };

  // Straight-line start plus seeded perturbations; all starts are run, the
  // first convergent index is primary and the rest become alternates.
  std::vector<Vec> starts;
  Vec base(d);
  base[0] = v1;
  base[1] = 1.0;
  for (int i = 0; i < n; ++i) base[2 + i] = x1[i] - x0[i];
  starts.push_back(base);
  double dist = 0.0;
  for (int i = 0; i < n; ++i) dist += (x1[i] - x0[i]) * (x1[i] - x0[i]);
  const double scale = (cfg.perturb_scale >= 0.0) ? cfg.perturb_scale
                                                  : 0.5 * (1.0 + std::sqrt(dist));
  UniformRng rng(cfg.seed ^ 0x5851f42d4c957f2dull);
  for (int k = 0; k < cfg.extra_starts; ++k) {
    Vec u(base);
    for (int i = 0; i < d; ++i) u[i] += scale * rng.range(-1.0, 1.0);
    starts.push_back(std::move(u));
  }

  struct Converged {
    int start_index;
    Vec velocity;
    double gap;
    int iterations;
  };
  std::vector<Converged> winners;
  double best_failed_norm = std::numeric_limits<double>::infinity();

  for (size_t si = 0; si < starts.size(); ++si) {
    Vec u = starts[si];
    Shot s = shot(u);
    if (!s.valid) continue;
    bool ok = false;
    int iters = 0;
    for (; iters <= cfg.max_newton; ++iters) {
      if (s.norm <= cfg.bvp_tol) {
        ok = true;
        break;
      }
      // Forward-difference Jacobian of the endpoint map.
      Mat J(d, d);
      bool jac_ok = true;
      for (int j = 0; j < d && jac_ok; ++j) {
        const double h = cfg.jac_fd_step * std::max(1.0, std::abs(u[j]));
        Vec up(u);
        up[j] += h;
        const Shot sp = shot(up);
        if (!sp.valid) {
          jac_ok = false;
          break;
        }
        for (int i = 0; i < d; ++i) J(i, j) = (sp.residual[i] - s.residual[i]) / h;
      }
      if (!jac_ok) break;
      const Lu lu = lu_factor(J);
      if (lu.singular) break;
      Vec rhs(d);
      for (int i = 0; i < d; ++i) rhs[i] = -s.residual[i];
      const Vec step = lu_solve(lu, rhs);

      double alpha = 1.0;
      bool advanced = false;
      while (alpha >= 1.0 / 256.0) {
        Vec u_try(u);
        for (int i = 0; i < d; ++i) u_try[i] += alpha * step[i];
        const Shot s_try = shot(u_try);
        if (s_try.valid && s_try.norm < (1.0 - 1e-4 * alpha) * s.norm) {
          u = std::move(u_try);
          s = s_try;
          advanced = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!advanced) break;
    }
    if (ok)
      winners.push_back({static_cast<int>(si), u, s.norm, iters});
    else
      best_failed_norm = std::min(best_failed_norm, s.norm);
  }

  if (winners.empty())
    throw std::runtime_error("shoot_two_point: no start converged (best endpoint gap " +
                             format_g17(best_failed_norm) + ")");

  const Converged& prim = winners.front();
  ShootingResult res;
  res.initial_velocity = prim.velocity;
  res.terminal_gap = prim.gap;
  res.v1_margin = margin;
  res.converged_start_index = prim.start_index;
  res.newton_iterations = prim.iterations;
  for (size_t k = 1; k < winners.size(); ++k) {
    bool dup = false;
    for (const Vec& seen : res.alternates)
      if (norm_inf(vsub(winners[k].velocity, seen)) <= 1e-6) dup = true;
    if (norm_inf(vsub(winners[k].velocity, prim.velocity)) <= 1e-6) dup = true;
    if (!dup) res.alternates.push_back(winners[k].velocity);
  }

  res.c0_raw = riem_c0(m, LiftState{q0, prim.velocity});
  if (std::abs(res.c0_raw) < 1e-10)
    throw std::runtime_error("shoot_two_point: conserved c0 vanished on the converged geodesic");

  // Rescale so c0 = 1: velocity /c0, parameter interval [0, c0].  The running
  // integral I(t) = int grad V . xdot dt rides along as a quadrature state.
  Vec w(prim.velocity);
  for (double& wi : w) wi /= res.c0_raw;
  res.rescaled = true;
  res.c0_rescaled = riem_c0(m, LiftState{q0, w});
  res.c = 0.5 * w[1];

  const double c0r = res.c0_rescaled;
  OdeSystem sys;
  sys.dim = 2 * d + 1;
  sys.rhs = [&m, c0r, d, n](double, const Vec& y, Vec& dy) {
    LiftState st{Vec(y.begin(), y.begin() + d), Vec(y.begin() + d, y.begin() + 2 * d)};
    const LiftState r = riem_geodesic_rhs(m, st, c0r);
    for (int i = 0; i < d; ++i) {
      dy[i] = r.q[i];
      dy[d + i] = r.qdot[i];
    }
    const Vec gi = m.V.grad(st.q[1], Vec(st.q.begin() + 2, st.q.end()));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += gi[i] * st.qdot[2 + i];
    dy[2 * d] = acc;
  };
  Vec y0(q0);
  y0.insert(y0.end(), w.begin(), w.end());
  y0.push_back(0.0);
  const SolveOutput aug = integrate(sys, std::move(y0), 0.0, res.c0_raw, cfg.integrator);

  // Split the augmented solve into the geodesic and the base curve.
  res.geodesic.n = n;
  res.geodesic.is_lift = true;
  res.geodesic.metric_id = "riem_shoot:" + V.name;
  res.geodesic.initial_norm = riem_norm(m, LiftState{q0, w});
  res.x_curve.n = n;
  res.x_curve.is_lift = false;
  res.x_curve.metric_id = "riem_shoot_base:" + V.name;
  res.geodesic.sol.status = res.x_curve.sol.status = aug.status;
  res.geodesic.sol.attempted_next = res.x_curve.sol.attempted_next = aug.attempted_next;
  for (size_t k = 0; k < aug.grid.size(); ++k) {
    const Vec& y = aug.states[k];
    const Vec& f = aug.derivs[k];
    res.geodesic.sol.grid.push_back(aug.grid[k]);
    res.geodesic.sol.states.emplace_back(y.begin(), y.begin() + 2 * d);
    res.geodesic.sol.derivs.emplace_back(f.begin(), f.begin() + 2 * d);
    res.x_curve.sol.grid.push_back(aug.grid[k]);
    Vec st(2 * n), dv(2 * n);
    for (int i = 0; i < n; ++i) {
      st[i] = y[2 + i];
      st[n + i] = y[d + 2 + i];
      dv[i] = f[2 + i];
      dv[n + i] = f[d + 2 + i];
    }
    res.x_curve.sol.states.push_back(std::move(st));
    res.x_curve.sol.derivs.push_back(std::move(dv));
    res.tau_samples.push_back({aug.grid[k], y[1], y[d + 1]});
  }

  // Residual of the reduced x-equation and the taudot identity, plus the
  // conservation-of-energy drift.
  const double lo = std::min(0.0, res.c0_raw);
  const double hi = std::max(0.0, res.c0_raw);
  const double span = hi - lo;
  const double h = 0.005 * span;
  const int res_samples = 200;
  for (int j = 0; j <= res_samples; ++j) {
    const double t = lo + 2.0 * h + (span - 4.0 * h) * (static_cast<double>(j) / res_samples);
    const Vec a = aug.eval(t);
    const Vec x(a.begin() + 2, a.begin() + 2 + n);
    const double tau = a[1];
    const double I = a[2 * d];
    const Vec gi = V.grad(tau, x);
    const Vec xm2 = res.x_curve.xdot_at(t - 2.0 * h), xm1 = res.x_curve.xdot_at(t - h);
    const Vec xp1 = res.x_curve.xdot_at(t + h), xp2 = res.x_curve.xdot_at(t + 2.0 * h);
    for (int i = 0; i < n; ++i) {
      const double acc = (xm2[i] - 8.0 * xm1[i] + 8.0 * xp1[i] - xp2[i]) / (12.0 * h);
      res.tv_residual =
          std::max(res.tv_residual, std::abs(acc + 2.0 * (res.c + I) * gi[i]));
    }
    res.taudot_gap = std::max(res.taudot_gap, std::abs(a[d + 1] - 2.0 * (res.c + I)));
  }
  double q_init = 0.0;
  for (size_t k = 0; k < aug.grid.size(); ++k) {
    const Vec& y = aug.states[k];
    double q = 0.25 * y[d + 1] * y[d + 1];
    for (int i = 0; i < n; ++i) q += 0.5 * y[d + 2 + i] * y[d + 2 + i];
    if (k == 0)
      q_init = q;
    else
      res.coe_drift = std::max(res.coe_drift, std::abs(q - q_init));
  }
  return res;
}

double coe_check(const Trajectory& riem_lift) {
  if (!riem_lift.is_lift) throw std::invalid_argument("coe_check: lift trajectory required");
  const int n = riem_lift.n;
  const int d = n + 2;
  double drift = 0.0, q_init = 0.0;
  for (size_t k = 0; k < riem_lift.sol.grid.size(); ++k) {
    const Vec& y = riem_lift.sol.states[k];
    double q = 0.25 * y[d + 1] * y[d + 1];
    for (int i = 0; i < n; ++i) q += 0.5 * y[d + 2 + i] * y[d + 2 + i];
    if (k == 0)
      q_init = q;
    else
      drift = std::max(drift, std::abs(q - q_init));
  }
  return drift;
}

double coe_check(const ShootingResult& r) { return coe_check(r.geodesic); }

void write_shooting_csv(const ShootingResult& r, const std::string& path) {
  const int n = r.x_curve.n;
  std::vector<std::string> headers = {"t", "tau", "taudot"};
  for (int i = 1; i <= n; ++i) headers.push_back("x" + std::to_string(i));
  for (int i = 1; i <= n; ++i) headers.push_back("xdot" + std::to_string(i));
  std::vector<Vec> rows;
  rows.reserve(r.tau_samples.size());
  for (size_t k = 0; k < r.tau_samples.size(); ++k) {
    Vec row = {r.tau_samples[k][0], r.tau_samples[k][1], r.tau_samples[k][2]};
    const Vec& st = r.x_curve.sol.states[k];
    row.insert(row.end(), st.begin(), st.end());
    rows.push_back(std::move(row));
  }
  write_columns_csv(path, headers, rows);
}

GenericMetric generic_riem(const RiemannianDualMetric& m) {
  GenericMetric g;
  g.dim = m.dim();
  const PotentialSpec V = m.V;
  const int n = m.n();
  g.value = [V, n](const Vec& p) {
    const double val = V.eval(p[1], Vec(p.begin() + 2, p.begin() + 2 + n));
    Mat mat(n + 2, n + 2);
    mat(0, 0) = 2.0;
    mat(0, 1) = mat(1, 0) = -2.0 * val;
    mat(1, 1) = 0.5 * (1.0 + 4.0 * val * val);
    for (int i = 0; i < n; ++i) mat(2 + i, 2 + i) = 1.0;
    return mat;
  };
  return g;
}

}  // namespace eisenhart
