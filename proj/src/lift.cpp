#include "eisenhart/lift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eisenhart {

namespace {

void check_point(const BrinkmannMetric& m, const Vec& p) {
  if (static_cast<int>(p.size()) != m.dim())
    throw std::invalid_argument("pp-wave: point has wrong dimension");
}

Vec spatial(const Vec& p, int n) { return Vec(p.begin() + 2, p.begin() + 2 + n); }

// Packs (q, qdot) into the integrator state and back.
Vec pack(const LiftState& st) {
  Vec y(st.q);
  y.insert(y.end(), st.qdot.begin(), st.qdot.end());
  return y;
}

LiftState unpack(const Vec& y) {
  const size_t d = y.size() / 2;
  return {Vec(y.begin(), y.begin() + d), Vec(y.begin() + d, y.end())};
}

}  // namespace

CausalClass CausalClass::make(CausalKind k) {
  switch (k) {
    case CausalKind::lightlike: return {k, 0.0, 0.0};
    case CausalKind::unit_timelike: return {k, -0.5, -1.0};
    case CausalKind::unit_spacelike: return {k, 0.5, 1.0};
  }
  throw std::invalid_argument("CausalClass: bad kind");
}

CausalKind causal_kind_from_string(const std::string& s) {
  if (s == "lightlike") return CausalKind::lightlike;
  if (s == "unit_timelike") return CausalKind::unit_timelike;
  if (s == "unit_spacelike") return CausalKind::unit_spacelike;
  throw std::invalid_argument("unknown causal class '" + s + "'");
}

BrinkmannMetric make_brinkmann(PotentialSpec V, Vec a) {
  if (!a.empty()) {
    if (static_cast<int>(a.size()) != V.n)
      throw std::invalid_argument("make_brinkmann: anisotropy size mismatch");
    for (double w : a)
      if (w == 0.0) throw std::invalid_argument("make_brinkmann: anisotropy weights must be nonzero");
  }
  return BrinkmannMetric{std::move(V), std::move(a)};
}

double metric_value(const BrinkmannMetric& m, const Vec& p, const Vec& X, const Vec& Y) {
  check_point(m, p);
  if (X.size() != p.size() || Y.size() != p.size())
    throw std::invalid_argument("metric_value: vector dimension mismatch");
  const int n = m.n();
  const double V = m.V.eval(p[1], spatial(p, n));
  double g = X[0] * Y[1] + X[1] * Y[0] - 2.0 * V * X[1] * Y[1];
  for (int i = 0; i < n; ++i) g += m.weight(i) * X[2 + i] * Y[2 + i];
  return g;
}

ChristoffelTable christoffel(const BrinkmannMetric& m, const Vec& p) {
  check_point(m, p);
  const int n = m.n();
  const double t = p[1];
  const Vec x = spatial(p, n);
  const Vec gi = m.V.grad(t, x);
  ChristoffelTable c;
  c.gamma_v_it.resize(n);
  c.gamma_i_tt.resize(n);
  c.gamma_v_tt = -m.V.dt(t, x);
  for (int i = 0; i < n; ++i) {
    c.gamma_v_it[i] = -gi[i];
    c.gamma_i_tt[i] = gi[i] / m.weight(i);
  }
  return c;
}

LiftState geodesic_rhs(const BrinkmannMetric& m, const LiftState& st) {
  check_point(m, st.q);
  if (st.qdot.size() != st.q.size())
    throw std::invalid_argument("geodesic_rhs: velocity dimension mismatch");
  const int n = m.n();
  const double t = st.q[1];
  const double tdot = st.qdot[1];
  const Vec x = spatial(st.q, n);
  const Vec gi = m.V.grad(t, x);
  const double vt = m.V.dt(t, x);

  Vec qddot(n + 2, 0.0);
  double grad_dot_xdot = 0.0;
  for (int i = 0; i < n; ++i) grad_dot_xdot += gi[i] * st.qdot[2 + i];
  qddot[0] = vt * tdot * tdot + 2.0 * tdot * grad_dot_xdot;
  qddot[1] = 0.0;
  for (int i = 0; i < n; ++i) qddot[2 + i] = -gi[i] / m.weight(i) * tdot * tdot;
  return {st.qdot, qddot};
}

LiftState eisenhart_lift_initial(const PotentialSpec& V, double t0, const Vec& x0,
                                 const Vec& xdot0, const CausalClass& c, double v0) {
  if (static_cast<int>(x0.size()) != V.n || xdot0.size() != x0.size())
    throw std::invalid_argument("eisenhart_lift_initial: dimension mismatch");
  double k2 = 0.0;
  for (double v : xdot0) k2 += v * v;
  LiftState st;
  st.q.assign(V.n + 2, 0.0);
  st.qdot.assign(V.n + 2, 0.0);
  st.q[0] = v0;
  st.q[1] = t0;
  for (int i = 0; i < V.n; ++i) st.q[2 + i] = x0[i];
  st.qdot[0] = -0.5 * k2 + V.eval(t0, x0) + c.epsilon;
  st.qdot[1] = 1.0;
  for (int i = 0; i < V.n; ++i) st.qdot[2 + i] = xdot0[i];
  return st;
}

double lift_norm(const BrinkmannMetric& m, const LiftState& st) {
  return metric_value(m, st.q, st.qdot, st.qdot);
}

Trajectory integrate_lift(const BrinkmannMetric& m, const LiftState& st0, double s0,
                          double s1, const IntegratorConfig& cfg) {
  const int d = m.dim();
  OdeSystem sys;
  sys.dim = 2 * d;
  sys.rhs = [&m, d](double, const Vec& y, Vec& dy) {
    LiftState st{Vec(y.begin(), y.begin() + d), Vec(y.begin() + d, y.end())};
    const LiftState r = geodesic_rhs(m, st);
    for (int i = 0; i < d; ++i) {
      dy[i] = r.q[i];
      dy[d + i] = r.qdot[i];
    }
  };
  Trajectory tr;
  tr.n = m.n();
  tr.is_lift = true;
  tr.metric_id = "ppwave:" + m.V.name;
  tr.initial_norm = lift_norm(m, st0);
  tr.sol = integrate(sys, pack(st0), s0, s1, cfg);
  return tr;
}

Trajectory integrate_base(const PotentialSpec& V, double t0, const Vec& x0,
                          const Vec& xdot0, double t1, const IntegratorConfig& cfg,
                          const Vec& a) {
  if (static_cast<int>(x0.size()) != V.n || xdot0.size() != x0.size())
    throw std::invalid_argument("integrate_base: dimension mismatch");
  if (!a.empty() && static_cast<int>(a.size()) != V.n)
    throw std::invalid_argument("integrate_base: anisotropy size mismatch");
  const int n = V.n;
  OdeSystem sys;
  sys.dim = 2 * n;
  sys.rhs = [&V, &a, n](double t, const Vec& y, Vec& dy) {
    const Vec x(y.begin(), y.begin() + n);
    const Vec g = V.grad(t, x);
    for (int i = 0; i < n; ++i) {
      dy[i] = y[n + i];
      dy[n + i] = -g[i] / (a.empty() ? 1.0 : a[i]);
    }
  };
  Vec y0(x0);
  y0.insert(y0.end(), xdot0.begin(), xdot0.end());
  Trajectory tr;
  tr.n = n;
  tr.is_lift = false;
  tr.metric_id = "base:" + V.name;
  tr.sol = integrate(sys, std::move(y0), t0, t1, cfg);
  return tr;
}

Trajectory project(const Trajectory& lift) {
  if (!lift.is_lift) throw std::invalid_argument("project: lift trajectory required");
  const int n = lift.n;
  const int d = n + 2;
  Trajectory base;
  base.n = n;
  base.is_lift = false;
  base.metric_id = lift.metric_id + ":projected";
  base.sol.status = lift.sol.status;
  const size_t m = lift.sol.grid.size();
  base.sol.grid.reserve(m);
  base.sol.states.reserve(m);
  base.sol.derivs.reserve(m);
  for (size_t k = 0; k < m; ++k) {
    const Vec& y = lift.sol.states[k];
    const Vec& f = lift.sol.derivs[k];
    const double tdot = y[d + 1];
    if (std::abs(tdot) < 1e-10)
      throw std::runtime_error("project: degenerate lift: straight line case (|tdot| < 1e-10)");
    Vec st(2 * n), dv(2 * n);
    for (int i = 0; i < n; ++i) {
      st[i] = y[2 + i];
      st[n + i] = y[d + 2 + i] / tdot;                    // dx/dt
      dv[i] = st[n + i];
      dv[n + i] = f[d + 2 + i] / (tdot * tdot);           // d2x/dt2 (t'' = 0)
    }
    base.sol.grid.push_back(y[1]);
    base.sol.states.push_back(std::move(st));
    base.sol.derivs.push_back(std::move(dv));
  }
  // The t-grid must be strictly monotone; enforced by the tdot bound above
  // except for pathological inputs.
  for (size_t k = 1; k < base.sol.grid.size(); ++k) {
    const double d0 = base.sol.grid[k] - base.sol.grid[k - 1];
    const double d1 = base.sol.grid[1] - base.sol.grid[0];
    if (d0 * d1 <= 0.0)
      throw std::runtime_error("project: t coordinate is not monotone along the lift");
  }
  return base;
}

LiftReport verify_lift(const PotentialSpec& V, const Trajectory& base,
                       const Trajectory& lifted, double tol, const LiftVerifyConfig& vcfg) {
  if (!lifted.is_lift || base.is_lift)
    throw std::invalid_argument("verify_lift: need a base and a lift trajectory");
  if (base.n != V.n || lifted.n != V.n)
    throw std::invalid_argument("verify_lift: dimension mismatch");
  const BrinkmannMetric m = make_brinkmann(V, vcfg.a);

  LiftReport rep;

  // Overlap in t between the base domain and the lift's t-coordinate range.
  const double bt0 = std::min(base.param_start(), base.param_end());
  const double bt1 = std::max(base.param_start(), base.param_end());
  double lt0 = lifted.sol.states.front()[1];
  double lt1 = lifted.sol.states.back()[1];
  if (lt0 > lt1) std::swap(lt0, lt1);
  const double t_lo = std::max(bt0, lt0);
  const double t_hi = std::min(bt1, lt1);
  if (!(t_hi > t_lo)) throw std::invalid_argument("verify_lift: trajectories do not overlap in t");

  // x-gap, sampled along the lift parameter (t is affine along the lift).
  const double s0 = lifted.param_start(), s1 = lifted.param_end();
  const int gap_n = std::max(2, vcfg.gap_samples);
  for (int j = 0; j <= gap_n; ++j) {
    const double s = s0 + (s1 - s0) * (static_cast<double>(j) / gap_n);
    const Vec y = lifted.sol.eval(s);
    const double t = y[1];
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    const Vec xb = base.x_at(std::clamp(t, t_lo, t_hi));
    for (int i = 0; i < V.n; ++i)
      rep.max_x_gap = std::max(rep.max_x_gap, std::abs(y[2 + i] - xb[i]));
  }

  // Norm drift at the accepted-step nodes: conservation belongs to the
  // computed flow, and interpolated states would fold in O(h^4) Hermite error.
  for (const Vec& y : lifted.sol.states)
    rep.max_norm_drift = std::max(rep.max_norm_drift,
                                  std::abs(lift_norm(m, unpack(y)) - lifted.initial_norm));

  // Hamiltonian residual of the base: 5-point derivative of the stored
  // velocity against -grad V.
  const double span = t_hi - t_lo;
  const double h = (vcfg.fd_step > 0.0) ? vcfg.fd_step : 0.005 * span;
  const int res_n = std::max(2, vcfg.residual_samples);
  for (int j = 0; j <= res_n; ++j) {
    const double t = t_lo + 2.0 * h + (span - 4.0 * h) * (static_cast<double>(j) / res_n);
    const Vec xm2 = base.xdot_at(t - 2.0 * h), xm1 = base.xdot_at(t - h);
    const Vec xp1 = base.xdot_at(t + h), xp2 = base.xdot_at(t + 2.0 * h);
    const Vec g = V.grad(t, base.x_at(t));
    for (int i = 0; i < V.n; ++i) {
      const double acc = (xm2[i] - 8.0 * xm1[i] + 8.0 * xp1[i] - xp2[i]) / (12.0 * h);
      const double target = -g[i] / (vcfg.a.empty() ? 1.0 : vcfg.a[i]);
      rep.max_hamiltonian_residual =
          std::max(rep.max_hamiltonian_residual, std::abs(acc - target));
    }
  }

  rep.pass = rep.max_x_gap <= tol && rep.max_norm_drift <= tol &&
             rep.max_hamiltonian_residual <= tol;
  return rep;
}

}  // namespace eisenhart
