#include "eisenhart/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eisenhart/quadrature.hpp"

namespace eisenhart {

namespace {

void require_isotropic(const BrinkmannMetric& m, const char* who) {
  for (int i = 0; i < m.n(); ++i)
    if (m.weight(i) != 1.0)
      throw std::invalid_argument(std::string(who) + ": conformal machinery requires a = 1");
}

double param_get(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

// Hermite evaluation on a strictly increasing node set.
double hermite_1d(const Vec& xs, const Vec& ys, const Vec& ds, double x) {
  if (xs.size() < 2) throw std::invalid_argument("hermite_1d: need two nodes");
  const double slack = 1e-9 * (std::abs(xs.back() - xs.front()) + 1.0);
  if (x < xs.front() - slack || x > xs.back() + slack)
    throw std::out_of_range("hermite_1d: query outside node range");
  x = std::clamp(x, xs.front(), xs.back());
  size_t lo = 0, hi = xs.size() - 1;
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (x < xs[mid]) hi = mid; else lo = mid;
  }
  const double h = xs[lo + 1] - xs[lo];
  const double u = (x - xs[lo]) / h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * ys[lo] + (u3 - 2 * u2 + u) * h * ds[lo] +
         (-2 * u3 + 3 * u2) * ys[lo + 1] + (u3 - u2) * h * ds[lo + 1];
}

}  // namespace

ConformalFactor conformal_zero() {
  ConformalFactor c;
  c.name = "zero";
  c.f = [](double, const Vec&) { return 0.0; };
  c.f_t = [](double, const Vec&) { return 0.0; };
  c.f_grad = [](double, const Vec& x) { return Vec(x.size(), 0.0); };
  return c;
}

ConformalFactor conformal_constant(double cval) {
  ConformalFactor c;
  c.name = "constant";
  c.f = [cval](double, const Vec&) { return cval; };
  c.f_t = [](double, const Vec&) { return 0.0; };
  c.f_grad = [](double, const Vec& x) { return Vec(x.size(), 0.0); };
  return c;
}

ConformalFactor conformal_linear_x(double cval) {
  ConformalFactor c;
  c.name = "linear_x";
  c.f = [cval](double, const Vec& x) { return cval * x[0]; };
  c.f_t = [](double, const Vec&) { return 0.0; };
  c.f_grad = [cval](double, const Vec& x) {
    Vec g(x.size(), 0.0);
    g[0] = cval;
    return g;
  };
  return c;
}

ConformalFactor conformal_gaussian(double cval, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("conformal_gaussian: sigma must be positive");
  ConformalFactor c;
  c.name = "gaussian";
  const double is2 = 1.0 / (sigma * sigma);
  auto bump = [cval, is2](const Vec& x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return cval * std::exp(-0.5 * r2 * is2);
  };
  c.f = [bump](double, const Vec& x) { return bump(x); };
  c.f_t = [](double, const Vec&) { return 0.0; };
  c.f_grad = [bump, is2](double, const Vec& x) {
    const double b = bump(x);
    Vec g(x.size());
    for (size_t i = 0; i < x.size(); ++i) g[i] = -b * is2 * x[i];
    return g;
  };
  return c;
}

ConformalFactor conformal_factor_from_config(const std::string& name,
                                             const std::map<std::string, double>& params) {
  if (name == "zero") return conformal_zero();
  if (name == "constant") return conformal_constant(param_get(params, "c", 0.0));
  if (name == "linear_x") return conformal_linear_x(param_get(params, "c", 0.0));
  if (name == "gaussian")
    return conformal_gaussian(param_get(params, "c", 0.0), param_get(params, "sigma", 1.0));
  throw std::invalid_argument("unknown conformal factor '" + name + "'");
}

LiftState conformal_geodesic_rhs(const BrinkmannMetric& m, const ConformalFactor& f,
                                 const LiftState& st) {
  require_isotropic(m, "conformal_geodesic_rhs");
  const int n = m.n();
  if (static_cast<int>(st.q.size()) != n + 2 || st.qdot.size() != st.q.size())
    throw std::invalid_argument("conformal_geodesic_rhs: dimension mismatch");
  const double t = st.q[1];
  const Vec x(st.q.begin() + 2, st.q.end());
  const double vdot = st.qdot[0], tdot = st.qdot[1];
  const Vec xdot(st.qdot.begin() + 2, st.qdot.end());

  const double V = m.V.eval(t, x);
  const Vec Vi = m.V.grad(t, x);
  const double Vt = m.V.dt(t, x);
  const double ft = f.f_t(t, x);
  const Vec fi = f.f_grad(t, x);

  double grad_dot = 0.0, fdotx = 0.0, xd2 = 0.0;
  for (int i = 0; i < n; ++i) {
    grad_dot += Vi[i] * xdot[i];
    fdotx += fi[i] * xdot[i];
    xd2 += xdot[i] * xdot[i];
  }
  const double dVds = Vt * tdot + grad_dot;
  const double dfds = ft * tdot + fdotx;

  Vec qddot(n + 2, 0.0);
  qddot[1] = -2.0 * dfds * tdot;
  double vsum = 0.0;
  for (int i = 0; i < n; ++i) vsum += (2.0 * fi[i] * vdot - ft * xdot[i]) * xdot[i];
  qddot[0] = (2.0 * dVds - Vt * tdot) * tdot - 2.0 * V * ft * tdot * tdot - vsum;
  for (int i = 0; i < n; ++i) {
    const double others = xd2 - xdot[i] * xdot[i];
    const double cross = fdotx - fi[i] * xdot[i];
    qddot[2 + i] = -Vi[i] * tdot * tdot + 2.0 * (vdot - V * tdot) * fi[i] * tdot -
                   (xdot[i] * xdot[i] - others) * fi[i] - 2.0 * xdot[i] * cross -
                   2.0 * ft * tdot * xdot[i];
  }
  return {st.qdot, qddot};
}

double conformal_norm(const BrinkmannMetric& m, const ConformalFactor& f,
                      const LiftState& st) {
  const Vec x(st.q.begin() + 2, st.q.end());
  return std::exp(2.0 * f.f(st.q[1], x)) * metric_value(m, st.q, st.qdot, st.qdot);
}

Trajectory integrate_conformal(const BrinkmannMetric& m, const ConformalFactor& f,
                               const LiftState& st0, double s0, double s1,
                               const IntegratorConfig& cfg) {
  require_isotropic(m, "integrate_conformal");
  const int d = m.dim();
  OdeSystem sys;
  sys.dim = 2 * d;
  sys.rhs = [&m, &f, d](double, const Vec& y, Vec& dy) {
    LiftState st{Vec(y.begin(), y.begin() + d), Vec(y.begin() + d, y.end())};
    const LiftState r = conformal_geodesic_rhs(m, f, st);
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
  tr.metric_id = "conformal_ppwave:" + m.V.name + ":" + f.name;
  tr.initial_norm = conformal_norm(m, f, st0);
  tr.sol = integrate(sys, std::move(y0), s0, s1, cfg);
  return tr;
}

double ReparamMap::tau(double t) const { return hermite_1d(t_nodes, s_nodes, dsdt_nodes, t); }

double ReparamMap::tau_inv(double s) const {
  Vec dtds(dsdt_nodes.size());
  for (size_t i = 0; i < dsdt_nodes.size(); ++i) dtds[i] = 1.0 / dsdt_nodes[i];
  return hermite_1d(s_nodes, t_nodes, dtds, s);
}

std::pair<ReparamMap, Trajectory> reparametrize(const BrinkmannMetric& m,
                                                const Trajectory& tr,
                                                const ConformalFactor& f, double t0) {
  // No isotropy requirement here: the parameter map and the velocity rescaling
  // are weight-independent, so split-signature lifts reparametrize the same way.
  if (!tr.is_lift) throw std::invalid_argument("reparametrize: lift trajectory required");
  const int d = m.dim();
  const double lo = std::min(tr.param_start(), tr.param_end());
  const double hi = std::max(tr.param_start(), tr.param_end());
  if (t0 < lo || t0 > hi)
    throw std::invalid_argument("reparametrize: anchor outside trajectory parameter range");

  // The input must be a lightlike geodesic of g.
  for (size_t k = 0; k < tr.sol.grid.size(); ++k) {
    LiftState st{Vec(tr.sol.states[k].begin(), tr.sol.states[k].begin() + d),
                 Vec(tr.sol.states[k].begin() + d, tr.sol.states[k].end())};
    if (std::abs(lift_norm(m, st)) > 1e-6)
      throw std::invalid_argument("reparametrize: trajectory is not lightlike within 1e-6");
  }

  auto f_along = [&](double r) {
    const Vec y = tr.sol.eval(r);
    const Vec x(y.begin() + 2, y.begin() + 2 + m.n());
    return f.f(y[1], x);
  };
  auto integrand = [&](double r) { return std::exp(2.0 * f_along(r)); };

  // Refined node set: trajectory nodes, 3 subdivisions each, plus the anchor.
  Vec nodes;
  for (size_t k = 0; k + 1 < tr.sol.grid.size(); ++k) {
    const double a = tr.sol.grid[k], b = tr.sol.grid[k + 1];
    for (int j = 0; j < 4; ++j) nodes.push_back(a + (b - a) * (j / 4.0));
  }
  nodes.push_back(tr.sol.grid.back());
  nodes.push_back(t0);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [&](double a, double b) { return std::abs(a - b) < 1e-14 * (hi - lo + 1.0); }),
              nodes.end());
  if (tr.param_start() > tr.param_end()) std::reverse(nodes.begin(), nodes.end());

  ReparamMap map;
  map.t_nodes = nodes;
  map.s_nodes.resize(nodes.size());
  map.dsdt_nodes.resize(nodes.size());
  const double simpson_tol = 1e-10 / std::max<size_t>(1, nodes.size());
  double acc = 0.0;
  map.s_nodes[0] = 0.0;
  map.dsdt_nodes[0] = integrand(nodes[0]);
  for (size_t k = 1; k < nodes.size(); ++k) {
    acc += adaptive_simpson(integrand, nodes[k - 1], nodes[k], simpson_tol);
    map.s_nodes[k] = acc;
    map.dsdt_nodes[k] = integrand(nodes[k]);
  }
  // Anchor tau(t0) = 0 at the node nearest the requested base point (t0 was
  // inserted above, so this is exact up to dedup roundoff).
  size_t anchor = 0;
  for (size_t k = 1; k < nodes.size(); ++k)
    if (std::abs(nodes[k] - t0) < std::abs(nodes[anchor] - t0)) anchor = k;
  const double s_at_t0 = map.s_nodes[anchor];
  for (double& s : map.s_nodes) s -= s_at_t0;

  // Backward trajectories produce decreasing node lists; the interpolator
  // needs increasing abscissae.
  if (map.t_nodes.size() > 1 && map.t_nodes[0] > map.t_nodes[1]) {
    std::reverse(map.t_nodes.begin(), map.t_nodes.end());
    std::reverse(map.s_nodes.begin(), map.s_nodes.end());
    std::reverse(map.dsdt_nodes.begin(), map.dsdt_nodes.end());
  }
  for (size_t k = 1; k < map.s_nodes.size(); ++k)
    if (!(map.s_nodes[k] > map.s_nodes[k - 1]))
      throw std::runtime_error("reparametrize: tau is not strictly increasing");

  // Same curve points, parametrized by s; velocities rescaled analytically.
  Trajectory out;
  out.n = tr.n;
  out.is_lift = true;
  out.metric_id = "conformal_ppwave:" + m.V.name + ":" + f.name;
  out.sol.status = tr.sol.status;
  const size_t kn = tr.sol.grid.size();
  out.sol.grid.reserve(kn);
  out.sol.states.reserve(kn);
  out.sol.derivs.reserve(kn);
  for (size_t k = 0; k < kn; ++k) {
    const double r = tr.sol.grid[k];
    const Vec& y = tr.sol.states[k];
    LiftState st{Vec(y.begin(), y.begin() + d), Vec(y.begin() + d, y.end())};
    const Vec x(st.q.begin() + 2, st.q.end());
    const double fv = f.f(st.q[1], x);
    const double e2 = std::exp(-2.0 * fv);
    // df/dr along the curve, for the second-derivative Hermite data.
    const Vec fg = f.f_grad(st.q[1], x);
    double dfdr = f.f_t(st.q[1], x) * st.qdot[1];
    for (int i = 0; i < m.n(); ++i) dfdr += fg[i] * st.qdot[2 + i];
    const LiftState rr = geodesic_rhs(m, st);

    Vec state(2 * d), deriv(2 * d);
    for (int i = 0; i < d; ++i) {
      state[i] = st.q[i];
      state[d + i] = e2 * st.qdot[i];
      deriv[i] = state[d + i];
      deriv[d + i] = e2 * e2 * (rr.qdot[i] - 2.0 * dfdr * st.qdot[i]);
    }
    out.sol.grid.push_back(map.tau(r));
    out.sol.states.push_back(std::move(state));
    out.sol.derivs.push_back(std::move(deriv));
  }
  LiftState st0{Vec(out.sol.states.front().begin(), out.sol.states.front().begin() + d),
                Vec(out.sol.states.front().begin() + d, out.sol.states.front().end())};
  out.initial_norm = conformal_norm(m, f, st0);
  return {std::move(map), std::move(out)};
}

ConformalReport verify_conformal_class(const BrinkmannMetric& m, const ConformalFactor& f,
                                       const Trajectory& base_solution,
                                       const ConformalVerifyConfig& cfg) {
  require_isotropic(m, "verify_conformal_class");
  if (base_solution.is_lift)
    throw std::invalid_argument("verify_conformal_class: base trajectory required");
  const int d = m.dim();
  const double t0 = base_solution.param_start();
  const double t1 = base_solution.param_end();

  const LiftState lift0 = eisenhart_lift_initial(
      m.V, t0, base_solution.x_at(t0), base_solution.xdot_at(t0), CausalClass::lightlike());
  const Trajectory lift = integrate_lift(m, lift0, 0.0, t1 - t0, cfg.integrator);
  auto [map, gamma_f] = reparametrize(m, lift, f, 0.0);

  // Independent integration of the conformal geodesic system from the
  // reparametrized initial state.
  const Vec& y0 = gamma_f.sol.states.front();
  LiftState st0{Vec(y0.begin(), y0.begin() + d), Vec(y0.begin() + d, y0.end())};
  const Trajectory indep =
      integrate_conformal(m, f, st0, gamma_f.param_start(), gamma_f.param_end(), cfg.integrator);

  ConformalReport rep;
  for (size_t k = 0; k < gamma_f.sol.grid.size(); ++k) {
    const double s = gamma_f.sol.grid[k];
    const Vec a = gamma_f.sol.states[k];
    const Vec b = indep.sol.eval(s);
    for (size_t i = 0; i < a.size(); ++i)
      rep.max_curve_gap = std::max(rep.max_curve_gap, std::abs(a[i] - b[i]));
    LiftState st{Vec(a.begin(), a.begin() + d), Vec(a.begin() + d, a.end())};
    rep.max_conformal_norm =
        std::max(rep.max_conformal_norm, std::abs(conformal_norm(m, f, st)));
  }
  rep.pass = rep.max_curve_gap <= cfg.tol && rep.max_conformal_norm <= cfg.tol;
  return rep;
}

GenericMetric generic_conformal(const BrinkmannMetric& m, const ConformalFactor& f) {
  GenericMetric g = generic_brinkmann(m);
  auto base_value = g.value;
  auto fac = f;
  const int n = m.n();
  g.value = [base_value, fac, n](const Vec& p) {
    const Vec x(p.begin() + 2, p.begin() + 2 + n);
    const double scale = std::exp(2.0 * fac.f(p[1], x));
    Mat out = base_value(p);
    for (double& v : out.data()) v *= scale;
    return out;
  };
  return g;
}

}  // namespace eisenhart
