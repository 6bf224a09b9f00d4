#include "eisenhart/complexlift.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "eisenhart/rng.hpp"

namespace eisenhart {

namespace {

void require_planar(const PotentialSpec& V, const char* who) {
  if (V.n != 2) throw std::invalid_argument(std::string(who) + ": potential must have n = 2");
}

}  // namespace

std::complex<double> HolomorphicSystem::F(std::complex<double> z) const {
  const Vec g = V.grad(0.0, {z.real(), z.imag()});
  return {g[0], -g[1]};
}

HolomorphicSystem f_from_potential(const PotentialSpec& V) {
  require_planar(V, "f_from_potential");
  if (!V.time_independent)
    throw std::invalid_argument("f_from_potential: time-dependent potential has no holomorphic F");

  HolomorphicSystem H;
  H.V = V;

  // Harmonicity and Cauchy-Riemann residuals over a fixed sample cloud.
  UniformRng rng(0x517cc1b727220a95ull);
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const double x = rng.range(-2.0, 2.0);
    const double y = rng.range(-2.0, 2.0);
    H.max_laplacian = std::max(H.max_laplacian, std::abs(V.laplacian(0.0, {x, y})));

    auto Fxy = [&V](double px, double py) {
      const Vec g = V.grad(0.0, {px, py});
      return std::complex<double>(g[0], -g[1]);
    };
    const std::complex<double> dFdx = (Fxy(x + h, y) - Fxy(x - h, y)) / (2.0 * h);
    const std::complex<double> dFdy = (Fxy(x, y + h) - Fxy(x, y - h)) / (2.0 * h);
    const double cr1 = std::abs(dFdx.real() - dFdy.imag());
    const double cr2 = std::abs(dFdy.real() + dFdx.imag());
    H.max_cr_residual = std::max({H.max_cr_residual, cr1, cr2});
  }
  if (H.max_laplacian > 1e-10)
    throw std::invalid_argument("f_from_potential: potential '" + V.name +
                                "' is not harmonic (max |laplacian| = " +
                                std::to_string(H.max_laplacian) + ")");
  return H;
}

SplitMetric make_split(PotentialSpec V) {
  require_planar(V, "make_split");
  return SplitMetric{make_brinkmann(std::move(V), {-1.0, 1.0})};
}

double split_metric_value(const SplitMetric& m, const Vec& p, const Vec& X, const Vec& Y) {
  return metric_value(m.g, p, X, Y);
}

LiftState split_geodesic_rhs(const SplitMetric& m, const LiftState& st) {
  return geodesic_rhs(m.g, st);
}

LiftState complex_lift_initial(const PotentialSpec& V, double t0, std::complex<double> z0,
                               std::complex<double> zdot0, const CausalClass& c) {
  require_planar(V, "complex_lift_initial");
  const double xd = zdot0.real(), yd = zdot0.imag();
  LiftState st;
  st.q = {0.0, t0, z0.real(), z0.imag()};
  st.qdot = {V.eval(t0, {z0.real(), z0.imag()}) + 0.5 * xd * xd - 0.5 * yd * yd + c.epsilon,
             1.0, xd, yd};
  return st;
}

Trajectory integrate_split_lift(const SplitMetric& m, const LiftState& st0, double s0,
                                double s1, const IntegratorConfig& cfg) {
  Trajectory tr = integrate_lift(m.g, st0, s0, s1, cfg);
  tr.metric_id = "split_ppwave:" + m.V().name;
  return tr;
}

ComplexReport verify_complex_solution(const Trajectory& traj, const HolomorphicSystem& H,
                                      double tol, double fd_step) {
  if (traj.is_lift)
    throw std::invalid_argument(
        "verify_complex_solution: base trajectory required (project the lift first)");
  if (traj.n != 2) throw std::invalid_argument("verify_complex_solution: planar trajectory required");
  if (!(fd_step > 0.0)) throw std::invalid_argument("verify_complex_solution: fd_step must be positive");

  ComplexReport rep;
  const double lo = std::min(traj.param_start(), traj.param_end());
  const double hi = std::max(traj.param_start(), traj.param_end());
  const double h = fd_step;

  const auto& grid = traj.sol.grid;
  const size_t stride = std::max<size_t>(1, grid.size() / 2000);
  for (size_t k = 0; k < grid.size(); k += stride) {
    const double t = grid[k];
    if (t - 2.0 * h < lo || t + 2.0 * h > hi) continue;
    const Vec xm2 = traj.x_at(t - 2.0 * h), xm1 = traj.x_at(t - h);
    const Vec x0 = traj.x_at(t);
    const Vec xp1 = traj.x_at(t + h), xp2 = traj.x_at(t + 2.0 * h);
    const std::complex<double> f = H.F({x0[0], x0[1]});
    const double target[2] = {f.real(), f.imag()};
    for (int i = 0; i < 2; ++i) {
      const double acc = (-xm2[i] + 16.0 * xm1[i] - 30.0 * x0[i] + 16.0 * xp1[i] - xp2[i]) /
                         (12.0 * h * h);
      rep.max_residual = std::max(rep.max_residual, std::abs(acc - target[i]));
    }
  }
  rep.pass = rep.max_residual <= tol;
  return rep;
}

BlowupReport detect_blowup(const HolomorphicSystem& H, std::complex<double> z0,
                           std::complex<double> zdot0, double horizon,
                           const IntegratorConfig& cfg) {
  if (!(horizon > 0.0)) throw std::invalid_argument("detect_blowup: horizon must be positive");

  OdeSystem sys;
  sys.dim = 4;
  sys.rhs = [&H](double, const Vec& y, Vec& dy) {
    const std::complex<double> f = H.F({y[0], y[1]});
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = f.real();
    dy[3] = f.imag();
  };

  BlowupReport rep;
  rep.path.n = 2;
  rep.path.is_lift = false;
  rep.path.metric_id = "complex_ode:" + H.V.name;
  rep.path.sol = integrate(sys, {z0.real(), z0.imag(), zdot0.real(), zdot0.imag()}, 0.0,
                           horizon, cfg);
  rep.status = rep.path.sol.status;
  rep.t_reached = rep.path.sol.grid.back();
  if (rep.status == SolveStatus::blowup_suspected) {
    rep.blown_up = true;
    rep.has_bracket = true;
    rep.bracket_lo = rep.path.sol.grid.back();
    rep.bracket_hi = rep.path.sol.attempted_next;
  }
  return rep;
}

GenericMetric generic_split(const SplitMetric& m) { return generic_brinkmann(m.g); }

}  // namespace eisenhart
