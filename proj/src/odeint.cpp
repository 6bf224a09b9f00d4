#include "eisenhart/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eisenhart {

namespace {

bool all_finite(const Vec& y) {
  for (double v : y)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string state_string(double s, const Vec& y) {
  std::ostringstream os;
  os << "s=" << s << ", y=(";
  for (size_t i = 0; i < y.size(); ++i) os << (i ? "," : "") << y[i];
  os << ")";
  return os.str();
}

// Dormand-Prince 5(4) coefficients (FSAL pair).
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
// b (5th order) equals the last row of kA; e = b5 - b4 gives the error estimate.
constexpr double kE[7] = {71.0 / 57600,  0.0,           -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

SolveOutput integrate_rk4(const OdeSystem& sys, Vec y0, double s0, double s1,
                          const IntegratorConfig& cfg) {
  SolveOutput out;
  const double span = std::abs(s1 - s0);
  const long nsteps = std::max<long>(1, static_cast<long>(std::ceil(span / std::abs(cfg.h0))));
  if (nsteps > cfg.max_steps) {
    // Truncated run: record what fits.
    out.status = SolveStatus::step_limit;
  }
  const long limit = std::min<long>(nsteps, cfg.max_steps);
  const double h = (s1 - s0) / static_cast<double>(nsteps);
  const int d = sys.dim;

  Vec y = std::move(y0), f(d), k1(d), k2(d), k3(d), k4(d), tmp(d);
  double s = s0;
  sys.rhs(s, y, f);
  if (!all_finite(f))
    throw std::runtime_error("integrate: non-finite rhs at " + state_string(s, y));
  out.grid.push_back(s);
  out.states.push_back(y);
  out.derivs.push_back(f);

  for (long step = 0; step < limit; ++step) {
    k1 = f;
    for (int i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    sys.rhs(s + 0.5 * h, tmp, k2);
    for (int i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    sys.rhs(s + 0.5 * h, tmp, k3);
    for (int i = 0; i < d; ++i) tmp[i] = y[i] + h * k3[i];
    sys.rhs(s + h, tmp, k4);
    for (int i = 0; i < d; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    s = (step + 1 == nsteps) ? s1 : s0 + h * static_cast<double>(step + 1);
    if (!all_finite(y))
      throw std::runtime_error("integrate: non-finite state at " + state_string(s, y));
    sys.rhs(s, y, f);
    if (!all_finite(f))
      throw std::runtime_error("integrate: non-finite rhs at " + state_string(s, y));
    out.grid.push_back(s);
    out.states.push_back(y);
    out.derivs.push_back(f);
    if (norm_inf(y) > cfg.blowup_norm) {
      out.status = SolveStatus::blowup_suspected;
      out.attempted_next = s + h;
      return out;
    }
  }
  if (out.status != SolveStatus::step_limit) out.status = SolveStatus::completed;
  return out;
}

SolveOutput integrate_dp54(const OdeSystem& sys, Vec y0, double s0, double s1,
                           const IntegratorConfig& cfg) {
  SolveOutput out;
  const int d = sys.dim;
  const double dir = (s1 >= s0) ? 1.0 : -1.0;
  const double span = std::abs(s1 - s0);
  const double hmax = (cfg.max_step > 0.0) ? cfg.max_step : span;
  const double hmin = 1e-14 * span;

  Vec y = std::move(y0);
  Vec k[7];
  for (auto& ki : k) ki.assign(d, 0.0);
  Vec ytmp(d), ynew(d);

  double s = s0;
  sys.rhs(s, y, k[0]);
  if (!all_finite(k[0]))
    throw std::runtime_error("integrate: non-finite rhs at " + state_string(s, y));
  out.grid.push_back(s);
  out.states.push_back(y);
  out.derivs.push_back(k[0]);

  double h = std::min(std::abs(cfg.h0), hmax);
  if (h <= 0.0) throw std::invalid_argument("integrate: h0 must be nonzero");
  double err_prev = 1.0;
  long accepted = 0;

  while (dir * (s1 - s) > 0.0) {
    if (accepted >= cfg.max_steps) {
      out.status = SolveStatus::step_limit;
      return out;
    }
    h = std::min(h, hmax);
    if (h > std::abs(s1 - s)) h = std::abs(s1 - s);
    const double hs = dir * h;

    bool bad = false;
    for (int stage = 1; stage < 7; ++stage) {
      for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int j = 0; j < stage; ++j) acc += kA[stage][j] * k[j][i];
        ytmp[i] = y[i] + hs * acc;
      }
      if (!all_finite(ytmp)) { bad = true; break; }
      sys.rhs(s + kC[stage] * hs, ytmp, k[stage]);
      if (!all_finite(k[stage])) { bad = true; break; }
    }
    // Stage 6 evaluated ytmp at y_new (b row equals the last a row): ynew = ytmp
    // of the final stage, and k[6] is the FSAL derivative there.
    double err = 0.0;
    if (!bad) {
      ynew = ytmp;
      for (int i = 0; i < d; ++i) {
        double e = 0.0;
        for (int j = 0; j < 7; ++j) e += kE[j] * k[j][i];
        e *= hs;
        const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / d);
      if (!std::isfinite(err)) bad = true;
    }

    // The cubic Hermite dense output errs by h^4 |y''''| / 384 mid-interval,
    // which a pure 5th-order controller lets creep past the documented
    // 10x-tolerance bound.  Estimate y'''' from a third divided difference of
    // the rhs at the trailing accepted nodes plus the candidate endpoint
    // (node data is tolerance-accurate, so the estimate is stable) and hold
    // the implied interpolation error inside the bound too.
    double interp_ratio = 0.0;
    if (!bad && out.grid.size() >= 3) {
      const size_t m = out.grid.size();
      const double xs[4] = {out.grid[m - 3], out.grid[m - 2], out.grid[m - 1], s + hs};
      const Vec* fs[4] = {&out.derivs[m - 3], &out.derivs[m - 2], &out.derivs[m - 1], &k[6]};
      const double h4 = h * h * h * h;
      for (int i = 0; i < d; ++i) {
        double c[4] = {(*fs[0])[i], (*fs[1])[i], (*fs[2])[i], (*fs[3])[i]};
        for (int lev = 1; lev < 4; ++lev)
          for (int j = 3; j >= lev; --j) c[j] = (c[j] - c[j - 1]) / (xs[j] - xs[j - lev]);
        const double e_mid = 6.0 * std::abs(c[3]) * h4 / 384.0;
        const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        interp_ratio = std::max(interp_ratio, e_mid / (10.0 * sc));
      }
      if (!std::isfinite(interp_ratio)) bad = true;
    }

    if (bad || err > 1.0 || interp_ratio > 1.0) {
      // Reject: shrink.  A collapsing step is the blow-up signature.
      double fac = bad ? 0.2 : 1.0;
      if (!bad && err > 1.0) fac = std::min(fac, 0.9 * std::pow(err, -0.2));
      if (!bad && interp_ratio > 1.0) fac = std::min(fac, 0.9 * std::pow(interp_ratio, -0.25));
      h *= std::max(0.2, std::min(fac, 0.9));
      if (h < hmin) {
        out.status = SolveStatus::blowup_suspected;
        out.attempted_next = s + hs;
        return out;
      }
      continue;
    }

    // Accept.
    s = (std::abs(s1 - (s + hs)) < 1e-15 * span) ? s1 : s + hs;
    y = ynew;
    ++accepted;
    out.grid.push_back(s);
    out.states.push_back(y);
    out.derivs.push_back(k[6]);
    if (norm_inf(y) > cfg.blowup_norm) {
      out.status = SolveStatus::blowup_suspected;
      out.attempted_next = s + dir * h;
      return out;
    }
    k[0] = k[6];  // FSAL

    // PI step controller, growth clamped to [0.2, 5]; the interpolation
    // budget caps growth the same way the truncation error does.
    double fac;
    if (err == 0.0) {
      fac = 5.0;
    } else {
      fac = 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
    }
    if (interp_ratio > 0.0) fac = std::min(fac, 0.9 * std::pow(interp_ratio, -0.25));
    fac = std::min(5.0, std::max(0.2, fac));
    err_prev = std::max(err, 1e-10);
    h *= fac;
  }
  out.status = SolveStatus::completed;
  return out;
}

}  // namespace

int SolveOutput::locate(double s) const {
  if (grid.size() < 2) {
    if (!grid.empty() && s == grid.front()) return 0;
    throw std::out_of_range("SolveOutput::locate: interpolant needs two nodes");
  }
  const bool fwd = forward();
  const double lo = fwd ? grid.front() : grid.back();
  const double hi = fwd ? grid.back() : grid.front();
  const double slack = 1e-9 * (std::abs(hi - lo) + 1.0);
  if (s < lo - slack || s > hi + slack)
    throw std::out_of_range("SolveOutput::locate: parameter outside grid");
  // Binary search for the bracketing interval.
  int a = 0, b = static_cast<int>(grid.size()) - 1;
  while (b - a > 1) {
    const int m = (a + b) / 2;
    const bool left = fwd ? (s < grid[m]) : (s > grid[m]);
    if (left) b = m; else a = m;
  }
  return a;
}

Vec SolveOutput::eval(double s) const {
  if (grid.size() == 1 && s == grid.front()) return states.front();
  const int kk = locate(s);
  const double h = grid[kk + 1] - grid[kk];
  const double u = (s - grid[kk]) / h;
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double h10 = u3 - 2.0 * u2 + u;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h11 = u3 - u2;
  const size_t d = states[kk].size();
  Vec y(d);
  for (size_t i = 0; i < d; ++i)
    y[i] = h00 * states[kk][i] + h10 * h * derivs[kk][i] + h01 * states[kk + 1][i] +
           h11 * h * derivs[kk + 1][i];
  return y;
}

Vec SolveOutput::eval_derivative(double s) const {
  if (grid.size() == 1 && s == grid.front()) return derivs.front();
  const int kk = locate(s);
  const double h = grid[kk + 1] - grid[kk];
  const double u = (s - grid[kk]) / h;
  const double u2 = u * u;
  const double d00 = (6.0 * u2 - 6.0 * u) / h;
  const double d10 = 3.0 * u2 - 4.0 * u + 1.0;
  const double d01 = (-6.0 * u2 + 6.0 * u) / h;
  const double d11 = 3.0 * u2 - 2.0 * u;
  const size_t d = states[kk].size();
  Vec y(d);
  for (size_t i = 0; i < d; ++i)
    y[i] = d00 * states[kk][i] + d10 * derivs[kk][i] + d01 * states[kk + 1][i] +
           d11 * derivs[kk + 1][i];
  return y;
}

SolveOutput integrate(const OdeSystem& sys, Vec y0, double s0, double s1,
                      const IntegratorConfig& cfg) {
  if (sys.dim <= 0 || !sys.rhs) throw std::invalid_argument("integrate: malformed system");
  if (static_cast<int>(y0.size()) != sys.dim)
    throw std::invalid_argument("integrate: state size does not match system dimension");
  if (!(cfg.h0 > 0.0)) throw std::invalid_argument("integrate: h0 must be positive");
  if (!(cfg.rtol >= 0.0) || !(cfg.atol >= 0.0) || cfg.rtol + cfg.atol <= 0.0)
    throw std::invalid_argument("integrate: tolerances must be nonnegative, not both zero");
  if (!all_finite(y0))
    throw std::invalid_argument("integrate: non-finite initial state");

  if (s0 == s1) {
    SolveOutput out;
    Vec f(sys.dim);
    sys.rhs(s0, y0, f);
    out.grid.push_back(s0);
    out.states.push_back(std::move(y0));
    out.derivs.push_back(std::move(f));
    out.status = SolveStatus::completed;
    return out;
  }
  return cfg.method == Method::rk4_fixed ? integrate_rk4(sys, std::move(y0), s0, s1, cfg)
                                         : integrate_dp54(sys, std::move(y0), s0, s1, cfg);
}

std::vector<EventHit> locate_events(const SolveOutput& out, const EventSpec& ev) {
  std::vector<EventHit> hits;
  if (out.grid.size() < 2 || !ev.g) return hits;
  const int sub = std::max(1, ev.subsamples);

  auto value = [&](double s) { return ev.g(s, out.eval(s)); };
  auto wanted = [&](double before, double after) {
    if (ev.direction > 0) return before < 0.0 && after > 0.0;
    if (ev.direction < 0) return before > 0.0 && after < 0.0;
    return (before < 0.0 && after > 0.0) || (before > 0.0 && after < 0.0);
  };

  double s_prev = out.grid.front();
  double g_prev = ev.g(s_prev, out.states.front());
  for (size_t kk = 0; kk + 1 < out.grid.size(); ++kk) {
    const double a = out.grid[kk], b = out.grid[kk + 1];
    for (int j = 1; j <= sub; ++j) {
      const double s = (j == sub) ? b : a + (b - a) * (static_cast<double>(j) / sub);
      const double g = value(s);
      if (wanted(g_prev, g)) {
        double lo = s_prev, hi = s, glo = g_prev;
        for (int it = 0; it < 80 && std::abs(hi - lo) > ev.refine_tol; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = value(mid);
          if ((glo < 0.0) == (gm < 0.0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        const double s_star = 0.5 * (lo + hi);
        if (hits.empty() || std::abs(hits.back().s - s_star) > ev.refine_tol)
          hits.push_back({s_star, out.eval(s_star)});
      }
      s_prev = s;
      g_prev = g;
    }
  }
  return hits;
}

}  // namespace eisenhart
