#include "eisenhart/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eisenhart/complexlift.hpp"
#include "eisenhart/conformal.hpp"
#include "eisenhart/lift.hpp"
#include "eisenhart/potentials.hpp"
#include "eisenhart/quadrature.hpp"
#include "eisenhart/riemlift.hpp"
#include "eisenhart/rng.hpp"
#include "eisenhart/stability.hpp"

namespace eisenhart {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Tally {
  std::ostream& out;
  AcceptanceResult result;
  int index = 0;

  void record(const std::string& name, bool pass, const std::string& detail) {
    ++index;
    out << (pass ? "PASS" : "FAIL") << "  " << index << ". " << name;
    if (!detail.empty()) out << "  [" << detail << "]";
    out << "\n";
    if (pass)
      ++result.passed;
    else
      ++result.failed;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

IntegratorConfig tight(double tol, double max_step = 0.0) {
  IntegratorConfig c;
  c.rtol = tol;
  c.atol = tol;
  c.max_step = max_step;
  return c;
}

std::vector<PotentialSpec> catalog_battery() {
  std::vector<PotentialSpec> out;
  out.push_back(catalog_get("free", {}, 2));
  out.push_back(catalog_get("linear", {{"b1", 0.4}, {"b2", -0.3}}, 2));
  out.push_back(catalog_get("harmonic", {{"k", 1.0}}, 1));
  out.push_back(catalog_get("anisotropic_harmonic", {{"k1", 1.0}, {"k2", 4.0}}, 2));
  out.push_back(catalog_get("time_harmonic", {{"epsilon", 0.5}, {"omega", 1.0}}, 1));
  return out;
}

// Criteria 1 and 2 share the same battery of runs.
void criterion_lift_battery(Tally& tally) {
  const IntegratorConfig icfg = tight(1e-10, 0.02);
  UniformRng rng(1);
  const CausalClass classes[3] = {CausalClass::lightlike(), CausalClass::unit_timelike(),
                                  CausalClass::unit_spacelike()};
  bool all_verified = true;
  double worst_gap = 0.0, worst_residual = 0.0;
  double worst_norm_drift = 0.0, worst_affinity = 0.0;
  int runs = 0;

  for (const PotentialSpec& V : catalog_battery()) {
    const BrinkmannMetric m = make_brinkmann(V);
    for (int ic = 0; ic < 20; ++ic) {
      Vec x0(V.n), xdot0(V.n);
      for (int i = 0; i < V.n; ++i) {
        x0[i] = rng.range(-1.0, 1.0);
        xdot0[i] = rng.range(-1.0, 1.0);
      }
      const Trajectory base = integrate_base(V, 0.0, x0, xdot0, 5.0, icfg);
      for (const CausalClass& cc : classes) {
        const LiftState st0 = eisenhart_lift_initial(V, 0.0, x0, xdot0, cc);
        const Trajectory lifted = integrate_lift(m, st0, 0.0, 5.0, icfg);
        const LiftReport rep = verify_lift(V, base, lifted, 1e-6);
        all_verified = all_verified && rep.pass;
        worst_gap = std::max(worst_gap, rep.max_x_gap);
        worst_residual = std::max(worst_residual, rep.max_hamiltonian_residual);
        worst_norm_drift = std::max(worst_norm_drift, rep.max_norm_drift);
        const int d = V.n + 2;
        for (const Vec& y : lifted.sol.states)
          worst_affinity = std::max(worst_affinity, std::abs(y[d + 1] - 1.0));
        ++runs;
      }
    }
  }
  tally.record("lift correspondence, 5 potentials x 20 seeded ICs x 3 causal classes",
               all_verified,
               "runs=" + std::to_string(runs) + " max_gap=" + fmt(worst_gap) +
                   " max_residual=" + fmt(worst_residual));
  tally.record("causal-norm and affine-time conservation across the same runs",
               worst_norm_drift <= 1e-8 && worst_affinity <= 1e-10,
               "norm_drift=" + fmt(worst_norm_drift) + " affinity=" + fmt(worst_affinity));
}

void criterion_conformal(Tally& tally) {
  ConformalVerifyConfig vcfg;
  vcfg.tol = 1e-6;
  vcfg.integrator = tight(1e-10, 0.02);
  const std::vector<ConformalFactor> factors = {conformal_zero(), conformal_constant(0.3),
                                                conformal_linear_x(0.1)};
  bool pass = true;
  double worst_gap = 0.0, worst_norm = 0.0;
  for (int n = 1; n <= 2; ++n) {
    const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, n);
    const BrinkmannMetric m = make_brinkmann(V);
    const Vec x0 = (n == 1) ? Vec{0.7} : Vec{0.7, -0.4};
    const Vec xdot0 = (n == 1) ? Vec{0.3} : Vec{0.3, 0.5};
    const Trajectory base = integrate_base(V, 0.0, x0, xdot0, 5.0, vcfg.integrator);
    for (const ConformalFactor& f : factors) {
      const ConformalReport rep = verify_conformal_class(m, f, base, vcfg);
      pass = pass && rep.pass && rep.max_conformal_norm <= 1e-7;
      worst_gap = std::max(worst_gap, rep.max_curve_gap);
      worst_norm = std::max(worst_norm, rep.max_conformal_norm);
    }
  }
  tally.record("conformal class: zero/constant/linear_x factors on harmonic n=1,2", pass,
               "max_gap=" + fmt(worst_gap) + " max_lightlike_norm=" + fmt(worst_norm));
}

bool events_match(const std::vector<ConjugateEvent>& events,
                  const std::vector<std::pair<double, int>>& oracle, double tol) {
  if (events.size() != oracle.size()) return false;
  for (size_t k = 0; k < events.size(); ++k)
    if (std::abs(events[k].t - oracle[k].first) > tol ||
        events[k].multiplicity != oracle[k].second)
      return false;
  return true;
}

void criterion_conjugate(Tally& tally) {
  ConjugateConfig ccfg;
  ccfg.integrator = tight(1e-10);

  // n = 1: M(t) = sin t, kernel at pi and 2 pi, simple.
  const PotentialSpec V1 = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const Trajectory base1 = integrate_base(V1, 0.0, {1.0}, {0.0}, 7.0, ccfg.integrator);
  const ConjugateReport red1 = conjugate_points(V1, base1, 0.0, 7.0, ccfg);
  const bool ok1 = events_match(red1.events, {{kPi, 1}, {2.0 * kPi, 1}}, 1e-6);

  // n = 2 isotropic: M(t) = sin t * I, double kernel at pi.
  const PotentialSpec V2 = catalog_get("harmonic", {{"k", 1.0}}, 2);
  const Trajectory base2 = integrate_base(V2, 0.0, {1.0, 0.0}, {0.0, 1.0}, 4.0, ccfg.integrator);
  const ConjugateReport red2 = conjugate_points(V2, base2, 0.0, 4.0, ccfg);
  const bool ok2 = events_match(red2.events, {{kPi, 2}}, 1e-6);

  // Generic full-dimension detector against the reduced events.
  bool generic_ok = true;
  const BrinkmannMetric m1 = make_brinkmann(V1);
  const LiftState st1 = eisenhart_lift_initial(V1, 0.0, {1.0}, {0.0}, CausalClass::lightlike());
  const Trajectory lift1 = integrate_lift(m1, st1, 0.0, 7.0, ccfg.integrator);
  const ConjugateReport gen1 = generic_conjugate_points(generic_brinkmann(m1), lift1, ccfg);
  if (gen1.events.size() != red1.events.size())
    generic_ok = false;
  else
    for (size_t k = 0; k < gen1.events.size(); ++k)
      generic_ok = generic_ok && std::abs(gen1.events[k].t - red1.events[k].t) <= 1e-4 &&
                   gen1.events[k].multiplicity == red1.events[k].multiplicity;

  tally.record("conjugate points: harmonic n=1 at pi,2pi (mult 1), n=2 at pi (mult 2)",
               ok1 && ok2 && generic_ok,
               "n1_events=" + std::to_string(red1.events.size()) +
                   " n2_events=" + std::to_string(red2.events.size()) +
                   (generic_ok ? " generic=agree" : " generic=disagree"));
}

void criterion_conformal_conjugate(Tally& tally) {
  ConjugateConfig ccfg;
  ccfg.integrator = tight(1e-10);
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const BrinkmannMetric m = make_brinkmann(V);
  const ConformalFactor f = conformal_linear_x(0.1);
  const LiftState st0 = eisenhart_lift_initial(V, 0.0, {1.0}, {0.0}, CausalClass::lightlike());
  const Trajectory lifted = integrate_lift(m, st0, 0.0, 7.0, ccfg.integrator);
  const auto [map, gamma_f] = reparametrize(m, lifted, f, 0.0);
  const ConjugateReport rep = generic_conjugate_points(generic_conformal(m, f), gamma_f, ccfg);
  const double s1 = map.tau(kPi), s2 = map.tau(2.0 * kPi);
  const bool pass = events_match(rep.events, {{s1, 1}, {s2, 1}}, 1e-4);
  std::string detail = "expected tau(pi)=" + fmt(s1) + " tau(2pi)=" + fmt(s2) + " got";
  for (const ConjugateEvent& e : rep.events) detail += " " + fmt(e.t);
  tally.record("conformal invariance of conjugate points under f = 0.1 x", pass, detail);
}

void criterion_variation(Tally& tally) {
  const IntegratorConfig icfg = tight(1e-10);
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const Trajectory base = integrate_base(V, 0.0, {1.0}, {0.0}, 3.5, icfg);
  const double eps = 0.05;
  const VariationFamily fam = variation_family(V, base, {1.0}, eps, 9, icfg);
  const double at_pi = fam.spread_at(kPi) / eps;
  const double at_half = fam.spread_at(0.5 * kPi) / eps;
  const bool pass = at_pi <= 10.0 * eps && at_half >= 0.9 && at_half <= 1.1;
  tally.record("variation family reconvergence at the conjugate time", pass,
               "spread(pi)/eps=" + fmt(at_pi) + " spread(pi/2)/eps=" + fmt(at_half));
}

void criterion_hypotheses(Tally& tally) {
  const IntegratorConfig icfg = tight(1e-10);
  ConjugateConfig ccfg;
  ccfg.integrator = icfg;

  const PotentialSpec Vh = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const Trajectory bh = integrate_base(Vh, 0.0, {1.0}, {0.0}, 10.0, icfg);
  const AccumulationHypotheses ah = check_accumulation_hypotheses(Vh, bh);
  const bool eventh = !conjugate_points(Vh, bh, 0.0, 10.0, ccfg).events.empty();

  const PotentialSpec Vs = catalog_get("saddle_harmonic", {}, 2);
  const Trajectory bs = integrate_base(Vs, 0.0, {1.0, 0.0}, {0.0, 0.0}, 10.0, icfg);
  const AccumulationHypotheses as = check_accumulation_hypotheses(Vs, bs);
  const bool events = !conjugate_points(Vs, bs, 0.0, 10.0, ccfg).events.empty();

  const PotentialSpec Vf = catalog_get("free", {}, 1);
  const Trajectory bf = integrate_base(Vf, 0.0, {1.0}, {0.5}, 10.0, icfg);
  const AccumulationHypotheses af = check_accumulation_hypotheses(Vf, bf);

  const bool pass = ah.all_hold && eventh && as.all_hold && events && !af.all_hold;
  tally.record("accumulation hypotheses: harmonic and saddle hold, free does not", pass,
               std::string("harmonic=") + (ah.all_hold ? "hold" : "fail") +
                   " saddle=" + (as.all_hold ? "hold" : "fail") +
                   " free=" + (af.all_hold ? "hold" : "clear"));
}

void criterion_complex(Tally& tally) {
  const IntegratorConfig icfg = tight(1e-12, 2e-3);

  // z'' = z from (1, 0): cosh t.
  const PotentialSpec Vs = catalog_get("saddle_harmonic", {}, 2);
  const SplitMetric ms = make_split(Vs);
  const Trajectory lifted_s = integrate_split_lift(
      ms, complex_lift_initial(Vs, 0.0, {1.0, 0.0}, {0.0, 0.0}, CausalClass::lightlike()),
      0.0, 3.0, icfg);
  const Trajectory proj_s = project(lifted_s);
  double gap_cosh = 0.0;
  for (int j = 0; j <= 300; ++j) {
    const double t = 3.0 * j / 300.0;
    const Vec z = proj_s.x_at(t);
    gap_cosh = std::max(gap_cosh, std::abs(z[0] - std::cosh(t)));
    gap_cosh = std::max(gap_cosh, std::abs(z[1]));
  }

  // z'' = -z from (1, 0): cos t.
  const PotentialSpec Vn = catalog_get("neg_saddle", {}, 2);
  const SplitMetric mn = make_split(Vn);
  const Trajectory lifted_n = integrate_split_lift(
      mn, complex_lift_initial(Vn, 0.0, {1.0, 0.0}, {0.0, 0.0}, CausalClass::lightlike()),
      0.0, 3.0, icfg);
  const Trajectory proj_n = project(lifted_n);
  double gap_cos = 0.0;
  for (int j = 0; j <= 300; ++j) {
    const double t = 3.0 * j / 300.0;
    const Vec z = proj_n.x_at(t);
    gap_cos = std::max(gap_cos, std::abs(z[0] - std::cos(t)));
    gap_cos = std::max(gap_cos, std::abs(z[1]));
  }

  // F of the cubic potential is exactly z^2.
  const HolomorphicSystem H = f_from_potential(catalog_get("cubic_harmonic_2d", {}, 2));
  UniformRng rng(8);
  double f_gap = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::complex<double> z{rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)};
    f_gap = std::max(f_gap, std::abs(H.F(z) - z * z));
  }

  // z'' = z^2 escapes in finite time from z = 1 at rest.
  const BlowupReport blow = detect_blowup(H, {1.0, 0.0}, {0.0, 0.0}, 20.0, tight(1e-10));
  const bool blow_ok = blow.blown_up && blow.has_bracket && blow.bracket_lo > 0.0 &&
                       blow.bracket_hi > blow.bracket_lo && blow.bracket_hi <= 20.0;

  const bool pass = gap_cosh <= 1e-7 && gap_cos <= 1e-7 && f_gap <= 1e-12 && blow_ok;
  tally.record("complex lift: cosh/cos closed forms, F=z^2 identity, z''=z^2 blow-up", pass,
               "cosh_gap=" + fmt(gap_cosh) + " cos_gap=" + fmt(gap_cos) +
                   " F_gap=" + fmt(f_gap) +
                   (blow_ok ? " bracket=(" + fmt(blow.bracket_lo) + "," +
                                  fmt(blow.bracket_hi) + ")"
                            : " no-blowup"));
}

void criterion_sqrt(Tally& tally) {
  const IntegratorConfig icfg = tight(1e-10);
  const SqrtLiftReport rh = verify_sqrt_lift(catalog_get("harmonic", {{"k", 1.0}}, 1), {1.0},
                                             {0.0}, 1.0, 0.0, 5.0, 1e-6, icfg);
  const SqrtLiftReport rl = verify_sqrt_lift(catalog_get("linear", {{"b", 1.0}}, 1), {0.5},
                                             {0.0}, 1.0, 0.0, 5.0, 1e-6, icfg);
  const bool pass = rh.pass && rl.pass && rh.c0_drift <= 1e-9 && rl.c0_drift <= 1e-9;
  tally.record("square-root lift vs direct quartic integration (harmonic, linear)", pass,
               "harmonic_gap=" + fmt(rh.max_gap) + " linear_gap=" + fmt(rl.max_gap) +
                   " c0_drift=" + fmt(std::max(rh.c0_drift, rl.c0_drift)));
}

void criterion_shoot(Tally& tally) {
  bool pass = true;
  std::string detail;

  const auto straight_avg = [](const PotentialSpec& V) {
    return adaptive_simpson([&](double u) { return V.eval(u, {u}); }, 0.0, 1.0, 1e-10);
  };

  const std::vector<std::string> names = {"free", "harmonic", "time_harmonic"};
  for (const std::string& name : names) {
    const PotentialSpec V =
        (name == "harmonic") ? catalog_get(name, {{"k", 1.0}}, 1) : catalog_get(name, {}, 1);
    const double v1 = straight_avg(V) + 0.5;
    ShootingResult r;
    try {
      r = shoot_two_point(V, {0.0}, {1.0}, v1);
    } catch (const std::exception&) {
      pass = false;
      detail += name + "=threw ";
      continue;
    }
    bool ok = r.terminal_gap <= 1e-8 && r.v1_margin >= 0.1 && r.tv_residual <= 1e-5 &&
              r.coe_drift <= 1e-7;
    if (name == "free") ok = ok && r.newton_iterations <= 2;

    if (V.time_independent) {
      // Independent oracle: xdd = -grad (V + cbar)^2 with cbar = c - V(x0).
      const double cbar = r.c - V.eval(0.0, {0.0});
      PotentialSpec W = make_user_potential(
          "oracle", 1,
          [V, cbar](double, const Vec& x) {
            const double w = V.eval(0.0, x) + cbar;
            return w * w;
          },
          true);
      W.grad = [V, cbar](double, const Vec& x) {
        const double w = V.eval(0.0, x) + cbar;
        Vec g = V.grad(0.0, x);
        for (double& gi : g) gi *= 2.0 * w;
        return g;
      };
      const Vec xd0 = {r.x_curve.sol.states.front()[1]};
      const Trajectory direct =
          integrate_base(W, 0.0, {0.0}, xd0, r.c0_raw, tight(1e-12));
      double gap = 0.0;
      for (int j = 0; j <= 300; ++j) {
        const double t = r.c0_raw * j / 300.0;
        gap = std::max(gap, std::abs(direct.x_at(t)[0] - r.x_curve.x_at(t)[0]));
      }
      ok = ok && gap <= 1e-5;
      detail += name + "_oracle_gap=" + fmt(gap) + " ";
    }
    pass = pass && ok;
    detail += name + "_gap=" + fmt(r.terminal_gap) + " ";
  }

  // Degenerate v1 must be rejected before any shooting happens.
  bool rejected = false;
  try {
    shoot_two_point(catalog_get("free", {}, 1), {0.0}, {1.0}, 0.0);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  pass = pass && rejected;
  detail += rejected ? "degenerate=rejected" : "degenerate=accepted";
  tally.record("two-point shooting: free/harmonic/time_harmonic + degenerate rejection", pass,
               detail);
}

void criterion_christoffel_oracle(Tally& tally) {
  UniformRng rng(11);
  double worst = 0.0;

  const auto compare = [&](const GenericMetric& gm,
                           const std::function<Vec(const Vec&, const Vec&)>& analytic,
                           int dim) {
    double w = 0.0;
    for (int k = 0; k < 50; ++k) {
      Vec q(dim), qd(dim);
      for (int i = 0; i < dim; ++i) {
        q[i] = rng.range(-1.0, 1.0);
        qd[i] = rng.range(-1.0, 1.0);
      }
      const Vec a_fd = geodesic_accel(gm, q, qd);
      const Vec a_an = analytic(q, qd);
      for (int i = 0; i < dim; ++i) w = std::max(w, std::abs(a_fd[i] - a_an[i]));
    }
    return w;
  };

  {
    const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 2);
    const BrinkmannMetric m = make_brinkmann(V);
    worst = std::max(worst, compare(generic_brinkmann(m),
                                    [&](const Vec& q, const Vec& qd) {
                                      return geodesic_rhs(m, {q, qd}).qdot;
                                    },
                                    4));
  }
  {
    const PotentialSpec V = catalog_get("time_harmonic", {{"epsilon", 0.5}, {"omega", 1.0}}, 1);
    const BrinkmannMetric m = make_brinkmann(V);
    worst = std::max(worst, compare(generic_brinkmann(m),
                                    [&](const Vec& q, const Vec& qd) {
                                      return geodesic_rhs(m, {q, qd}).qdot;
                                    },
                                    3));
  }
  {
    const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 2);
    const BrinkmannMetric m = make_brinkmann(V, {2.0, 0.5});
    worst = std::max(worst, compare(generic_brinkmann(m),
                                    [&](const Vec& q, const Vec& qd) {
                                      return geodesic_rhs(m, {q, qd}).qdot;
                                    },
                                    4));
  }
  {
    const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 2);
    const BrinkmannMetric m = make_brinkmann(V);
    const ConformalFactor f = conformal_linear_x(0.1);
    worst = std::max(worst, compare(generic_conformal(m, f),
                                    [&](const Vec& q, const Vec& qd) {
                                      return conformal_geodesic_rhs(m, f, {q, qd}).qdot;
                                    },
                                    4));
  }
  {
    const SplitMetric m = make_split(catalog_get("saddle_harmonic", {}, 2));
    worst = std::max(worst, compare(generic_split(m),
                                    [&](const Vec& q, const Vec& qd) {
                                      return split_geodesic_rhs(m, {q, qd}).qdot;
                                    },
                                    4));
  }
  {
    const RiemannianDualMetric m = make_riemannian_dual(catalog_get("harmonic", {{"k", 1.0}}, 2));
    worst = std::max(worst, compare(generic_riem(m),
                                    [&](const Vec& q, const Vec& qd) {
                                      LiftState st{q, qd};
                                      return riem_geodesic_rhs(m, st, riem_c0(m, st)).qdot;
                                    },
                                    4));
  }
  tally.record("analytic geodesic systems vs finite-difference Christoffel oracles", worst <= 1e-6,
               "max_component_gap=" + fmt(worst));
}

}  // namespace

AcceptanceResult run_acceptance(std::ostream& out) {
  Tally tally{out, {}, 0};
  criterion_lift_battery(tally);       // 1 and 2
  criterion_conformal(tally);          // 3
  criterion_conjugate(tally);          // 4
  criterion_conformal_conjugate(tally);  // 5
  criterion_variation(tally);          // 6
  criterion_hypotheses(tally);         // 7
  criterion_complex(tally);            // 8
  criterion_sqrt(tally);               // 9
  criterion_shoot(tally);              // 10
  criterion_christoffel_oracle(tally);  // 11
  out << tally.result.passed << " passed, " << tally.result.failed << " failed\n";
  return tally.result;
}

}  // namespace eisenhart
