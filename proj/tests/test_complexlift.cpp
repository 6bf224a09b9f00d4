#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "eisenhart/complexlift.hpp"
#include "eisenhart/conformal.hpp"
#include "eisenhart/potentials.hpp"
#include "eisenhart/rng.hpp"

using namespace eisenhart;

namespace {

IntegratorConfig tight(double tol = 1e-12, double max_step = 0.0) {
  IntegratorConfig c;
  c.rtol = tol;
  c.atol = tol;
  c.max_step = max_step;
  return c;
}

}  // namespace

TEST_CASE("catalog harmonics build holomorphic systems with tiny residuals") {
  for (const char* name : {"saddle_harmonic", "neg_saddle", "cubic_harmonic_2d"}) {
    const HolomorphicSystem H = f_from_potential(catalog_get(name, {}, 2));
    CHECK(H.max_laplacian <= 1e-10);
    CHECK(H.max_cr_residual <= 1e-8);
  }
}

TEST_CASE("non-harmonic and non-planar potentials are rejected") {
  try {
    f_from_potential(catalog_get("harmonic", {{"k", 1.0}}, 2));
    FAIL("expected a rejection: the isotropic oscillator has Laplacian 2");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("harmonic") != std::string::npos);
  }
  CHECK_THROWS_AS(f_from_potential(catalog_get("time_harmonic", {}, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(f_from_potential(catalog_get("harmonic", {{"k", 1.0}}, 1)),
                  std::invalid_argument);
}

TEST_CASE("F matches the closed forms of the catalog entries") {
  const HolomorphicSystem cubic = f_from_potential(catalog_get("cubic_harmonic_2d", {}, 2));
  const std::complex<double> w = cubic.F({1.0, 1.0});
  CHECK(w.real() == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  CHECK(w.imag() == doctest::Approx(2.0).epsilon(1e-12));

  const HolomorphicSystem saddle = f_from_potential(catalog_get("saddle_harmonic", {}, 2));
  const HolomorphicSystem nsaddle = f_from_potential(catalog_get("neg_saddle", {}, 2));
  const HolomorphicSystem lin =
      f_from_potential(catalog_get("linear", {{"b1", 1.0}, {"b2", 0.0}}, 2));
  UniformRng rng(5);
  for (int k = 0; k < 20; ++k) {
    const std::complex<double> z{rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)};
    CHECK(std::abs(saddle.F(z) - z) <= 1e-12);
    CHECK(std::abs(nsaddle.F(z) + z) <= 1e-12);
    CHECK(std::abs(lin.F(z) - 1.0) <= 1e-12);
    CHECK(std::abs(cubic.F(z) - z * z) <= 1e-12);
  }
}

TEST_CASE("split geodesic acceleration flips the x sign") {
  const SplitMetric m = make_split(catalog_get("saddle_harmonic", {}, 2));
  LiftState st;
  st.q = {0.0, 0.0, 1.0, 1.0};
  st.qdot = {0.375, 1.0, 0.0, 0.0};
  const LiftState acc = split_geodesic_rhs(m, st);
  CHECK(acc.qdot[1] == 0.0);                         // t'' = 0
  CHECK(acc.qdot[2] == doctest::Approx(1.0));        // x'' = +V_x
  CHECK(acc.qdot[3] == doctest::Approx(1.0));        // y'' = -V_y = +y
  CHECK(acc.qdot[0] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("split metric values at coordinate directions") {
  const SplitMetric m = make_split(catalog_get("saddle_harmonic", {}, 2));
  const Vec p = {0.3, 0.2, 1.0, -0.5};  // V = (1 - 0.25)/2 = 0.375
  const Vec dv = {1, 0, 0, 0}, dt = {0, 1, 0, 0}, dx = {0, 0, 1, 0}, dy = {0, 0, 0, 1};
  CHECK(split_metric_value(m, p, dv, dv) == doctest::Approx(0.0).scale(1.0));
  CHECK(split_metric_value(m, p, dv, dt) == doctest::Approx(1.0));
  CHECK(split_metric_value(m, p, dt, dt) == doctest::Approx(-0.75));
  CHECK(split_metric_value(m, p, dx, dx) == doctest::Approx(-1.0));
  CHECK(split_metric_value(m, p, dy, dy) == doctest::Approx(1.0));
  CHECK(split_metric_value(m, p, dx, dy) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("complex lift initial data hits the causal targets") {
  const PotentialSpec saddle = catalog_get("saddle_harmonic", {}, 2);
  const PotentialSpec free2 = catalog_get("free", {}, 2);
  const SplitMetric ms = make_split(saddle);
  const SplitMetric mf = make_split(free2);

  const LiftState a = complex_lift_initial(saddle, 0.0, {1.0, 0.0}, {0.0, 0.0},
                                           CausalClass::lightlike());
  CHECK(a.qdot[0] == doctest::Approx(0.5));
  CHECK(split_metric_value(ms, a.q, a.qdot, a.qdot) == doctest::Approx(0.0).scale(1.0));

  const LiftState b = complex_lift_initial(free2, 0.0, {0.0, 0.0}, {1.0, 0.0},
                                           CausalClass::lightlike());
  CHECK(b.qdot[0] == doctest::Approx(0.5));

  const LiftState c = complex_lift_initial(free2, 0.0, {0.0, 0.0}, {0.0, 1.0},
                                           CausalClass::lightlike());
  CHECK(c.qdot[0] == doctest::Approx(-0.5));

  for (const CausalClass& cc : {CausalClass::lightlike(), CausalClass::unit_timelike(),
                                CausalClass::unit_spacelike()}) {
    const LiftState st = complex_lift_initial(saddle, 0.0, {0.4, -0.7}, {0.2, 0.1}, cc);
    CHECK(split_metric_value(ms, st.q, st.qdot, st.qdot) ==
          doctest::Approx(cc.norm_target).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("split norm is conserved along the flow") {
  const PotentialSpec V = catalog_get("saddle_harmonic", {}, 2);
  const SplitMetric m = make_split(V);
  for (const CausalClass& cc : {CausalClass::lightlike(), CausalClass::unit_timelike(),
                                CausalClass::unit_spacelike()}) {
    const LiftState st0 = complex_lift_initial(V, 0.0, {0.8, -0.3}, {0.1, 0.4}, cc);
    const Trajectory tr = integrate_split_lift(m, st0, 0.0, 5.0, tight(1e-11));
    double worst = 0.0;
    for (const Vec& y : tr.sol.states) {
      const Vec q(y.begin(), y.begin() + 4);
      const Vec qd(y.begin() + 4, y.end());
      worst = std::max(worst, std::abs(split_metric_value(m, q, qd, qd) - cc.norm_target));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("lifted geodesics shadow the planar complex flow") {
  UniformRng rng(21);
  for (const char* name : {"saddle_harmonic", "neg_saddle"}) {
    const PotentialSpec V = catalog_get(name, {}, 2);
    const HolomorphicSystem H = f_from_potential(V);
    const SplitMetric m = make_split(V);
    for (int trial = 0; trial < 10; ++trial) {
      const std::complex<double> z0{rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)};
      const std::complex<double> zd0{rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)};

      const LiftState st0 = complex_lift_initial(V, 0.0, z0, zd0, CausalClass::lightlike());
      const Trajectory lift = integrate_split_lift(m, st0, 0.0, 5.0, tight());

      OdeSystem planar;
      planar.dim = 4;
      planar.rhs = [&H](double, const Vec& y, Vec& dy) {
        const std::complex<double> f = H.F({y[0], y[1]});
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = f.real();
        dy[3] = f.imag();
      };
      const SolveOutput direct =
          integrate(planar, {z0.real(), z0.imag(), zd0.real(), zd0.imag()}, 0.0, 5.0, tight());

      double worst = 0.0;
      for (int k = 0; k <= 100; ++k) {
        const double s = 5.0 * k / 100.0;
        const Vec a = lift.sol.eval(s);
        const Vec b = direct.eval(s);
        worst = std::max({worst, std::abs(a[2] - b[0]), std::abs(a[3] - b[1])});
      }
      CHECK(worst <= 1e-7);
    }
  }
}

TEST_CASE("closed forms: cosh along the saddle, cosine along its negative") {
  const PotentialSpec sp = catalog_get("saddle_harmonic", {}, 2);
  const PotentialSpec np = catalog_get("neg_saddle", {}, 2);
  const Vec a = {-1.0, 1.0};  // base system with split weights is z'' = F(z)
  const Trajectory grow = integrate_base(sp, 0.0, {1.0, 0.0}, {0.0, 0.0}, 3.0, tight(1e-12, 6e-3), a);
  const Trajectory turn = integrate_base(np, 0.0, {1.0, 0.0}, {0.0, 0.0}, 3.0, tight(1e-12, 6e-3), a);
  double worst = 0.0;
  for (int k = 0; k <= 300; ++k) {
    const double t = 3.0 * k / 300.0;
    worst = std::max(worst, std::abs(grow.x_at(t)[0] - std::cosh(t)));
    worst = std::max(worst, std::abs(grow.x_at(t)[1]));
    worst = std::max(worst, std::abs(turn.x_at(t)[0] - std::cos(t)));
  }
  CHECK(worst <= 1e-7);
}

TEST_CASE("residual verification accepts true solutions and flags corrupted ones") {
  // The interpolant's second derivative carries O(max_step^2) error, so the
  // verification grid has to be finer than the residual tolerance suggests.
  const PotentialSpec V = catalog_get("saddle_harmonic", {}, 2);
  const HolomorphicSystem H = f_from_potential(V);
  const Trajectory tr =
      integrate_base(V, 0.0, {1.0, 0.0}, {0.0, 0.0}, 3.0, tight(1e-12, 1e-3), {-1.0, 1.0});
  const ComplexReport ok = verify_complex_solution(tr, H, 1e-5, 1e-4);
  CHECK(ok.pass);
  CHECK(ok.max_residual <= 1e-5);

  const PotentialSpec N = catalog_get("neg_saddle", {}, 2);
  const Trajectory osc =
      integrate_base(N, 0.0, {1.0, 0.0}, {0.0, 0.0}, 3.0, tight(1e-12, 1e-3), {-1.0, 1.0});
  const ComplexReport ok2 = verify_complex_solution(osc, f_from_potential(N), 1e-5, 1e-4);
  CHECK(ok2.pass);

  Trajectory bad = tr;
  for (Vec& y : bad.sol.states) y[0] += 0.5;  // shifted curve misses F by 0.5
  const ComplexReport rep = verify_complex_solution(bad, H, 1e-5);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_residual >= 0.4);
}

TEST_CASE("residual verification input validation") {
  const PotentialSpec V = catalog_get("saddle_harmonic", {}, 2);
  const HolomorphicSystem H = f_from_potential(V);
  const SplitMetric m = make_split(V);
  const LiftState st0 =
      complex_lift_initial(V, 0.0, {1.0, 0.0}, {0.0, 0.0}, CausalClass::lightlike());
  const Trajectory lift = integrate_split_lift(m, st0, 0.0, 2.0, tight(1e-10));
  CHECK_THROWS_AS(verify_complex_solution(lift, H, 1e-5), std::invalid_argument);

  const PotentialSpec h1 = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const Trajectory one_d = integrate_base(h1, 0.0, {1.0}, {0.0}, 2.0, tight(1e-10));
  CHECK_THROWS_AS(verify_complex_solution(one_d, H, 1e-5), std::invalid_argument);

  const Trajectory base =
      integrate_base(V, 0.0, {1.0, 0.0}, {0.0, 0.0}, 2.0, tight(1e-10), {-1.0, 1.0});
  CHECK_THROWS_AS(verify_complex_solution(base, H, 1e-5, 0.0), std::invalid_argument);
}

TEST_CASE("blow-up detection brackets the cubic escape and clears tame flows") {
  const HolomorphicSystem cubic = f_from_potential(catalog_get("cubic_harmonic_2d", {}, 2));
  const BlowupReport esc = detect_blowup(cubic, {1.0, 0.0}, {0.0, 0.0}, 20.0);
  CHECK(esc.blown_up);
  CHECK(esc.has_bracket);
  CHECK(esc.bracket_lo > 0.0);
  CHECK(esc.bracket_lo <= esc.bracket_hi);
  CHECK(esc.bracket_hi <= 20.0);
  CHECK(esc.status == SolveStatus::blowup_suspected);
  CHECK(esc.path.param_end() == doctest::Approx(esc.bracket_lo));

  const HolomorphicSystem saddle = f_from_potential(catalog_get("saddle_harmonic", {}, 2));
  const BlowupReport tame = detect_blowup(saddle, {1.0, 0.0}, {0.0, 0.0}, 10.0);
  CHECK_FALSE(tame.blown_up);
  CHECK(tame.t_reached == doctest::Approx(10.0));

  const HolomorphicSystem none = f_from_potential(catalog_get("free", {}, 2));
  const BlowupReport still = detect_blowup(none, {0.0, 0.0}, {1.0, 1.0}, 10.0);
  CHECK_FALSE(still.blown_up);

  CHECK_THROWS_AS(detect_blowup(cubic, {1.0, 0.0}, {0.0, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("conformal rescaling keeps split lightlike curves null") {
  const PotentialSpec V = catalog_get("saddle_harmonic", {}, 2);
  const SplitMetric m = make_split(V);
  const ConformalFactor f = conformal_linear_x(0.1);
  const LiftState st0 =
      complex_lift_initial(V, 0.0, {1.0, 0.0}, {0.2, 0.1}, CausalClass::lightlike());
  const Trajectory lift = integrate_split_lift(m, st0, 0.0, 3.0, tight(1e-11));
  const auto [map, gamma_f] = reparametrize(m.g, lift, f, 0.0);
  CHECK(map.tau(3.0) > map.tau(0.0));
  double worst = 0.0;
  for (const Vec& y : gamma_f.sol.states) {
    const Vec q(y.begin(), y.begin() + 4);
    const Vec qd(y.begin() + 4, y.end());
    worst = std::max(worst, std::abs(split_metric_value(m, q, qd, qd)));
  }
  CHECK(worst <= 1e-7);
}
