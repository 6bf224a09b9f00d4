#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "eisenhart/genmetric.hpp"
#include "eisenhart/lift.hpp"
#include "eisenhart/potentials.hpp"
#include "eisenhart/rng.hpp"

using namespace eisenhart;

namespace {

constexpr double kPi = 3.14159265358979323846;

IntegratorConfig tight() {
  IntegratorConfig c;
  c.rtol = 1e-10;
  c.atol = 1e-10;
  return c;
}

Vec random_point(UniformRng& rng, int dim, double lo = -1.0, double hi = 1.0) {
  Vec p(dim);
  for (double& v : p) v = rng.range(lo, hi);
  return p;
}

}  // namespace

TEST_CASE("metric values read off the pp-wave line element") {
  const BrinkmannMetric free_m = make_brinkmann(catalog_get("free", {}, 2));
  const Vec p{0.0, 0.0, 0.3, -0.2};
  Vec dv{1.0, 0.0, 0.0, 0.0}, dt{0.0, 1.0, 0.0, 0.0};
  CHECK(metric_value(free_m, p, dv, dv) == 0.0);  // no dv^2 term
  const Vec both = vadd(dv, dt);
  CHECK(metric_value(free_m, p, both, both) == doctest::Approx(2.0));

  const BrinkmannMetric harm = make_brinkmann(catalog_get("harmonic", {{"k", 1.0}}, 2));
  const Vec q{0.0, 0.0, 1.0, 0.0};
  CHECK(metric_value(harm, q, dt, dt) == doctest::Approx(-1.0));  // -2V with V=1/2
}

TEST_CASE("christoffel table matches the hand formulas") {
  const BrinkmannMetric free_m = make_brinkmann(catalog_get("free", {}, 2));
  const ChristoffelTable cf = christoffel(free_m, {0.0, 0.0, 0.4, 0.1});
  CHECK(cf.gamma_v_tt == 0.0);
  for (double g : cf.gamma_v_it) CHECK(g == 0.0);
  for (double g : cf.gamma_i_tt) CHECK(g == 0.0);

  const BrinkmannMetric harm = make_brinkmann(catalog_get("harmonic", {{"k", 1.0}}, 2));
  const ChristoffelTable ch = christoffel(harm, {0.0, 0.0, 1.0, 0.0});
  CHECK(ch.gamma_i_tt[0] == doctest::Approx(1.0));
  CHECK(ch.gamma_v_it[0] == doctest::Approx(-1.0));
  CHECK(ch.gamma_v_tt == doctest::Approx(0.0));

  const BrinkmannMetric th =
      make_brinkmann(catalog_get("time_harmonic", {{"epsilon", 0.5}, {"omega", 1.0}}, 2));
  CHECK(christoffel(th, {0.0, 0.0, 1.0, 0.0}).gamma_v_tt == doctest::Approx(-0.25));
}

TEST_CASE("christoffel table agrees with finite differences of the metric") {
  UniformRng rng(21);
  for (const auto& weights : {Vec{}, Vec{2.0, 0.5}}) {
    const BrinkmannMetric m =
        make_brinkmann(catalog_get("time_harmonic", {{"epsilon", 0.5}, {"omega", 1.0}}, 2),
                       weights);
    const GenericMetric gm = generic_brinkmann(m);
    for (int trial = 0; trial < 50; ++trial) {
      const Vec p = random_point(rng, 4);
      const ChristoffelTable table = christoffel(m, p);
      const Tensor3 fd = christoffels_fd(gm, p);
      // v row: Gamma^v_{it} and Gamma^v_{tt}; x rows: Gamma^i_{tt}.
      CHECK(table.gamma_v_tt == doctest::Approx(fd.at(0, 1, 1)).epsilon(1e-6).scale(1.0));
      for (int i = 0; i < 2; ++i) {
        CHECK(table.gamma_v_it[i] ==
              doctest::Approx(fd.at(0, 2 + i, 1)).epsilon(1e-6).scale(1.0));
        CHECK(table.gamma_i_tt[i] ==
              doctest::Approx(fd.at(2 + i, 1, 1)).epsilon(1e-6).scale(1.0));
      }
      // All other symbols vanish for constant-weight pp-waves.
      double off = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int c = 0; c < 4; ++c) {
            if (a == 0 && b == 1 && c == 1) continue;
            if (a == 0 && ((b >= 2 && c == 1) || (b == 1 && c >= 2))) continue;
            if (a >= 2 && b == 1 && c == 1) continue;
            off = std::max(off, std::abs(fd.at(a, b, c)));
          }
      CHECK(off <= 1e-6);
    }
  }
}

TEST_CASE("geodesic acceleration plugs in") {
  const BrinkmannMetric harm = make_brinkmann(catalog_get("harmonic", {{"k", 1.0}}, 2));
  LiftState st{{0.0, 0.0, 1.0, 0.0}, {0.0, 1.0, 0.0, 0.0}};
  LiftState rhs = geodesic_rhs(harm, st);
  CHECK(rhs.qdot[2] == doctest::Approx(-1.0));
  CHECK(rhs.qdot[3] == doctest::Approx(0.0));
  CHECK(rhs.qdot[1] == 0.0);
  CHECK(rhs.qdot[0] == doctest::Approx(0.0));

  st.qdot[1] = 2.0;  // acceleration scales with tdot^2
  rhs = geodesic_rhs(harm, st);
  CHECK(rhs.qdot[2] == doctest::Approx(-4.0));
}

TEST_CASE("initial data hits the requested causal norm") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 2);
  const BrinkmannMetric m = make_brinkmann(V);
  const Vec x0{1.0, 0.0}, rest{0.0, 0.0};

  const LiftState light = eisenhart_lift_initial(V, 0.0, x0, rest, CausalClass::lightlike());
  CHECK(light.qdot[0] == doctest::Approx(0.5));
  CHECK(lift_norm(m, light) == doctest::Approx(0.0).epsilon(1e-14));

  const LiftState tl = eisenhart_lift_initial(V, 0.0, x0, rest, CausalClass::unit_timelike());
  CHECK(tl.qdot[0] == doctest::Approx(0.0));
  CHECK(lift_norm(m, tl) == doctest::Approx(-1.0));

  const LiftState sl = eisenhart_lift_initial(V, 0.0, x0, rest, CausalClass::unit_spacelike());
  CHECK(lift_norm(m, sl) == doctest::Approx(1.0));

  const PotentialSpec F = catalog_get("free", {}, 2);
  const LiftState mv =
      eisenhart_lift_initial(F, 0.0, {0.0, 0.0}, {1.0, 0.0}, CausalClass::lightlike());
  CHECK(mv.qdot[0] == doctest::Approx(-0.5));
}

TEST_CASE("lift of the harmonic solution tracks the cosine") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const BrinkmannMetric m = make_brinkmann(V);
  const LiftState st0 = eisenhart_lift_initial(V, 0.0, {1.0}, {0.0}, CausalClass::lightlike());
  const Trajectory tr = integrate_lift(m, st0, 0.0, 10.0, tight());
  CHECK(tr.is_lift);
  for (int j = 0; j <= 400; ++j) {
    const double s = 10.0 * j / 400.0;
    CHECK(tr.x_at(s)[0] == doctest::Approx(std::cos(s)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("sign-flipped weight turns the oscillator into cosh") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const BrinkmannMetric m = make_brinkmann(V, {-1.0});
  LiftState st0{{0.0, 0.0, 1.0}, {0.0, 1.0, 0.0}};
  st0.qdot[0] = 0.5;  // v-dot plays no role in the x equation
  const Trajectory tr = integrate_lift(m, st0, 0.0, 3.0, tight());
  for (int j = 0; j <= 100; ++j) {
    const double s = 3.0 * j / 100.0;
    CHECK(tr.x_at(s)[0] == doctest::Approx(std::cosh(s)).epsilon(1e-8));
  }
}

TEST_CASE("free lifts run straight and keep their norm") {
  const PotentialSpec V = catalog_get("free", {}, 2);
  const BrinkmannMetric m = make_brinkmann(V);
  const LiftState st0 =
      eisenhart_lift_initial(V, 0.0, {0.0, 0.0}, {0.7, -0.2}, CausalClass::lightlike());
  const Trajectory tr = integrate_lift(m, st0, 0.0, 10.0, tight());
  for (size_t k = 0; k < tr.sol.grid.size(); ++k) {
    const double s = tr.sol.grid[k];
    const Vec& y = tr.sol.states[k];
    CHECK(y[2] == doctest::Approx(0.7 * s).epsilon(1e-12).scale(1.0));
    LiftState st{Vec(y.begin(), y.begin() + 4), Vec(y.begin() + 4, y.end())};
    CHECK(lift_norm(m, st) == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("the vertical Killing field pairing is conserved") {
  // g(d_v, gamma') = tdot: checked through metric_value, not the state.
  const PotentialSpec V = catalog_get("anisotropic_harmonic", {{"k1", 1.0}, {"k2", 4.0}}, 2);
  const BrinkmannMetric m = make_brinkmann(V);
  const LiftState st0 =
      eisenhart_lift_initial(V, 0.0, {0.5, -0.3}, {0.1, 0.4}, CausalClass::unit_timelike());
  const Trajectory tr = integrate_lift(m, st0, 0.0, 10.0, tight());
  const Vec dv{1.0, 0.0, 0.0, 0.0};
  for (const Vec& y : tr.sol.states) {
    const Vec q(y.begin(), y.begin() + 4), qd(y.begin() + 4, y.end());
    CHECK(metric_value(m, q, dv, qd) == doctest::Approx(st0.qdot[1]).epsilon(1e-10));
  }
}

TEST_CASE("projection recovers the base solution and its velocity") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const BrinkmannMetric m = make_brinkmann(V);
  const LiftState st0 = eisenhart_lift_initial(V, 0.0, {1.0}, {0.0}, CausalClass::lightlike());
  const Trajectory base = project(integrate_lift(m, st0, 0.0, 10.0, tight()));
  CHECK_FALSE(base.is_lift);
  for (int j = 0; j <= 200; ++j) {
    const double t = 10.0 * j / 200.0;
    CHECK(base.x_at(t)[0] == doctest::Approx(std::cos(t)).epsilon(1e-8).scale(1.0));
    CHECK(base.xdot_at(t)[0] == doctest::Approx(-std::sin(t)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("projection rejects degenerate lifts") {
  // tdot = 0: vertical straight line, no base curve to project onto.
  const PotentialSpec V = catalog_get("free", {}, 1);
  const BrinkmannMetric m = make_brinkmann(V);
  const LiftState st0{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.3}};
  const Trajectory tr = integrate_lift(m, st0, 0.0, 1.0, tight());
  CHECK_THROWS_AS(project(tr), std::runtime_error);
}

TEST_CASE("verify_lift passes matched data and flags a velocity mismatch") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const BrinkmannMetric m = make_brinkmann(V);
  const Trajectory base = integrate_base(V, 0.0, {1.0}, {0.0}, 5.0, tight());
  const LiftState st0 = eisenhart_lift_initial(V, 0.0, {1.0}, {0.0}, CausalClass::lightlike());
  const Trajectory lifted = integrate_lift(m, st0, 0.0, 5.0, tight());

  const LiftReport good = verify_lift(V, base, lifted, 1e-6);
  CHECK(good.pass);
  CHECK(good.max_x_gap <= 1e-7);

  const Trajectory off = integrate_base(V, 0.0, {1.0}, {0.1}, 5.0, tight());
  const LiftReport bad = verify_lift(V, off, lifted, 1e-6);
  CHECK_FALSE(bad.pass);
  // Linear variational growth: the mismatch shows up at O(0.1).
  CHECK(bad.max_x_gap >= 0.05);
}

TEST_CASE("free potential verifies with near-machine gaps") {
  const PotentialSpec V = catalog_get("free", {}, 2);
  const BrinkmannMetric m = make_brinkmann(V);
  const Trajectory base = integrate_base(V, 0.0, {0.1, 0.2}, {0.3, -0.4}, 5.0, tight());
  const LiftState st0 =
      eisenhart_lift_initial(V, 0.0, {0.1, 0.2}, {0.3, -0.4}, CausalClass::lightlike());
  const Trajectory lifted = integrate_lift(m, st0, 0.0, 5.0, tight());
  const LiftReport rep = verify_lift(V, base, lifted, 1e-6);
  CHECK(rep.pass);
  CHECK(rep.max_x_gap <= 1e-12);
  CHECK(rep.max_norm_drift <= 1e-12);
}

TEST_CASE("base integration honors anisotropy weights") {
  // a = (-1): x'' = +x, starting at (1, 0) gives cosh.
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const Trajectory tr = integrate_base(V, 0.0, {1.0}, {0.0}, 3.0, tight(), {-1.0});
  CHECK(tr.x_at(3.0)[0] == doctest::Approx(std::cosh(3.0)).epsilon(1e-8));
}

TEST_CASE("affine time and norm conservation along dial-a-class lifts") {
  const PotentialSpec V = catalog_get("time_harmonic", {{"epsilon", 0.5}, {"omega", 1.0}}, 1);
  const BrinkmannMetric m = make_brinkmann(V);
  for (const CausalClass& cc : {CausalClass::lightlike(), CausalClass::unit_timelike(),
                                CausalClass::unit_spacelike()}) {
    const LiftState st0 = eisenhart_lift_initial(V, 0.0, {0.8}, {0.2}, cc);
    CHECK(lift_norm(m, st0) == doctest::Approx(cc.norm_target).epsilon(1e-13));
    const Trajectory tr = integrate_lift(m, st0, 0.0, 10.0, tight());
    double drift = 0.0, affinity = 0.0;
    for (const Vec& y : tr.sol.states) {
      LiftState st{Vec(y.begin(), y.begin() + 3), Vec(y.begin() + 3, y.end())};
      drift = std::max(drift, std::abs(lift_norm(m, st) - cc.norm_target));
      affinity = std::max(affinity, std::abs(y[4] - 1.0));
    }
    CHECK(drift <= 1e-8);
    CHECK(affinity <= 1e-10);
  }
}
