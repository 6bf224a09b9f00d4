#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "eisenhart/conformal.hpp"
#include "eisenhart/genmetric.hpp"
#include "eisenhart/lift.hpp"
#include "eisenhart/potentials.hpp"
#include "eisenhart/stability.hpp"

using namespace eisenhart;

namespace {

constexpr double kPi = 3.14159265358979323846;

IntegratorConfig tight() {
  IntegratorConfig c;
  c.rtol = 1e-10;
  c.atol = 1e-10;
  return c;
}

ConjugateConfig conj_cfg() {
  ConjugateConfig c;
  c.integrator = tight();
  return c;
}

}  // namespace

TEST_CASE("harmonic events at pi and two pi with multiplicity one") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const Trajectory base = integrate_base(V, 0.0, {1.0}, {0.0}, 7.0, tight());
  const ConjugateReport rep = conjugate_points(V, base, 0.0, 7.0, conj_cfg());
  REQUIRE(rep.events.size() == 2);
  CHECK(rep.events[0].t == doctest::Approx(kPi).epsilon(1e-6));
  CHECK(rep.events[1].t == doctest::Approx(2.0 * kPi).epsilon(1e-6));
  CHECK(rep.events[0].multiplicity == 1);
  CHECK(rep.events[1].multiplicity == 1);
  CHECK_FALSE(rep.det_samples.empty());
}

TEST_CASE("isotropic planar oscillator has a double event invisible to det sign") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 2);
  const Trajectory base = integrate_base(V, 0.0, {1.0, 0.0}, {0.0, 1.0}, 4.0, tight());
  const ConjugateReport rep = conjugate_points(V, base, 0.0, 4.0, conj_cfg());
  REQUIRE(rep.events.size() == 1);
  CHECK(rep.events[0].t == doctest::Approx(kPi).epsilon(1e-6));
  CHECK(rep.events[0].multiplicity == 2);
  // det M = sin^2 never goes negative here.
  for (const auto& s : rep.det_samples) CHECK(s.second >= -1e-12);
}

TEST_CASE("anisotropic frequencies split and merge kernel directions") {
  // M = diag(sin t, sin(2t)/2): zeros at pi/2 and 3pi/2 (simple), pi (double).
  const PotentialSpec V = catalog_get("anisotropic_harmonic", {{"k1", 1.0}, {"k2", 4.0}}, 2);
  const Trajectory base = integrate_base(V, 0.0, {1.0, 0.0}, {0.0, 0.3}, 5.0, tight());
  const ConjugateReport rep = conjugate_points(V, base, 0.0, 5.0, conj_cfg());
  REQUIRE(rep.events.size() == 3);
  CHECK(rep.events[0].t == doctest::Approx(0.5 * kPi).epsilon(1e-6));
  CHECK(rep.events[0].multiplicity == 1);
  CHECK(rep.events[1].t == doctest::Approx(kPi).epsilon(1e-6));
  CHECK(rep.events[1].multiplicity == 2);
  CHECK(rep.events[2].t == doctest::Approx(1.5 * kPi).epsilon(1e-6));
  CHECK(rep.events[2].multiplicity == 1);
}

TEST_CASE("saddle potential keeps one oscillatory direction") {
  // M = diag(sin t, sinh t): det flips sign at k pi only.
  const PotentialSpec V = catalog_get("saddle_harmonic", {}, 2);
  const Trajectory base = integrate_base(V, 0.0, {1.0, 0.0}, {0.0, 0.0}, 10.0, tight());
  const ConjugateReport rep = conjugate_points(V, base, 0.0, 10.0, conj_cfg());
  REQUIRE(rep.events.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(rep.events[k].t == doctest::Approx((k + 1) * kPi).epsilon(1e-6));
    CHECK(rep.events[k].multiplicity == 1);
  }
}

TEST_CASE("free motion has no conjugate points and positive det") {
  const PotentialSpec V = catalog_get("free", {}, 2);
  const Trajectory base = integrate_base(V, 0.0, {0.0, 0.0}, {0.4, -0.1}, 10.0, tight());
  const ConjugateReport rep = conjugate_points(V, base, 0.0, 10.0, conj_cfg());
  CHECK(rep.events.empty());
  for (const auto& [t, d] : rep.det_samples)
    if (t > 0.05) CHECK(d > 0.0);
}

TEST_CASE("reduced solve conserves the Wronskian-type pairing") {
  const PotentialSpec V = catalog_get("anisotropic_harmonic", {{"k1", 1.0}, {"k2", 4.0}}, 2);
  const Trajectory base = integrate_base(V, 0.0, {0.6, -0.2}, {0.1, 0.5}, 8.0, tight());
  const SolveOutput out = reduced_jacobi_solve(V, base, 0.0, 8.0, tight());
  const int n = 2;
  double worst = 0.0;
  for (const Vec& y : out.states) {
    Mat M(n, n), Md(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        M(i, j) = y[2 * n + i * n + j];
        Md(i, j) = y[2 * n + n * n + i * n + j];
      }
    const Mat w = M.transpose().mul(Md);
    const Mat wt = Md.transpose().mul(M);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(w(i, j) - wt(i, j)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("generic full-dimension detector reproduces the reduced events") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const BrinkmannMetric m = make_brinkmann(V);
  const Trajectory base = integrate_base(V, 0.0, {1.0}, {0.0}, 7.0, tight());
  const ConjugateReport reduced = conjugate_points(V, base, 0.0, 7.0, conj_cfg());

  const LiftState st0 = eisenhart_lift_initial(V, 0.0, {1.0}, {0.0}, CausalClass::lightlike());
  const Trajectory lifted = integrate_lift(m, st0, 0.0, 7.0, tight());
  const ConjugateReport generic = generic_conjugate_points(generic_brinkmann(m), lifted, conj_cfg());

  REQUIRE(generic.events.size() == reduced.events.size());
  for (size_t k = 0; k < generic.events.size(); ++k) {
    CHECK(generic.events[k].t == doctest::Approx(reduced.events[k].t).epsilon(1e-4));
    CHECK(generic.events[k].multiplicity == reduced.events[k].multiplicity);
  }
}

TEST_CASE("conformal rescaling moves events by the parameter map only") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const BrinkmannMetric m = make_brinkmann(V);
  for (const ConformalFactor& f : {conformal_constant(0.25), conformal_linear_x(0.1)}) {
    const LiftState st0 =
        eisenhart_lift_initial(V, 0.0, {1.0}, {0.0}, CausalClass::lightlike());
    const Trajectory lifted = integrate_lift(m, st0, 0.0, 7.0, tight());
    const auto [map, gf] = reparametrize(m, lifted, f, 0.0);
    const ConjugateReport rep =
        generic_conjugate_points(generic_conformal(m, f), gf, conj_cfg());
    REQUIRE(rep.events.size() == 2);
    CHECK(rep.events[0].t == doctest::Approx(map.tau(kPi)).epsilon(1e-4));
    CHECK(rep.events[1].t == doctest::Approx(map.tau(2.0 * kPi)).epsilon(1e-4));
    CHECK(rep.events[0].multiplicity == 1);
    CHECK(rep.events[1].multiplicity == 1);
  }
}

TEST_CASE("variation families reconverge at conjugate times") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const Trajectory base = integrate_base(V, 0.0, {1.0}, {0.0}, 3.5, tight());
  const double eps = 0.05;
  const VariationFamily fam = variation_family(V, base, {1.0}, eps, 9, tight());
  CHECK(fam.members.size() == 9);
  CHECK(fam.spread_at(kPi) / eps <= 10.0 * eps);
  CHECK(fam.spread_at(0.5 * kPi) / eps == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(variation_family(V, base, {1.0}, eps, 2, tight()), std::invalid_argument);
}

TEST_CASE("free variation families separate linearly") {
  const PotentialSpec V = catalog_get("free", {}, 1);
  const Trajectory base = integrate_base(V, 0.0, {0.0}, {1.0}, 4.0, tight());
  const VariationFamily fam = variation_family(V, base, {1.0}, 0.05, 5, tight());
  for (double t : {1.0, 2.0, 3.0})
    CHECK(fam.spread_at(t) / 0.05 == doctest::Approx(t).epsilon(1e-6));
}

TEST_CASE("focusing bound bookkeeping") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 2);
  const Trajectory base = integrate_base(V, 0.0, {1.0, 0.0}, {0.0, 1.0}, 6.0, tight());
  const FocusingBound fb = check_focusing_bound(V, base, 5.0);
  CHECK(fb.min_laplacian == doctest::Approx(2.0));
  CHECK(fb.bound == doctest::Approx(kPi * kPi / 25.0));
  CHECK(fb.holds);

  const PotentialSpec F = catalog_get("free", {}, 2);
  const Trajectory fbase = integrate_base(F, 0.0, {0.0, 0.0}, {1.0, 0.0}, 6.0, tight());
  const FocusingBound ff = check_focusing_bound(F, fbase, 5.0);
  CHECK(ff.min_laplacian == 0.0);
  CHECK_FALSE(ff.holds);

  const PotentialSpec S = catalog_get("saddle_harmonic", {}, 2);
  const Trajectory sbase = integrate_base(S, 0.0, {1.0, 0.0}, {0.0, 0.0}, 6.0, tight());
  const FocusingBound fs = check_focusing_bound(S, sbase, 5.0);
  CHECK(fs.min_laplacian == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fs.bound > 0.0);
  CHECK_FALSE(fs.holds);
}

TEST_CASE("accumulation hypotheses on the cosine solution") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const Trajectory base = integrate_base(V, 0.0, {1.0}, {0.0}, 4.0, tight());
  const AccumulationHypotheses h = check_accumulation_hypotheses(V, base);
  CHECK(h.velocity_zero_found);
  CHECK(h.t_zero == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
  CHECK(h.hessian_row_nonzero);
  CHECK(h.laplacian_nonnegative);
  CHECK(h.all_hold);
}

TEST_CASE("accumulation hypotheses on the saddle and their failure for free motion") {
  const PotentialSpec S = catalog_get("saddle_harmonic", {}, 2);
  const Trajectory sbase = integrate_base(S, 0.0, {1.0, 0.0}, {0.0, 0.0}, 10.0, tight());
  const AccumulationHypotheses hs = check_accumulation_hypotheses(S, sbase);
  CHECK(hs.all_hold);
  CHECK(hs.component == 0);

  const PotentialSpec F = catalog_get("free", {}, 1);
  const Trajectory fbase = integrate_base(F, 0.0, {1.0}, {0.5}, 10.0, tight());
  const AccumulationHypotheses hf = check_accumulation_hypotheses(F, fbase);
  CHECK_FALSE(hf.velocity_zero_found);
  CHECK_FALSE(hf.all_hold);
}

TEST_CASE("window validation rejects out-of-range requests") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 1);
  const Trajectory base = integrate_base(V, 0.0, {1.0}, {0.0}, 4.0, tight());
  CHECK_THROWS_AS(conjugate_points(V, base, 0.0, 9.0, conj_cfg()), std::invalid_argument);
  CHECK_THROWS_AS(conjugate_points(V, base, -1.0, 3.0, conj_cfg()), std::invalid_argument);
}
