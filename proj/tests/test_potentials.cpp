#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "eisenhart/potentials.hpp"
#include "eisenhart/rng.hpp"

using namespace eisenhart;

namespace {

std::vector<std::pair<double, Vec>> random_samples(int n, int count, std::uint64_t seed) {
  UniformRng rng(seed);
  std::vector<std::pair<double, Vec>> out;
  for (int k = 0; k < count; ++k) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.range(-1.5, 1.5);
    out.emplace_back(rng.range(0.0, 3.0), x);
  }
  return out;
}

}  // namespace

TEST_CASE("harmonic values at a reference point") {
  const PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 2);
  const Vec x{1.0, 0.0};
  CHECK(V.eval(0.0, x) == doctest::Approx(0.5).epsilon(1e-15));
  const Vec g = V.grad(0.0, x);
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(0.0));
  const Mat h = V.hess(0.0, x);
  CHECK(h(0, 0) == doctest::Approx(1.0));
  CHECK(h(1, 1) == doctest::Approx(1.0));
  CHECK(h(0, 1) == doctest::Approx(0.0));
  CHECK(V.laplacian(0.0, x) == doctest::Approx(2.0));
  CHECK(V.dt(0.0, x) == 0.0);
  CHECK(V.time_independent);
}

TEST_CASE("free potential is identically zero in every derivative") {
  const PotentialSpec V = catalog_get("free", {}, 3);
  for (const auto& [t, x] : random_samples(3, 10, 3)) {
    CHECK(V.eval(t, x) == 0.0);
    CHECK(V.dt(t, x) == 0.0);
    CHECK(V.laplacian(t, x) == 0.0);
    for (double g : V.grad(t, x)) CHECK(g == 0.0);
    const Mat h = V.hess(t, x);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(h(i, j) == 0.0);
  }
}

TEST_CASE("cubic potential is harmonic with the expected gradient") {
  const PotentialSpec V = catalog_get("cubic_harmonic_2d", {}, 2);
  const Vec x{1.0, 1.0};
  CHECK(V.eval(0.0, x) == doctest::Approx(-2.0 / 3.0));
  const Vec g = V.grad(0.0, x);
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(-2.0));
  CHECK(V.laplacian(0.0, x) == doctest::Approx(0.0));
}

TEST_CASE("every catalog entry passes the derivative cross-check") {
  for (const std::string& name : catalog_names()) {
    const int n = (name == "saddle_harmonic" || name == "neg_saddle" ||
                   name == "cubic_harmonic_2d")
                      ? 2
                      : 3;
    const PotentialSpec V = catalog_get(name, {}, n);
    const DerivativeCheck c = check_derivatives(V, random_samples(n, 20, 11), 1e-5, 1e-6);
    INFO("potential ", name);
    CHECK(c.pass);
  }
}

TEST_CASE("free passes the derivative check at machine tolerance") {
  const PotentialSpec V = catalog_get("free", {}, 2);
  const DerivativeCheck c = check_derivatives(V, random_samples(2, 10, 5), 1e-5, 1e-12);
  CHECK(c.pass);
  CHECK(c.max_grad_err == 0.0);
  CHECK(c.max_hess_err == 0.0);
  CHECK(c.max_dt_err == 0.0);
}

TEST_CASE("a corrupted gradient is caught by the derivative check") {
  PotentialSpec V = catalog_get("harmonic", {{"k", 1.0}}, 2);
  const auto grad = V.grad;
  V.grad = [grad](double t, const Vec& x) { return vscale(2.0, grad(t, x)); };
  const DerivativeCheck c = check_derivatives(V, {{0.0, {1.0, 0.0}}}, 1e-5, 1e-6);
  CHECK_FALSE(c.pass);
  // The corrupted gradient differs from the finite-difference one by |grad V|.
  CHECK(c.max_grad_err == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("unknown names, unknown parameters, and bad dimensions are rejected") {
  CHECK_THROWS_AS(catalog_get("quintic", {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(catalog_get("harmonic", {{"spring", 1.0}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(catalog_get("saddle_harmonic", {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(catalog_get("harmonic", {{"k", 1.0}}, 0), std::invalid_argument);
}

TEST_CASE("per-dimension coefficients override the shared one") {
  const PotentialSpec V =
      catalog_get("anisotropic_harmonic", {{"k1", 1.0}, {"k2", 4.0}}, 2);
  const Vec g = V.grad(0.0, {1.0, 1.0});
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(4.0));

  const PotentialSpec L = catalog_get("linear", {{"b", 0.5}}, 2);
  const Vec gl = L.grad(0.0, {0.2, -0.7});
  CHECK(gl[0] == doctest::Approx(0.5));
  CHECK(gl[1] == doctest::Approx(0.5));
}

TEST_CASE("quartic_of_harmonic squares the shifted harmonic") {
  const PotentialSpec V = catalog_get("quartic_of_harmonic", {{"c0", 1.0}, {"c1", 0.0}}, 2);
  CHECK(V.eval(0.0, {1.0, 0.0}) == doctest::Approx(0.25));
  const Vec g = V.grad(0.0, {1.0, 0.0});
  CHECK(g[0] == doctest::Approx(1.0));  // 2 (|x|^2/2) x
  CHECK(g[1] == doctest::Approx(0.0));
}

TEST_CASE("time_harmonic carries the analytic time derivative") {
  const PotentialSpec V = catalog_get("time_harmonic", {{"epsilon", 0.5}, {"omega", 1.0}}, 2);
  CHECK_FALSE(V.time_independent);
  CHECK(V.dt(0.0, {1.0, 0.0}) == doctest::Approx(0.25));
  CHECK(V.eval(0.0, {1.0, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("user potentials fall back to finite-difference derivatives") {
  const PotentialSpec U = make_user_potential(
      "half_square", 2, [](double, const Vec& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); },
      true);
  const PotentialSpec H = catalog_get("harmonic", {{"k", 1.0}}, 2);
  for (const auto& [t, x] : random_samples(2, 10, 17)) {
    const Vec gu = U.grad(t, x), gh = H.grad(t, x);
    for (int i = 0; i < 2; ++i) CHECK(gu[i] == doctest::Approx(gh[i]).epsilon(1e-8));
    const Mat hu = U.hess(t, x);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(hu(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-4));
    CHECK(U.laplacian(t, x) == doctest::Approx(2.0).epsilon(1e-4));
  }
  CHECK_THROWS_AS(make_user_potential("bad", 0, nullptr, true), std::invalid_argument);
}
