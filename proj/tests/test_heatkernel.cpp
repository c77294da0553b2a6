#include <doctest.h>

#include <cmath>

#include "gaussito/error.hpp"
#include "gaussito/heatkernel.hpp"

using namespace gaussito;

namespace {

// E[(x + sqrt(t) Y)^k] by binomial expansion with Gaussian moments (j-1)!!.
double monomial_heat(int k, double t, double x) {
  double sum = 0.0, binom = 1.0, dfact = 1.0;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) binom = binom * (k - j + 1) / j;
    if (j % 2 == 0) {
      if (j > 0) dfact *= (j - 1);
      sum += binom * std::pow(x, k - j) * std::pow(t, j / 2) * dfact;
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("Gauss-Hermite rule") {
  const GaussHermite& gh = GaussHermite::standard();
  CHECK(gh.size() == 64);
  double wsum = 0.0;
  for (double w : gh.weights()) wsum += w;
  CHECK(wsum == doctest::Approx(std::sqrt(std::acos(-1.0))).epsilon(1e-13));
  CHECK(gh.expectation([](double y) { return y * y; }) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(gh.expectation([](double y) { return std::pow(y, 8); }) ==
        doctest::Approx(105.0).epsilon(1e-12));
}

TEST_CASE("psi examples") {
  CHECK(psi(make_test_function("x2"), 0.5, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
  for (double t : {0.0, 0.3, 2.0}) CHECK(psi(make_test_function("x"), t, 0.7) == doctest::Approx(0.7));
  CHECK(psi(make_test_function("exp", 0.05), 1.0, 0.0) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-13));
  CHECK(psi(make_test_function("sin"), 0.4, 0.9) ==
        doctest::Approx(std::sin(0.9) * std::exp(-0.2)).epsilon(1e-13));
}

TEST_CASE("psi at t = 0 is F itself") {
  const TestFunction f = make_test_function("sin");
  for (double x : {-1.3, 0.0, 0.2, 4.0}) CHECK(psi(f, 0.0, x) == std::sin(x));
}

TEST_CASE("psi rejects negative time") {
  CHECK_THROWS_AS(psi(make_test_function("x2"), -0.1, 0.0), DomainError);
}

TEST_CASE("psi matches Gaussian moments for monomials") {
  const char* ids[] = {"x", "x2", "x3"};
  for (int k = 1; k <= 3; ++k) {
    const TestFunction f = make_test_function(ids[k - 1]);
    for (double t : {0.1, 1.0, 2.5})
      for (double x : {-1.0, 0.0, 0.6})
        CHECK(psi(f, t, x) == doctest::Approx(monomial_heat(k, t, x)).epsilon(1e-13));
  }
  const TestFunction p = make_test_function("poly", 0.05, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  CHECK(psi(p, 0.8, 0.5) == doctest::Approx(monomial_heat(6, 0.8, 0.5)).epsilon(1e-12));
}

TEST_CASE("psi is linear in F") {
  const TestFunction a = make_test_function("sin");
  const TestFunction b = make_test_function("x3");
  const ScalarFn mix = [&](double x) { return 2.0 * a.f(x) - 0.5 * b.f(x); };
  for (double x : {-0.4, 0.1, 1.2})
    CHECK(psi(mix, 0.7, x) ==
          doctest::Approx(2.0 * psi(a, 0.7, x) - 0.5 * psi(b, 0.7, x)).epsilon(1e-14));
}

TEST_CASE("monotone F gives monotone psi") {
  const TestFunction f = make_test_function("x3");
  double prev = -1e300;
  for (int i = -20; i <= 20; ++i) {
    const double v = psi(f, 0.9, 0.1 * i);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("derivative orders") {
  const TestFunction f = make_test_function("x3");
  CHECK(psi(f, 0.5, 1.0, 1) == doctest::Approx(3.0 * (1.0 + 0.5)));
  CHECK(psi(f, 0.5, 1.0, 2) == doctest::Approx(6.0));
  CHECK_THROWS_AS(psi(f, 0.5, 1.0, 3), InvalidArgument);
}

TEST_CASE("heat identities") {
  const HeatResidual quad = heat_identity_residual(make_test_function("x2"), 0.7, -0.3, 1e-4);
  CHECK(quad.dt_residual < 1e-9);
  const HeatResidual s = heat_identity_residual(make_test_function("sin"), 0.5, 0.3, 1e-4);
  CHECK(s.dt_residual < 1e-5);
  CHECK(s.dx_residual < 1e-5);
  // Central differences of a cubic carry exactly step^2 F'''/6 = step^2.
  CHECK(heat_identity_residual(make_test_function("x3"), 0.5, 0.8, 1e-4).dx_residual ==
        doctest::Approx(1e-8).epsilon(1e-4));
  CHECK_THROWS_AS(heat_identity_residual(make_test_function("sin"), 1e-5, 0.0, 1e-4), DomainError);
}

TEST_CASE("heat residual decays quadratically in the step") {
  const TestFunction f = make_test_function("sin");
  const double coarse = heat_identity_residual(f, 0.5, 0.3, 1e-2).dt_residual;
  const double fine = heat_identity_residual(f, 0.5, 0.3, 5e-3).dt_residual;
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("registry and growth constraint") {
  CHECK(test_function_ids().size() >= 6);
  CHECK_THROWS_AS(make_test_function("nope"), InvalidArgument);
  CHECK_THROWS_AS(make_test_function("x2", 0.0), InvalidArgument);
  const TestFunction e = make_test_function("exp", 0.3);
  CHECK(e.satisfies_growth(0.5));
  CHECK_FALSE(e.satisfies_growth(1.0));
  CHECK(make_test_function("sin").polynomial == false);
  CHECK(make_test_function("x3").polynomial);
}
