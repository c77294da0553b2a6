#include <doctest.h>

#include <cmath>

#include "gaussito/error.hpp"
#include "gaussito/stieltjes.hpp"

using namespace gaussito;

namespace {

const ScalarFn one = [](double) { return 1.0; };
const ScalarFn id = [](double t) { return t; };

RegulatedFunction heaviside(double s, double dminus) {
  return RegulatedFunction(1.0, [](double) { return 0.0; }, {{s, dminus, 0.0}},
                           [](double) { return 0.0; });
}

RegulatedFunction identity_plus_step(double s, double dminus) {
  return RegulatedFunction(1.0, id, {{s, dminus, 0.0}}, one);
}

}  // namespace

TEST_CASE("HK Riemann sums") {
  const Partition pi2 = Partition::uniform(1.0, 2);
  CHECK(hk_riemann_sum(one, RegulatedFunction::identity(1.0), TaggedPartition::left_tags(pi2)) ==
        doctest::Approx(1.0));
  CHECK(hk_riemann_sum(id, RegulatedFunction::identity(1.0), TaggedPartition::left_tags(pi2)) ==
        doctest::Approx(0.25));
  CHECK(hk_riemann_sum(one, heaviside(0.5, 1.0),
                       TaggedPartition::left_tags(Partition::uniform(1.0, 3))) == 1.0);
}

TEST_CASE("tag placement is validated") {
  CHECK_THROWS_AS(TaggedPartition({{0.0, 0.5, 0.7}, {0.5, 1.0, 0.75}}, false), InvalidArgument);
  CHECK_THROWS_AS(YoungTaggedPartition({{0.0, 0.5, 0.0}, {0.5, 1.0, 0.75}}), InvalidArgument);
  CHECK_THROWS_AS(TaggedPartition({{0.0, 0.4, 0.2}, {0.5, 1.0, 0.75}}, false), InvalidArgument);
}

TEST_CASE("Young-Stieltjes sums") {
  const YoungTaggedPartition tau = YoungTaggedPartition::midpoints(Partition::uniform(1.0, 2));
  CHECK(young_stieltjes_sum(id, heaviside(0.5, 1.0), tau) == doctest::Approx(0.5));
  const RegulatedFunction r(1.0, [](double t) { return std::cos(4.0 * t); },
                            {{0.3, 0.2, -0.1}, {0.5, 0.4, 0.3}});
  CHECK(young_stieltjes_sum(one, r, tau) == doctest::Approx(r(1.0) - r(0.0)).epsilon(1e-14));
  CHECK(young_stieltjes_sum(id, RegulatedFunction::identity(1.0), tau) == doctest::Approx(0.5));
}

TEST_CASE("adaptive Young-Stieltjes integral") {
  YsOptions opt;
  opt.tol = 1e-8;
  const IntegrationResult a = integrate_ys(id, RegulatedFunction::identity(1.0), opt);
  CHECK(a.converged);
  CHECK(a.value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(integrate_ys(id, heaviside(0.5, 1.0), opt).value == doctest::Approx(0.5));
  CHECK(integrate_ys(id, identity_plus_step(0.5, 1.0), opt).value == doctest::Approx(1.0));

  const IntegrationResult trig =
      integrate_ys([](double t) { return std::exp(t); },
                   RegulatedFunction(1.0, [](double t) { return std::sin(t); }, {}), opt);
  const double exact = 0.5 * (std::exp(1.0) * (std::sin(1.0) + std::cos(1.0)) - 1.0);
  CHECK(trig.converged);
  CHECK(std::abs(trig.value - exact) < 1e-7);
}

TEST_CASE("Young-Stieltjes telescopes for a constant integrand") {
  const RegulatedFunction r(1.0, [](double t) { return t * t - std::sin(5.0 * t); },
                            {{0.0, 0.0, 0.5}, {0.25, -0.3, 0.2}, {1.0, 0.7, 0.0}});
  for (std::size_t n : {1u, 2u, 5u, 16u}) {
    YsOptions opt;
    opt.initial_intervals = n;
    opt.max_refine = 0;
    CHECK(integrate_ys(one, r, opt).value == doctest::Approx(r(1.0) - r(0.0)).epsilon(1e-14));
  }
}

TEST_CASE("Young-Stieltjes integral is linear in the integrand") {
  const RegulatedFunction r(1.0, [](double t) { return t * t; }, {{0.6, 0.3, -0.2}},
                            [](double t) { return 2.0 * t; });
  const ScalarFn u = [](double t) { return std::cos(t); };
  const ScalarFn w = [](double t) { return t * t * t; };
  const ScalarFn mix = [&](double t) { return 2.0 * u(t) - 3.0 * w(t); };
  const double lhs = integrate_ys(mix, r).value;
  const double rhs = 2.0 * integrate_ys(u, r).value - 3.0 * integrate_ys(w, r).value;
  CHECK(std::abs(lhs - rhs) < 1e-9);
}

TEST_CASE("Lebesgue-Stieltjes integral with atoms") {
  CHECK(integrate_ls(one, RegulatedFunction::identity(1.0)) == doctest::Approx(1.0));
  const RegulatedFunction v = RegulatedFunction(1.0, id, {{0.5, 0.25, 0.0}}, one);
  CHECK(integrate_ls(one, v) == doctest::Approx(1.25));
  CHECK(integrate_ls(id, v) == doctest::Approx(0.625));
  LsOptions no_atoms;
  no_atoms.include_atoms = false;
  CHECK(integrate_ls(id, v, no_atoms) == doctest::Approx(0.5));
}

TEST_CASE("Lebesgue-Stieltjes needs a density") {
  const RegulatedFunction r(1.0, id, {});
  CHECK_THROWS_AS(integrate_ls(one, r), UnsupportedIntegrator);
}

TEST_CASE("Lebesgue-Stieltjes is linear in the integrator") {
  const RegulatedFunction a(1.0, [](double t) { return t * t; }, {{0.3, 0.1, 0.05}},
                            [](double t) { return 2.0 * t; });
  const RegulatedFunction b(1.0, [](double t) { return std::sin(t); }, {{0.7, -0.4, 0.0}},
                            [](double t) { return std::cos(t); });
  const ScalarFn u = [](double t) { return std::exp(-t); };
  const double combined = integrate_ls(u, a.combine(2.0, b, -0.5));
  CHECK(std::abs(combined - (2.0 * integrate_ls(u, a) - 0.5 * integrate_ls(u, b))) < 1e-12);
}

TEST_CASE("YS and LS agree for continuous integrands") {
  const RegulatedFunction r(1.0, [](double t) { return t * t; }, {{0.4, 0.3, 0.1}},
                            [](double t) { return 2.0 * t; });
  const ScalarFn u = [](double t) { return std::cos(2.0 * t); };
  YsOptions opt;
  opt.tol = 1e-11;
  CHECK(std::abs(integrate_ys(u, r, opt).value - integrate_ls(u, r)) < 1e-9);
}

TEST_CASE("chain rule examples") {
  SUBCASE("product rule") {
    const ScalarField2 g{[](double a, double b) { return a * b; },
                         [](double, double b) { return b; }, [](double a, double) { return a; }};
    const RegulatedFunction u = RegulatedFunction(1.0, id, {}, one);
    const ChainRuleTerms t = chain_rule(g, u, u, 1e-10);
    CHECK(t.lhs == doctest::Approx(1.0));
    CHECK(t.int_u1 == doctest::Approx(0.5));
    CHECK(t.int_u2 == doctest::Approx(0.5));
    CHECK(t.left_jump_sum == 0.0);
    CHECK(t.right_jump_sum == 0.0);
    CHECK(std::abs(t.residual) < 1e-10);
  }
  SUBCASE("square of a jumping path") {
    const ScalarField2 g{[](double a, double) { return a * a; },
                         [](double a, double) { return 2.0 * a; }, [](double, double) { return 0.0; }};
    const ChainRuleTerms t =
        chain_rule(g, identity_plus_step(0.5, 1.0), RegulatedFunction::constant(1.0, 0.0), 1e-10);
    CHECK(t.lhs == doctest::Approx(4.0));
    CHECK(t.int_u1 == doctest::Approx(5.0));
    CHECK(t.left_jump_sum == doctest::Approx(-1.0));
    CHECK(std::abs(t.residual) < 1e-9);
  }
  SUBCASE("sine") {
    const ScalarField2 g{[](double a, double) { return std::sin(a); },
                         [](double a, double) { return std::cos(a); },
                         [](double, double) { return 0.0; }};
    const ChainRuleTerms t = chain_rule(g, RegulatedFunction::identity(1.0),
                                        RegulatedFunction::constant(1.0, 0.0), 1e-8);
    CHECK(t.converged);
    CHECK(std::abs(t.residual) < 1e-8);
  }
}

TEST_CASE("chain rule residual identity holds term by term") {
  const ScalarField2 g{[](double a, double b) { return std::exp(0.3 * a) * b; },
                       [](double a, double b) { return 0.3 * std::exp(0.3 * a) * b; },
                       [](double a, double) { return std::exp(0.3 * a); }};
  const RegulatedFunction u1(1.0, [](double t) { return std::sin(2.0 * t); },
                             {{0.25, 0.4, -0.1}, {0.6, 0.0, 0.3}});
  const RegulatedFunction u2(1.0, [](double t) { return 1.0 + t; }, {{0.6, 0.2, 0.0}, {0.8, 0.0, -0.1}},
                             one);
  const ChainRuleTerms t = chain_rule(g, u1, u2, 1e-10);
  CHECK(t.residual ==
        doctest::Approx(t.lhs - (t.int_u1 + t.int_u2 + t.left_jump_sum + t.right_jump_sum)));
  CHECK(std::abs(t.residual) < 1e-8);
}
