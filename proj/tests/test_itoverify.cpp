#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gaussito/error.hpp"
#include "gaussito/itoverify.hpp"

using namespace gaussito;

namespace {

std::vector<CmTerm> at_horizon(double coeff = 1.0) { return {{coeff, {1.0}}}; }

ItoCase make_case(const ProcessSpec& spec, const char* f, std::vector<CmTerm> h) {
  return ItoCase("t", spec, make_test_function(f), std::move(h));
}

}  // namespace

TEST_CASE("S-transform examples") {
  const ItoCase c = make_case(brownian(), "x2", at_horizon());
  CHECK(s_transform({ObservableKind::x, 0.5}, c) == doctest::Approx(0.5));
  CHECK(s_transform({ObservableKind::wick_exp, 0.0, 0.0, at_horizon()}, c) ==
        doctest::Approx(std::exp(1.0)));
  CHECK(s_transform({ObservableKind::f, 1.0}, c) == doctest::Approx(2.0));
  CHECK(s_transform({ObservableKind::f1, 1.0}, c) == doctest::Approx(2.0));
  CHECK(s_transform({ObservableKind::f2, 0.3}, c) == doctest::Approx(2.0));
}

TEST_CASE("S-transform scales with h") {
  const ProcessSpec spec = jump_bm({{0.5, 0.25}});
  const std::vector<CmTerm> h{{0.7, {0.6}}, {-0.2, {0.5, Side::left}}};
  const ItoCase base("t", spec, make_test_function("x2"), h);
  for (double scale : {-2.0, 0.5, 3.0}) {
    std::vector<CmTerm> scaled = h;
    for (auto& term : scaled) term.coeff *= scale;
    const ItoCase sc = base.with_h(scaled);
    for (double t : {0.2, 0.5, 0.9})
      CHECK(s_transform({ObservableKind::x, t}, sc) ==
            doctest::Approx(scale * s_transform({ObservableKind::x, t}, base)).epsilon(1e-15));
  }
}

TEST_CASE("growth violation is rejected at construction") {
  CHECK_THROWS_AS(ItoCase("g", brownian(), make_test_function("exp", 0.3), at_horizon()), ConfigError);
  CHECK_NOTHROW(ItoCase("g", brownian(), make_test_function("exp", 0.2), at_horizon()));
}

TEST_CASE("Brownian square: every term in closed form") {
  const ItoTerms t = ito_stransform_residual(make_case(brownian(), "x2", at_horizon()));
  CHECK(t.lhs == doctest::Approx(2.0));
  CHECK(t.ys_integral == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(t.dv_integral == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.left_jump_sum == 0.0);
  CHECK(t.right_jump_sum == 0.0);
  CHECK(std::abs(t.residual) < 1e-10);
  CHECK(t.converged);
}

TEST_CASE("jump_bm square") {
  const ItoTerms t = ito_stransform_residual(make_case(jump_bm({{0.5, 0.25}}), "x2", at_horizon()));
  CHECK(t.lhs == doctest::Approx(2.8125).epsilon(1e-14));
  // psi(V, hbar) = V + hbar^2 with hbar jumping by 0.25 at 0.5
  CHECK(t.left_jump_sum == doctest::Approx(-0.0625).epsilon(1e-12));
  CHECK(t.right_jump_sum == 0.0);
  CHECK(std::abs(t.residual) < 1e-8);
}

TEST_CASE("evanescent: left jump carries the vanishing weak limit") {
  const ProcessSpec spec = evanescent(0.5);
  const ItoTerms t = ito_stransform_residual(make_case(spec, "x2", {{1.0, {0.25}}}));
  CHECK(std::abs(t.residual) < 1e-8);
  REQUIRE(t.left_jumps.size() == 1);
  CHECK(t.left_jumps[0].s == 0.5);
  // hbar(s0-) = 0, so the term is F(0) - psi_F(1, 0) + F''(0)/2: zero for x^2, -3 for x^4.
  CHECK(std::abs(t.left_jump_sum) < 1e-14);
  const ItoCase quartic("q", spec, make_test_function("poly", 0.05, {0, 0, 0, 0, 1}), {{1.0, {0.25}}});
  const ItoTerms q = ito_stransform_residual(quartic);
  CHECK(q.left_jump_sum == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(std::abs(q.residual) < 1e-8);
  CHECK_THROWS_AS(ito_rcll_residual(make_case(spec, "x2", at_horizon())), UnsupportedIntegrator);
}

TEST_CASE("RCLL form agrees with the S-transform form") {
  const std::vector<ProcessSpec> specs{brownian(), jump_bm({{0.5, 0.25}, {0.8, 0.1}}),
                                       coupled_jump_bm(1.0, 0.5), coupled_jump_bm(-0.6, 0.3)};
  for (const ProcessSpec& spec : specs)
    for (const char* f : {"x", "x2", "x3", "sin"})
      for (const auto& h : auto_battery(spec)) {
        const ItoCase c("t", spec, make_test_function(f), h);
        const ItoTerms a = ito_stransform_residual(c);
        const ItoTerms b = ito_rcll_residual(c);
        CHECK(std::abs(a.residual - b.residual) < 1e-10);
        CHECK(std::abs(b.residual) < 1e-8);
      }
}

TEST_CASE("coupled jump: the cross-moment correction is worth exactly one") {
  const ItoCase c = make_case(coupled_jump_bm(1.0, 0.5), "x2", at_horizon());
  ItoMutation drop;
  drop.drop_xleft_correction = true;
  const ItoTerms full = ito_rcll_residual(c);
  const ItoTerms cut = ito_rcll_residual(c, drop);
  CHECK(full.xleft_correction == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs((cut.residual - full.residual) - 1.0) < 1e-8);
}

TEST_CASE("every right-hand-side term is needed") {
  const ItoCase c = make_case(jump_bm({{0.5, 0.25}}), "x2", at_horizon());
  const ItoTerms full = ito_stransform_residual(c);
  ItoMutation m;
  m.drop_dv_integral = true;
  CHECK(std::abs(ito_stransform_residual(c, m).residual - full.dv_integral) < 1e-9);
  m = {};
  m.drop_ys_integral = true;
  CHECK(std::abs(ito_stransform_residual(c, m).residual - full.ys_integral) < 1e-9);
  m = {};
  m.drop_left_jumps = true;
  CHECK(std::abs(ito_stransform_residual(c, m).residual - (-0.0625)) < 1e-9);

  const ItoCase r("q", evanescent(0.5), make_test_function("poly", 0.05, {0, 0, 0, 0, 1}),
                  {{1.0, {0.25}}});
  m = {};
  m.drop_left_jumps = true;
  CHECK(ito_stransform_residual(r, m).residual == doctest::Approx(-3.0).epsilon(1e-8));
}

TEST_CASE("jump sums do not depend on record order") {
  const ProcessSpec spec = jump_bm({{0.1, 0.3}, {0.25, 0.05}, {0.4, 0.2}, {0.6, 0.15}, {0.85, 0.4}});
  const auto battery = auto_battery(spec);
  const ItoCase base("p", spec, make_test_function("sin"), battery[2]);
  const ItoTerms ref = ito_stransform_residual(base);
  std::vector<std::size_t> order(spec.discontinuities().size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(12);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(order.begin(), order.end(), rng);
    const ItoCase perm("p", spec.with_record_order(order), make_test_function("sin"), battery[2]);
    const ItoTerms t = ito_stransform_residual(perm);
    CHECK(std::abs(t.left_jump_sum - ref.left_jump_sum) <= 1e-14);
    CHECK(std::abs(t.right_jump_sum - ref.right_jump_sum) <= 1e-14);
  }
}

TEST_CASE("auto battery") {
  CHECK(auto_battery(brownian()).size() == 3);
  CHECK(auto_battery(jump_bm({{0.5, 0.25}, {0.8, 0.1}})).size() == 7);
}

TEST_CASE("martingale Monte Carlo") {
  const ProcessSpec spec = jump_bm({{0.5, 0.25}});
  const MartingaleMcReport lin = martingale_ito_mc(make_case(spec, "x", at_horizon()), 64, 500, 1);
  CHECK(lin.relative_l2 < 1e-10);
  const MartingaleMcReport sq = martingale_ito_mc(make_case(spec, "x2", at_horizon()), 256, 2000, 2);
  CHECK(sq.relative_l2 < 0.15);
  CHECK(sq.grid_intervals == 256);
  CHECK_THROWS_AS(martingale_ito_mc(make_case(spec, "x2", at_horizon()), 64, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(martingale_ito_mc(make_case(coupled_jump_bm(1.0, 0.5), "x2", at_horizon()), 64, 10, 1),
                  InvalidArgument);
}

TEST_CASE("S-transform by simulation") {
  const ItoCase c = make_case(brownian(), "x2", at_horizon());
  const McReport x = mc_s_transform(c, {ObservableKind::x, 0.5}, 100000, 3);
  CHECK(x.reference == doctest::Approx(0.5));
  CHECK(std::abs(x.z_score) <= 4.0);
  const McReport w = mc_s_transform(c, {ObservableKind::wick_exp, 0.0, 0.0, {{0.5, {0.4}}}}, 50000, 4);
  CHECK(std::abs(w.z_score) <= 4.0);

  const ItoCase j = make_case(jump_bm({{0.5, 0.25}}), "x2", {{1.0, {0.3}}});
  const McReport jw = mc_s_transform(j, {ObservableKind::jump_wick, 0.5, 0.8}, 50000, 5);
  CHECK(jw.reference == doctest::Approx(0.8 * 0.25));
  CHECK(std::abs(jw.z_score) <= 4.0);

  const ItoCase e = make_case(evanescent(0.5), "x2", {{1.0, {0.25}}});
  const McReport sl = mc_s_transform(e, {ObservableKind::smoothed_left, 0.5}, 20000, 6);
  CHECK(std::abs(sl.z_score) <= 4.0);
  CHECK_THROWS_AS(mc_s_transform(c, {ObservableKind::x, 0.5}, 0, 1), InvalidArgument);
}

TEST_CASE("simple Skorokhod integral") {
  SUBCASE("Wick exponential integrand on one interval") {
    const SimpleIntegrand z{{0.0, 1.0}, {{0.0, {}}, {0.0, {}}}, {{1.0, at_horizon()}}};
    const SkorokhodCheck s = simple_skorokhod(brownian(), z, at_horizon(2.0), 20000, 7);
    CHECK(s.s_transform == doctest::Approx(2.0 * std::exp(2.0)).epsilon(1e-14));
    CHECK(s.hk_integral == doctest::Approx(s.s_transform).epsilon(1e-12));
    CHECK(std::abs(s.mc.z_score) <= 4.0);
  }
  SUBCASE("constant integrand telescopes") {
    const SimpleIntegrand z{{0.0, 0.5, 1.0}, {{1.0, {}}, {1.0, {}}, {1.0, {}}}, {{1.0, {}}, {1.0, {}}}};
    const ProcessSpec spec = jump_bm({{0.5, 0.25}});
    const std::vector<CmTerm> h{{1.0, {0.7}}, {0.4, {1.0}}};
    const SkorokhodCheck s = simple_skorokhod(spec, z, h, 5000, 8);
    const CameronMartinElement he(spec, h);
    CHECK(s.s_transform == doctest::Approx(he.hbar()(1.0) - he.hbar()(0.0)).epsilon(1e-14));
    CHECK(s.hk_integral == doctest::Approx(s.s_transform).epsilon(1e-12));
    CHECK(std::abs(s.mc.z_score) <= 4.0);
  }
  SUBCASE("shape validation") {
    const SimpleIntegrand bad{{0.0, 1.0}, {{1.0, {}}}, {{1.0, {}}}};
    CHECK_THROWS_AS(simple_skorokhod(brownian(), bad, at_horizon(), 10, 1), InvalidArgument);
  }
}

TEST_CASE("second Hermite polynomial identity") {
  const ProcessSpec spec = brownian();
  const McReport same = hermite_p2_identity_mc(spec, at_horizon(), at_horizon(), 40000, 9);
  CHECK(same.reference == doctest::Approx(2.0));
  CHECK(std::abs(same.z_score) <= 4.0);
  const McReport disjoint =
      hermite_p2_identity_mc(spec, {{1.0, {0.5}}}, {{1.0, {1.0}}, {-1.0, {0.5}}}, 40000, 10);
  CHECK(disjoint.reference == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(disjoint.z_score) <= 4.0);
  const McReport half = hermite_p2_identity_mc(spec, at_horizon(), {{1.0, {0.5}}}, 40000, 11);
  CHECK(half.reference == doctest::Approx(0.5));
  CHECK(std::abs(half.z_score) <= 4.0);
}
