#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "compint/contour.hpp"
#include "compint/engine.hpp"
#include "compint/expr.hpp"
#include "compint/residue.hpp"
#include "compint/scalar.hpp"

using namespace compint;

namespace {
const Cplx kTwoPiI{0.0, 2.0 * kPi};
}

TEST_CASE("classical loop and line integrals") {
  const Contour loop = make_circle(Cplx{0, 0}, 1.0);
  const auto inv = [](Cplx s) { return 1.0 / s; };
  CHECK(std::abs(additive_contour_integral(inv, loop) - kTwoPiI) < 1e-10);

  const auto ident = [](Cplx s) { return s; };
  CHECK(std::abs(additive_contour_integral(ident, loop)) < 1e-10);

  const Contour seg = make_segment(Cplx{0, 0}, Cplx{1, 0});
  CHECK(std::abs(additive_contour_integral(ident, seg) - Cplx{0.5, 0}) <
        1e-10);

  Bindings params;
  params.z = Cplx{2, 0};
  CHECK(std::abs(additive_contour_integral(parse_expr("z*s"), seg, params) -
                 Cplx{1, 0}) < 1e-10);

  // A sample landing on a pole of the integrand is an error, not a zero.
  const auto bad = [](Cplx s) { return 1.0 / (s - Cplx{1, 0}); };
  CHECK_THROWS_AS(additive_contour_integral(bad, loop), std::runtime_error);
}

TEST_CASE("Cauchy quadrature recovers Taylor coefficients") {
  const auto exp_fn = [](Cplx s) { return std::exp(s); };
  double fact = 1.0;
  for (int k = 0; k <= 5; ++k) {
    if (k > 0) fact *= k;
    CHECK(std::abs(cauchy_taylor_coeff(exp_fn, Cplx{0, 0}, k, 1.0) -
                   Cplx{1.0 / fact, 0}) < 1e-11);
  }

  const auto geom = [](Cplx s) { return 1.0 / (Cplx{1, 0} - s); };
  CHECK(std::abs(cauchy_taylor_coeff(geom, Cplx{0, 0}, 5, 0.5) - Cplx{1, 0}) <
        1e-10);

  CHECK(std::abs(cauchy_taylor_coeff(parse_expr("s^3+2"), Cplx{0, 0}, 3, 0.5) -
                 Cplx{1, 0}) < 1e-11);
  CHECK(std::abs(cauchy_taylor_coeff(parse_expr("s^3+2"), Cplx{0, 0}, 0, 0.5) -
                 Cplx{2, 0}) < 1e-11);
  CHECK(std::abs(cauchy_taylor_coeff(parse_expr("s^3+2"), Cplx{0, 0}, 1, 0.5)) <
        1e-11);
}

TEST_CASE("declared poles are sanity-checked against the integrand") {
  CHECK_NOTHROW(validate_pole(integrand_of(parse_expr("z/s")),
                              PoleSpec{Cplx{0, 0}, 1, ""}));
  CHECK_THROWS_AS(validate_pole(integrand_of(parse_expr("z/s")),
                                PoleSpec{Cplx{1, 0}, 1, ""}),
                  std::invalid_argument);
  // An integrand that vanishes at the hinted z still validates through the
  // fallback probes.
  CHECK_NOTHROW(validate_pole(integrand_of(parse_expr("z^2/s")),
                              PoleSpec{Cplx{0, 0}, 1, ""}, Cplx{0, 0}));
}

TEST_CASE("traversal-order residuals match the closed-form families") {
  const PoleSpec origin{Cplx{0, 0}, 1, "origin"};

  // Additive family: one loop of 1/s shifts z by 2 pi i.
  const Cplx z0{0.3, -0.2};
  const ResidualResult add =
      compositional_residual(parse_expr("1/s"), origin, z0, 0.5);
  REQUIRE(add.status == Status::Converged);
  CHECK(add.delta_consistent);
  CHECK(std::abs(add.value - (z0 + kTwoPiI)) < 1e-8);
  CHECK(std::abs(add.value - add.recheck) < 1e-8);

  // Linear family: one loop of z/s multiplies by e^{2 pi i} = 1, including
  // for a pole away from the origin.
  const PoleSpec off{Cplx{0.3, 0.2}, 1, ""};
  const ResidualResult lin = compositional_residual(
      parse_expr("z/(s-(0.3+0.2i))"), off, Cplx{0.7, 0.1}, 0.4);
  REQUIRE(lin.status == Status::Converged);
  CHECK(std::abs(lin.value - Cplx{0.7, 0.1}) < 1e-8);

  // Reciprocal family: one loop of z^2/s sends 1 to 1/(1 - 2 pi i).
  const ResidualResult sq =
      compositional_residual(parse_expr("z^2/s"), origin, Cplx{1, 0}, 0.5);
  REQUIRE(sq.status == Status::Converged);
  const Cplx sq_expect = 1.0 / (Cplx{1, 0} - kTwoPiI);
  CHECK(std::abs(sq.value - sq_expect) < 1e-8);
  CHECK(std::abs(sq_expect - Cplx{0.024704523031857641, 0.1552230961346476}) <
        1e-13);

  // Cubic family: principal inverse square root of 1/z^2 - 2 * 2 pi i.
  const Cplx z3{0.2, 0.0};
  const ResidualResult cu =
      compositional_residual(parse_expr("z^3/s"), origin, z3, 0.5);
  REQUIRE(cu.status == Status::Converged);
  const Cplx base = 1.0 / (z3 * z3) - 2.0 * kTwoPiI;
  CHECK(std::abs(cu.value - std::pow(base, -0.5)) < 1e-8);
}

TEST_CASE("residual maps re-check against the half radius and can fail loud") {
  ResidualValue r(integrand_of(parse_expr("z^2/s")),
                  PoleSpec{Cplx{0, 0}, 1, ""}, 0.5);
  const Cplx at = r(Cplx{1, 0});
  CHECK(std::abs(at - r.evaluate(Cplx{1, 0}).value) < 1e-12);
  CHECK(r.delta() == 0.5);
  CHECK(r.pole().order == 1);

  // z = -i/pi puts the flow through infinity half way around the loop.
  CHECK_THROWS_AS(r(Cplx{0.0, -1.0 / kPi}), std::runtime_error);

  // validate=false admits integrands engineered to vanish at the pole.
  ResidualValue zero(integrand_of(parse_expr("0/s")),
                     PoleSpec{Cplx{0, 0}, 1, ""}, 0.5, EngineConfig{},
                     Method::Ode, /*validate=*/false);
  CHECK(std::abs(zero(Cplx{0.4, 0.1}) - Cplx{0.4, 0.1}) < 1e-12);
}

TEST_CASE("closed-form families and coefficients") {
  CHECK(family_for_power(0) == ResidualFamily::Constant);
  CHECK(family_for_power(1) == ResidualFamily::Linear);
  CHECK(family_for_power(2) == ResidualFamily::Square);
  CHECK(family_for_power(3) == ResidualFamily::PowerN);
  CHECK(family_for_power(7) == ResidualFamily::PowerN);
  CHECK_THROWS_AS(family_for_power(-1), std::invalid_argument);

  const ClosedFormResult lin = closed_form_residual(
      ResidualFamily::Linear, parse_expr("1"), Cplx{0, 0}, 0, 1, Cplx{0.7, 0});
  CHECK(std::abs(lin.coefficient - Cplx{1, 0}) < 1e-12);
  CHECK(std::abs(lin.value - Cplx{0.7, 0}) < 1e-10);
  CHECK_FALSE(lin.branch_flagged);

  // c picks out p^(k)(zeta)/k!.
  CHECK(std::abs(closed_form_residual(ResidualFamily::Constant,
                                      parse_expr("s+2"), Cplx{0, 0}, 0, 0,
                                      Cplx{0, 0})
                     .coefficient -
                 Cplx{2, 0}) < 1e-11);
  CHECK(std::abs(closed_form_residual(ResidualFamily::Constant,
                                      parse_expr("s+2"), Cplx{0, 0}, 1, 0,
                                      Cplx{0, 0})
                     .coefficient -
                 Cplx{1, 0}) < 1e-11);
  CHECK(std::abs(closed_form_residual(ResidualFamily::Constant,
                                      parse_expr("exp(s)"), Cplx{0, 0}, 2, 0,
                                      Cplx{0, 0})
                     .coefficient -
                 Cplx{0.5, 0}) < 1e-11);

  const ClosedFormResult ok = closed_form_residual_from_coeff(
      3, Cplx{1, 0}, Cplx{0.2, 0});
  CHECK_FALSE(ok.branch_flagged);

  // Moving the root base onto the negative real axis trips the branch flag.
  const ClosedFormResult flagged = closed_form_residual_from_coeff(
      3, Cplx{0.0, -1.0 / (2.0 * kPi)}, Cplx{1, 0});
  CHECK(flagged.branch_flagged);
  CHECK(std::abs(flagged.value - Cplx{0, -1}) < 1e-12);
}

TEST_CASE("default circle radii stay clear of neighboring poles") {
  const PoleSpec origin{Cplx{0, 0}, 1, ""};
  CHECK(default_residual_delta(origin, {}) == 0.5);

  const std::vector<PoleSpec> others{PoleSpec{Cplx{0.6, 0}, 1, ""}};
  const double d = default_residual_delta(origin, others);
  CHECK(d < 0.3);
  CHECK(d > 0.29);
}

TEST_CASE("loops around a pole conjugate under a connecting path") {
  const ConjugacyReport rep = conjugacy_check(
      integrand_of(parse_expr("z/s")), make_circle(Cplx{0, 0}, 0.5),
      make_circle(Cplx{0, 0}, 0.7),
      make_segment(Cplx{0.5, 0}, Cplx{0.7, 0}),
      std::vector<Cplx>{Cplx{0.3, 0}, Cplx{0.1, 0.2}});
  CHECK(rep.pass);
  CHECK(rep.max_deviation < 1e-6);
  CHECK(rep.deviations.size() == 2);
}

TEST_CASE("composed per-pole maps equal one enclosing loop") {
  const Expr f = parse_expr("z*(1/s + 1/(s-3))");
  const std::vector<PoleSpec> poles{PoleSpec{Cplx{0, 0}, 1, ""},
                                    PoleSpec{Cplx{3, 0}, 1, ""}};
  const Cplx z{1, 0};
  const Cplx composed = residual_class_compose(f, poles, z);
  const CompResult enclosing = comp_integral_ode(
      integrand_of(f), make_circle(Cplx{1.5, 0}, 2.6), z);
  REQUIRE(enclosing.status == Status::Converged);
  CHECK(std::abs(composed - enclosing.value) < 1e-8);
  CHECK(std::abs(composed - z) < 1e-8);  // e^{2 pi i} twice
}

TEST_CASE("multi-turn loops equal repeated self-composition") {
  const PoleSpec origin{Cplx{0, 0}, 1, ""};
  const WindingResult w = winding_compose(integrand_of(parse_expr("z^2/s")),
                                          origin, 2, Cplx{1, 0});
  CHECK(w.deviation < 1e-8);
  const Cplx expect = 1.0 / (Cplx{1, 0} - 2.0 * kTwoPiI);
  CHECK(std::abs(w.composed - expect) < 1e-8);
  CHECK(std::abs(w.multiturn - expect) < 1e-8);

  const WindingResult one = winding_compose(integrand_of(parse_expr("z^2/s")),
                                            origin, 1, Cplx{1, 0});
  CHECK(std::abs(one.composed - one.multiturn) < 1e-10);

  CHECK_THROWS_AS(winding_compose(integrand_of(parse_expr("z^2/s")), origin,
                                  2, Cplx{1, 0}, 0.5, EngineConfig{},
                                  Method::Ode, 1e-18),
                  std::runtime_error);
}
