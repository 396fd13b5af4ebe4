#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "compint/contour.hpp"
#include "compint/engine.hpp"
#include "compint/expr.hpp"
#include "compint/residue.hpp"
#include "compint/scalar.hpp"
#include "compint/transforms.hpp"

using namespace compint;

namespace {

const Cplx kTwoPiI{0.0, 2.0 * kPi};

Expr gaussian_profile(double scale) {
  return Expr::call(Expr::Kind::Exp,
                    Expr::mul(Expr::constant(Cplx{-scale * kPi, 0.0}),
                              Expr::int_power(Expr::variable(Var::W), 2)));
}

std::vector<PoleSpec> origin_pole() {
  return {PoleSpec{Cplx{0, 0}, 1, "origin"}};
}

DerivedResidual gaussian(double scale, const char* phi) {
  return DerivedResidual::separable(gaussian_profile(scale),
                                    parse_expr("1/s"), parse_expr(phi),
                                    make_circle(Cplx{0, 0}, 1.0),
                                    origin_pole());
}

}  // namespace

TEST_CASE("summed-integrand traversal equals sequential application") {
  const Contour seg = make_segment(Cplx{0, 0}, Cplx{1, 0});
  const PairReport r = homomorphism_check(parse_expr("1"), parse_expr("1"),
                                          parse_expr("z"), seg, Cplx{1, 0});
  CHECK(r.pass);
  CHECK(std::abs(r.lhs - Cplx{7.389056098930650, 0}) < 1e-8);  // e^2
  CHECK(std::abs(r.lhs - r.rhs) <= r.tol);
}

TEST_CASE("Taylor-term composition hits the closed forms") {
  const Contour loop = make_circle(Cplx{0, 0}, 1.0);
  const Cplx w{0.3, 0};

  // phi = s*z about 0: only the k = 1 term acts, giving z e^{2 pi i w}.
  const Cplx lin =
      taylor_composition(parse_expr("s*z"), Cplx{0, 0}, w, 1, loop,
                         Cplx{1, 0});
  CHECK(std::abs(lin - std::exp(kTwoPiI * w)) < 1e-7);
  const Cplx lin5 =
      taylor_composition(parse_expr("s*z"), Cplx{0, 0}, w, 5, loop,
                         Cplx{1, 0});
  CHECK(std::abs(lin5 - std::exp(kTwoPiI * w)) < 1e-7);

  // phi = s*z^2: reciprocal family, 1/(1/z - 2 pi i w).
  const Cplx z2{0.2, 0};
  const Cplx sq =
      taylor_composition(parse_expr("s*z^2"), Cplx{0, 0}, w, 1, loop, z2);
  CHECK(std::abs(sq - 1.0 / (1.0 / z2 - kTwoPiI * w)) < 1e-7);

  CHECK_THROWS_AS(taylor_composition(parse_expr("s*z"), Cplx{0, 0}, w, -1,
                                     loop, Cplx{1, 0}),
                  std::invalid_argument);
}

TEST_CASE("strength parameter forms a one-parameter semigroup") {
  const Contour loop = make_circle(Cplx{0, 0}, 1.0);
  const Cplx val = semigroup_eval(parse_expr("1/s"), parse_expr("z"), loop,
                                  Cplx{0.5, 0}, Cplx{1, 0});
  CHECK(std::abs(val - Cplx{-1, 0}) < 1e-8);  // e^{pi i}

  const PairReport r =
      semigroup_check(parse_expr("1/s"), parse_expr("z"), loop,
                      Cplx{0.25, 0}, Cplx{0.25, 0}, Cplx{1, 0});
  CHECK(r.pass);
  CHECK(std::abs(r.rhs - Cplx{-1, 0}) < 1e-7);

  // A flow through infinity surfaces as an error.
  CHECK_THROWS_AS(semigroup_eval(parse_expr("1/s"), parse_expr("z^2"), loop,
                                 Cplx{0.0, -1.0 / kPi}, Cplx{1, 0}),
                  std::runtime_error);
}

TEST_CASE("derivative in the strength parameter is the additive integral") {
  const PairReport r =
      infinitesimal_derivative(parse_expr("1"), parse_expr("z"),
                               make_segment(Cplx{0, 0}, Cplx{1, 0}),
                               Cplx{1, 0});
  CHECK(r.pass);
  CHECK(std::abs(r.rhs - Cplx{1, 0}) < 1e-10);
  CHECK(std::abs(r.lhs - r.rhs) <= r.tol);
}

TEST_CASE("weight and loop integrals interchange") {
  const PairReport r = fubini_check(
      parse_expr("1"), parse_expr("1/s"), parse_expr("z"),
      make_circle(Cplx{0, 0}, 1.0), make_segment(Cplx{0, 0}, Cplx{1, 0}),
      Cplx{1, 0});
  CHECK(r.pass);
  CHECK(std::abs(r.lhs - Cplx{1, 0}) < 1e-7);
}

TEST_CASE("derived residuals: separable and general forms agree") {
  const DerivedResidual sep = gaussian(1.0, "1");
  CHECK(sep.is_separable());
  CHECK(std::abs(sep.profile(Cplx{0.5, 0}) -
                 Cplx{std::exp(-kPi / 4), 0}) < 1e-14);
  CHECK(std::abs(sep.h(Cplx{0.5, 0}, Cplx{2, 0}) -
                 Cplx{std::exp(-kPi / 4) / 2, 0}) < 1e-14);
  REQUIRE(sep.poles().size() == 1);
  CHECK(sep.poles()[0].label == "origin");

  // log and traversal values coincide for an additive (z-free) phi.
  const Cplx expect = kTwoPiI * std::exp(-kPi / 4);
  CHECK(std::abs(sep.log_value(Cplx{0.5, 0}, Cplx{0, 0}) - expect) < 1e-9);
  const CompResult v = sep.value(Cplx{0.5, 0}, Cplx{0, 0});
  REQUIRE(v.status == Status::Converged);
  CHECK(std::abs(v.value - expect) < 1e-9);

  const Expr h = Expr::div(gaussian_profile(1.0), Expr::variable(Var::S));
  const DerivedResidual gen(h, parse_expr("1"), make_circle(Cplx{0, 0}, 1.0),
                            origin_pole());
  CHECK_FALSE(gen.is_separable());
  CHECK(std::abs(gen.log_value(Cplx{0.5, 0}, Cplx{0, 0}) -
                 sep.log_value(Cplx{0.5, 0}, Cplx{0, 0})) < 1e-10);
  CHECK_THROWS_AS(gen.profile(Cplx{0, 0}), std::logic_error);
  CHECK_THROWS_AS(fourier_hat(gen), std::invalid_argument);

  const Integrand at = sep.integrand_at(Cplx{0.5, 0});
  CHECK(std::abs(at(Cplx{0, 1}, Cplx{3, 0}) -
                 sep.h(Cplx{0.5, 0}, Cplx{0, 1})) < 1e-14);
}

TEST_CASE("syntactic w/s separation") {
  const Expr h = Expr::div(gaussian_profile(1.0), Expr::variable(Var::S));
  const auto split = separate_ws(h);
  REQUIRE(split.has_value());
  Bindings b;
  b.w = Cplx{0.3, 0.1};
  b.s = Cplx{0.4, -0.2};
  const Cplx prod = split->first.eval(b) * split->second.eval(b);
  CHECK(std::abs(prod - h.eval(b)) < 1e-14);
  CHECK_FALSE(depends_on(split->first, Var::S));
  CHECK_FALSE(depends_on(split->second, Var::W));

  CHECK_FALSE(separate_ws(parse_expr("exp(w*s)")).has_value());
  CHECK_FALSE(separate_ws(parse_expr("w+s")).has_value());
  CHECK(separate_ws(parse_expr("w^2/s")).has_value());
}

TEST_CASE("profile surgery and summed parts") {
  const DerivedResidual sep = gaussian(1.0, "1");
  const DerivedResidual flat =
      sep.with_profile([](Cplx) { return Cplx{1, 0}; });
  CHECK(std::abs(flat.log_value(Cplx{3, 0}, Cplx{0, 0}) - kTwoPiI) < 1e-9);

  const std::vector<DerivedResidual> parts{gaussian(1.0, "1"),
                                           gaussian(2.0, "1")};
  const DerivedResidual total = DerivedResidual::sum(parts);
  const double at = 0.4;
  const Cplx expect =
      kTwoPiI * (std::exp(-kPi * at * at) + std::exp(-2 * kPi * at * at));
  CHECK(std::abs(total.log_value(Cplx{at, 0}, Cplx{0, 0}) - expect) < 1e-9);
  CHECK_THROWS_AS(DerivedResidual::sum({}), std::invalid_argument);
}

TEST_CASE("moderate-decay screening") {
  const DecayReport good = gaussian(1.0, "1").decay_report();
  CHECK(good.pass);
  CHECK(good.worst_ratio <= 1.05);
  CHECK_NOTHROW(gaussian(1.0, "1").require_moderate_decay());

  const DerivedResidual flat = DerivedResidual::separable(
      parse_expr("1"), parse_expr("1/s"), parse_expr("1"),
      make_circle(Cplx{0, 0}, 1.0), origin_pole());
  const DecayReport bad = flat.decay_report();
  CHECK_FALSE(bad.pass);
  CHECK(bad.worst_ratio > 10.0);
  CHECK_THROWS_AS(flat.require_moderate_decay(), std::runtime_error);
}

TEST_CASE("transform window selection") {
  CHECK(choose_truncation(gaussian(1.0, "1"), Cplx{0, 0}, TransformConfig{}) ==
        8.0);
  // A slowly decaying profile pushes the window to the cap.
  const DerivedResidual slow = DerivedResidual::separable(
      parse_expr("1/(1+w^2)"), parse_expr("1/s"), parse_expr("1"),
      make_circle(Cplx{0, 0}, 1.0), origin_pole());
  CHECK(choose_truncation(slow, Cplx{0, 0}, TransformConfig{}) == 128.0);
}

TEST_CASE("classical transform of the unit Gaussian is itself") {
  const DerivedResidual hat = fourier_hat(gaussian(1.0, "1"));
  CHECK(hat.is_separable());
  for (double xi : {0.0, 0.3, 0.7, 1.4}) {
    CHECK(std::abs(hat.profile(Cplx{xi, 0}) -
                   Cplx{std::exp(-kPi * xi * xi), 0}) < 1e-8);
  }
}

TEST_CASE("transform round trip recovers the derived residual") {
  const DerivedResidual d = gaussian(1.0, "1");
  const PairReport r = fourier_inversion_check(d, Cplx{0.25, 0}, Cplx{0, 0});
  CHECK(r.pass);
  CHECK(r.deviation <= r.tol);
  // Original side of the pair is the untransformed family value.
  CHECK(std::abs(r.lhs - (kTwoPiI * std::exp(-kPi / 16))) < 1e-6);
}

TEST_CASE("integer-shift composition matches the transformed composition") {
  const DerivedResidual d = gaussian(1.0, "1");
  const PairReport r = poisson_composition(d, 2, Cplx{0.1, 0});
  CHECK(r.pass);
  // (lhs - z) / (2 pi i) is the two-sided Gaussian sample sum.
  const Cplx measured = (r.lhs - Cplx{0.1, 0}) / kTwoPiI;
  const double theta =
      1.0 + 2 * std::exp(-kPi) + 2 * std::exp(-4 * kPi);
  CHECK(std::abs(measured - Cplx{theta, 0}) < 1e-8);
  CHECK_THROWS_AS(poisson_composition(d, -1, Cplx{0, 0}),
                  std::invalid_argument);
}

TEST_CASE("transforming distributes over summed perturbations") {
  const std::vector<DerivedResidual> parts{gaussian(1.0, "1"),
                                           gaussian(2.0, "1")};
  const PairReport r =
      fourier_linearity_check(parts, Cplx{0.25, 0}, Cplx{0.1, 0});
  CHECK(r.pass);
}

TEST_CASE("one-sided decaying transform") {
  const DerivedResidual d = DerivedResidual::separable(
      parse_expr("exp(-w)"), parse_expr("1/s"), parse_expr("1"),
      make_circle(Cplx{0, 0}, 1.0), origin_pole());
  const Cplx z{0.2, 0.1};
  const CompResult r = laplace_transform(d, Cplx{1, 0}, z);
  REQUIRE(r.status == Status::Converged);
  CHECK(std::abs(r.value - (z + Cplx{0, kPi})) < 1e-7);

  CHECK_THROWS_AS(laplace_transform(d, Cplx{-1, 0}, z),
                  std::invalid_argument);

  // A growing integrand never clears the tail target.
  const DerivedResidual grow = DerivedResidual::separable(
      parse_expr("exp(w)"), parse_expr("1/s"), parse_expr("1"),
      make_circle(Cplx{0, 0}, 1.0), origin_pole());
  CHECK_THROWS_AS(laplace_transform(grow, Cplx{0.5, 0}, z),
                  std::runtime_error);
}
