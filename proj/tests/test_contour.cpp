#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "compint/contour.hpp"
#include "compint/expr.hpp"
#include "compint/scalar.hpp"

using namespace compint;

namespace {
const char* kSquare =
    "seg(-0.6-0.6i,0.6-0.6i)>seg(0.6-0.6i,0.6+0.6i)>"
    "seg(0.6+0.6i,-0.6+0.6i)>seg(-0.6+0.6i,-0.6-0.6i)";
}

TEST_CASE("piece-level geometry") {
  const ArcPiece seg = SegmentPiece{Cplx{0, 0}, Cplx{2, 2}};
  CHECK(piece_point(seg, 0.5) == Cplx{1, 1});
  CHECK(piece_derivative(seg, 0.25) == Cplx{2, 2});
  CHECK(piece_start(seg) == Cplx{0, 0});
  CHECK(piece_end(seg) == Cplx{2, 2});

  const ArcPiece arc = CircularPiece{Cplx{0, 0}, 1.0, 0.0, kPi / 2};
  CHECK(std::abs(piece_point(arc, 0.0) - Cplx{1, 0}) < 1e-15);
  CHECK(std::abs(piece_point(arc, 1.0) - Cplx{0, 1}) < 1e-15);
  const Cplx mid = piece_point(arc, 0.5);
  CHECK(std::abs(mid - Cplx{std::sqrt(0.5), std::sqrt(0.5)}) < 1e-15);
  // d/dt of c + r e^{i theta(t)} is i (theta1 - theta0) (point - c).
  CHECK(std::abs(piece_derivative(arc, 0.5) -
                 Cplx{0, kPi / 2} * mid) < 1e-15);

  const ArcPiece back = piece_reversed(arc);
  CHECK(std::abs(piece_point(back, 0.0) - Cplx{0, 1}) < 1e-15);
  CHECK(std::abs(piece_point(back, 1.0) - Cplx{1, 0}) < 1e-15);
}

TEST_CASE("construction validates pieces") {
  CHECK_THROWS_AS(Contour(std::vector<ArcPiece>{}), std::invalid_argument);
  CHECK_THROWS_AS(
      Contour({CircularPiece{Cplx{0, 0}, 0.0, 0.0, 1.0}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      Contour({ArcPiece{SegmentPiece{Cplx{0, 0}, Cplx{1, 0}}},
               ArcPiece{SegmentPiece{Cplx{2, 0}, Cplx{3, 0}}}}),
      std::invalid_argument);
}

TEST_CASE("global parameter splits uniformly across pieces") {
  const Contour sq = parse_contour(kSquare);
  REQUIRE(sq.piece_count() == 4);
  CHECK(std::abs(sq.point_at(0.0) - Cplx{-0.6, -0.6}) < 1e-15);
  CHECK(std::abs(sq.point_at(0.25) - Cplx{0.6, -0.6}) < 1e-15);
  CHECK(std::abs(sq.point_at(0.5) - Cplx{0.6, 0.6}) < 1e-15);
  CHECK(std::abs(sq.point_at(0.625) - Cplx{0, 0.6}) < 1e-15);
  CHECK(std::abs(sq.point_at(1.0) - Cplx{-0.6, -0.6}) < 1e-15);
  // The derivative carries the piece-count chain factor: 4 pieces of side
  // 1.2 give |gamma'| = 4.8 everywhere.
  CHECK(std::abs(sq.derivative_at(0.1) - Cplx{4.8, 0}) < 1e-15);
  CHECK(std::abs(sq.derivative_at(0.3) - Cplx{0, 4.8}) < 1e-15);
  CHECK(sq.closed());
  CHECK(sq.arclength() == doctest::Approx(4.8).epsilon(1e-10));

  CHECK_THROWS_AS(sq.point_at(-0.01), std::domain_error);
  CHECK_THROWS_AS(sq.point_at(1.01), std::domain_error);
  CHECK_NOTHROW(sq.derivative_at(0.0));
  CHECK_NOTHROW(sq.derivative_at(1.0));
}

TEST_CASE("circles, arcs, and turn counts") {
  const Contour c = make_circle(Cplx{0, 0}, 1.0);
  CHECK(std::abs(c.point_at(0.0) - Cplx{1, 0}) < 1e-15);
  CHECK(std::abs(c.point_at(0.25) - Cplx{0, 1}) < 1e-14);
  CHECK(c.closed());
  CHECK(c.arclength() == doctest::Approx(2 * kPi).epsilon(1e-10));

  const Contour cw = make_circle(Cplx{0, 0}, 1.0, -1);
  CHECK(std::abs(cw.point_at(0.25) - Cplx{0, -1}) < 1e-14);

  const Contour triple = make_circle(Cplx{0, 0}, 1.0, 3);
  CHECK(triple.piece_count() == 3);
  CHECK(std::abs(triple.point_at(1.0 / 3) - triple.point_at(0.0)) < 1e-12);
  CHECK(triple.arclength() == doctest::Approx(6 * kPi).epsilon(1e-10));
  CHECK_THROWS_AS(make_circle(Cplx{0, 0}, 1.0, 0), std::invalid_argument);

  const Contour q = make_arc(Cplx{0, 0}, 1.0, 0.0, kPi / 2);
  CHECK(std::abs(q.start() - Cplx{1, 0}) < 1e-15);
  CHECK(std::abs(q.end() - Cplx{0, 1}) < 1e-15);
  CHECK_FALSE(q.closed());
  CHECK(q.arclength() == doctest::Approx(kPi / 2).epsilon(1e-10));

  const Contour seg = make_segment(Cplx{0, 0}, Cplx{3, 4});
  CHECK(seg.arclength() == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("reversal flips the parameterization pointwise") {
  const Contour a = concat(make_segment(Cplx{0, 0}, Cplx{1, 0}),
                           make_arc(Cplx{1, 1}, 1.0, -kPi / 2, 0.0));
  const Contour r = a.reversed();
  CHECK(std::abs(r.start() - a.end()) < 1e-15);
  CHECK(std::abs(r.end() - a.start()) < 1e-15);
  for (double t : {0.0, 0.1, 0.37, 0.5, 0.81, 1.0}) {
    CHECK(std::abs(r.point_at(t) - a.point_at(1.0 - t)) < 1e-12);
  }
  CHECK(std::abs(r.derivative_at(0.3) + a.derivative_at(0.7)) < 1e-12);
}

TEST_CASE("concatenation requires chained endpoints") {
  const Contour ab = concat(make_segment(Cplx{0, 0}, Cplx{1, 0}),
                            make_segment(Cplx{1, 0}, Cplx{1, 1}));
  CHECK(ab.piece_count() == 2);
  CHECK(std::abs(ab.point_at(0.5) - Cplx{1, 0}) < 1e-15);

  CHECK_THROWS_AS(concat(make_segment(Cplx{0, 0}, Cplx{1, 0}),
                         make_segment(Cplx{2, 0}, Cplx{3, 0})),
                  std::invalid_argument);
  // Slack below the chaining tolerance is accepted; above it is not.
  CHECK_NOTHROW(concat(make_segment(Cplx{0, 0}, Cplx{1, 0}),
                       make_segment(Cplx{1, 1e-13}, Cplx{2, 0})));
  CHECK_THROWS_AS(concat(make_segment(Cplx{0, 0}, Cplx{1, 0}),
                         make_segment(Cplx{1, 1e-10}, Cplx{2, 0})),
                  std::invalid_argument);
}

TEST_CASE("contour grammar") {
  const Contour s = parse_contour("seg(0,1)");
  CHECK(s.piece_count() == 1);
  CHECK(s.start() == Cplx{0, 0});
  CHECK(s.end() == Cplx{1, 0});

  const Contour c = parse_contour("circle(1+2i,0.5)");
  CHECK(std::abs(c.point_at(0.0) - Cplx{1.5, 2}) < 1e-15);
  CHECK(c.closed());

  const Contour c3 = parse_contour("circle(0,1,3)");
  CHECK(c3.piece_count() == 3);
  const Contour ccw = parse_contour("circle(0,1,-1)");
  CHECK(std::abs(ccw.point_at(0.25) - Cplx{0, -1}) < 1e-14);

  const Contour a = parse_contour("arc(0,1,0,3.141592653589793)");
  CHECK(std::abs(a.end() - Cplx{-1, 0}) < 1e-14);

  const Contour r = parse_contour("rev(seg(0,1))");
  CHECK(r.start() == Cplx{1, 0});
  CHECK(r.end() == Cplx{0, 0});

  const Contour chain = parse_contour(" seg(0,1) > seg(1,1+1i) ");
  CHECK(chain.piece_count() == 2);
  CHECK(std::abs(chain.end() - Cplx{1, 1}) < 1e-15);

  const Contour revchain = parse_contour("rev(seg(0,1)>seg(1,2i))");
  CHECK(std::abs(revchain.start() - Cplx{0, 2}) < 1e-15);
  CHECK(std::abs(revchain.end() - Cplx{0, 0}) < 1e-15);
}

TEST_CASE("contour grammar rejects malformed input") {
  CHECK_THROWS_AS(parse_contour(""), ParseError);
  CHECK_THROWS_AS(parse_contour("seg(0)"), ParseError);
  CHECK_THROWS_AS(parse_contour("blob(0,1)"), ParseError);
  CHECK_THROWS_AS(parse_contour("seg(0,1)>"), ParseError);
  CHECK_THROWS_AS(parse_contour("seg(0,1) extra"), ParseError);
  CHECK_THROWS_AS(parse_contour("circle(0,1,0)"), ParseError);
  CHECK_THROWS_AS(parse_contour("circle(0,-1)"), ParseError);
  // Pieces joined by > must chain end-to-start.
  CHECK_THROWS_AS(parse_contour("seg(0,1)>seg(2,3)"), ParseError);
  try {
    parse_contour("seg(0,1)>bad");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset >= 9);
  }
}
