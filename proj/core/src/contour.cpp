#include "compint/contour.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>

#include "compint/detail/quadrature.hpp"
#include "compint/expr.hpp"  // ParseError

namespace compint {

Cplx piece_point(const ArcPiece& p, double t) {
  if (const auto* s = std::get_if<SegmentPiece>(&p)) return s->a + (s->b - s->a) * t;
  const auto& c = std::get<CircularPiece>(p);
  const double th = c.theta0 + (c.theta1 - c.theta0) * t;
  return c.center + c.radius * Cplx{std::cos(th), std::sin(th)};
}

Cplx piece_derivative(const ArcPiece& p, double t) {
  if (const auto* s = std::get_if<SegmentPiece>(&p)) return s->b - s->a;
  const auto& c = std::get<CircularPiece>(p);
  const double span = c.theta1 - c.theta0;
  const double th = c.theta0 + span * t;
  return Cplx{0.0, 1.0} * (c.radius * span) * Cplx{std::cos(th), std::sin(th)};
}

Cplx piece_start(const ArcPiece& p) { return piece_point(p, 0.0); }
Cplx piece_end(const ArcPiece& p) { return piece_point(p, 1.0); }

ArcPiece piece_reversed(const ArcPiece& p) {
  if (const auto* s = std::get_if<SegmentPiece>(&p)) return SegmentPiece{s->b, s->a};
  const auto& c = std::get<CircularPiece>(p);
  return CircularPiece{c.center, c.radius, c.theta1, c.theta0};
}

Contour::Contour(std::vector<ArcPiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty())
    throw std::invalid_argument("contour needs at least one piece");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (const auto* c = std::get_if<CircularPiece>(&pieces_[i])) {
      if (!(c->radius > 0.0))
        throw std::invalid_argument("circular piece radius must be positive");
    }
    if (i > 0) {
      const double gap =
          std::abs(piece_end(pieces_[i - 1]) - piece_start(pieces_[i]));
      if (gap > kChainTol)
        throw std::invalid_argument(
            "contour pieces do not chain at junction " + std::to_string(i) +
            " (gap " + std::to_string(gap) + ")");
    }
  }
}

Cplx Contour::point_at(double t) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("contour parameter out of [0, 1]");
  const double m = static_cast<double>(pieces_.size());
  const double u = t * m;
  std::size_t i = static_cast<std::size_t>(u);
  if (i >= pieces_.size()) i = pieces_.size() - 1;
  return piece_point(pieces_[i], u - static_cast<double>(i));
}

Cplx Contour::derivative_at(double t) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("contour parameter out of [0, 1]");
  const double m = static_cast<double>(pieces_.size());
  const double u = t * m;
  std::size_t i = static_cast<std::size_t>(u);
  if (i >= pieces_.size()) i = pieces_.size() - 1;
  return piece_derivative(pieces_[i], u - static_cast<double>(i)) * m;
}

bool Contour::closed() const { return std::abs(start() - end()) <= kChainTol; }

double Contour::arclength() const {
  double total = 0.0;
  for (const auto& p : pieces_) {
    total += detail::adaptive_simpson(
        [&](double t) { return std::abs(piece_derivative(p, t)); }, 0.0, 1.0,
        1e-10);
  }
  return total;
}

Contour Contour::reversed() const {
  std::vector<ArcPiece> rev;
  rev.reserve(pieces_.size());
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it)
    rev.push_back(piece_reversed(*it));
  return Contour(std::move(rev));
}

Contour concat(const Contour& a, const Contour& b) {
  const double gap = std::abs(a.end() - b.start());
  if (gap > kChainTol)
    throw std::invalid_argument(
        "contour concatenation endpoint mismatch (gap " + std::to_string(gap) +
        ")");
  std::vector<ArcPiece> pieces = a.pieces();
  pieces.insert(pieces.end(), b.pieces().begin(), b.pieces().end());
  return Contour(std::move(pieces));
}

Contour make_segment(Cplx a, Cplx b) {
  return Contour(std::vector<ArcPiece>{SegmentPiece{a, b}});
}

Contour make_circle(Cplx center, double radius, int turns) {
  if (turns == 0) throw std::invalid_argument("circle needs a nonzero turn count");
  const double dir = turns > 0 ? 1.0 : -1.0;
  const int n = turns > 0 ? turns : -turns;
  std::vector<ArcPiece> pieces;
  pieces.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double th0 = dir * 2.0 * kPi * k;
    pieces.push_back(CircularPiece{center, radius, th0, th0 + dir * 2.0 * kPi});
  }
  return Contour(std::move(pieces));
}

Contour make_arc(Cplx center, double radius, double theta0, double theta1) {
  return Contour(std::vector<ArcPiece>{CircularPiece{center, radius, theta0, theta1}});
}

// ---------------------------------------------------------------------------
// Mini-language parser

namespace {

struct ContourParser {
  std::string_view src;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw ParseError("contour: " + msg + " at offset " + std::to_string(at), at);
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'", pos);
  }

  // Scans one argument token up to the next ',' or ')' (argument literals
  // never contain parentheses).
  std::string_view arg_token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() && src[pos] != ',' && src[pos] != ')') ++pos;
    std::size_t end = pos;
    while (end > start && std::isspace(static_cast<unsigned char>(src[end - 1])))
      --end;
    if (end == start) fail("expected an argument", start);
    return src.substr(start, end - start);
  }

  Cplx complex_arg() {
    std::size_t at = pos;
    try {
      return parse_complex(arg_token());
    } catch (const std::invalid_argument& e) {
      fail(e.what(), at);
    }
  }

  double real_arg() {
    std::size_t at = pos;
    Cplx v = complex_arg();
    if (v.imag() != 0.0) fail("expected a real number", at);
    return v.real();
  }

  int int_arg() {
    std::size_t at = pos;
    double v = real_arg();
    double r = std::round(v);
    if (std::abs(v - r) > 0.0) fail("expected an integer", at);
    return static_cast<int>(r);
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() && std::isalpha(static_cast<unsigned char>(src[pos])))
      ++pos;
    if (pos == start) fail("expected a contour term", start);
    return std::string(src.substr(start, pos - start));
  }

  Contour term() {
    std::size_t at = pos;
    std::string name = ident();
    expect('(');
    if (name == "seg") {
      Cplx a = complex_arg();
      expect(',');
      Cplx b = complex_arg();
      expect(')');
      return make_segment(a, b);
    }
    if (name == "circle") {
      Cplx c = complex_arg();
      expect(',');
      double r = real_arg();
      int turns = 1;
      if (eat(',')) turns = int_arg();
      expect(')');
      if (turns == 0) fail("circle turn count must be nonzero", at);
      if (!(r > 0.0)) fail("circle radius must be positive", at);
      return make_circle(c, r, turns);
    }
    if (name == "arc") {
      Cplx c = complex_arg();
      expect(',');
      double r = real_arg();
      expect(',');
      double th0 = real_arg();
      expect(',');
      double th1 = real_arg();
      expect(')');
      if (!(r > 0.0)) fail("arc radius must be positive", at);
      return make_arc(c, r, th0, th1);
    }
    if (name == "rev") {
      Contour inner = contour();
      expect(')');
      return inner.reversed();
    }
    fail("unknown contour term '" + name + "'", at);
  }

  Contour contour() {
    Contour acc = term();
    while (eat('>')) {
      std::size_t at = pos;
      Contour next = term();
      try {
        acc = concat(acc, next);
      } catch (const std::invalid_argument& e) {
        fail(e.what(), at);
      }
    }
    return acc;
  }
};

}  // namespace

Contour parse_contour(std::string_view source) {
  ContourParser p{source};
  Contour c = p.contour();
  p.skip_ws();
  if (p.pos != source.size())
    throw ParseError("contour: unexpected trailing input at offset " +
                         std::to_string(p.pos),
                     p.pos);
  return c;
}

}  // namespace compint
