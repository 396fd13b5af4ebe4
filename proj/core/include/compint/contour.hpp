#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "compint/scalar.hpp"

namespace compint {

// Straight segment from a to b on the local parameter t in [0, 1].
// A null arc (a == b) is allowed and contributes nothing.
struct SegmentPiece {
  Cplx a, b;
};

// Circular arc center + radius * e^{i theta(t)}, theta(t) interpolating
// theta0 -> theta1 linearly on [0, 1].  theta1 < theta0 traverses clockwise.
// radius must be > 0.
struct CircularPiece {
  Cplx center;
  double radius;
  double theta0, theta1;
};

using ArcPiece = std::variant<SegmentPiece, CircularPiece>;

Cplx piece_point(const ArcPiece& p, double t);
Cplx piece_derivative(const ArcPiece& p, double t);
Cplx piece_start(const ArcPiece& p);
Cplx piece_end(const ArcPiece& p);
ArcPiece piece_reversed(const ArcPiece& p);

// Endpoint chaining (and the closed() test) use this absolute tolerance.
inline constexpr double kChainTol = 1e-12;

// An ordered chain of arc pieces.  The global parameter t in [0, 1] is split
// uniformly across pieces; each piece keeps its own analytic derivative and
// the global derivative picks up the piece-count chain factor.
class Contour {
 public:
  explicit Contour(std::vector<ArcPiece> pieces);

  const std::vector<ArcPiece>& pieces() const { return pieces_; }
  std::size_t piece_count() const { return pieces_.size(); }

  // Throws std::domain_error for t outside [0, 1].
  Cplx point_at(double t) const;
  Cplx derivative_at(double t) const;

  Cplx start() const { return piece_start(pieces_.front()); }
  Cplx end() const { return piece_end(pieces_.back()); }
  bool closed() const;

  // Total arc length by adaptive Simpson on |derivative| (relative tolerance
  // 1e-10).
  double arclength() const;

  // Same geometry, opposite traversal: point_at(reversed(), t) equals
  // point_at(1 - t).
  Contour reversed() const;

 private:
  std::vector<ArcPiece> pieces_;
};

// Joins two contours traversed first-then-second.  Throws
// std::invalid_argument when a.end() and b.start() do not chain.
Contour concat(const Contour& a, const Contour& b);

Contour make_segment(Cplx a, Cplx b);
// Full circle(s) starting at angle 0; positive turns run counterclockwise,
// negative clockwise.  turns must be nonzero; |turns| > 1 produces one piece
// per turn.
Contour make_circle(Cplx center, double radius, int turns = 1);
Contour make_arc(Cplx center, double radius, double theta0, double theta1);

// Contour mini-language:
//
//   contour := term (">" term)*
//   term    := "seg(" c "," c ")"
//            | "circle(" c "," r ["," turns] ")"
//            | "arc(" c "," r "," theta0 "," theta1 ")"
//            | "rev(" contour ")"
//
// where c is a complex literal ("a+bi", no interior spaces) and r, theta are
// real literals.  "A > B" traverses A first, then B.  Throws ParseError.
Contour parse_contour(std::string_view source);

}  // namespace compint
