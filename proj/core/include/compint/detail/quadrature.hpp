#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

#include "compint/scalar.hpp"

namespace compint::detail {

inline double qnorm(double v) { return std::abs(v); }
inline double qnorm(const Cplx& v) { return std::abs(v); }

// Adaptive Simpson on [a, b] with the usual 1/15 Richardson error test.
// The tolerance is applied as tol * (1 + |whole|) per interval, which gives
// mixed absolute/relative control.
template <class F,
          class R = decltype(std::declval<F>()(0.0))>
R adaptive_simpson(const F& f, double a, double b, double tol,
                   int max_depth = 40) {
  struct Impl {
    const F& f;
    int max_depth;
    R rec(double a, double m, double b, const R& fa, const R& fm, const R& fb,
          const R& whole, double tol, int depth) const {
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const R flm = f(lm), frm = f(rm);
      const R left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const R right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const R sum = left + right;
      if (depth >= max_depth ||
          qnorm(sum - whole) <= 15.0 * tol * (1.0 + qnorm(sum)))
        return sum + (sum - whole) / 15.0;
      return rec(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
             rec(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
  };
  const double m = 0.5 * (a + b);
  const R fa = f(a), fm = f(m), fb = f(b);
  const R whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Impl{f, max_depth}.rec(a, m, b, fa, fm, fb, whole, tol, 0);
}

// Composite trapezoid with n intervals on [a, b].
template <class F, class R = decltype(std::declval<F>()(0.0))>
R trapezoid(const F& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  R acc = 0.5 * (f(a) + f(b));
  for (std::size_t j = 1; j < n; ++j) acc += f(a + h * static_cast<double>(j));
  return acc * h;
}

// Doubles the trapezoid node count until successive values agree to
// tol * (1 + |I|) or the cap is reached.  Spectrally accurate on smooth
// periodic integrands (full circles), plain second order otherwise.
template <class F, class R = decltype(std::declval<F>()(0.0))>
R trapezoid_doubling(const F& f, double a, double b, std::size_t n0,
                     double tol, std::size_t n_cap = (1u << 20)) {
  R prev = trapezoid(f, a, b, n0);
  for (std::size_t n = n0 * 2; n <= n_cap; n *= 2) {
    R cur = trapezoid(f, a, b, n);
    if (qnorm(cur - prev) <= tol * (1.0 + qnorm(cur))) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace compint::detail
