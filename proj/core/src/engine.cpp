#include "compint/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "compint/detail/quadrature.hpp"

namespace compint {

const char* status_name(Status s) {
  switch (s) {
    case Status::Converged: return "Converged";
    case Status::Diverged: return "Diverged";
    case Status::MaxRefinement: return "MaxRefinement";
  }
  return "?";
}

const char* method_name(Method m) {
  return m == Method::Riemann ? "riemann" : "ode";
}

Integrand integrand_of(const Expr& phi) {
  return [phi](const Cplx& s, const Cplx& z) {
    Bindings b;
    b.s = s;
    b.z = z;
    return phi.eval(b);
  };
}

Integrand integrand_of(const Expr& phi, Cplx w) {
  return [phi, w](const Cplx& s, const Cplx& z) {
    Bindings b;
    b.s = s;
    b.z = z;
    b.w = w;
    return phi.eval(b);
  };
}

DualIntegrand dual_integrand_of(const Expr& phi) {
  return [phi](const Cplx& s, const Cplx& z) {
    Bindings b;
    b.s = s;
    b.z = z;
    return phi.eval_dual(b);
  };
}

DualIntegrand dual_integrand_of(const Expr& phi, Cplx w) {
  return [phi, w](const Cplx& s, const Cplx& z) {
    Bindings b;
    b.s = s;
    b.z = z;
    b.w = w;
    return phi.eval_dual(b);
  };
}

Cplx inner_compose(std::span<const std::function<Cplx(Cplx)>> maps, Cplx z) {
  for (auto it = maps.rbegin(); it != maps.rend(); ++it) z = (*it)(z);
  return z;
}

Cplx outer_compose(std::span<const std::function<Cplx(Cplx)>> maps, Cplx z) {
  for (const auto& m : maps) z = m(z);
  return z;
}

Cplx riemann_partial(const Integrand& phi, const Contour& c, Cplx z, long n,
                     double cap) {
  if (n <= 0) throw std::invalid_argument("riemann_partial needs n >= 1");
  for (const ArcPiece& piece : c.pieces()) {
    const double inv_n = 1.0 / static_cast<double>(n);
    Cplx prev = piece_point(piece, 0.0);
    for (long j = 0; j < n; ++j) {
      const double t1 = static_cast<double>(j + 1) * inv_n;
      const double tm = (static_cast<double>(j) + 0.5) * inv_n;
      const Cplx next = piece_point(piece, t1);
      z += phi(piece_point(piece, tm), z) * (next - prev);
      prev = next;
      if (is_divergent(z) || std::abs(z) > cap) return divergence_sentinel();
    }
  }
  return z;
}

CompResult comp_integral(const Integrand& phi, const Contour& c, Cplx z,
                         const EngineConfig& cfg) {
  const double inf = std::numeric_limits<double>::infinity();
  long n = cfg.initial_n;
  Cplx y_prev = riemann_partial(phi, c, z, n, cfg.divergence_cap);
  Cplx extrap{};     // first-order Richardson extrapolant 2*Y(2n) - Y(n)
  bool have_extrap = false;
  Cplx y_cur = y_prev;
  double diff = inf;
  for (int d = 0; d < cfg.max_doublings; ++d) {
    const long n2 = n * 2;
    y_cur = riemann_partial(phi, c, z, n2, cfg.divergence_cap);
    if (!is_divergent(y_prev) && !is_divergent(y_cur)) {
      const Cplx r = 2.0 * y_cur - y_prev;
      if (have_extrap) {
        diff = std::abs(r - extrap);
        if (diff <= cfg.tol)
          return {r, Status::Converged, n2, diff, Method::Riemann};
      }
      extrap = r;
      have_extrap = true;
    } else {
      have_extrap = false;
      diff = inf;
    }
    y_prev = y_cur;
    n = n2;
  }
  if (is_divergent(y_cur))
    return {divergence_sentinel(), Status::Diverged, n, inf, Method::Riemann};
  return {have_extrap ? extrap : y_cur, Status::MaxRefinement, n, diff,
          Method::Riemann};
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with FSAL on a fixed-size complex state.

namespace {

constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
// b - b* (error) coefficients, k7 = f(t+h, y5) via FSAL.
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

template <std::size_t N>
using State = std::array<Cplx, N>;

template <std::size_t N>
double state_norm(const State<N>& s) {
  double m = 0.0;
  for (const Cplx& v : s) m = std::max(m, std::abs(v));
  return m;
}

template <std::size_t N>
bool state_finite(const State<N>& s) {
  for (const Cplx& v : s)
    if (is_divergent(v)) return false;
  return true;
}

template <std::size_t N>
struct PieceOutcome {
  State<N> y;
  Status status;
  long steps;
  double err_acc;
};

// Integrates y' = rhs(t, y) over t in [0, 1].  rhs must set ok=false on a
// non-finite evaluation at the current state.
template <std::size_t N, class Rhs>
PieceOutcome<N> integrate_unit_interval(const Rhs& rhs, State<N> y,
                                        const EngineConfig& cfg) {
  constexpr double kMinStep = 1e-14;
  const double atol = cfg.ode_abs_tol, rtol = cfg.ode_rel_tol;
  double t = 0.0;
  double h = 0.05;
  long steps = 0;
  double err_acc = 0.0;

  State<N> k1;
  if (!rhs(t, y, k1) || !state_finite(k1))
    return {y, Status::Diverged, steps, err_acc};

  while (t < 1.0) {
    h = std::min(h, 1.0 - t);
    State<N> k2, k3, k4, k5, k6, k7, yt, y5;
    bool ok = true;
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * kA21 * k1[i];
    ok = ok && rhs(t + h / 5.0, yt, k2);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
    ok = ok && rhs(t + 3.0 * h / 10.0, yt, k3);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
    ok = ok && rhs(t + 4.0 * h / 5.0, yt, k4);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] +
                          kA54 * k4[i]);
    ok = ok && rhs(t + 8.0 * h / 9.0, yt, k5);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                          kA64 * k4[i] + kA65 * k5[i]);
    ok = ok && rhs(t + h, yt, k6);
    for (std::size_t i = 0; i < N; ++i)
      y5[i] = y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] +
                          kB5 * k5[i] + kB6 * k6[i]);
    ok = ok && rhs(t + h, y5, k7);

    bool finite = ok && state_finite(y5) && state_finite(k7);
    double err = 0.0;
    if (finite) {
      State<N> ev;
      for (std::size_t i = 0; i < N; ++i)
        ev[i] = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] +
                     kE6 * k6[i] + kE7 * k7[i]);
      err = state_norm(ev);
      if (!std::isfinite(err)) finite = false;
    }

    if (finite) {
      const double scale =
          atol + rtol * std::max(state_norm(y), state_norm(y5));
      const double ratio = err / scale;
      if (ratio <= 1.0) {
        t += h;
        y = y5;
        k1 = k7;  // FSAL
        ++steps;
        err_acc += err;
        if (state_norm(y) > cfg.divergence_cap)
          return {y, Status::Diverged, steps, err_acc};
        const double grow =
            ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        continue;
      }
      h *= std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 1.0);
    } else {
      // Trial state misbehaved; retreat.  If the current state itself is at
      // a pole the first rhs call catches it, so persistent failure here is
      // a step-size collapse.
      h *= 0.25;
    }
    if (h < kMinStep) {
      const Status st = finite ? Status::MaxRefinement : Status::Diverged;
      return {y, st, steps, err_acc};
    }
  }
  return {y, Status::Converged, steps, err_acc};
}

template <std::size_t N, class PieceRhs>
CompResult run_ode(const Contour& c, State<N> y0, const PieceRhs& make_rhs,
                   const EngineConfig& cfg, State<N>* final_state) {
  long steps = 0;
  double err_acc = 0.0;
  State<N> y = y0;
  for (const ArcPiece& piece : c.pieces()) {
    auto rhs = make_rhs(piece);
    PieceOutcome<N> out = integrate_unit_interval<N>(rhs, y, cfg);
    steps += out.steps;
    err_acc += out.err_acc;
    y = out.y;
    if (out.status != Status::Converged) {
      if (final_state) *final_state = y;
      const Cplx value = out.status == Status::Diverged
                             ? divergence_sentinel()
                             : y[0];
      return {value, out.status, steps, err_acc, Method::Ode};
    }
  }
  if (final_state) *final_state = y;
  return {y[0], Status::Converged, steps, err_acc, Method::Ode};
}

}  // namespace

CompResult comp_integral_ode(const Integrand& phi, const Contour& c, Cplx z,
                             const EngineConfig& cfg) {
  State<1> y0{z};
  auto make_rhs = [&phi](const ArcPiece& piece) {
    return [&phi, piece](double t, const State<1>& y, State<1>& out) {
      const Cplx g = piece_point(piece, t);
      const Cplx dg = piece_derivative(piece, t);
      const Cplx f = phi(g, y[0]);
      out[0] = f * dg;
      return !is_divergent(f);
    };
  };
  return run_ode<1>(c, y0, make_rhs, cfg, nullptr);
}

CompResult comp_integral_default(const Integrand& phi, const Contour& c,
                                 Cplx z, const EngineConfig& cfg) {
  return comp_integral_ode(phi, c, z, cfg);
}

DerivativeResult comp_integral_with_derivative(const DualIntegrand& phi,
                                               const Contour& c, Cplx z,
                                               const EngineConfig& cfg) {
  State<2> y0{z, Cplx{0.0, 0.0}};
  auto make_rhs = [&phi](const ArcPiece& piece) {
    return [&phi, piece](double t, const State<2>& y, State<2>& out) {
      const Cplx g = piece_point(piece, t);
      const Cplx dg = piece_derivative(piece, t);
      const DualValue f = phi(g, y[0]);
      out[0] = f.value * dg;
      out[1] = f.deriv * dg;
      return !is_divergent(f.value) && !is_divergent(f.deriv);
    };
  };
  State<2> yf{};
  CompResult base = run_ode<2>(c, y0, make_rhs, cfg, &yf);
  DerivativeResult r;
  r.integral = base;
  r.derivative = base.status == Status::Converged ? std::exp(yf[1])
                                                  : divergence_sentinel();
  return r;
}

Cplx local_inverse(const DualIntegrand& phi, const Contour& c, Cplx target,
                   Cplx guess, const EngineConfig& cfg) {
  const double goal = 10.0 * cfg.tol;
  Cplx z = guess;
  for (int it = 0; it < 50; ++it) {
    DerivativeResult r = comp_integral_with_derivative(phi, c, z, cfg);
    if (r.integral.status != Status::Converged)
      throw std::runtime_error(
          "local_inverse: evaluation did not converge at an iterate");
    const Cplx residual = r.integral.value - target;
    if (std::abs(residual) <= goal) return z;
    if (std::abs(r.derivative) < 1e-14)
      throw std::runtime_error("local_inverse: derivative vanished");
    z -= residual / r.derivative;
  }
  throw std::runtime_error("local_inverse: no convergence in 50 iterations");
}

std::vector<CompResult> classify_grid(const Integrand& phi, const Contour& c,
                                      const GridSpec& grid,
                                      const EngineConfig& cfg, Method method,
                                      int threads) {
  if (grid.nx < 1 || grid.ny < 1)
    throw std::invalid_argument("classify_grid needs nx, ny >= 1");
  const std::size_t total =
      static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny);
  std::vector<CompResult> out(total);

  unsigned n_threads = threads > 0
                           ? static_cast<unsigned>(threads)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(grid.ny));

  const auto coord = [&](int ix, int iy) {
    const double re =
        grid.nx == 1 ? grid.re_min
                     : grid.re_min + (grid.re_max - grid.re_min) * ix /
                                         static_cast<double>(grid.nx - 1);
    const double im =
        grid.ny == 1 ? grid.im_min
                     : grid.im_min + (grid.im_max - grid.im_min) * iy /
                                         static_cast<double>(grid.ny - 1);
    return Cplx{re, im};
  };

  std::atomic<int> next_row{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto worker = [&]() {
    try {
      for (;;) {
        const int iy = next_row.fetch_add(1);
        if (iy >= grid.ny) return;
        for (int ix = 0; ix < grid.nx; ++ix) {
          const Cplx z = coord(ix, iy);
          out[static_cast<std::size_t>(iy) * grid.nx + ix] =
              method == Method::Riemann ? comp_integral(phi, c, z, cfg)
                                        : comp_integral_ode(phi, c, z, cfg);
        }
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      next_row.store(grid.ny);  // stop remaining rows promptly
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

double normal_sum_bound(const Integrand& phi, const Contour& c,
                        double K_radius, Cplx z0) {
  if (!(K_radius >= 0.0))
    throw std::invalid_argument("normal_sum_bound needs K_radius >= 0");
  constexpr int kBoundarySamples = 64;
  const auto ring_max = [&](const Cplx& s, double L) {
    double m = 0.0;
    for (int j = 0; j < kBoundarySamples; ++j) {
      const double th = 2.0 * kPi * j / kBoundarySamples;
      const Cplx z = z0 + L * Cplx{std::cos(th), std::sin(th)};
      m = std::max(m, std::abs(phi(s, z)));
    }
    return m;
  };
  const auto bound_for = [&](double L) {
    double total = 0.0;
    for (const ArcPiece& piece : c.pieces()) {
      total += detail::adaptive_simpson(
          [&](double t) {
            return ring_max(piece_point(piece, t), L) *
                   std::abs(piece_derivative(piece, t));
          },
          0.0, 1.0, 1e-9);
    }
    return total;
  };

  // Self-consistent padding: the composite stays within kappa of the start,
  // so the sup must be taken over the padded disk.
  double kappa = 0.0;
  for (int it = 0; it < 12; ++it) {
    const double next = bound_for(K_radius + kappa);
    if (next <= kappa * (1.0 + 1e-9) + 1e-12) return next;
    kappa = next;
  }
  return kappa;
}

Cplx fixed_point_coefficient(const Expr& phi, const Contour& c, Cplx z0,
                             const EngineConfig& cfg) {
  // The fixed point must hold along the whole contour.
  constexpr int kSamples = 65;
  for (int j = 0; j <= kSamples; ++j) {
    const double t = static_cast<double>(j) / kSamples;
    Bindings b;
    b.s = c.point_at(t);
    b.z = z0;
    if (std::abs(phi.eval(b)) > 1e-12)
      throw std::invalid_argument(
          "fixed_point_coefficient: phi(s, z0) is not identically zero on "
          "the contour");
  }

  CompResult fixed = comp_integral_ode(integrand_of(phi), c, z0, cfg);
  if (fixed.status != Status::Converged ||
      std::abs(fixed.value - z0) > std::max(1e-8, 10.0 * cfg.tol))
    throw std::runtime_error(
        "fixed_point_coefficient: composite does not fix z0");

  // Additive integral of the z-derivative along the contour, piecewise:
  // trapezoid doubling on circular arcs, adaptive Simpson on segments.
  Cplx a{0.0, 0.0};
  for (const ArcPiece& piece : c.pieces()) {
    const auto f = [&](double t) {
      Bindings b;
      b.s = piece_point(piece, t);
      b.z = z0;
      return phi.eval_dual(b).deriv * piece_derivative(piece, t);
    };
    if (std::holds_alternative<CircularPiece>(piece))
      a += detail::trapezoid_doubling(f, 0.0, 1.0, 256, 1e-12);
    else
      a += detail::adaptive_simpson(f, 0.0, 1.0, 1e-12);
  }
  return std::exp(a);
}

}  // namespace compint
