#include "compint/residue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <variant>

#include "compint/detail/quadrature.hpp"

namespace compint {

namespace {

// Path integrand f(gamma(t)) * gamma'(t) on a single piece, poisoned samples
// rejected eagerly so quadrature never averages a NaN away.
auto piece_integrand(const std::function<Cplx(Cplx)>& f,
                     const ArcPiece& piece) {
  return [&f, piece](double t) {
    const Cplx g = piece_point(piece, t);
    const Cplx v = f(g) * piece_derivative(piece, t);
    if (is_divergent(v))
      throw std::runtime_error(
          "additive contour integral: non-finite sample at path point " +
          format_complex(g));
    return v;
  };
}

CompResult eval_by(Method method, const Integrand& phi, const Contour& c,
                   Cplx z, const EngineConfig& cfg) {
  return method == Method::Riemann ? comp_integral(phi, c, z, cfg)
                                   : comp_integral_ode(phi, c, z, cfg);
}

Status combine_status(Status a, Status b) {
  if (a == Status::Diverged || b == Status::Diverged) return Status::Diverged;
  if (a == Status::MaxRefinement || b == Status::MaxRefinement)
    return Status::MaxRefinement;
  return Status::Converged;
}

}  // namespace

Cplx additive_contour_integral(const std::function<Cplx(Cplx)>& f,
                               const Contour& c, int n) {
  if (n < 2)
    throw std::invalid_argument("additive_contour_integral: n must be >= 2");
  Cplx total{0.0, 0.0};
  for (const ArcPiece& piece : c.pieces()) {
    const auto g = piece_integrand(f, piece);
    if (std::holds_alternative<CircularPiece>(piece)) {
      total += detail::trapezoid_doubling(g, 0.0, 1.0,
                                          static_cast<std::size_t>(n), 1e-12);
    } else {
      total += detail::adaptive_simpson(g, 0.0, 1.0, 1e-12);
    }
  }
  return total;
}

Cplx additive_contour_integral(const Expr& f, const Contour& c,
                               const Bindings& params, int n) {
  Bindings bound = params;
  auto fn = [&f, bound](Cplx s) mutable {
    bound.s = s;
    return f.eval(bound);
  };
  return additive_contour_integral(fn, c, n);
}

Cplx cauchy_taylor_coeff(const std::function<Cplx(Cplx)>& p, Cplx center,
                         int k, double radius, int n) {
  if (k < 0) throw std::invalid_argument("cauchy_taylor_coeff: k must be >= 0");
  if (!(radius > 0.0))
    throw std::invalid_argument("cauchy_taylor_coeff: radius must be > 0");
  if (n < 8) n = 8;

  // (1/(2 pi)) * integral over theta of p(center + r e^{i theta})
  //                                  * r^{-k} e^{-i k theta},
  // by the m-node periodic trapezoid rule (equal-weight sum).
  const auto pass = [&](long m) {
    Cplx acc{0.0, 0.0};
    const double rk = std::pow(radius, static_cast<double>(k));
    for (long j = 0; j < m; ++j) {
      const double theta = 2.0 * kPi * static_cast<double>(j) /
                           static_cast<double>(m);
      const Cplx e{std::cos(theta), std::sin(theta)};
      const Cplx sample = p(center + radius * e);
      if (is_divergent(sample))
        throw std::runtime_error(
            "cauchy_taylor_coeff: non-finite sample on the circle");
      const double kt = static_cast<double>(k) * theta;
      acc += sample * Cplx{std::cos(kt), -std::sin(kt)};
    }
    return acc / (static_cast<double>(m) * rk);
  };

  Cplx prev = pass(n);
  for (long m = 2L * n; m <= (1L << 20); m *= 2) {
    const Cplx cur = pass(m);
    if (std::abs(cur - prev) <= 1e-12 * (1.0 + std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

Cplx cauchy_taylor_coeff(const Expr& p, Cplx center, int k, double radius,
                         int n) {
  auto fn = [&p](Cplx s) {
    Bindings b;
    b.s = s;
    return p.eval(b);
  };
  return cauchy_taylor_coeff(fn, center, k, radius, n);
}

void validate_pole(const Integrand& phi, const PoleSpec& pole, Cplx z_hint) {
  if (pole.order < 1)
    throw std::invalid_argument("pole order must be >= 1");
  // Scale-invariant test: shrinking the distance by 100x must grow |phi| by
  // at least 50x. An order-k pole grows by 100^k, a regular point by ~1, and
  // a logarithmic singularity by ~1.5, so constant prefactors cannot fool it.
  constexpr double kFar = 1e-4;
  constexpr double kNear = 1e-6;
  constexpr double kGrowth = 50.0;
  const Cplx fallbacks[] = {z_hint, Cplx{1.0, 0.0}, Cplx{0.3, 0.2},
                            Cplx{0.0, 1.0}};
  for (const Cplx& z : fallbacks) {
    for (int j = 0; j < 8; ++j) {
      const double theta = 2.0 * kPi * j / 8.0 + 0.37;  // avoid axis zeros
      const Cplx dir{std::cos(theta), std::sin(theta)};
      const double near_mag = std::abs(phi(pole.location + kNear * dir, z));
      if (!std::isfinite(near_mag)) return;
      const double far_mag = std::abs(phi(pole.location + kFar * dir, z));
      if (near_mag > 0.0 && std::isfinite(far_mag) &&
          near_mag > kGrowth * far_mag)
        return;
    }
  }
  throw std::invalid_argument(
      "pole validation failed: integrand does not blow up approaching " +
      format_complex(pole.location));
}

ResidualValue::ResidualValue(Integrand phi, PoleSpec pole, double delta,
                             EngineConfig cfg, Method method, bool validate)
    : phi_(std::move(phi)),
      pole_(std::move(pole)),
      delta_(delta),
      cfg_(cfg),
      method_(method) {
  if (!phi_) throw std::invalid_argument("residual: empty integrand");
  if (!(delta_ > 0.0))
    throw std::invalid_argument("residual: delta must be > 0");
  if (validate) validate_pole(phi_, pole_);
}

ResidualResult ResidualValue::evaluate(Cplx z) const {
  const CompResult a =
      eval_by(method_, phi_, make_circle(pole_.location, delta_), z, cfg_);
  const CompResult b = eval_by(
      method_, phi_, make_circle(pole_.location, delta_ * 0.5), z, cfg_);

  ResidualResult out;
  out.value = a.value;
  out.recheck = b.value;
  out.status = combine_status(a.status, b.status);
  out.error_estimate = (is_divergent(a.value) || is_divergent(b.value))
                           ? std::numeric_limits<double>::infinity()
                           : std::abs(a.value - b.value);
  out.delta_consistent = out.status == Status::Converged &&
                         out.error_estimate <= 100.0 * cfg_.tol;
  return out;
}

Cplx ResidualValue::operator()(Cplx z) const {
  const ResidualResult r = evaluate(z);
  if (r.status != Status::Converged)
    throw std::runtime_error("residual at " + format_complex(pole_.location) +
                             ": integral status " + status_name(r.status) +
                             " at z = " + format_complex(z));
  if (!r.delta_consistent)
    throw std::runtime_error(
        "residual at " + format_complex(pole_.location) +
        ": radius-dependent value (delta gave " + format_complex(r.value) +
        ", delta/2 gave " + format_complex(r.recheck) +
        "); the declared pole data is likely inconsistent with the integrand");
  return r.value;
}

ResidualResult compositional_residual(const Integrand& phi,
                                      const PoleSpec& pole, Cplx z,
                                      double delta, const EngineConfig& cfg,
                                      Method method, bool validate) {
  if (validate) validate_pole(phi, pole, z);
  const ResidualValue rv(phi, pole, delta, cfg, method, /*validate=*/false);
  return rv.evaluate(z);
}

ResidualResult compositional_residual(const Expr& f, const PoleSpec& pole,
                                      Cplx z, double delta,
                                      const EngineConfig& cfg, Method method,
                                      bool validate) {
  return compositional_residual(integrand_of(f), pole, z, delta, cfg, method,
                                validate);
}

double default_residual_delta(const PoleSpec& pole,
                              std::span<const PoleSpec> others) {
  double nearest = std::numeric_limits<double>::infinity();
  for (const PoleSpec& other : others) {
    const double d = std::abs(other.location - pole.location);
    if (d < 1e-15) continue;  // the pole itself (or a duplicate declaration)
    nearest = std::min(nearest, d);
  }
  if (!std::isfinite(nearest)) return 0.5;
  // Shave the half-distance so the strict "delta < half the gap" precondition
  // holds and two default circles can never touch.
  return std::min(0.5 * nearest * (1.0 - 1e-9), 0.5);
}

ResidualFamily family_for_power(int n) {
  switch (n) {
    case 0: return ResidualFamily::Constant;
    case 1: return ResidualFamily::Linear;
    case 2: return ResidualFamily::Square;
    default:
      if (n >= 3) return ResidualFamily::PowerN;
      throw std::invalid_argument("residual family: power n must be >= 0");
  }
}

ClosedFormResult closed_form_residual_from_coeff(int n, Cplx c, Cplx z) {
  ClosedFormResult out;
  out.coefficient = c;
  const Cplx tau = Cplx{0.0, 2.0 * kPi} * c;  // 2 pi i c

  switch (family_for_power(n)) {
    case ResidualFamily::Constant:
      out.value = z + tau;
      return out;
    case ResidualFamily::Linear:
      out.value = z * std::exp(tau);
      return out;
    case ResidualFamily::Square: {
      if (z == Cplx{0.0, 0.0}) {
        out.value = z;  // fixed point of the family
        return out;
      }
      const Cplx den = 1.0 / z - tau;
      out.value = den == Cplx{0.0, 0.0} ? divergence_sentinel() : 1.0 / den;
      return out;
    }
    case ResidualFamily::PowerN:
      break;
  }

  // n >= 3:  Y^(1-n) = z^(1-n) + (1-n) * tau.  Written relative to the
  // start value, Y = z * (1 + (1-n) tau z^(n-1))^(-1/(n-1)) with the
  // principal power.  That branch is continuous from Y(0) = z for every
  // start value (including Re z < 0), so it matches the analytic
  // continuation of the flow as long as the straight path from 1 to the
  // final argument stays off the negative real axis.
  if (z == Cplx{0.0, 0.0}) {
    out.value = z;
    return out;
  }
  const Cplx w = static_cast<double>(1 - n) * tau * ipow(z, n - 1);
  Cplx base = 1.0 + w;
  // A real path keeps the upper-lip convention at the cut: clear any -0
  // imaginary part picked up from component-wise multiplication.
  if (base.imag() == 0.0) base = Cplx{base.real(), 0.0};
  if (base == Cplx{0.0, 0.0}) {
    out.value = divergence_sentinel();
    out.branch_flagged = true;
    return out;
  }

  // The path 1 + t w is real only when w is, so it crosses the cut exactly
  // when w reaches past -1; also flag a final argument that lands within
  // rounding of the cut, where the principal value is ambiguous.
  if (w.imag() == 0.0 && w.real() <= -1.0) out.branch_flagged = true;
  if (kPi - std::abs(std::arg(base)) < 1e-8) out.branch_flagged = true;

  out.value =
      z * std::pow(base, Cplx{-1.0 / static_cast<double>(n - 1), 0.0});
  return out;
}

ClosedFormResult closed_form_residual(ResidualFamily family, const Expr& p,
                                      Cplx zeta, int k, int n, Cplx z,
                                      double radius) {
  if (family_for_power(n) != family)
    throw std::invalid_argument(
        "closed_form_residual: family is inconsistent with the power n");
  const Cplx c = cauchy_taylor_coeff(p, zeta, k, radius);
  return closed_form_residual_from_coeff(n, c, z);
}

ConjugacyReport conjugacy_check(const Integrand& phi, const Contour& gamma,
                                const Contour& loop2, const Contour& tau,
                                std::span<const Cplx> probes,
                                const EngineConfig& cfg, Method method,
                                double tol) {
  const auto run = [&](const Contour& c, Cplx z) {
    const CompResult r = eval_by(method, phi, c, z, cfg);
    if (r.status != Status::Converged)
      throw std::runtime_error("conjugacy check: integral status " +
                               std::string(status_name(r.status)) +
                               " at z = " + format_complex(z));
    return r.value;
  };

  ConjugacyReport rep;
  rep.deviations.reserve(probes.size());
  for (const Cplx& z : probes) {
    const Cplx lhs = run(tau, run(gamma, z));
    const Cplx rhs = run(loop2, run(tau, z));
    const double dev = std::abs(lhs - rhs);
    rep.deviations.push_back(dev);
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  rep.pass = !probes.empty() && rep.max_deviation <= tol;
  return rep;
}

Cplx residual_class_compose(const Integrand& phi,
                            std::span<const PoleSpec> poles, Cplx z,
                            const EngineConfig& cfg, Method method) {
  if (poles.empty()) return z;

  std::vector<double> deltas(poles.size());
  for (std::size_t i = 0; i < poles.size(); ++i)
    deltas[i] = default_residual_delta(poles[i], poles);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    for (std::size_t j = i + 1; j < poles.size(); ++j) {
      const double gap = std::abs(poles[i].location - poles[j].location);
      if (!(deltas[i] + deltas[j] < gap))
        throw std::invalid_argument(
            "residual_class_compose: circles about " +
            format_complex(poles[i].location) + " and " +
            format_complex(poles[j].location) + " overlap");
    }
  }

  std::vector<std::function<Cplx(Cplx)>> maps;
  maps.reserve(poles.size());
  for (std::size_t i = 0; i < poles.size(); ++i) {
    maps.emplace_back(
        [rv = ResidualValue(phi, poles[i], deltas[i], cfg, method)](Cplx zz) {
          return rv(zz);
        });
  }
  return inner_compose(maps, z);
}

Cplx residual_class_compose(const Expr& f, std::span<const PoleSpec> poles,
                            Cplx z, const EngineConfig& cfg, Method method) {
  return residual_class_compose(integrand_of(f), poles, z, cfg, method);
}

WindingResult winding_compose(const Integrand& phi, const PoleSpec& pole,
                              int turns, Cplx z, double delta,
                              const EngineConfig& cfg, Method method,
                              double tol) {
  if (turns < 1)
    throw std::invalid_argument("winding_compose: turns must be >= 1");
  const ResidualValue rv(phi, pole, delta, cfg, method);

  Cplx composed = z;
  for (int t = 0; t < turns; ++t) composed = rv(composed);

  const CompResult direct =
      eval_by(method, phi, make_circle(pole.location, delta, turns), z, cfg);
  if (direct.status != Status::Converged)
    throw std::runtime_error("winding_compose: multi-turn integral status " +
                             std::string(status_name(direct.status)));

  WindingResult out;
  out.composed = composed;
  out.multiturn = direct.value;
  out.deviation = std::abs(composed - direct.value);
  if (out.deviation > tol)
    throw std::runtime_error(
        "winding_compose: multi-turn loop and composed single turns disagree "
        "by " +
        std::to_string(out.deviation));
  return out;
}

}  // namespace compint
