#pragma once

// Additive (classical) contour integration, Cauchy Taylor coefficients, and
// traversal-order residuals: the map obtained by integrating an integrand
// compositionally around a small circle enclosing one declared pole.
//
// Closed-form families cover integrands p(s)*z^n/(s-zeta)^(k+1):
//   n=0: z + 2*pi*i*c           n=1: z*exp(2*pi*i*c)
//   n=2: 1/(1/z - 2*pi*i*c)     n>=3: (1/z^(n-1) + (1-n)*2*pi*i*c)^(-1/(n-1))
// with c = p^(k)(zeta)/k! obtained from Cauchy quadrature.

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "compint/contour.hpp"
#include "compint/engine.hpp"
#include "compint/expr.hpp"
#include "compint/scalar.hpp"

namespace compint {

// A declared isolated singularity of the integrand in the s variable.
// `order` is the pole order (>= 1); an order-(k+1) pole pairs with the
// k-th Taylor coefficient of the remaining analytic factor.
struct PoleSpec {
  Cplx location{0.0, 0.0};
  int order = 1;
  std::string label;
};

// Classical line integral of f along the contour: sum over pieces of
// the parameter integral of f(gamma(t)) * gamma'(t).
//
// Circular pieces use the N-node trapezoid rule (spectrally accurate for
// integrands analytic near the arc), doubling N until two passes agree to
// 1e-12 * (1 + |I|). Straight pieces use adaptive Simpson at tol 1e-12.
// Throws std::runtime_error if a non-finite sample is encountered.
Cplx additive_contour_integral(const std::function<Cplx(Cplx)>& f,
                               const Contour& c, int n = 256);

// Expression overload: f is an expression in s; values for z and/or w may be
// supplied through `params` (the s binding is overwritten per sample).
Cplx additive_contour_integral(const Expr& f, const Contour& c,
                               const Bindings& params = {}, int n = 256);

// k-th Taylor coefficient of p about `center`:
//   (1/(2*pi*i)) * integral of p(s)/(s-center)^(k+1) over |s-center|=radius,
// by the N-node trapezoid rule (default 256), doubling until stable to
// 1e-12 * (1 + |c_k|). Requires p analytic on the closed disk.
Cplx cauchy_taylor_coeff(const std::function<Cplx(Cplx)>& p, Cplx center,
                         int k, double radius, int n = 256);
Cplx cauchy_taylor_coeff(const Expr& p, Cplx center, int k, double radius,
                         int n = 256);

// Sanity check for a declared pole: at distance 1e-6 from `location`, the
// integrand should exceed ~1e6 in magnitude (with 1% slack for order-1 poles
// with unit-size analytic part). Samples 8 directions around the pole for a
// set of z probes (`z_hint` first, then generic fallbacks) and passes if any
// sample blows up; an integrand may legitimately vanish at a particular z
// (e.g. a z^n factor at small |z|), hence the fallbacks.
// Throws std::invalid_argument when no probe shows the blow-up.
void validate_pole(const Integrand& phi, const PoleSpec& pole,
                   Cplx z_hint = Cplx{1.0, 0.0});

// Result of a residual evaluation at one z: the traversal-order integral over
// circle(pole, delta) plus a consistency re-evaluation at delta/2. The theory
// says the value is independent of delta; `delta_consistent` records whether
// the two radii agreed within 100 * cfg.tol.
struct ResidualResult {
  Cplx value = divergence_sentinel();    // from the delta circle
  Cplx recheck = divergence_sentinel();  // from the delta/2 circle
  double error_estimate = 0.0;           // |value - recheck|
  Status status = Status::Diverged;
  bool delta_consistent = false;
};

// An evaluable residual map z -> Y(z) for one pole, bundling the integrand,
// pole, radius and engine settings it was built from.
// Construction validates the declared pole location against the integrand
// (unless `validate` is false, for integrands engineered to vanish at the
// pole, e.g. Taylor terms weighted by a factor that may be zero).
class ResidualValue {
 public:
  ResidualValue(Integrand phi, PoleSpec pole, double delta,
                EngineConfig cfg = {}, Method method = Method::Ode,
                bool validate = true);

  // Full evaluation with the delta/2 re-check.
  ResidualResult evaluate(Cplx z) const;

  // Value-only evaluation; throws std::runtime_error if the integral did not
  // converge or the two radii disagree beyond 100 * cfg.tol.
  Cplx operator()(Cplx z) const;

  const PoleSpec& pole() const { return pole_; }
  double delta() const { return delta_; }
  const EngineConfig& config() const { return cfg_; }
  Method method() const { return method_; }

 private:
  Integrand phi_;
  PoleSpec pole_;
  double delta_;
  EngineConfig cfg_;
  Method method_;
};

// One-shot residual evaluation: traversal-order integral of f over
// circle(pole.location, delta) with the delta/2 re-check.
// Requires delta < half the distance from the pole to any other singularity
// of f (caller's responsibility). Throws like ResidualValue::operator().
ResidualResult compositional_residual(const Integrand& phi,
                                      const PoleSpec& pole, Cplx z,
                                      double delta,
                                      const EngineConfig& cfg = {},
                                      Method method = Method::Ode,
                                      bool validate = true);
ResidualResult compositional_residual(const Expr& f, const PoleSpec& pole,
                                      Cplx z, double delta,
                                      const EngineConfig& cfg = {},
                                      Method method = Method::Ode,
                                      bool validate = true);

// Default circle radius for a pole among `others`: half the distance to the
// nearest other pole (shaved by a relative epsilon so the strict-inequality
// precondition holds), capped at 0.5.
double default_residual_delta(const PoleSpec& pole,
                              std::span<const PoleSpec> others);

enum class ResidualFamily { Constant, Linear, Square, PowerN };

// Family consistent with the z-power n (Constant: n=0, Linear: n=1,
// Square: n=2, PowerN: n>=3). Throws std::invalid_argument on mismatch.
ResidualFamily family_for_power(int n);

struct ClosedFormResult {
  Cplx value = divergence_sentinel();
  Cplx coefficient{0.0, 0.0};  // c = p^(k)(zeta)/k!
  // PowerN only: set when the principal (n-1)-th root is taken with its
  // argument near, or moved across, the negative real axis, where the branch
  // choice is ambiguous. The value is still returned.
  bool branch_flagged = false;
};

// Closed-form residual for integrands p(s)*z^n/(s-zeta)^(k+1) (see the table
// at the top of this header). `radius` is the Cauchy-quadrature circle for
// the Taylor coefficient of p, which must be analytic on that closed disk.
ClosedFormResult closed_form_residual(ResidualFamily family, const Expr& p,
                                      Cplx zeta, int k, int n, Cplx z,
                                      double radius = 0.5);

// Same closed form with the coefficient c supplied directly.
ClosedFormResult closed_form_residual_from_coeff(int n, Cplx c, Cplx z);

// Conjugation identity between loops around the same pole: with Y_g, Y_h the
// loop integrals based at the start of `gamma` and `loop2`, and Y_t the
// integral along the connecting path `tau` (from gamma's base point to
// loop2's base point), the theory gives Y_t(Y_g(z)) = Y_h(Y_t(z)).
struct ConjugacyReport {
  std::vector<double> deviations;  // one per probe
  double max_deviation = 0.0;
  bool pass = false;
};

ConjugacyReport conjugacy_check(const Integrand& phi, const Contour& gamma,
                                const Contour& loop2, const Contour& tau,
                                std::span<const Cplx> probes,
                                const EngineConfig& cfg = {},
                                Method method = Method::Ode,
                                double tol = 1e-6);

// Composition of per-pole residual maps in the given order; the last pole's
// map is applied first (traversal-order composition of the list). Radii
// default per default_residual_delta; throws std::invalid_argument if any
// two circles overlap or touch.
Cplx residual_class_compose(const Integrand& phi,
                            std::span<const PoleSpec> poles, Cplx z,
                            const EngineConfig& cfg = {},
                            Method method = Method::Ode);
Cplx residual_class_compose(const Expr& f, std::span<const PoleSpec> poles,
                            Cplx z, const EngineConfig& cfg = {},
                            Method method = Method::Ode);

// A loop winding `turns` times about the pole equals the turns-fold
// self-composition of the single-turn residual. Evaluates both sides,
// throws std::runtime_error if they disagree beyond `tol`, and returns the
// composed value.
struct WindingResult {
  Cplx composed = divergence_sentinel();   // turns-fold self-composition
  Cplx multiturn = divergence_sentinel();  // direct multi-turn loop integral
  double deviation = 0.0;
};

WindingResult winding_compose(const Integrand& phi, const PoleSpec& pole,
                              int turns, Cplx z, double delta = 0.5,
                              const EngineConfig& cfg = {},
                              Method method = Method::Ode,
                              double tol = 1e-6);

}  // namespace compint
