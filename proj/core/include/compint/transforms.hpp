#pragma once

// Identities built on top of the traversal-order integral: the additive
// homomorphism, Taylor-term composition, semigroup evaluation, derived
// residuals f[h](w,z) = (integral of h(w,s)*phi(s,z) over a closed loop,
// traversal order) and their Fourier/Laplace transforms, Poisson composition,
// and an integral-interchange check.
//
// The transform integrals are themselves traversal-order integrals over real
// segments; only the "logarithm" of a derived residual is an additive
// (classical) contour integral.

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "compint/contour.hpp"
#include "compint/engine.hpp"
#include "compint/expr.hpp"
#include "compint/residue.hpp"
#include "compint/scalar.hpp"

namespace compint {

// Truncation and quadrature parameters for the transform integrals.
struct TransformConfig {
  double truncation = 8.0;        // initial half-width T of the w-window
  int quad_points_per_unit = 64;  // classical quadrature density for profiles
  double tail_bound_target = 1e-10;  // truncation-error budget
};

// Two-sided comparison outcome shared by the identity checks.
struct PairReport {
  Cplx lhs = divergence_sentinel();
  Cplx rhs = divergence_sentinel();
  double deviation = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// Decay diagnostics for a derived residual's w-dependence: the bound
// |h(w,s)| <= A / (1 + Re(w)^2) with A estimated at w = 0, sampled on a
// probe grid of real w and path points s.
struct DecayReport {
  double amplitude = 0.0;    // A = max_s |h(0,s)|
  double worst_ratio = 0.0;  // max over probes of |h(w,s)| (1+Re(w)^2) / A
  bool pass = false;         // worst_ratio <= 1 + slack
};

// A perturbation h(w,s) attached to an integrand phi(s,z) and a closed loop:
// evaluable as f[h](w,z) (traversal-order loop integral of h(w,s)*phi(s,z))
// and as its "logarithm" (the additive loop integral of the same product).
//
// The separable form h(w,s) = profile(w) * fs(s) is first-class because
// transformed objects carry a numerically-computed profile; when additionally
// phi does not mention z, the inner additive integral is cached.
class DerivedResidual {
 public:
  using Profile = std::function<Cplx(Cplx)>;
  using HFunc = std::function<Cplx(Cplx /*w*/, Cplx /*s*/)>;

  // General form: h is an expression in (w, s), phi in (s, z).
  DerivedResidual(const Expr& h, const Expr& phi, Contour gamma,
                  std::vector<PoleSpec> poles);

  // Separable form with an expression or numeric profile.
  static DerivedResidual separable(const Expr& profile_w, const Expr& fs,
                                   const Expr& phi, Contour gamma,
                                   std::vector<PoleSpec> poles);
  static DerivedResidual separable(Profile profile, const Expr& fs,
                                   const Expr& phi, Contour gamma,
                                   std::vector<PoleSpec> poles);

  // Pointwise sum of the parts' h functions; phi, loop and pole list are
  // taken from parts[0] (the parts must share them).
  static DerivedResidual sum(std::span<const DerivedResidual> parts);

  bool is_separable() const { return static_cast<bool>(profile_); }
  const Contour& contour() const { return gamma_; }
  const std::vector<PoleSpec>& poles() const { return poles_; }

  Cplx h(Cplx w, Cplx s) const;
  Cplx profile(Cplx w) const;    // separable only
  Profile profile_fn() const;    // separable only
  Cplx phi(Cplx s, Cplx z) const { return phi_(s, z); }

  // Copy of this object with the profile replaced (separable only); the
  // s-factor, phi, loop and poles are kept.
  DerivedResidual with_profile(Profile p) const;

  // (s, z) -> h(w, s) * phi(s, z) with w frozen; the profile factor is
  // hoisted out when separable.
  Integrand integrand_at(Cplx w) const;

  // Additive loop integral of h(w,s) * phi(s,z) in s.
  Cplx log_value(Cplx w, Cplx z) const;

  // Traversal-order loop integral of the same product.
  CompResult value(Cplx w, Cplx z, const EngineConfig& cfg = {},
                   Method method = Method::Ode) const;

  DecayReport decay_report() const;
  // Throws std::runtime_error when the sampled decay bound fails.
  void require_moderate_decay() const;

 private:
  DerivedResidual(HFunc h, Profile profile, std::function<Cplx(Cplx)> fs,
                  Integrand phi, bool phi_z_free, Contour gamma,
                  std::vector<PoleSpec> poles);

  HFunc h_;
  Profile profile_;                // engaged iff separable
  std::function<Cplx(Cplx)> fs_;  // engaged iff separable
  Integrand phi_;
  bool phi_z_free_ = false;
  Contour gamma_;
  std::vector<PoleSpec> poles_;
  // Cache of the additive loop integral of fs*phi, valid when phi ignores z.
  // Mutated lazily; not safe for concurrent first use from several threads.
  mutable std::optional<Cplx> fs_phi_cache_;
};

// --- identity checks -------------------------------------------------------

// L = traversal integral of (p(s)+q(s))*g(z) over c, applied to z;
// R = the p-integral applied after the q-integral.  The theory makes them
// equal; the report carries both values.
PairReport homomorphism_check(const Expr& p, const Expr& q, const Expr& g,
                              const Contour& c, Cplx z,
                              const EngineConfig& cfg = {},
                              Method method = Method::Ode, double tol = 1e-8);

// Truncated Taylor-term composition: the K+1 residual maps of
// phi(s,z) * (w-zeta)^k / (s-zeta)^(k+1), k = 0..K, composed with the k = K
// term applied first.  The loop `gamma` must be a Jordan curve around zeta
// with |w - zeta| strictly inside it.
Cplx taylor_composition(const Expr& phi, Cplx zeta, Cplx w, int K,
                        const Contour& gamma, Cplx z,
                        const EngineConfig& cfg = {},
                        Method method = Method::Ode);

// F(w, z): traversal integral of w * fs(s) * phi(s, z) over gamma.
// Throws std::runtime_error if the evaluation does not converge.
Cplx semigroup_eval(const Expr& fs, const Expr& phi, const Contour& gamma,
                    Cplx w, Cplx z, const EngineConfig& cfg = {},
                    Method method = Method::Ode);

// Compares F(w, F(alpha, z)) with F(w + alpha, z).
PairReport semigroup_check(const Expr& fs, const Expr& phi,
                           const Contour& gamma, Cplx w, Cplx alpha, Cplx z,
                           const EngineConfig& cfg = {},
                           Method method = Method::Ode, double tol = 1e-7);

// Central difference in the strength parameter of the traversal integral of
// w * f(s) * phi(s, z) over sigma at w = 0 (step 1e-5), against the additive
// integral of f(s) * phi(s, z).  lhs = difference quotient, rhs = additive.
PairReport infinitesimal_derivative(const Expr& f, const Expr& phi,
                                    const Contour& sigma, Cplx z,
                                    const EngineConfig& cfg = {},
                                    Method method = Method::Ode,
                                    double tol = 1e-6);

// Interchange of the w- and s-integrals for separable h(w,s) = p(w)*fs(s):
// lhs freezes P = (additive integral of p over tau) and runs the traversal
// loop integral of P*fs*phi over gamma; rhs runs the traversal integral over
// tau of p(w) * (additive loop integral of fs*phi).
PairReport fubini_check(const Expr& p, const Expr& fs, const Expr& phi,
                        const Contour& gamma, const Contour& tau, Cplx z,
                        const EngineConfig& cfg = {},
                        Method method = Method::Ode, double tol = 1e-7);

// --- transforms ------------------------------------------------------------

// Classical Fourier-type quadrature of a scalar profile:
//   xi -> integral over [-T, T] of p(w) * exp(sign * 2*pi*i * w * xi) dw
// by the trapezoid rule with points_per_unit nodes per unit length.
DerivedResidual::Profile classical_profile_transform(
    DerivedResidual::Profile p, double truncation, int points_per_unit,
    int sign);

// Transform window: doubles T from tcfg.truncation until the sampled tail
// estimate 2 * M(T) * (1 + T^2) / T, with M(T) = max |log_value(+-T, z)|,
// meets tcfg.tail_bound_target (T capped at 128).
double choose_truncation(const DerivedResidual& d, Cplx z,
                         const TransformConfig& tcfg);

// f^(xi, z): traversal integral over the real segment [-T, T] of
// exp(-2*pi*i*xi*w) * log_value(w, z).  Requires the moderate-decay bound.
CompResult fourier_transform(const DerivedResidual& d, Cplx xi, Cplx z,
                             const TransformConfig& tcfg = {},
                             const EngineConfig& cfg = {},
                             Method method = Method::Ode);

// The transformed object: same fs, phi and loop, with the profile replaced
// by its classical Fourier transform.  Requires a separable input.
DerivedResidual fourier_hat(const DerivedResidual& d,
                            const TransformConfig& tcfg = {});

// Inverse direction: traversal integral over [-T, T] in xi of
// exp(+2*pi*i*xi*w) * log_value of the transformed object.
CompResult fourier_inverse(const DerivedResidual& d_hat, Cplx w, Cplx z,
                           const TransformConfig& tcfg = {},
                           const EngineConfig& cfg = {},
                           Method method = Method::Ode);

// Round trip through fourier_hat and fourier_inverse against the original
// f(w, z); lhs = original, rhs = round trip.
PairReport fourier_inversion_check(const DerivedResidual& d, Cplx w, Cplx z,
                                   const TransformConfig& tcfg = {},
                                   const EngineConfig& cfg = {},
                                   Method method = Method::Ode,
                                   double tol = 1e-5);

// Composes f(n, .) for n = -N..N (n = N applied first) and the same with the
// transformed object; the two agree by the Poisson composition identity.
PairReport poisson_composition(const DerivedResidual& d, int N, Cplx z,
                               const TransformConfig& tcfg = {},
                               const EngineConfig& cfg = {},
                               Method method = Method::Ode, double tol = 1e-5);

// Composition of the individually transformed parts against the transform of
// the summed perturbation (all parts must share phi and the loop).
PairReport fourier_linearity_check(std::span<const DerivedResidual> ds,
                                   Cplx xi, Cplx z,
                                   const TransformConfig& tcfg = {},
                                   const EngineConfig& cfg = {},
                                   Method method = Method::Ode,
                                   double tol = 1e-5);

// F(y, z): traversal integral over the real segment [0, T] of
// exp(-y*x) * log_value(x, z), Re(y) > 0; T doubles from tcfg.truncation
// until the sampled tail estimate |exp(-y*T) * log_value(T, z)| / Re(y)
// meets the target.  Throws std::runtime_error when the tail never decays.
CompResult laplace_transform(const DerivedResidual& d, Cplx y, Cplx z,
                             const TransformConfig& tcfg = {},
                             const EngineConfig& cfg = {},
                             Method method = Method::Ode);

// Splits h(w,s) into profile(w) * fs(s) when the expression factors that way
// syntactically (nested products, quotients and negations of single-variable
// factors); returns nothing otherwise.
std::optional<std::pair<Expr, Expr>> separate_ws(const Expr& h);

}  // namespace compint
