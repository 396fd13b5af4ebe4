#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "compint/contour.hpp"
#include "compint/expr.hpp"
#include "compint/scalar.hpp"

namespace compint {

// phi(s, z): s is the contour sample, z the evolving composite value.
using Integrand = std::function<Cplx(const Cplx& s, const Cplx& z)>;
// Same, but also carrying d phi / d z for derivative flows.
using DualIntegrand = std::function<DualValue(const Cplx& s, const Cplx& z)>;

// Wraps an expression in s and z (w optional) as an engine integrand.
Integrand integrand_of(const Expr& phi);
Integrand integrand_of(const Expr& phi, Cplx w);
DualIntegrand dual_integrand_of(const Expr& phi);
DualIntegrand dual_integrand_of(const Expr& phi, Cplx w);

struct EngineConfig {
  double tol = 1e-10;            // refinement stopping tolerance
  int max_doublings = 24;        // Riemann doubling budget
  long initial_n = 16;           // first per-piece partition size
  double divergence_cap = 1e8;   // |z| beyond this counts as divergence
  double ode_abs_tol = 1e-12;    // ODE local error control, absolute
  double ode_rel_tol = 1e-10;    // ODE local error control, relative
};

enum class Status { Converged, Diverged, MaxRefinement };
enum class Method { Riemann, Ode };

const char* status_name(Status s);
const char* method_name(Method m);

struct CompResult {
  Cplx value;             // divergence sentinel when status == Diverged
  Status status;
  long n_final;           // finest partition (Riemann) or accepted steps (ODE)
  double error_estimate;  // successive-refinement or accumulated local error
  Method method;
};

// Applies maps right-to-left: the last entry acts first, so the first entry
// is outermost.  An empty list is the identity.
Cplx inner_compose(std::span<const std::function<Cplx(Cplx)>> maps, Cplx z);
// Applies maps left-to-right: the first entry acts first.
Cplx outer_compose(std::span<const std::function<Cplx(Cplx)>> maps, Cplx z);

// One composite pass over the contour with n uniform sub-intervals per piece,
// midpoint samples, updates applied in traversal order:
//   z <- z + phi(gamma(t*), z) * (gamma(t_{j+1}) - gamma(t_j)).
// Returns the divergence sentinel as soon as |z| exceeds cap (or phi hits a
// pole and poisons z).
Cplx riemann_partial(const Integrand& phi, const Contour& c, Cplx z, long n,
                     double cap = 1e8);

// Doubling refinement of riemann_partial from cfg.initial_n.  Successive
// passes are combined by first-order Richardson extrapolation and the loop
// stops when consecutive extrapolants agree within cfg.tol; the extrapolant
// is returned as the value.  Diverged reflects the finest pass, so a coarse
// transient overshoot does not mislabel a convergent point.
CompResult comp_integral(const Integrand& phi, const Contour& c, Cplx z,
                         const EngineConfig& cfg = {});

// Adaptive embedded Runge-Kutta 4(5) (Dormand-Prince) on y' = phi(g(t), y)
// g'(t), integrated piece by piece.  MaxRefinement reports step underflow
// (h < 1e-14); Diverged reports a cap crossing or a pole hit at the current
// state.
CompResult comp_integral_ode(const Integrand& phi, const Contour& c, Cplx z,
                             const EngineConfig& cfg = {});

// Evaluates with the default method (ODE).
CompResult comp_integral_default(const Integrand& phi, const Contour& c,
                                 Cplx z, const EngineConfig& cfg = {});

// Augmented flow: y' = phi(g, y) g', u' = (d phi/d z)(g, y) g', u(0) = 0.
// derivative = exp(u(1)) is dY/dz, which is never zero.
struct DerivativeResult {
  CompResult integral;
  Cplx derivative;  // sentinel when the integral did not converge
};
DerivativeResult comp_integral_with_derivative(const DualIntegrand& phi,
                                               const Contour& c, Cplx z,
                                               const EngineConfig& cfg = {});

// Newton iteration for Y(z) = target starting from guess, using the
// derivative flow.  Succeeds when |Y(z) - target| <= 10 * cfg.tol within 50
// iterations; throws std::runtime_error on a vanishing derivative estimate,
// a non-convergent evaluation, or iteration exhaustion.
Cplx local_inverse(const DualIntegrand& phi, const Contour& c, Cplx target,
                   Cplx guess, const EngineConfig& cfg = {});

// Pixel grid over [re_min, re_max] x [im_min, im_max]; nx, ny >= 1, endpoint
// inclusive.  Pixel (ix, iy) lives at index iy * nx + ix.
struct GridSpec {
  double re_min, re_max;
  double im_min, im_max;
  int nx, ny;
};

// Per-pixel comp_integral classification (Riemann by default, per the
// definitional evaluator; Method::Ode switches to the ODE evaluator).
// threads == 0 picks the hardware concurrency.  Output order is
// deterministic and independent of the thread count.
std::vector<CompResult> classify_grid(const Integrand& phi, const Contour& c,
                                      const GridSpec& grid,
                                      const EngineConfig& cfg = {},
                                      Method method = Method::Riemann,
                                      int threads = 0);

// Majorant for |Y(z) - z| on the disk |z - z0| <= K_radius: iterates the
// padding L = K_radius + kappa with kappa = integral over the contour of
// max_{|z - z0| = L} |phi(s, z)| |ds| until the padding is self-consistent,
// then returns kappa.  The disk maximum uses 64 boundary samples (maximum
// modulus principle).
double normal_sum_bound(const Integrand& phi, const Contour& c,
                        double K_radius, Cplx z0 = Cplx{0.0, 0.0});

// First-order coefficient of the composite at a fixed point z0 of phi:
// exp of the additive integral of (d phi/d z)(s, z0) ds.  Requires
// |phi(s, z0)| <= 1e-12 on contour samples and checks Y(z0) == z0.
Cplx fixed_point_coefficient(const Expr& phi, const Contour& c, Cplx z0,
                             const EngineConfig& cfg = {});

}  // namespace compint
