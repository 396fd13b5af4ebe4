#include "compint/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace compint {

namespace {

constexpr double kTruncationCap = 128.0;

CompResult eval_by(Method method, const Integrand& phi, const Contour& c,
                   Cplx z, const EngineConfig& cfg) {
  return method == Method::Riemann ? comp_integral(phi, c, z, cfg)
                                   : comp_integral_ode(phi, c, z, cfg);
}

Cplx run_converged(const char* who, Method method, const Integrand& ig,
                   const Contour& c, Cplx z, const EngineConfig& cfg) {
  const CompResult r = eval_by(method, ig, c, z, cfg);
  if (r.status != Status::Converged)
    throw std::runtime_error(std::string(who) + ": integral status " +
                             status_name(r.status) +
                             " at z = " + format_complex(z));
  return r.value;
}

PairReport make_report(Cplx lhs, Cplx rhs, double tol) {
  PairReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.deviation = std::abs(lhs - rhs);
  rep.tol = tol;
  rep.pass = std::isfinite(rep.deviation) && rep.deviation <= tol;
  return rep;
}

}  // namespace

// --- DerivedResidual --------------------------------------------------------

DerivedResidual::DerivedResidual(HFunc h, Profile profile,
                                 std::function<Cplx(Cplx)> fs, Integrand phi,
                                 bool phi_z_free, Contour gamma,
                                 std::vector<PoleSpec> poles)
    : h_(std::move(h)),
      profile_(std::move(profile)),
      fs_(std::move(fs)),
      phi_(std::move(phi)),
      phi_z_free_(phi_z_free),
      gamma_(std::move(gamma)),
      poles_(std::move(poles)) {
  if (!h_) throw std::invalid_argument("derived residual: empty h");
  if (!phi_) throw std::invalid_argument("derived residual: empty phi");
  if (!gamma_.closed())
    throw std::invalid_argument("derived residual: the loop must be closed");
}

DerivedResidual::DerivedResidual(const Expr& h, const Expr& phi, Contour gamma,
                                 std::vector<PoleSpec> poles)
    : DerivedResidual(
          [h](Cplx w, Cplx s) {
            Bindings b;
            b.w = w;
            b.s = s;
            return h.eval(b);
          },
          nullptr, nullptr, integrand_of(phi), !depends_on(phi, Var::Z),
          std::move(gamma), std::move(poles)) {}

DerivedResidual DerivedResidual::separable(const Expr& profile_w,
                                           const Expr& fs, const Expr& phi,
                                           Contour gamma,
                                           std::vector<PoleSpec> poles) {
  Profile p = [profile_w](Cplx w) {
    Bindings b;
    b.w = w;
    return profile_w.eval(b);
  };
  return separable(std::move(p), fs, phi, std::move(gamma), std::move(poles));
}

DerivedResidual DerivedResidual::separable(Profile profile, const Expr& fs,
                                           const Expr& phi, Contour gamma,
                                           std::vector<PoleSpec> poles) {
  if (!profile)
    throw std::invalid_argument("derived residual: empty profile");
  std::function<Cplx(Cplx)> fs_fn = [fs](Cplx s) {
    Bindings b;
    b.s = s;
    return fs.eval(b);
  };
  HFunc h = [profile, fs_fn](Cplx w, Cplx s) { return profile(w) * fs_fn(s); };
  return DerivedResidual(std::move(h), std::move(profile), std::move(fs_fn),
                         integrand_of(phi), !depends_on(phi, Var::Z),
                         std::move(gamma), std::move(poles));
}

DerivedResidual DerivedResidual::sum(std::span<const DerivedResidual> parts) {
  if (parts.empty())
    throw std::invalid_argument("derived residual sum: empty part list");
  std::vector<HFunc> hs;
  hs.reserve(parts.size());
  std::vector<PoleSpec> poles;
  for (const DerivedResidual& part : parts) {
    hs.push_back(part.h_);
    for (const PoleSpec& pole : part.poles_) {
      const bool known =
          std::any_of(poles.begin(), poles.end(), [&](const PoleSpec& q) {
            return std::abs(q.location - pole.location) < 1e-12;
          });
      if (!known) poles.push_back(pole);
    }
  }
  HFunc h = [hs](Cplx w, Cplx s) {
    Cplx acc{0.0, 0.0};
    for (const HFunc& f : hs) acc += f(w, s);
    return acc;
  };
  return DerivedResidual(std::move(h), nullptr, nullptr, parts[0].phi_,
                         parts[0].phi_z_free_, parts[0].gamma_,
                         std::move(poles));
}

Cplx DerivedResidual::h(Cplx w, Cplx s) const { return h_(w, s); }

Cplx DerivedResidual::profile(Cplx w) const {
  if (!profile_)
    throw std::logic_error("derived residual: profile of a non-separable h");
  return profile_(w);
}

DerivedResidual::Profile DerivedResidual::profile_fn() const {
  if (!profile_)
    throw std::logic_error("derived residual: profile of a non-separable h");
  return profile_;
}

DerivedResidual DerivedResidual::with_profile(Profile p) const {
  if (!profile_)
    throw std::logic_error(
        "derived residual: with_profile on a non-separable h");
  if (!p) throw std::invalid_argument("derived residual: empty profile");
  HFunc h = [p, fs = fs_](Cplx w, Cplx s) { return p(w) * fs(s); };
  return DerivedResidual(std::move(h), std::move(p), fs_, phi_, phi_z_free_,
                         gamma_, poles_);
}

Integrand DerivedResidual::integrand_at(Cplx w) const {
  if (profile_) {
    const Cplx pw = profile_(w);
    return [pw, fs = fs_, phi = phi_](const Cplx& s, const Cplx& z) {
      return pw * fs(s) * phi(s, z);
    };
  }
  return [h = h_, phi = phi_, w](const Cplx& s, const Cplx& z) {
    return h(w, s) * phi(s, z);
  };
}

Cplx DerivedResidual::log_value(Cplx w, Cplx z) const {
  if (profile_) {
    const Cplx pw = profile_(w);
    if (pw == Cplx{0.0, 0.0}) return pw;
    if (phi_z_free_) {
      if (!fs_phi_cache_) {
        fs_phi_cache_ = additive_contour_integral(
            [this, z](Cplx s) { return fs_(s) * phi_(s, z); }, gamma_, 64);
      }
      return pw * *fs_phi_cache_;
    }
    return pw * additive_contour_integral(
                    [this, z](Cplx s) { return fs_(s) * phi_(s, z); }, gamma_,
                    64);
  }
  return additive_contour_integral(
      [this, w, z](Cplx s) { return h_(w, s) * phi_(s, z); }, gamma_, 64);
}

CompResult DerivedResidual::value(Cplx w, Cplx z, const EngineConfig& cfg,
                                  Method method) const {
  return eval_by(method, integrand_at(w), gamma_, z, cfg);
}

DecayReport DerivedResidual::decay_report() const {
  std::vector<Cplx> path_samples;
  constexpr int kPerPiece = 24;
  for (const ArcPiece& piece : gamma_.pieces())
    for (int j = 0; j < kPerPiece; ++j)
      path_samples.push_back(piece_point(piece, (j + 0.5) / kPerPiece));

  const auto max_h = [&](double w) {
    double m = 0.0;
    for (const Cplx& s : path_samples)
      m = std::max(m, std::abs(h_(Cplx{w, 0.0}, s)));
    return m;
  };

  DecayReport rep;
  rep.amplitude = max_h(0.0);
  constexpr double kProbes[] = {0.5, 1.0, 2.0, 4.0, 8.0};
  double worst = 0.0;
  for (const double w : kProbes) {
    for (const double sign : {1.0, -1.0}) {
      const double m = max_h(sign * w);
      const double weighted = m * (1.0 + w * w);
      const double ratio =
          rep.amplitude > 0.0
              ? weighted / rep.amplitude
              : (m > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      worst = std::max(worst, ratio);
    }
  }
  rep.worst_ratio = worst;
  rep.pass = worst <= 1.0 + 1e-9;
  return rep;
}

void DerivedResidual::require_moderate_decay() const {
  if (!decay_report().pass)
    throw std::runtime_error(
        "derived residual: the sampled decay bound "
        "|h(w,s)| <= A/(1+Re(w)^2) fails; the transform window cannot be "
        "truncated reliably");
}

// --- identity checks --------------------------------------------------------

PairReport homomorphism_check(const Expr& p, const Expr& q, const Expr& g,
                              const Contour& c, Cplx z,
                              const EngineConfig& cfg, Method method,
                              double tol) {
  const Expr both = Expr::mul(Expr::add(p, q), g);
  const Expr pg = Expr::mul(p, g);
  const Expr qg = Expr::mul(q, g);
  const Cplx lhs =
      run_converged("homomorphism check", method, integrand_of(both), c, z,
                    cfg);
  const Cplx inner =
      run_converged("homomorphism check", method, integrand_of(qg), c, z, cfg);
  const Cplx rhs = run_converged("homomorphism check", method,
                                 integrand_of(pg), c, inner, cfg);
  return make_report(lhs, rhs, tol);
}

Cplx taylor_composition(const Expr& phi, Cplx zeta, Cplx w, int K,
                        const Contour& gamma, Cplx z, const EngineConfig& cfg,
                        Method method) {
  if (K < 0)
    throw std::invalid_argument("taylor_composition: K must be >= 0");

  double dist = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 256;
  for (int j = 0; j <= kSamples; ++j)
    dist = std::min(dist, std::abs(gamma.point_at(static_cast<double>(j) /
                                                  kSamples) -
                                   zeta));
  if (!(std::abs(w - zeta) < dist))
    throw std::invalid_argument(
        "taylor_composition: w must be strictly closer to the center than "
        "the loop");

  const double delta = 0.5 * dist;
  const Integrand base = integrand_of(phi);
  Cplx cur = z;
  for (int k = K; k >= 0; --k) {  // the k = K term acts first
    const Cplx wk = ipow(w - zeta, k);
    const Integrand term = [base, zeta, wk, k](const Cplx& s, const Cplx& zz) {
      return base(s, zz) * wk / ipow(s - zeta, k + 1);
    };
    const PoleSpec pole{zeta, k + 1, "taylor-term"};
    const ResidualResult rr = compositional_residual(
        term, pole, cur, delta, cfg, method, /*validate=*/false);
    if (rr.status != Status::Converged)
      throw std::runtime_error("taylor_composition: term " +
                               std::to_string(k) + " status " +
                               status_name(rr.status));
    cur = rr.value;
  }
  return cur;
}

Cplx semigroup_eval(const Expr& fs, const Expr& phi, const Contour& gamma,
                    Cplx w, Cplx z, const EngineConfig& cfg, Method method) {
  const Integrand ig = [w, fs, phi](const Cplx& s, const Cplx& zz) {
    Bindings b;
    b.s = s;
    b.z = zz;
    return w * fs.eval(b) * phi.eval(b);
  };
  return run_converged("semigroup evaluation", method, ig, gamma, z, cfg);
}

PairReport semigroup_check(const Expr& fs, const Expr& phi,
                           const Contour& gamma, Cplx w, Cplx alpha, Cplx z,
                           const EngineConfig& cfg, Method method,
                           double tol) {
  const Cplx inner = semigroup_eval(fs, phi, gamma, alpha, z, cfg, method);
  const Cplx lhs = semigroup_eval(fs, phi, gamma, w, inner, cfg, method);
  const Cplx rhs = semigroup_eval(fs, phi, gamma, w + alpha, z, cfg, method);
  return make_report(lhs, rhs, tol);
}

PairReport infinitesimal_derivative(const Expr& f, const Expr& phi,
                                    const Contour& sigma, Cplx z,
                                    const EngineConfig& cfg, Method method,
                                    double tol) {
  constexpr double kEps = 1e-5;
  const Cplx up =
      semigroup_eval(f, phi, sigma, Cplx{kEps, 0.0}, z, cfg, method);
  const Cplx down =
      semigroup_eval(f, phi, sigma, Cplx{-kEps, 0.0}, z, cfg, method);
  const Cplx lhs = (up - down) / (2.0 * kEps);

  Bindings b;
  b.z = z;
  const Cplx rhs =
      additive_contour_integral(Expr::mul(f, phi), sigma, b, 256);
  return make_report(lhs, rhs, tol);
}

PairReport fubini_check(const Expr& p, const Expr& fs, const Expr& phi,
                        const Contour& gamma, const Contour& tau, Cplx z,
                        const EngineConfig& cfg, Method method, double tol) {
  const Cplx P = additive_contour_integral(
      [&p](Cplx u) {
        Bindings b;
        b.w = u;
        return p.eval(b);
      },
      tau, 256);

  const Integrand lhs_ig = [P, fs, phi](const Cplx& s, const Cplx& zz) {
    Bindings b;
    b.s = s;
    b.z = zz;
    return P * fs.eval(b) * phi.eval(b);
  };
  const Cplx lhs =
      run_converged("integral interchange", method, lhs_ig, gamma, z, cfg);

  const Expr fsphi = Expr::mul(fs, phi);
  const Integrand rhs_ig = [fsphi, p, gamma](const Cplx& wv,
                                             const Cplx& zz) {
    Bindings bw;
    bw.w = wv;
    Bindings bz;
    bz.z = zz;
    return p.eval(bw) * additive_contour_integral(fsphi, gamma, bz, 64);
  };
  const Cplx rhs =
      run_converged("integral interchange", method, rhs_ig, tau, z, cfg);
  return make_report(lhs, rhs, tol);
}

// --- transforms -------------------------------------------------------------

DerivedResidual::Profile classical_profile_transform(
    DerivedResidual::Profile p, double truncation, int points_per_unit,
    int sign) {
  if (!p) throw std::invalid_argument("profile transform: empty profile");
  if (!(truncation > 0.0))
    throw std::invalid_argument("profile transform: truncation must be > 0");
  if (points_per_unit < 4)
    throw std::invalid_argument(
        "profile transform: need at least 4 points per unit");
  const long n = std::lround(std::ceil(2.0 * truncation * points_per_unit));
  const double dir = sign >= 0 ? 1.0 : -1.0;
  return [p = std::move(p), truncation, n, dir](Cplx xi) {
    const double h = 2.0 * truncation / static_cast<double>(n);
    const auto f = [&](double w) {
      return p(Cplx{w, 0.0}) *
             std::exp(Cplx{0.0, dir * 2.0 * kPi * w} * xi);
    };
    Cplx acc = 0.5 * (f(-truncation) + f(truncation));
    for (long j = 1; j < n; ++j)
      acc += f(-truncation + h * static_cast<double>(j));
    return acc * h;
  };
}

double choose_truncation(const DerivedResidual& d, Cplx z,
                         const TransformConfig& tcfg) {
  double T = std::max(tcfg.truncation, 1.0);
  for (;;) {
    const double m = std::max(std::abs(d.log_value(Cplx{T, 0.0}, z)),
                              std::abs(d.log_value(Cplx{-T, 0.0}, z)));
    const double est = 2.0 * m * (1.0 + T * T) / T;
    if (est <= tcfg.tail_bound_target || T >= kTruncationCap) return T;
    T *= 2.0;
  }
}

CompResult fourier_transform(const DerivedResidual& d, Cplx xi, Cplx z,
                             const TransformConfig& tcfg,
                             const EngineConfig& cfg, Method method) {
  d.require_moderate_decay();
  const double T = choose_truncation(d, z, tcfg);
  const Contour line = make_segment(Cplx{-T, 0.0}, Cplx{T, 0.0});
  const Integrand ig = [&d, xi](const Cplx& w, const Cplx& zz) {
    return std::exp(Cplx{0.0, -2.0 * kPi} * xi * w) * d.log_value(w, zz);
  };
  return eval_by(method, ig, line, z, cfg);
}

DerivedResidual fourier_hat(const DerivedResidual& d,
                            const TransformConfig& tcfg) {
  if (!d.is_separable())
    throw std::invalid_argument(
        "fourier_hat: the perturbation must be separable");
  d.require_moderate_decay();

  const DerivedResidual::Profile p = d.profile_fn();
  double T = std::max(tcfg.truncation, 1.0);
  for (;;) {
    const double m = std::max(std::abs(p(Cplx{T, 0.0})),
                              std::abs(p(Cplx{-T, 0.0})));
    const double est = 2.0 * m * (1.0 + T * T) / T;
    if (est <= tcfg.tail_bound_target || T >= kTruncationCap) break;
    T *= 2.0;
  }
  return d.with_profile(classical_profile_transform(
      p, T, tcfg.quad_points_per_unit, /*sign=*/-1));
}

CompResult fourier_inverse(const DerivedResidual& d_hat, Cplx w, Cplx z,
                           const TransformConfig& tcfg,
                           const EngineConfig& cfg, Method method) {
  d_hat.require_moderate_decay();
  const double T = choose_truncation(d_hat, z, tcfg);
  const Contour line = make_segment(Cplx{-T, 0.0}, Cplx{T, 0.0});
  const Integrand ig = [&d_hat, w](const Cplx& xi, const Cplx& zz) {
    return std::exp(Cplx{0.0, 2.0 * kPi} * xi * w) * d_hat.log_value(xi, zz);
  };
  return eval_by(method, ig, line, z, cfg);
}

PairReport fourier_inversion_check(const DerivedResidual& d, Cplx w, Cplx z,
                                   const TransformConfig& tcfg,
                                   const EngineConfig& cfg, Method method,
                                   double tol) {
  const CompResult orig = d.value(w, z, cfg, method);
  if (orig.status != Status::Converged)
    throw std::runtime_error(
        std::string("inversion check: original value status ") +
        status_name(orig.status));
  const DerivedResidual hat = fourier_hat(d, tcfg);
  const CompResult back = fourier_inverse(hat, w, z, tcfg, cfg, method);
  if (back.status != Status::Converged)
    throw std::runtime_error(
        std::string("inversion check: round-trip status ") +
        status_name(back.status));
  return make_report(orig.value, back.value, tol);
}

PairReport poisson_composition(const DerivedResidual& d, int N, Cplx z,
                               const TransformConfig& tcfg,
                               const EngineConfig& cfg, Method method,
                               double tol) {
  if (N < 0)
    throw std::invalid_argument("poisson_composition: N must be >= 0");
  const DerivedResidual hat = fourier_hat(d, tcfg);

  const auto chain = [&](const DerivedResidual& obj) {
    Cplx cur = z;
    for (int n = N; n >= -N; --n) {  // the n = N factor acts first
      const CompResult r =
          obj.value(Cplx{static_cast<double>(n), 0.0}, cur, cfg, method);
      if (r.status != Status::Converged)
        throw std::runtime_error("poisson_composition: factor n = " +
                                 std::to_string(n) + " status " +
                                 status_name(r.status));
      cur = r.value;
    }
    return cur;
  };

  return make_report(chain(d), chain(hat), tol);
}

PairReport fourier_linearity_check(std::span<const DerivedResidual> ds,
                                   Cplx xi, Cplx z,
                                   const TransformConfig& tcfg,
                                   const EngineConfig& cfg, Method method,
                                   double tol) {
  if (ds.empty())
    throw std::invalid_argument("linearity check: empty list");

  Cplx cur = z;
  for (std::size_t j = ds.size(); j-- > 0;) {  // the last part acts first
    const DerivedResidual hat = fourier_hat(ds[j], tcfg);
    const CompResult r = hat.value(xi, cur, cfg, method);
    if (r.status != Status::Converged)
      throw std::runtime_error("linearity check: part " + std::to_string(j) +
                               " status " + status_name(r.status));
    cur = r.value;
  }

  const DerivedResidual combined = DerivedResidual::sum(ds);
  const CompResult whole = fourier_transform(combined, xi, z, tcfg, cfg,
                                             method);
  if (whole.status != Status::Converged)
    throw std::runtime_error(
        std::string("linearity check: combined transform status ") +
        status_name(whole.status));
  return make_report(cur, whole.value, tol);
}

CompResult laplace_transform(const DerivedResidual& d, Cplx y, Cplx z,
                             const TransformConfig& tcfg,
                             const EngineConfig& cfg, Method method) {
  if (!(y.real() > 0.0))
    throw std::invalid_argument("laplace_transform: Re(y) must be > 0");

  double T = std::max(tcfg.truncation, 1.0);
  for (;;) {
    const double m = std::abs(d.log_value(Cplx{T, 0.0}, z));
    const double est = m * std::exp(-y.real() * T) / y.real();
    if (est <= tcfg.tail_bound_target) break;
    if (T >= kTruncationCap)
      throw std::runtime_error(
          "laplace_transform: the integrand tail does not decay below the "
          "target");
    T *= 2.0;
  }

  const Contour ray = make_segment(Cplx{0.0, 0.0}, Cplx{T, 0.0});
  const Integrand ig = [&d, y](const Cplx& x, const Cplx& zz) {
    return std::exp(-y * x) * d.log_value(x, zz);
  };
  return eval_by(method, ig, ray, z, cfg);
}

std::optional<std::pair<Expr, Expr>> separate_ws(const Expr& h) {
  if (!depends_on(h, Var::S)) {
    return std::make_pair(h, Expr::constant(Cplx{1.0, 0.0}));
  }
  if (!depends_on(h, Var::W)) {
    return std::make_pair(Expr::constant(Cplx{1.0, 0.0}), h);
  }
  switch (h.kind()) {
    case Expr::Kind::Mul: {
      const auto a = separate_ws(h.left());
      const auto b = separate_ws(h.right());
      if (!a || !b) return std::nullopt;
      return std::make_pair(Expr::mul(a->first, b->first),
                            Expr::mul(a->second, b->second));
    }
    case Expr::Kind::Div: {
      const auto a = separate_ws(h.left());
      const auto b = separate_ws(h.right());
      if (!a || !b) return std::nullopt;
      return std::make_pair(Expr::div(a->first, b->first),
                            Expr::div(a->second, b->second));
    }
    case Expr::Kind::Negate: {
      const auto a = separate_ws(h.left());
      if (!a) return std::nullopt;
      return std::make_pair(Expr::negate(a->first), a->second);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace compint
