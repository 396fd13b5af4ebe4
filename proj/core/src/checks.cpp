#include "compint/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "compint/residue.hpp"

namespace compint {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using MapFn = std::function<Cplx(Cplx)>;

std::string short_c(Cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g%+.4gi", z.real(), z.imag());
  return buf;
}

double otol(const CheckOptions& o, double fallback) {
  return o.tol.value_or(fallback);
}

// Runs one case body; an exception or a non-finite deviation fails the case.
template <typename Fn>
CheckCase guarded(std::string name, double tol, Fn&& body) {
  CheckCase c;
  c.name = std::move(name);
  c.tol = tol;
  try {
    body(c);
    c.pass = std::isfinite(c.deviation) && c.deviation <= c.tol;
  } catch (const std::exception& e) {
    c.deviation = kInf;
    c.pass = false;
    c.name += std::string{" (error: "} + e.what() + ")";
  }
  return c;
}

std::vector<Cplx> disk_points(int n, double radius, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Cplx> out;
  out.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    const double r = radius * std::sqrt(unit(rng));
    const double a = 2.0 * kPi * unit(rng);
    out.push_back(Cplx{r * std::cos(a), r * std::sin(a)});
  }
  return out;
}

CompResult eval_by_method(const Integrand& phi, const Contour& c, Cplx z,
                          const EngineConfig& cfg, Method m) {
  return m == Method::Riemann ? comp_integral(phi, c, z, cfg)
                              : comp_integral_ode(phi, c, z, cfg);
}

Cplx value_or_throw(const Integrand& phi, const Contour& c, Cplx z,
                    const EngineConfig& cfg, Method m) {
  const CompResult r = eval_by_method(phi, c, z, cfg, m);
  if (r.status != Status::Converged) {
    throw std::runtime_error(std::string{"integral "} +
                             status_name(r.status) + " at z = " + short_c(z));
  }
  return r.value;
}

EngineConfig tightened(EngineConfig cfg, double tol, double abs_tol,
                       double rel_tol) {
  cfg.tol = std::min(cfg.tol, tol);
  cfg.ode_abs_tol = std::min(cfg.ode_abs_tol, abs_tol);
  cfg.ode_rel_tol = std::min(cfg.ode_rel_tol, rel_tol);
  return cfg;
}

// The standard pole-free integrand set used by the geometry checks.
std::vector<std::pair<std::string, Expr>> default_integrands(
    const CheckOptions& o) {
  if (o.phi) return {{"phi=<override>", *o.phi}};
  static const char* sources[] = {"z", "z^2", "exp(-z)", "s*z+1",
                                  "exp(z)*s^2"};
  std::vector<std::pair<std::string, Expr>> out;
  for (const char* s : sources) {
    out.emplace_back(std::string{"phi="} + s, parse_expr(s));
  }
  return out;
}

// A circle, a four-segment square loop, and an out-and-back retrace.  The
// circle radius is kept small: with probes in the disk |z| <= 0.5, every
// default integrand's auxiliary path then stays clear of its blow-up point
// and log/root branch cuts (e.g. for exp(-z) the path circles e^z - r with
// radius r, which misses the origin only while |e^z| > 2r).
std::vector<std::pair<std::string, Contour>> default_closed_contours() {
  std::vector<std::pair<std::string, Contour>> out;
  out.emplace_back("circle(0,0.25)", make_circle(Cplx{0.0, 0.0}, 0.25));
  out.emplace_back(
      "square loop",
      parse_contour("seg(-0.6-0.6i,0.6-0.6i)>seg(0.6-0.6i,0.6+0.6i)>"
                    "seg(0.6+0.6i,-0.6+0.6i)>seg(-0.6+0.6i,-0.6-0.6i)"));
  const Contour a = parse_contour("seg(0.1,0.4+0.3i)");
  out.emplace_back("retrace seg(0.1,0.4+0.3i)", concat(a, a.reversed()));
  return out;
}

std::vector<Cplx> default_probes(const CheckOptions& o, int n, double radius,
                                 unsigned seed) {
  if (o.z) return {*o.z};
  return disk_points(n, radius, seed);
}

// ---------------------------------------------------------------- checks --

std::vector<CheckCase> check_closed_contour(const CheckOptions& o) {
  const double tol = otol(o, 1e-6);
  std::vector<std::pair<std::string, Contour>> contours;
  if (o.contour) {
    if (!o.contour->closed()) {
      throw std::invalid_argument(
          "closed-contour check needs a closed contour");
    }
    contours.emplace_back("contour=<override>", *o.contour);
  } else {
    contours = default_closed_contours();
  }
  const auto probes = default_probes(o, 20, 0.5, 20260814u);
  std::vector<CheckCase> cases;
  for (const auto& [cname, contour] : contours) {
    for (const auto& [pname, phi] : default_integrands(o)) {
      cases.push_back(guarded(
          pname + " over " + cname, tol, [&, &phi = phi](CheckCase& c) {
            const Integrand ig = integrand_of(phi);
            double worst = 0.0;
            for (const Cplx z : probes) {
              const Cplx y = value_or_throw(ig, contour, z, o.engine, o.method);
              worst = std::max(worst, std::abs(y - z));
            }
            c.deviation = worst;
          }));
    }
  }
  return cases;
}

std::vector<CheckCase> check_path_independence(const CheckOptions& o) {
  const double tol = otol(o, 1e-6);
  const Contour straight = make_segment(Cplx{0.0, 0.0}, Cplx{1.0, 0.0});
  const Contour bowed =
      make_arc(Cplx{0.5, -0.5}, std::sqrt(0.5), 3.0 * kPi / 4.0, kPi / 4.0);
  const auto probes = default_probes(o, 20, 0.5, 20260815u);
  std::vector<CheckCase> cases;
  for (const auto& [pname, phi] : default_integrands(o)) {
    cases.push_back(guarded(
        pname + ": segment vs arc 0->1", tol, [&, &phi = phi](CheckCase& c) {
          const Integrand ig = integrand_of(phi);
          double worst = 0.0;
          for (const Cplx z : probes) {
            const Cplx ys = value_or_throw(ig, straight, z, o.engine, o.method);
            const Cplx ya = value_or_throw(ig, bowed, z, o.engine, o.method);
            worst = std::max(worst, std::abs(ys - ya));
          }
          c.deviation = worst;
        }));
  }
  return cases;
}

std::vector<CheckCase> check_orientation(const CheckOptions& o) {
  const double tol = otol(o, 1e-6);
  std::vector<std::pair<std::string, Contour>> arcs;
  if (o.contour) {
    arcs.emplace_back("contour=<override>", *o.contour);
  } else {
    arcs.emplace_back("seg(0,0.5)", make_segment(Cplx{0, 0}, Cplx{0.5, 0}));
    arcs.emplace_back("seg(0.2,0.5+0.3i)",
                      make_segment(Cplx{0.2, 0}, Cplx{0.5, 0.3}));
    arcs.emplace_back("quarter arc r=0.5",
                      make_arc(Cplx{0, 0}, 0.5, 0.0, kPi / 2.0));
  }
  const auto probes = default_probes(o, 5, 0.5, 20260816u);
  std::vector<CheckCase> cases;
  for (const auto& [cname, contour] : arcs) {
    const Contour back = contour.reversed();
    for (const auto& [pname, phi] : default_integrands(o)) {
      cases.push_back(guarded(
          pname + " along " + cname + ", reverse undoes", tol,
          [&, &phi = phi](CheckCase& c) {
            const Integrand ig = integrand_of(phi);
            double worst = 0.0;
            for (const Cplx z : probes) {
              const Cplx y = value_or_throw(ig, contour, z, o.engine, o.method);
              const Cplx rt = value_or_throw(ig, back, y, o.engine, o.method);
              worst = std::max(worst, std::abs(rt - z));
            }
            c.deviation = worst;
          }));
    }
  }
  return cases;
}

std::vector<CheckCase> check_homomorphism(const CheckOptions& o) {
  const double tol_core = otol(o, 1e-8);
  const double tol_comb = otol(o, 1e-6);
  std::vector<CheckCase> cases;

  struct CoreFix {
    const char *p, *q, *g;
    Cplx z;
  };
  const CoreFix core[] = {
      {"1", "1", "z", Cplx{1.0, 0.0}},
      {"s", "-s", "z", Cplx{0.7, 0.0}},
      {"s", "s^2", "z^2", Cplx{0.25, 0.0}},
  };
  const Contour seg01 = make_segment(Cplx{0, 0}, Cplx{1, 0});
  for (const auto& f : core) {
    const std::string name = std::string{"(p+q)g vs split: p="} + f.p +
                             " q=" + f.q + " g=" + f.g + " z=" + short_c(f.z);
    cases.push_back(guarded(name, tol_core, [&](CheckCase& c) {
      const PairReport pr =
          homomorphism_check(parse_expr(f.p), parse_expr(f.q), parse_expr(f.g),
                             seg01, f.z, o.engine, o.method, tol_core);
      c.deviation = pr.deviation;
      c.lhs = pr.lhs;
      c.rhs = pr.rhs;
      c.has_values = true;
    }));
  }

  // Twelve geometrically decaying loop factors: composing the per-term
  // integrals (either traversal order) matches the summed integrand.
  const Contour loop = make_circle(Cplx{0, 0}, 1.0);
  const Cplx zs{0.25, 0.1};
  for (const char* gsrc : {"1", "z", "z^2"}) {
    const Expr g = parse_expr(gsrc);
    std::vector<MapFn> maps;
    double csum = 0.0;
    for (int n = 0; n < 12; ++n) {
      const double cn = std::ldexp(1.0, -n);
      csum += cn;
      const Expr fn = Expr::mul(
          Expr::div(Expr::constant(Cplx{cn, 0.0}), Expr::variable(Var::S)), g);
      const Integrand ig = integrand_of(fn);
      maps.push_back([ig, loop, cfg = o.engine, m = o.method](Cplx zz) {
        return value_or_throw(ig, loop, zz, cfg, m);
      });
    }
    const Expr fsum = Expr::mul(
        Expr::div(Expr::constant(Cplx{csum, 0.0}), Expr::variable(Var::S)), g);
    const Integrand sum_ig = integrand_of(fsum);
    for (const bool outer : {false, true}) {
      const std::string name = std::string{"12-term sum, g="} + gsrc +
                               (outer ? ", left-to-right" : ", right-to-left");
      cases.push_back(guarded(name, tol_comb, [&](CheckCase& c) {
        const Cplx whole = value_or_throw(sum_ig, loop, zs, o.engine, o.method);
        const Cplx piecewise = outer ? outer_compose(maps, zs)
                                     : inner_compose(maps, zs);
        c.deviation = std::abs(piecewise - whole);
        c.lhs = piecewise;
        c.rhs = whole;
        c.has_values = true;
      }));
    }
  }

  // Additivity: integral of f+g splits as a composition either way around.
  struct AddFix {
    const char* name;
    const char *f, *g, *phi;
    Contour big;
    Cplx z;
  };
  const AddFix adds[] = {
      {"disjoint poles", "0.3/s", "0.2/(s-3)", "z",
       make_circle(Cplx{1.5, 0.0}, 2.6), Cplx{0.5, 0.0}},
      {"shared pole", "0.2/s", "0.3/s", "z^2", make_circle(Cplx{0, 0}, 1.0),
       Cplx{0.3, 0.0}},
  };
  for (const auto& f : adds) {
    const Expr fe = parse_expr(f.f);
    const Expr ge = parse_expr(f.g);
    const Expr phie = parse_expr(f.phi);
    const Integrand whole_ig = integrand_of(Expr::mul(Expr::add(fe, ge), phie));
    const Integrand f_ig = integrand_of(Expr::mul(fe, phie));
    const Integrand g_ig = integrand_of(Expr::mul(ge, phie));
    for (const bool swapped : {false, true}) {
      const std::string name = std::string{"additivity, "} + f.name +
                               (swapped ? ", g then f" : ", f then g");
      cases.push_back(guarded(name, tol_comb, [&](CheckCase& c) {
        const Cplx whole =
            value_or_throw(whole_ig, f.big, f.z, o.engine, o.method);
        const Integrand& first = swapped ? g_ig : f_ig;
        const Integrand& second = swapped ? f_ig : g_ig;
        const Cplx inner =
            value_or_throw(first, f.big, f.z, o.engine, o.method);
        const Cplx split =
            value_or_throw(second, f.big, inner, o.engine, o.method);
        c.deviation = std::abs(split - whole);
        c.lhs = split;
        c.rhs = whole;
        c.has_values = true;
      }));
    }
  }
  return cases;
}

std::vector<CheckCase> check_derivative(const CheckOptions& o) {
  const double tol = otol(o, 1e-5);
  const EngineConfig cfg = tightened(o.engine, 1e-11, 1e-13, 1e-12);
  const double h = 1e-4;
  std::mt19937 rng(20260817u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CheckCase> cases;
  for (const auto& [pname, phi] : default_integrands(o)) {
    cases.push_back(guarded(
        pname + ": flow derivative vs finite difference (20 draws)", tol,
        [&, &phi = phi](CheckCase& c) {
          const Integrand ig = integrand_of(phi);
          const DualIntegrand dig = dual_integrand_of(phi);
          double worst = 0.0;
          for (int rep = 0; rep < 20; ++rep) {
            Contour contour = [&] {
              if (o.contour) return *o.contour;
              const double r0 = 0.8 * std::sqrt(unit(rng));
              const double a0 = 2.0 * kPi * unit(rng);
              const Cplx a{r0 * std::cos(a0), r0 * std::sin(a0)};
              const double len = 0.1 + 0.4 * unit(rng);
              const double dir = 2.0 * kPi * unit(rng);
              return make_segment(
                  a, a + len * Cplx{std::cos(dir), std::sin(dir)});
            }();
            const Cplx z = o.z.value_or([&] {
              const double r = 0.5 * std::sqrt(unit(rng));
              const double a = 2.0 * kPi * unit(rng);
              return Cplx{r * std::cos(a), r * std::sin(a)};
            }());
            const DerivativeResult dr =
                comp_integral_with_derivative(dig, contour, z, cfg);
            if (dr.integral.status != Status::Converged) {
              throw std::runtime_error("derivative flow did not converge");
            }
            if (std::abs(dr.derivative) == 0.0) {
              throw std::runtime_error("flow derivative vanished");
            }
            const Cplx yp =
                value_or_throw(ig, contour, z + Cplx{h, 0}, cfg, o.method);
            const Cplx ym =
                value_or_throw(ig, contour, z - Cplx{h, 0}, cfg, o.method);
            const Cplx fd = (yp - ym) / Cplx{2.0 * h, 0.0};
            worst = std::max(worst, std::abs(fd - dr.derivative) /
                                        std::abs(dr.derivative));
          }
          c.deviation = worst;
        }));
  }
  return cases;
}

std::vector<CheckCase> check_normality(const CheckOptions& o) {
  std::vector<CheckCase> cases;

  // Quadratic perturbation maps with geometrically summable coefficients:
  // partial compositions form a Cauchy sequence dominated by twice the
  // coefficient tail.
  std::vector<MapFn> maps;
  std::vector<double> mags;
  for (int j = 0; j < 40; ++j) {
    const double mag = 0.04 * std::pow(0.6, j);
    const Cplx cj = mag * Cplx{std::cos(double(j)), std::sin(double(j))};
    mags.push_back(mag);
    maps.push_back([cj](Cplx z) { return z + cj * z * z; });
  }
  std::vector<Cplx> probes{Cplx{0, 0}};
  for (int k = 0; k < 8; ++k) {
    const double a = 2.0 * kPi * k / 8.0;
    probes.push_back(Cplx{std::cos(a), std::sin(a)});
  }
  const std::pair<int, int> pairs[] = {{5, 10}, {10, 20}, {20, 40}, {5, 40}};
  for (const auto& [m, mp] : pairs) {
    double tail = 0.0;
    for (std::size_t j = std::size_t(m); j < mags.size(); ++j) tail += mags[j];
    const double bound = o.tol.value_or(2.0 * tail);
    char name[96];
    std::snprintf(name, sizeof name,
                  "partial compositions m=%d vs m=%d within tail bound", m, mp);
    cases.push_back(guarded(name, bound, [&, m = m, mp = mp](CheckCase& c) {
      double worst = 0.0;
      for (const Cplx z : probes) {
        const Cplx a =
            inner_compose(std::span{maps.data(), std::size_t(m)}, z);
        const Cplx b =
            inner_compose(std::span{maps.data(), std::size_t(mp)}, z);
        worst = std::max(worst, std::abs(a - b));
      }
      c.deviation = worst;
    }));
  }

  // The self-consistent majorant dominates the actual displacement.
  struct BoundFix {
    const char* name;
    const char* phi;
    Contour contour;
    double radius;
  };
  const BoundFix fixes[] = {
      {"majorant on seg(0,0.5), phi=z, radius 1", "z",
       make_segment(Cplx{0, 0}, Cplx{0.5, 0}), 1.0},
      {"majorant on circle(0,1), phi=0.05z^2+0.02, radius 0.5",
       "0.05*z^2+0.02", make_circle(Cplx{0, 0}, 1.0), 0.5},
  };
  for (const auto& f : fixes) {
    const Integrand ig = integrand_of(parse_expr(f.phi));
    cases.push_back(guarded(f.name, 0.0, [&](CheckCase& c) {
      const double bound = normal_sum_bound(ig, f.contour, f.radius);
      c.tol = o.tol.value_or(bound);
      double worst = 0.0;
      for (const Cplx z : disk_points(10, f.radius, 20260818u)) {
        const Cplx y = value_or_throw(ig, f.contour, z, o.engine, o.method);
        worst = std::max(worst, std::abs(y - z));
      }
      c.deviation = worst;
    }));
  }

  // The majorant grows with the disk radius.
  cases.push_back(guarded(
      "majorant nondecreasing in radius", o.tol.value_or(1e-12),
      [&](CheckCase& c) {
        const Integrand ig = integrand_of(parse_expr("0.05*z^2+0.02"));
        const Contour loop = make_circle(Cplx{0, 0}, 1.0);
        double prev = -kInf;
        double worst = 0.0;
        for (const double r : {0.2, 0.35, 0.5}) {
          const double b = normal_sum_bound(ig, loop, r);
          if (prev > -kInf) worst = std::max(worst, prev - b);
          prev = b;
        }
        c.deviation = worst;
      }));
  return cases;
}

std::vector<CheckCase> check_residual_delta(const CheckOptions& o) {
  const double tol = otol(o, 100.0 * o.engine.tol);
  // A generous radius and a small probe keep every family's flow well away
  // from its blow-up locus even on the inner half-radius loop: the worst
  // antiderivative swing over these fixtures is ~15, so the multiplicative
  // family peaks near |z| e^15 << divergence_cap, the reciprocal family's
  // path stays |1/z| - 15 > 0 away from the flow-through-infinity point,
  // and the root family's base never encircles the origin (|z^-2| >> 30).
  const double delta = o.delta.value_or(0.9);
  const Cplx z = o.z.value_or(Cplx{0.05, 0.0});
  const char* parts[] = {"1", "s+2", "exp(s)"};
  std::vector<CheckCase> cases;
  for (int n = 0; n <= 3; ++n) {
    for (int k = 0; k <= 2; ++k) {
      char name[96];
      std::snprintf(name, sizeof name,
                    "half-radius agreement, power n=%d, pole order %d", n,
                    k + 1);
      cases.push_back(guarded(name, tol, [&, n, k](CheckCase& c) {
        double worst = 0.0;
        for (const char* p : parts) {
          const Expr f = Expr::div(
              Expr::mul(parse_expr(p),
                        Expr::int_power(Expr::variable(Var::Z), n)),
              Expr::int_power(Expr::variable(Var::S), k + 1));
          const ResidualResult rr =
              compositional_residual(f, PoleSpec{Cplx{0, 0}, k + 1, p}, z,
                                     delta, o.engine, o.method, true);
          if (rr.status != Status::Converged) {
            throw std::runtime_error(std::string{"residual "} +
                                     status_name(rr.status) + " for p=" + p);
          }
          worst = std::max(worst, rr.error_estimate);
        }
        c.deviation = worst;
      }));
    }
  }
  return cases;
}

std::vector<CheckCase> check_conjugacy(const CheckOptions& o) {
  const double tol = otol(o, 1e-6);
  const std::vector<Cplx> probes =
      o.z ? std::vector<Cplx>{*o.z}
          : std::vector<Cplx>{Cplx{0.3, 0}, Cplx{0.1, 0.2}, Cplx{-0.25, 0}};
  struct Geo {
    std::string name;
    const char* f;
    Contour gamma, loop2, tau;
  };
  std::vector<Geo> geos;
  geos.push_back({"radius 0.5 vs 0.7, f=z/s", "z/s",
                  make_circle(Cplx{0, 0}, 0.5), make_circle(Cplx{0, 0}, 0.7),
                  make_segment(Cplx{0.5, 0}, Cplx{0.7, 0})});
  geos.push_back({"radius 0.5 vs 0.7, f=z^2/s", "z^2/s",
                  make_circle(Cplx{0, 0}, 0.5), make_circle(Cplx{0, 0}, 0.7),
                  make_segment(Cplx{0.5, 0}, Cplx{0.7, 0})});
  geos.push_back(
      {"base point 0.5 vs 0.5i, f=(s+1)z/s", "(s+1)*z/s",
       make_circle(Cplx{0, 0}, 0.5),
       Contour{{CircularPiece{Cplx{0, 0}, 0.5, kPi / 2.0,
                              kPi / 2.0 + 2.0 * kPi}}},
       make_arc(Cplx{0, 0}, 0.5, 0.0, kPi / 2.0)});
  std::vector<CheckCase> cases;
  for (const auto& g : geos) {
    cases.push_back(guarded(g.name, tol, [&](CheckCase& c) {
      const ConjugacyReport rep =
          conjugacy_check(integrand_of(parse_expr(g.f)), g.gamma, g.loop2,
                          g.tau, probes, o.engine, o.method, tol);
      c.deviation = rep.max_deviation;
    }));
  }
  return cases;
}

std::vector<CheckCase> check_residual_class(const CheckOptions& o) {
  const double tol = otol(o, 1e-6);
  const Cplx z1 = o.z.value_or(Cplx{1.0, 0.0});
  const Cplx z2 = o.z.value_or(Cplx{0.5, 0.0});
  const Contour big = make_circle(Cplx{1.5, 0.0}, 2.6);
  const std::vector<PoleSpec> fwd{{Cplx{0, 0}, 1, "origin"},
                                  {Cplx{3, 0}, 1, "right"}};
  const std::vector<PoleSpec> rev{fwd[1], fwd[0]};
  std::vector<CheckCase> cases;

  const Expr f1 = parse_expr("z*(1/s + 1/(s-3))");
  const Integrand f1_ig = integrand_of(f1);
  cases.push_back(guarded(
      "two simple poles vs enclosing loop", tol, [&](CheckCase& c) {
        c.lhs = residual_class_compose(f1, fwd, z1, o.engine, o.method);
        c.rhs = value_or_throw(f1_ig, big, z1, o.engine, o.method);
        c.deviation = std::abs(c.lhs - c.rhs);
        c.has_values = true;
      }));
  cases.push_back(guarded(
      "two simple poles, swapped order", tol, [&](CheckCase& c) {
        c.lhs = residual_class_compose(f1, rev, z1, o.engine, o.method);
        c.rhs = value_or_throw(f1_ig, big, z1, o.engine, o.method);
        c.deviation = std::abs(c.lhs - c.rhs);
        c.has_values = true;
      }));

  const Expr f2 = parse_expr("z*(0.25/s + 0.25/(s-3))");
  const Integrand f2_ig = integrand_of(f2);
  cases.push_back(guarded(
      "quarter coefficients vs enclosing loop", tol, [&](CheckCase& c) {
        c.lhs = residual_class_compose(f2, fwd, z1, o.engine, o.method);
        c.rhs = value_or_throw(f2_ig, big, z1, o.engine, o.method);
        c.deviation = std::abs(c.lhs - c.rhs);
        c.has_values = true;
      }));
  cases.push_back(guarded(
      "quarter coefficients flip the sign", tol, [&](CheckCase& c) {
        c.lhs = residual_class_compose(f2, fwd, z1, o.engine, o.method);
        c.rhs = -z1;
        c.deviation = std::abs(c.lhs - c.rhs);
        c.has_values = true;
      }));

  const Expr f3 = parse_expr("z*(1/s^2 + 1/(s-3))");
  const std::vector<PoleSpec> mixed{{Cplx{0, 0}, 2, "origin"},
                                    {Cplx{3, 0}, 1, "right"}};
  const Integrand f3_ig = integrand_of(f3);
  cases.push_back(guarded(
      "double pole plus simple pole vs enclosing loop", tol,
      [&](CheckCase& c) {
        c.lhs = residual_class_compose(f3, mixed, z2, o.engine, o.method);
        c.rhs = value_or_throw(f3_ig, big, z2, o.engine, o.method);
        c.deviation = std::abs(c.lhs - c.rhs);
        c.has_values = true;
      }));
  return cases;
}

std::vector<CheckCase> check_winding(const CheckOptions& o) {
  const double tol = otol(o, 1e-6);
  const double delta = o.delta.value_or(0.5);
  struct Fix {
    std::string name;
    const char* f;
    int turns;
    Cplx z;
    Cplx expected;
  };
  const Cplx z3{0.3, 0.2};
  std::vector<Fix> fixes;
  fixes.push_back({"quarter coefficient, two turns", "0.25*z/s", 2,
                   Cplx{1, 0}, Cplx{-1.0, 0.0}});
  fixes.push_back({"unit coefficient, three turns", "z/s",
                   o.count.value_or(3), z3, z3});
  {
    const Cplx den = Cplx{1.0, 0.0} - Cplx{0.0, 4.0 * kPi};
    fixes.push_back({"reciprocal shift, two turns", "z^2/s", 2, Cplx{1, 0},
                     Cplx{1.0, 0.0} / den});
  }
  std::vector<CheckCase> cases;
  for (const auto& f : fixes) {
    const Integrand ig = integrand_of(parse_expr(f.f));
    const Cplx z = o.z.value_or(f.z);
    cases.push_back(guarded(
        f.name + ": iterated vs multi-turn loop", tol, [&](CheckCase& c) {
          const WindingResult wr = winding_compose(
              ig, PoleSpec{Cplx{0, 0}, 1, "origin"}, f.turns, z, delta,
              o.engine, o.method, kInf);
          c.deviation = wr.deviation;
          c.lhs = wr.composed;
          c.rhs = wr.multiturn;
          c.has_values = true;
        }));
    if (!o.z && !o.count) {
      cases.push_back(guarded(
          f.name + ": closed form", tol, [&](CheckCase& c) {
            const WindingResult wr = winding_compose(
                ig, PoleSpec{Cplx{0, 0}, 1, "origin"}, f.turns, z, delta,
                o.engine, o.method, kInf);
            c.deviation = std::abs(wr.multiturn - f.expected);
            c.lhs = wr.multiturn;
            c.rhs = f.expected;
            c.has_values = true;
          }));
    }
  }
  return cases;
}

std::vector<CheckCase> check_taylor(const CheckOptions& o) {
  const double tol_final = otol(o, 1e-6);
  const double slack = 5e-9;  // numerical floor allowance for monotonicity
  const int K = o.count.value_or(12);
  const EngineConfig cfg = tightened(o.engine, 1e-12, 1e-13, 1e-12);
  struct Fix {
    std::string name;
    const char* phi;
    Contour gamma;
    Cplx w, z, target;
    bool exact_at_1;
  };
  std::vector<Fix> fixes;
  {
    const Cplx rot = std::exp(Cplx{0.0, 2.0 * kPi * 0.3});
    fixes.push_back({"linear family p(s)=s", "s*z", make_circle(Cplx{0, 0}, 1),
                     Cplx{0.3, 0}, Cplx{1, 0}, rot, true});
  }
  {
    const Cplx z{0.2, 0.0};
    const Cplx target =
        Cplx{1, 0} / (Cplx{1, 0} / z - Cplx{0.0, 2.0 * kPi * 0.3});
    fixes.push_back({"reciprocal family p(s)=s", "s*z^2",
                     make_circle(Cplx{0, 0}, 1), Cplx{0.3, 0}, z, target,
                     true});
  }
  {
    const Cplx target = std::exp(Cplx{0.0, 2.0 * kPi / 0.75});
    fixes.push_back({"geometric analytic part p(s)=1/(1-s)", "z/(1-s)",
                     make_circle(Cplx{0, 0}, 0.8), Cplx{0.25, 0}, Cplx{1, 0},
                     target, false});
  }
  std::vector<CheckCase> cases;
  for (const auto& f : fixes) {
    const Expr phi = parse_expr(f.phi);
    const auto err_at = [&](int k) {
      return std::abs(taylor_composition(phi, Cplx{0, 0}, f.w, k, f.gamma, f.z,
                                         cfg, o.method) -
                      f.target);
    };
    if (f.exact_at_1) {
      cases.push_back(guarded(f.name + ": exact at K=1", o.tol.value_or(1e-8),
                              [&](CheckCase& c) { c.deviation = err_at(1); }));
    }
    {
      char name[96];
      std::snprintf(name, sizeof name, "%s: truncation error at K=%d",
                    f.name.c_str(), K);
      cases.push_back(guarded(name, tol_final,
                              [&](CheckCase& c) { c.deviation = err_at(K); }));
    }
    cases.push_back(guarded(
        f.name + ": error nonincreasing K=2..12", o.tol.value_or(slack),
        [&](CheckCase& c) {
          double prev = err_at(2);
          double worst = 0.0;
          for (int k = 3; k <= 12; ++k) {
            const double cur = err_at(k);
            worst = std::max(worst, cur - prev);
            prev = cur;
          }
          c.deviation = worst;
        }));
  }
  return cases;
}

std::vector<CheckCase> check_semigroup(const CheckOptions& o) {
  const double tol = otol(o, 1e-7);
  const Contour loop = make_circle(Cplx{0, 0}, 1.0);
  const Expr fs = parse_expr("1/s");
  const Expr lin = parse_expr("z");
  const Expr sq = parse_expr("z^2");
  std::vector<CheckCase> cases;
  cases.push_back(guarded(
      "quarter turn twice equals half turn", tol, [&](CheckCase& c) {
        const PairReport pr =
            semigroup_check(fs, lin, loop, Cplx{0.25, 0}, Cplx{0.25, 0},
                            o.z.value_or(Cplx{1, 0}), o.engine, o.method, tol);
        c.deviation = pr.deviation;
        c.lhs = pr.lhs;
        c.rhs = pr.rhs;
        c.has_values = true;
      }));
  cases.push_back(guarded(
      "half turn flips the sign", tol, [&](CheckCase& c) {
        c.lhs = semigroup_eval(fs, lin, loop, Cplx{0.5, 0}, Cplx{1, 0},
                               o.engine, o.method);
        c.rhs = Cplx{-1.0, 0.0};
        c.deviation = std::abs(c.lhs - c.rhs);
        c.has_values = true;
      }));
  cases.push_back(guarded(
      "zero time is the identity", o.tol.value_or(1e-10), [&](CheckCase& c) {
        const Cplx z = o.z.value_or(Cplx{0.3, 0.4});
        c.lhs = semigroup_eval(fs, lin, loop, Cplx{0, 0}, z, o.engine,
                               o.method);
        c.rhs = z;
        c.deviation = std::abs(c.lhs - c.rhs);
        c.has_values = true;
      }));
  cases.push_back(guarded(
      "reciprocal family parameter addition", tol, [&](CheckCase& c) {
        const PairReport pr =
            semigroup_check(fs, sq, loop, Cplx{0.3, 0}, Cplx{0.3, 0},
                            o.z.value_or(Cplx{0.1, 0}), o.engine, o.method,
                            tol);
        c.deviation = pr.deviation;
        c.lhs = pr.lhs;
        c.rhs = pr.rhs;
        c.has_values = true;
      }));
  return cases;
}

std::vector<CheckCase> check_infinitesimal(const CheckOptions& o) {
  const double tol = otol(o, 1e-6);
  const EngineConfig cfg = tightened(o.engine, 1e-11, 1e-13, 1e-12);
  struct Fix {
    std::string name;
    const char *f, *phi;
    Contour sigma;
    Cplx z;
  };
  const Fix fixes[] = {
      {"f=1, phi=z on seg(0,1)", "1", "z", make_segment(Cplx{0, 0}, Cplx{1, 0}),
       Cplx{1, 0}},
      {"f=s, phi=z^2 on seg(0,1)", "s", "z^2",
       make_segment(Cplx{0, 0}, Cplx{1, 0}), Cplx{0.5, 0}},
      {"f=1/s, phi=exp(z) on circle(0,1)", "1/s", "exp(z)",
       make_circle(Cplx{0, 0}, 1.0), Cplx{0.2, 0}},
  };
  std::vector<CheckCase> cases;
  for (const auto& f : fixes) {
    cases.push_back(guarded(
        f.name + ": rate at time zero vs weighted line integral", tol,
        [&](CheckCase& c) {
          const PairReport pr = infinitesimal_derivative(
              parse_expr(f.f), parse_expr(f.phi), f.sigma,
              o.z.value_or(f.z), cfg, o.method, tol);
          c.deviation = pr.deviation;
          c.lhs = pr.lhs;
          c.rhs = pr.rhs;
          c.has_values = true;
        }));
  }
  return cases;
}

std::vector<CheckCase> check_fubini(const CheckOptions& o) {
  const double tol = otol(o, 1e-7);
  const Contour loop = make_circle(Cplx{0, 0}, 1.0);
  const Contour tau = make_segment(Cplx{0, 0}, Cplx{1, 0});
  struct Fix {
    std::string name;
    const char *p, *fs, *phi;
    Cplx z;
  };
  const Fix fixes[] = {
      {"constant weight", "1", "1/s", "z", Cplx{1, 0}},
      {"linear weight", "w", "1/s", "z", Cplx{1, 0}},
      {"reciprocal family", "1", "1/s", "z^2", Cplx{0.1, 0}},
  };
  std::vector<CheckCase> cases;
  for (const auto& f : fixes) {
    cases.push_back(guarded(
        f.name + ": weight-first vs loop-first", tol, [&](CheckCase& c) {
          const PairReport pr = fubini_check(
              parse_expr(f.p), parse_expr(f.fs), parse_expr(f.phi), loop, tau,
              o.z.value_or(f.z), o.engine, o.method, tol);
          c.deviation = pr.deviation;
          c.lhs = pr.lhs;
          c.rhs = pr.rhs;
          c.has_values = true;
        }));
  }
  return cases;
}

Expr gaussian_profile(double scale) {
  return Expr::call(Expr::Kind::Exp,
                    Expr::mul(Expr::constant(Cplx{-scale * kPi, 0.0}),
                              Expr::int_power(Expr::variable(Var::W), 2)));
}

DerivedResidual gaussian_family(double scale, const char* phi) {
  return DerivedResidual::separable(
      gaussian_profile(scale), parse_expr("1/s"), parse_expr(phi),
      make_circle(Cplx{0, 0}, 1.0),
      std::vector<PoleSpec>{{Cplx{0, 0}, 1, "origin"}});
}

bool family_enabled(const CheckOptions& o, const char* name) {
  return !o.family || *o.family == name;
}

std::vector<CheckCase> check_fourier_inversion(const CheckOptions& o) {
  const double tol = otol(o, 1e-5);
  const double scale = o.scale.value_or(1.0);
  std::vector<CheckCase> cases;
  if (family_enabled(o, "additive")) {
    const DerivedResidual d = gaussian_family(scale, "1");
    if (scale == 1.0 && !o.z) {
      cases.push_back(guarded(
          "additive family value at w=0.5, z=0", o.tol.value_or(1e-6),
          [&](CheckCase& c) {
            const CompResult r = d.value(Cplx{0.5, 0}, Cplx{0, 0}, o.engine,
                                         o.method);
            if (r.status != Status::Converged) {
              throw std::runtime_error("family value did not converge");
            }
            c.lhs = r.value;
            c.rhs = Cplx{0.0, 2.0 * kPi} * std::exp(Cplx{-kPi / 4.0, 0.0});
            c.deviation = std::abs(c.lhs - c.rhs);
            c.has_values = true;
          }));
    }
    const std::pair<Cplx, Cplx> probes[] = {
        {Cplx{0.5, 0}, Cplx{0, 0}},
        {Cplx{0, 0}, Cplx{0, 0}},
        {Cplx{0.25, 0}, Cplx{0.1, 0}},
    };
    for (const auto& [w, z0] : probes) {
      const Cplx z = o.z.value_or(z0);
      cases.push_back(guarded(
          "additive family roundtrip at w=" + short_c(w) + ", z=" + short_c(z),
          tol, [&](CheckCase& c) {
            const PairReport pr = fourier_inversion_check(
                d, w, z, o.transform, o.engine, o.method, tol);
            c.deviation = pr.deviation;
            c.lhs = pr.lhs;
            c.rhs = pr.rhs;
            c.has_values = true;
          }));
    }
  }
  if (family_enabled(o, "linear")) {
    const DerivedResidual d = gaussian_family(scale, "z");
    const std::pair<Cplx, Cplx> probes[] = {
        {Cplx{0.2, 0}, Cplx{0.3, 0}},
        {Cplx{0, 0}, Cplx{0.3, 0}},
    };
    for (const auto& [w, z0] : probes) {
      const Cplx z = o.z.value_or(z0);
      cases.push_back(guarded(
          "linear family roundtrip at w=" + short_c(w) + ", z=" + short_c(z),
          tol, [&](CheckCase& c) {
            const PairReport pr = fourier_inversion_check(
                d, w, z, o.transform, o.engine, o.method, tol);
            c.deviation = pr.deviation;
            c.lhs = pr.lhs;
            c.rhs = pr.rhs;
            c.has_values = true;
          }));
    }
  }
  return cases;
}

std::vector<CheckCase> check_poisson(const CheckOptions& o) {
  const double tol = otol(o, 1e-5);
  const double scale = o.scale.value_or(1.0);
  const int N = o.count.value_or(4);
  std::vector<CheckCase> cases;
  if (family_enabled(o, "additive")) {
    const DerivedResidual d = gaussian_family(scale, "1");
    const Cplx z = o.z.value_or(Cplx{0.1, 0});
    char name[96];
    std::snprintf(name, sizeof name,
                  "additive family, integer chain N=%d vs transformed chain",
                  N);
    Cplx lhs_keep{0, 0};
    cases.push_back(guarded(name, tol, [&](CheckCase& c) {
      const PairReport pr =
          poisson_composition(d, N, z, o.transform, o.engine, o.method, tol);
      c.deviation = pr.deviation;
      c.lhs = pr.lhs;
      c.rhs = pr.rhs;
      c.has_values = true;
      lhs_keep = pr.lhs;
    }));
    if (scale == 1.0) {
      cases.push_back(guarded(
          "additive family chain matches the direct theta sum",
          o.tol.value_or(1e-6), [&](CheckCase& c) {
            double direct = 0.0;
            for (int n = -N; n <= N; ++n) {
              direct += std::exp(-kPi * double(n) * double(n));
            }
            const Cplx measured =
                (lhs_keep - z) / Cplx{0.0, 2.0 * kPi};
            c.lhs = measured;
            c.rhs = Cplx{direct, 0.0};
            c.deviation = std::abs(measured - c.rhs);
            c.has_values = true;
          }));
    }
  }
  if (family_enabled(o, "linear")) {
    const DerivedResidual d = gaussian_family(scale, "z");
    const Cplx z = o.z.value_or(Cplx{0.3, 0});
    char name[96];
    std::snprintf(name, sizeof name,
                  "linear family, integer chain N=%d vs transformed chain", N);
    cases.push_back(guarded(name, tol, [&](CheckCase& c) {
      const PairReport pr =
          poisson_composition(d, N, z, o.transform, o.engine, o.method, tol);
      c.deviation = pr.deviation;
      c.lhs = pr.lhs;
      c.rhs = pr.rhs;
      c.has_values = true;
    }));
  }
  return cases;
}

std::vector<CheckCase> check_linearity(const CheckOptions& o) {
  const double tol = otol(o, 1e-5);
  const double s1 = o.scale.value_or(1.0);
  const double s2 = 2.0 * s1;
  const Cplx xi{0.25, 0.0};
  std::vector<CheckCase> cases;
  if (family_enabled(o, "additive")) {
    const std::vector<DerivedResidual> pair{gaussian_family(s1, "1"),
                                            gaussian_family(s2, "1")};
    const std::vector<DerivedResidual> single{gaussian_family(s1, "1")};
    const Cplx z = o.z.value_or(Cplx{0.1, 0});
    cases.push_back(guarded(
        "additive pair: sum of transforms vs transform of sum", tol,
        [&](CheckCase& c) {
          const PairReport pr = fourier_linearity_check(
              pair, xi, z, o.transform, o.engine, o.method, tol);
          c.deviation = pr.deviation;
          c.lhs = pr.lhs;
          c.rhs = pr.rhs;
          c.has_values = true;
        }));
    cases.push_back(guarded(
        "single element: object transform vs line definition", tol,
        [&](CheckCase& c) {
          const PairReport pr = fourier_linearity_check(
              single, xi, z, o.transform, o.engine, o.method, tol);
          c.deviation = pr.deviation;
          c.lhs = pr.lhs;
          c.rhs = pr.rhs;
          c.has_values = true;
        }));
  }
  if (family_enabled(o, "linear")) {
    const std::vector<DerivedResidual> pair{gaussian_family(s1, "z"),
                                            gaussian_family(s2, "z")};
    const Cplx z = o.z.value_or(Cplx{0.3, 0});
    cases.push_back(guarded(
        "linear pair: composed transforms vs transform of sum", tol,
        [&](CheckCase& c) {
          const PairReport pr = fourier_linearity_check(
              pair, xi, z, o.transform, o.engine, o.method, tol);
          c.deviation = pr.deviation;
          c.lhs = pr.lhs;
          c.rhs = pr.rhs;
          c.has_values = true;
        }));
  }
  return cases;
}

std::vector<CheckCase> check_laplace(const CheckOptions& o) {
  const double tol = otol(o, 1e-6);
  const double scale = o.scale.value_or(1.0);
  const Expr profile = Expr::call(
      Expr::Kind::Exp, Expr::mul(Expr::constant(Cplx{-scale, 0.0}),
                                 Expr::variable(Var::W)));
  const auto family = [&](const char* phi) {
    return DerivedResidual::separable(
        profile, parse_expr("1/s"), parse_expr(phi),
        make_circle(Cplx{0, 0}, 1.0),
        std::vector<PoleSpec>{{Cplx{0, 0}, 1, "origin"}});
  };
  std::vector<CheckCase> cases;
  if (family_enabled(o, "additive")) {
    const DerivedResidual d = family("1");
    const Cplx z = o.z.value_or(Cplx{0.2, 0.1});
    cases.push_back(guarded(
        "additive exponential profile at y=1", tol, [&](CheckCase& c) {
          const CompResult r =
              laplace_transform(d, Cplx{1, 0}, z, o.transform, o.engine,
                                o.method);
          if (r.status != Status::Converged) {
            throw std::runtime_error("transform did not converge");
          }
          c.lhs = r.value;
          c.rhs = z + Cplx{0.0, 2.0 * kPi} / Cplx{1.0 + scale, 0.0};
          c.deviation = std::abs(c.lhs - c.rhs);
          c.has_values = true;
        }));
    cases.push_back(guarded(
        "large y closes on the start value", tol, [&](CheckCase& c) {
          const CompResult r = laplace_transform(d, Cplx{50, 0}, Cplx{0, 0},
                                                 o.transform, o.engine,
                                                 o.method);
          if (r.status != Status::Converged) {
            throw std::runtime_error("transform did not converge");
          }
          c.lhs = r.value;
          c.rhs = Cplx{0.0, 2.0 * kPi} / Cplx{50.0 + scale, 0.0};
          c.deviation = std::abs(c.lhs - c.rhs);
          c.has_values = true;
        }));
    cases.push_back(guarded(
        "displacement shrinks as y grows", o.tol.value_or(1e-9),
        [&](CheckCase& c) {
          double prev = kInf;
          double worst = 0.0;
          for (const double y : {1.0, 2.0, 4.0, 8.0}) {
            const CompResult r = laplace_transform(d, Cplx{y, 0}, Cplx{0, 0},
                                                   o.transform, o.engine,
                                                   o.method);
            if (r.status != Status::Converged) {
              throw std::runtime_error("transform did not converge");
            }
            const double mag = std::abs(r.value);
            if (std::isfinite(prev)) worst = std::max(worst, mag - prev);
            prev = mag;
          }
          c.deviation = worst;
        }));
  }
  if (family_enabled(o, "linear")) {
    const DerivedResidual d = family("z");
    const Cplx z = o.z.value_or(Cplx{0.3, 0});
    cases.push_back(guarded(
        "linear exponential profile at y=1", tol, [&](CheckCase& c) {
          const CompResult r =
              laplace_transform(d, Cplx{1, 0}, z, o.transform, o.engine,
                                o.method);
          if (r.status != Status::Converged) {
            throw std::runtime_error("transform did not converge");
          }
          c.lhs = r.value;
          c.rhs = z * std::exp(Cplx{0.0, 2.0 * kPi} / Cplx{1.0 + scale, 0.0});
          c.deviation = std::abs(c.lhs - c.rhs);
          c.has_values = true;
        }));
  }
  return cases;
}

using CheckFn = std::vector<CheckCase> (*)(const CheckOptions&);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> table = {
      {"closed-contour", check_closed_contour},
      {"path-independence", check_path_independence},
      {"orientation", check_orientation},
      {"homomorphism", check_homomorphism},
      {"derivative", check_derivative},
      {"normality", check_normality},
      {"residual-delta", check_residual_delta},
      {"conjugacy", check_conjugacy},
      {"residual-class", check_residual_class},
      {"winding", check_winding},
      {"taylor", check_taylor},
      {"semigroup", check_semigroup},
      {"infinitesimal", check_infinitesimal},
      {"fubini", check_fubini},
      {"fourier-inversion", check_fourier_inversion},
      {"poisson", check_poisson},
      {"linearity", check_linearity},
      {"laplace", check_laplace},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

CheckReport run_check(const std::string& name, const CheckOptions& opts) {
  for (const auto& [key, fn] : registry()) {
    if (key == name) {
      CheckReport report;
      report.check = name;
      report.cases = fn(opts);
      report.pass = !report.cases.empty() &&
                    std::all_of(report.cases.begin(), report.cases.end(),
                                [](const CheckCase& c) { return c.pass; });
      return report;
    }
  }
  throw std::invalid_argument("unknown check name: " + name);
}

}  // namespace compint
