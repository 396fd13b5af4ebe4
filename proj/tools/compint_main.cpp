// Command-line front end.  Every run prints exactly one JSON report on
// stdout; diagnostics go to stderr.  Exit codes: 0 converged / all checks
// passed, 1 usage or input error, 2 diverged or a failed check, 3 refinement
// budget exhausted.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "compint/checks.hpp"
#include "compint/contour.hpp"
#include "compint/engine.hpp"
#include "compint/expr.hpp"
#include "compint/residue.hpp"
#include "compint/scalar.hpp"
#include "compint/transforms.hpp"

namespace {

using compint::Cplx;
using nlohmann::json;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

json cplx_json(const Cplx& v) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return nullptr;
  return json{{"re", v.real()}, {"im", v.imag()}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

json engine_json(const compint::EngineConfig& cfg) {
  return json{
      {"tol", cfg.tol},
      {"max_doublings", cfg.max_doublings},
      {"initial_n", cfg.initial_n},
      {"divergence_cap", cfg.divergence_cap},
      {"ode_abs_tol", cfg.ode_abs_tol},
      {"ode_rel_tol", cfg.ode_rel_tol},
  };
}

json transform_json(const compint::TransformConfig& tcfg) {
  return json{
      {"truncation", tcfg.truncation},
      {"quad_points_per_unit", tcfg.quad_points_per_unit},
      {"tail_bound_target", tcfg.tail_bound_target},
  };
}

int exit_for(compint::Status s) {
  switch (s) {
    case compint::Status::Converged: return 0;
    case compint::Status::Diverged: return 2;
    case compint::Status::MaxRefinement: return 3;
  }
  return 1;
}

compint::Status worse(compint::Status a, compint::Status b) {
  const auto rank = [](compint::Status s) {
    switch (s) {
      case compint::Status::Converged: return 0;
      case compint::Status::MaxRefinement: return 1;
      case compint::Status::Diverged: return 2;
    }
    return 2;
  };
  return rank(a) >= rank(b) ? a : b;
}

compint::Method method_of(const std::string& name) {
  return name == "riemann" ? compint::Method::Riemann : compint::Method::Ode;
}

json base_report(std::string command, json config, json value,
                 const char* status, long n_final, double error_estimate,
                 std::string method, double wall_ms) {
  return json{
      {"command", std::move(command)},
      {"config", std::move(config)},
      {"value", std::move(value)},
      {"status", status},
      {"n_final", n_final},
      {"error_estimate", finite_or_null(error_estimate)},
      {"method", std::move(method)},
      {"wall_ms", wall_ms},
  };
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

compint::CompResult run_by(compint::Method m, const compint::Integrand& ig,
                           const compint::Contour& c, Cplx z,
                           const compint::EngineConfig& cfg) {
  return m == compint::Method::Riemann ? comp_integral(ig, c, z, cfg)
                                       : comp_integral_ode(ig, c, z, cfg);
}

// Shared flag bundles -------------------------------------------------------

struct EngineFlags {
  compint::EngineConfig cfg;
  // `check` reserves --tol for the per-case tolerance, so its engine
  // tolerance flag is spelled --engine-tol.
  void attach(CLI::App* cmd, bool tol_as_engine_tol = false) {
    cmd->add_option(tol_as_engine_tol ? "--engine-tol" : "--tol", cfg.tol,
                    "refinement stopping tolerance");
    cmd->add_option("--max-doublings", cfg.max_doublings,
                    "Riemann doubling budget");
    cmd->add_option("--initial-n", cfg.initial_n,
                    "first per-piece partition size");
    cmd->add_option("--divergence-cap", cfg.divergence_cap,
                    "|z| beyond this counts as divergence");
    cmd->add_option("--ode-abs-tol", cfg.ode_abs_tol,
                    "ODE local error control, absolute");
    cmd->add_option("--ode-rel-tol", cfg.ode_rel_tol,
                    "ODE local error control, relative");
  }
};

struct TransformFlags {
  compint::TransformConfig tcfg;
  void attach(CLI::App* cmd) {
    cmd->add_option("--truncation", tcfg.truncation,
                    "initial window half-width for line transforms");
    cmd->add_option("--quad-n", tcfg.quad_points_per_unit,
                    "profile quadrature points per unit length");
    cmd->add_option("--tail-target", tcfg.tail_bound_target,
                    "window tail bound target");
  }
};

// eval -----------------------------------------------------------------------

struct EvalArgs {
  std::string phi, contour, z, method = "ode";
  EngineFlags engine;
};

int run_eval(const EvalArgs& a) {
  Timer timer;
  const compint::Expr phi = compint::parse_expr(a.phi);
  const compint::Contour c = compint::parse_contour(a.contour);
  const Cplx z = compint::parse_complex(a.z);
  const compint::Integrand ig = compint::integrand_of(phi);

  if (a.method == "both") {
    const compint::CompResult r =
        comp_integral(ig, c, z, a.engine.cfg);
    const compint::CompResult o =
        comp_integral_ode(ig, c, z, a.engine.cfg);
    const compint::Status st = worse(r.status, o.status);
    json rep = base_report("eval", engine_json(a.engine.cfg),
                           cplx_json(o.value), compint::status_name(st),
                           o.n_final, o.error_estimate, "both", timer.ms());
    const auto leg = [](const compint::CompResult& x) {
      return json{{"value", cplx_json(x.value)},
                  {"status", compint::status_name(x.status)},
                  {"n_final", x.n_final},
                  {"error_estimate", finite_or_null(x.error_estimate)}};
    };
    rep["methods"] = json{{"riemann", leg(r)}, {"ode", leg(o)}};
    rep["agreement"] = (r.status == compint::Status::Converged &&
                        o.status == compint::Status::Converged)
                           ? finite_or_null(std::abs(r.value - o.value))
                           : json();
    emit(rep);
    return exit_for(st);
  }

  const compint::CompResult r =
      run_by(method_of(a.method), ig, c, z, a.engine.cfg);
  emit(base_report("eval", engine_json(a.engine.cfg), cplx_json(r.value),
                   compint::status_name(r.status), r.n_final,
                   r.error_estimate, compint::method_name(r.method),
                   timer.ms()));
  return exit_for(r.status);
}

// check ----------------------------------------------------------------------

struct CheckArgs {
  std::string name;
  std::string method = "ode";
  std::optional<std::string> phi, contour, z, family;
  std::optional<double> tol, scale, delta;
  std::optional<int> count;
  EngineFlags engine;
  TransformFlags transform;
};

int run_check_cmd(const CheckArgs& a) {
  Timer timer;
  compint::CheckOptions opts;
  opts.engine = a.engine.cfg;
  opts.transform = a.transform.tcfg;
  opts.method = method_of(a.method);
  if (a.phi) opts.phi = compint::parse_expr(*a.phi);
  if (a.contour) opts.contour = compint::parse_contour(*a.contour);
  if (a.z) opts.z = compint::parse_complex(*a.z);
  opts.tol = a.tol;
  opts.family = a.family;
  opts.scale = a.scale;
  opts.count = a.count;
  opts.delta = a.delta;

  const compint::CheckReport rep = compint::run_check(a.name, opts);

  json cases = json::array();
  double max_dev = 0.0;
  for (const auto& c : rep.cases) {
    max_dev = std::max(max_dev, c.deviation);
    cases.push_back(json{
        {"name", c.name},
        {"deviation", finite_or_null(c.deviation)},
        {"tol", c.tol},
        {"pass", c.pass},
        {"lhs", c.has_values ? cplx_json(c.lhs) : json()},
        {"rhs", c.has_values ? cplx_json(c.rhs) : json()},
    });
  }
  json config = engine_json(a.engine.cfg);
  config["transform"] = transform_json(a.transform.tcfg);
  json j = base_report(
      "check", std::move(config), json(),
      rep.pass ? "Converged" : "Diverged", long(rep.cases.size()), max_dev,
      a.method, timer.ms());
  j["check"] = rep.check;
  j["cases"] = std::move(cases);
  j["pass"] = rep.pass;
  emit(j);
  return rep.pass ? 0 : 2;
}

// residual -------------------------------------------------------------------

struct ResidualArgs {
  std::string f, pole, z, method = "ode";
  int order = 1;
  std::optional<double> delta;
  EngineFlags engine;
};

int run_residual(const ResidualArgs& a) {
  Timer timer;
  const compint::Expr f = compint::parse_expr(a.f);
  const compint::PoleSpec pole{compint::parse_complex(a.pole), a.order,
                               "pole"};
  const Cplx z = compint::parse_complex(a.z);
  const double delta =
      a.delta.value_or(compint::default_residual_delta(pole, {}));
  const compint::ResidualResult rr = compint::compositional_residual(
      f, pole, z, delta, a.engine.cfg, method_of(a.method), true);

  json rep = base_report("residual", engine_json(a.engine.cfg),
                         cplx_json(rr.value),
                         compint::status_name(rr.status), 0,
                         rr.error_estimate, a.method, timer.ms());
  rep["pole"] = json{{"location", cplx_json(pole.location)},
                     {"order", pole.order}};
  rep["delta"] = delta;
  rep["delta_consistent"] = rr.delta_consistent;
  rep["recheck"] = cplx_json(rr.recheck);
  emit(rep);
  return exit_for(rr.status);
}

// map ------------------------------------------------------------------------

struct MapArgs {
  std::string phi, contour, out, method = "riemann";
  double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;
  int nx = 2, ny = 2, threads = 0;
  EngineFlags engine;
};

int run_map(const MapArgs& a) {
  Timer timer;
  const compint::Expr phi = compint::parse_expr(a.phi);
  const compint::Contour c = compint::parse_contour(a.contour);
  const compint::GridSpec grid{a.re_min, a.re_max, a.im_min, a.im_max, a.nx,
                               a.ny};
  const std::vector<compint::CompResult> cells = compint::classify_grid(
      compint::integrand_of(phi), c, grid, a.engine.cfg,
      method_of(a.method), a.threads);

  std::ofstream out(a.out);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + a.out);
  }
  out << "re,im,status,value_re,value_im,n_final\n";
  long converged = 0, diverged = 0, exhausted = 0;
  char buf[256];
  for (int iy = 0; iy < a.ny; ++iy) {
    const double im =
        a.ny == 1 ? a.im_min
                  : a.im_min + (a.im_max - a.im_min) * iy / double(a.ny - 1);
    for (int ix = 0; ix < a.nx; ++ix) {
      const double re =
          a.re_min + (a.re_max - a.re_min) * ix / double(a.nx - 1);
      const compint::CompResult& r = cells[std::size_t(iy) * a.nx + ix];
      char letter = '?';
      switch (r.status) {
        case compint::Status::Converged:
          letter = 'C';
          ++converged;
          break;
        case compint::Status::Diverged:
          letter = 'D';
          ++diverged;
          break;
        case compint::Status::MaxRefinement:
          letter = 'M';
          ++exhausted;
          break;
      }
      const auto num = [](double v) {
        return std::isfinite(v) ? v : std::nan("");
      };
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%c,%.17g,%.17g,%ld\n", re,
                    im, letter, num(r.value.real()), num(r.value.imag()),
                    r.n_final);
      out << buf;
    }
  }
  out.close();

  json rep = base_report("map", engine_json(a.engine.cfg), json(),
                         "Converged", long(a.nx) * a.ny, 0.0, a.method,
                         timer.ms());
  rep["out"] = a.out;
  rep["grid"] = json{{"re_min", a.re_min}, {"re_max", a.re_max},
                     {"im_min", a.im_min}, {"im_max", a.im_max},
                     {"nx", a.nx},         {"ny", a.ny}};
  rep["counts"] = json{{"Converged", converged},
                       {"Diverged", diverged},
                       {"MaxRefinement", exhausted}};
  emit(rep);
  return 0;
}

// transform ------------------------------------------------------------------

struct TransformArgs {
  std::string h, phi, contour, z, method = "ode";
  double xi = 0.0;    // fourier frequency (real line)
  std::string y;      // laplace parameter
  int terms = 4;      // poisson
  EngineFlags engine;
  TransformFlags transform;
};

compint::DerivedResidual build_derived(const TransformArgs& a) {
  const compint::Expr h = compint::parse_expr(a.h);
  const compint::Expr phi = compint::parse_expr(a.phi);
  compint::Contour gamma = compint::parse_contour(a.contour);
  if (const auto split = compint::separate_ws(h)) {
    return compint::DerivedResidual::separable(
        split->first, split->second, phi, std::move(gamma), {});
  }
  return compint::DerivedResidual(h, phi, std::move(gamma), {});
}

json transform_config(const TransformArgs& a) {
  json config = engine_json(a.engine.cfg);
  config["transform"] = transform_json(a.transform.tcfg);
  return config;
}

int run_fourier(const TransformArgs& a) {
  Timer timer;
  const compint::DerivedResidual d = build_derived(a);
  const Cplx xi{a.xi, 0.0};
  const Cplx z = compint::parse_complex(a.z);
  const compint::CompResult r = compint::fourier_transform(
      d, xi, z, a.transform.tcfg, a.engine.cfg, method_of(a.method));
  json rep = base_report("transform", transform_config(a),
                         cplx_json(r.value), compint::status_name(r.status),
                         r.n_final, r.error_estimate,
                         compint::method_name(r.method), timer.ms());
  rep["kind"] = "fourier";
  rep["xi"] = a.xi;
  emit(rep);
  return exit_for(r.status);
}

int run_laplace(const TransformArgs& a) {
  Timer timer;
  const compint::DerivedResidual d = build_derived(a);
  const Cplx y = compint::parse_complex(a.y);
  const Cplx z = compint::parse_complex(a.z);
  const compint::CompResult r = compint::laplace_transform(
      d, y, z, a.transform.tcfg, a.engine.cfg, method_of(a.method));
  json rep = base_report("transform", transform_config(a),
                         cplx_json(r.value), compint::status_name(r.status),
                         r.n_final, r.error_estimate,
                         compint::method_name(r.method), timer.ms());
  rep["kind"] = "laplace";
  rep["y"] = cplx_json(y);
  emit(rep);
  return exit_for(r.status);
}

int run_poisson(const TransformArgs& a) {
  Timer timer;
  const compint::DerivedResidual d = build_derived(a);
  const Cplx z = compint::parse_complex(a.z);
  const compint::PairReport pr = compint::poisson_composition(
      d, a.terms, z, a.transform.tcfg, a.engine.cfg, method_of(a.method));
  json rep = base_report("transform", transform_config(a),
                         cplx_json(pr.lhs),
                         pr.pass ? "Converged" : "Diverged", a.terms,
                         pr.deviation, a.method, timer.ms());
  rep["kind"] = "poisson";
  rep["lhs"] = cplx_json(pr.lhs);
  rep["rhs"] = cplx_json(pr.rhs);
  rep["pass"] = pr.pass;
  emit(rep);
  return pr.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traversal-ordered contour integrals over the complex plane"};
  app.require_subcommand(1);

  EvalArgs ev;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate one traversal integral");
  eval_cmd->add_option("--phi", ev.phi, "integrand phi(s,z)")->required();
  eval_cmd->add_option("--contour", ev.contour, "contour spec")->required();
  eval_cmd->add_option("--z", ev.z, "start value, complex literal a+bi")
      ->required();
  eval_cmd->add_option("--method", ev.method, "evaluator")
      ->check(CLI::IsMember({"riemann", "ode", "both"}));
  ev.engine.attach(eval_cmd);

  CheckArgs ck;
  CLI::App* check_cmd =
      app.add_subcommand("check", "run a named identity-check suite");
  check_cmd->add_option("name", ck.name, "check name")
      ->required()
      ->check(CLI::IsMember(compint::check_names()));
  check_cmd->add_option("--method", ck.method, "evaluator")
      ->check(CLI::IsMember({"riemann", "ode"}));
  check_cmd->add_option("--phi", ck.phi, "integrand override");
  check_cmd->add_option("--contour", ck.contour, "contour override");
  check_cmd->add_option("--z", ck.z, "probe override");
  check_cmd->add_option("--family", ck.family, "transform family")
      ->check(CLI::IsMember({"additive", "linear"}));
  check_cmd->add_option("--tol", ck.tol, "per-case tolerance override");
  check_cmd->add_option("--scale", ck.scale, "profile scale override");
  check_cmd->add_option("--count", ck.count,
                        "term count override (K or N, check dependent)");
  check_cmd->add_option("--delta", ck.delta, "residual circle radius");
  ck.engine.attach(check_cmd, /*tol_as_engine_tol=*/true);
  ck.transform.attach(check_cmd);

  ResidualArgs rs;
  CLI::App* residual_cmd = app.add_subcommand(
      "residual", "small-circle traversal integral around one pole");
  residual_cmd->add_option("--f", rs.f, "integrand f(s,z)")->required();
  residual_cmd->add_option("--pole", rs.pole, "pole location")->required();
  residual_cmd->add_option("--order", rs.order, "pole order")
      ->check(CLI::PositiveNumber);
  residual_cmd->add_option("--z", rs.z, "start value")->required();
  residual_cmd->add_option("--delta", rs.delta, "circle radius");
  residual_cmd->add_option("--method", rs.method, "evaluator")
      ->check(CLI::IsMember({"riemann", "ode"}));
  rs.engine.attach(residual_cmd);

  MapArgs mp;
  CLI::App* map_cmd = app.add_subcommand(
      "map", "classify a start-value grid and write a CSV");
  map_cmd->add_option("--phi", mp.phi, "integrand phi(s,z)")->required();
  map_cmd->add_option("--contour", mp.contour, "contour spec")->required();
  map_cmd->add_option("--re-min", mp.re_min)->required();
  map_cmd->add_option("--re-max", mp.re_max)->required();
  map_cmd->add_option("--im-min", mp.im_min)->required();
  map_cmd->add_option("--im-max", mp.im_max)->required();
  map_cmd->add_option("--nx", mp.nx, "grid columns (>= 2)")
      ->required()
      ->check(CLI::Range(2, 1 << 16));
  map_cmd->add_option("--ny", mp.ny, "grid rows (>= 2)")
      ->required()
      ->check(CLI::Range(2, 1 << 16));
  map_cmd->add_option("--out", mp.out, "CSV output path")->required();
  map_cmd->add_option("--method", mp.method, "evaluator")
      ->check(CLI::IsMember({"riemann", "ode"}));
  map_cmd->add_option("--threads", mp.threads,
                      "worker threads (0 = hardware)");
  mp.engine.attach(map_cmd);

  TransformArgs tf;
  CLI::App* tr_cmd =
      app.add_subcommand("transform", "derived-family line transforms");
  tr_cmd->require_subcommand(1);
  const auto attach_common = [&](CLI::App* cmd) {
    cmd->add_option("--kernel", tf.h, "family kernel h(w,s)")->required();
    cmd->add_option("--phi", tf.phi, "integrand phi(s,z)")->required();
    cmd->add_option("--contour", tf.contour, "closed loop spec")->required();
    cmd->add_option("--z", tf.z, "start value")->required();
    cmd->add_option("--method", tf.method, "evaluator")
        ->check(CLI::IsMember({"riemann", "ode"}));
    tf.engine.attach(cmd);
    tf.transform.attach(cmd);
  };
  CLI::App* fourier_cmd =
      tr_cmd->add_subcommand("fourier", "frequency-line transform");
  attach_common(fourier_cmd);
  fourier_cmd->add_option("--xi", tf.xi, "frequency")->required();
  CLI::App* laplace_cmd =
      tr_cmd->add_subcommand("laplace", "decay-line transform");
  attach_common(laplace_cmd);
  laplace_cmd->add_option("--y", tf.y, "decay parameter, Re(y) > 0")
      ->required();
  CLI::App* poisson_cmd = tr_cmd->add_subcommand(
      "poisson", "integer chain vs transformed integer chain");
  attach_common(poisson_cmd);
  poisson_cmd->add_option("--terms", tf.terms, "chain half-width N")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (eval_cmd->parsed()) return run_eval(ev);
    if (check_cmd->parsed()) return run_check_cmd(ck);
    if (residual_cmd->parsed()) return run_residual(rs);
    if (map_cmd->parsed()) return run_map(mp);
    if (tr_cmd->parsed()) {
      if (fourier_cmd->parsed()) return run_fourier(tf);
      if (laplace_cmd->parsed()) return run_laplace(tf);
      if (poisson_cmd->parsed()) return run_poisson(tf);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand selected\n";
  return 1;
}
