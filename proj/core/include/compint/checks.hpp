#pragma once

// Named identity-check suites over documented default fixtures, shared by the
// command-line front end and the acceptance battery.  Each check runs a list
// of cases; a case passes when its deviation is within its tolerance.

#include <optional>
#include <string>
#include <vector>

#include "compint/contour.hpp"
#include "compint/engine.hpp"
#include "compint/expr.hpp"
#include "compint/scalar.hpp"
#include "compint/transforms.hpp"

namespace compint {

// Optional overrides applied on top of a check's default fixtures; a check
// consults only the fields that make sense for it (see the README table).
struct CheckOptions {
  EngineConfig engine;
  TransformConfig transform;
  Method method = Method::Ode;

  std::optional<Expr> phi;          // replace the integrand fixture set
  std::optional<Contour> contour;   // replace the contour fixture set
  std::optional<Cplx> z;            // replace the probe set
  std::optional<double> tol;        // replace the per-case tolerance
  std::optional<std::string> family;  // "additive" | "linear" (transforms)
  std::optional<double> scale;      // Gaussian profile scale
  std::optional<int> count;         // N (poisson) or K (taylor)
  std::optional<double> delta;      // residual circle radius
};

struct CheckCase {
  std::string name;
  double deviation = 0.0;
  double tol = 0.0;
  bool pass = false;
  bool has_values = false;  // lhs/rhs meaningful?
  Cplx lhs{0.0, 0.0};
  Cplx rhs{0.0, 0.0};
};

struct CheckReport {
  std::string check;
  std::vector<CheckCase> cases;
  bool pass = false;  // every case passed
};

// The accepted check names, in display order.
const std::vector<std::string>& check_names();

// Runs one named check; throws std::invalid_argument for an unknown name.
CheckReport run_check(const std::string& name, const CheckOptions& opts = {});

}  // namespace compint
