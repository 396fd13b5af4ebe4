#include "compint/scalar.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace compint {

Cplx divergence_sentinel() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {nan, nan};
}

bool is_divergent(const Cplx& v) {
  return !std::isfinite(v.real()) || !std::isfinite(v.imag());
}

namespace {

// Scans one signed decimal (strtod syntax, no leading whitespace) starting at
// pos.  Returns false if no number is present.
bool scan_number(std::string_view text, std::size_t& pos, double& out) {
  const auto digit = [&](std::size_t i) {
    return i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]));
  };
  std::size_t p = pos;
  while (digit(p)) ++p;
  if (p < text.size() && text[p] == '.') {
    ++p;
    while (digit(p)) ++p;
  }
  if (p == pos || (p == pos + 1 && text[pos] == '.')) return false;
  if (p < text.size() && (text[p] == 'e' || text[p] == 'E')) {
    std::size_t q = p + 1;
    if (q < text.size() && (text[q] == '+' || text[q] == '-')) ++q;
    if (digit(q)) {
      while (digit(q)) ++q;
      p = q;
    }
  }
  out = std::strtod(std::string(text.substr(pos, p - pos)).c_str(), nullptr);
  pos = p;
  return true;
}

}  // namespace

Cplx parse_complex(std::string_view text) {
  const auto bad = [&](const char* why) {
    throw std::invalid_argument("bad complex literal '" + std::string(text) +
                                "': " + why);
  };
  if (text.empty()) bad("empty");
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) bad("contains whitespace");
  }

  std::size_t pos = 0;
  double first_sign = 1.0;
  if (text[pos] == '+' || text[pos] == '-') {
    first_sign = text[pos] == '-' ? -1.0 : 1.0;
    ++pos;
  }

  // One component: either a number with optional trailing 'i', or bare 'i'.
  // Returns true when the component was imaginary.
  const auto component = [&](double sign, double& re, double& im) {
    if (pos < text.size() && text[pos] == 'i') {
      ++pos;
      im += sign;
      return true;
    }
    double v = 0.0;
    if (!scan_number(text, pos, v)) bad("expected a number");
    if (pos < text.size() && text[pos] == 'i') {
      ++pos;
      im += sign * v;
      return true;
    }
    re += sign * v;
    return false;
  };

  double re = 0.0, im = 0.0;
  component(first_sign, re, im);
  if (pos < text.size()) {
    if (text[pos] != '+' && text[pos] != '-') bad("expected '+' or '-'");
    double sign = text[pos] == '-' ? -1.0 : 1.0;
    ++pos;
    if (!component(sign, re, im)) bad("second component must be imaginary");
  }
  if (pos != text.size()) bad("trailing characters");
  return {re, im};
}

std::string format_complex(const Cplx& v) {
  char buf[64];
  const auto num = [&](double d) {
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return std::string(buf);
  };
  if (v.imag() == 0.0) return num(v.real());
  if (v.real() == 0.0) return num(v.imag()) + "i";
  std::string s = num(v.real());
  if (v.imag() >= 0.0 || std::isnan(v.imag())) s += "+";
  s += num(v.imag()) + "i";
  return s;
}

}  // namespace compint
