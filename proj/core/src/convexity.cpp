#include "pcx/convexity.hpp"

#include <algorithm>
#include <cmath>

#include "pcx/error.hpp"

namespace pcx::convexity {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kNonPositiveParameter,
                std::string(what) + " must be finite and strictly positive");
  }
}

}  // namespace

double compute_a0() { return std::sqrt((11.0 + 5.0 * std::sqrt(5.0)) / 2.0); }

double compute_a0_quartic() {
  return std::pow((123.0 + 55.0 * std::sqrt(5.0)) / 2.0, 0.25);
}

double compute_w0() { return std::sqrt((1.0 + std::sqrt(5.0)) / 2.0); }

const ConvexityConstants& constants() {
  static const ConvexityConstants c{compute_a0(), 3.6, compute_w0()};
  return c;
}

double f_a(double t, double a) {
  require_positive(a, "a");
  const double u = std::exp(t) - a;
  const double v = std::exp(-t) - 1.0 / a;
  return u * u + v * v;
}

double f_a_prime(double x, double a) {
  require_positive(a, "a");
  const double ex = std::exp(x);
  const double emx = std::exp(-x);
  return 2.0 * (ex - a) * ex - 2.0 * (emx - 1.0 / a) * emx;
}

double f_a_second(double x, double a) {
  require_positive(a, "a");
  return -2.0 *
         (a * a * std::exp(x) - 2.0 * a * (std::exp(-2.0 * x) + std::exp(2.0 * x)) +
          std::exp(-x)) /
         a;
}

double phi(double w) {
  require_positive(w, "w");
  const double w4 = std::pow(w, 4);
  return (1.0 + w4 - std::sqrt(1.0 + w4 + w4 * w4)) / (w * w * w);
}

double psi(double w) {
  require_positive(w, "w");
  const double w4 = std::pow(w, 4);
  return (1.0 + w4 + std::sqrt(1.0 + w4 + w4 * w4)) / (w * w * w);
}

double psi_prime_expr(double w) {
  require_positive(w, "w");
  const double w4 = std::pow(w, 4);
  const double w8 = w4 * w4;
  return (-3.0 - w4 + w8) / std::sqrt(1.0 + w4 + w8) + w4 - 3.0;
}

std::vector<CurvePoint> curve_table(double w_min, double w_max, std::size_t points) {
  require_positive(w_min, "w_min");
  require_positive(w_max, "w_max");
  if (points < 2 || w_max <= w_min) {
    throw Error(ErrorCode::kInvalidConfig, "curve table needs w_min < w_max and >= 2 points");
  }
  std::vector<CurvePoint> out;
  out.reserve(points);
  const double lo = std::log(w_min);
  const double step = (std::log(w_max) - lo) / static_cast<double>(points - 1);
  for (std::size_t p = 0; p < points; ++p) {
    const double w = std::exp(lo + step * static_cast<double>(p));
    out.push_back({w, phi(w), psi(w)});
  }
  return out;
}

ConvexityReport certify(const PCMatrix& a) {
  const double a0 = constants().a0;
  ConvexityReport report;
  report.max_entry = a.max_entry();
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = a(i, j);
      if (v > a0 || v < 1.0 / a0) report.violations.push_back({i, j, v});
    }
  report.admissible = report.violations.empty();
  report.verdict = report.admissible ? Verdict::kUniqueGuaranteed : Verdict::kUnknown;
  return report;
}

const char* to_string(Verdict v) {
  return v == Verdict::kUniqueGuaranteed ? "UNIQUE_GUARANTEED" : "UNKNOWN";
}

}  // namespace pcx::convexity
