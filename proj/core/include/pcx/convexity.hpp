#pragma once

// Convexity of the per-pair least-squares term
//   f_a(x) = (e^x - a)^2 + (e^-x - 1/a)^2
// and certification of comparison matrices whose entries keep every term
// convex, which makes the least-squares weight problem uniquely solvable.

#include <cstddef>
#include <vector>

#include "pcx/pcm.hpp"

namespace pcx::convexity {

struct ConvexityConstants {
  /// Convexity threshold: f_a is convex iff 1/a0 <= a <= a0.
  double a0;
  /// Known upper bound for the true uniqueness threshold. Informational only.
  double a1;
  /// Minimizer of psi; psi(w0) = a0.
  double w0;
};

/// Computed once from closed forms.
const ConvexityConstants& constants();

/// sqrt((11 + 5 sqrt5) / 2)
double compute_a0();
/// ((123 + 55 sqrt5) / 2)^(1/4); the same number through the quartic.
double compute_a0_quartic();
/// sqrt((1 + sqrt5) / 2)
double compute_w0();

double f_a(double t, double a);
double f_a_prime(double x, double a);
double f_a_second(double x, double a);

/// Lower and upper roots, in a, of the bracket of f_a'' at x = log w.
double phi(double w);
double psi(double w);

/// w^4 psi'(w) in the rationalized form; vanishes only at w0.
double psi_prime_expr(double w);

struct CurvePoint {
  double w, phi, psi;
};

/// Log-spaced table of (w, phi(w), psi(w)) over [w_min, w_max].
std::vector<CurvePoint> curve_table(double w_min, double w_max, std::size_t points);

enum class Verdict { kUniqueGuaranteed, kUnknown };

struct Violation {
  std::size_t i, j;
  double value;
};

struct ConvexityReport {
  double max_entry = 1.0;
  bool admissible = true;
  std::vector<Violation> violations;
  Verdict verdict = Verdict::kUniqueGuaranteed;
};

/// Entries equal to a0 or 1/a0 are admissible. Outside the band the verdict
/// is kUnknown: uniqueness may still hold below a1.
ConvexityReport certify(const PCMatrix& a);

const char* to_string(Verdict v);

}  // namespace pcx::convexity
