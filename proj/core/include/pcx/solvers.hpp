#pragma once

// Priority-weight derivation: least squares (LSM) in log coordinates,
// weighted least squares (WLSM) via its KKT system, logarithmic least
// squares (LLSM) via row geometric means, and the eigenvector method (EVM).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcx/pcm.hpp"

namespace pcx {

enum class Method { kLSM, kWLSM, kLLSM, kEVM };

const char* to_string(Method m);

/// Point t on the hyperplane sum(t) = 0; t_i = log w_i with prod(w) = 1.
class LogPoint {
 public:
  /// Projects arbitrary coordinates onto the hyperplane (subtracts the mean).
  static LogPoint centered(std::vector<double> t);
  static LogPoint from_weights(const WeightVector& w);

  std::span<const double> t() const noexcept { return t_; }
  double operator[](std::size_t i) const { return t_[i]; }
  std::size_t size() const noexcept { return t_.size(); }

  WeightVector weights(Normalization norm = Normalization::kProductOne) const;

 private:
  explicit LogPoint(std::vector<double> t) : t_(std::move(t)) {}
  std::vector<double> t_;
};

struct SolveOptions {
  double grad_tol = 1e-10;
  int max_iters = 500;
  /// Unset: 1 start when the matrix is certified, 20 otherwise.
  std::optional<int> starts;
  std::uint64_t start_seed = 0;
  double distinct_tol = 1e-4;
  /// Armijo sufficient-decrease constant and backtracking factor.
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
};

struct LocalMinimum {
  LogPoint point;
  double objective;
};

/// Outcome of one local descent from a single start.
struct DescentResult {
  LogPoint point;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Smallest eigenvalue of the Hessian restricted to the hyperplane.
  double min_curvature = 0.0;
  /// Objective after each accepted step, starting with the initial value.
  std::vector<double> trace;
};

struct Census {
  /// Distinct minimizers sorted by objective ascending.
  std::vector<LocalMinimum> minima;
  int starts = 0;
  int converged_starts = 0;
  /// Starts that hit max_iters or stalled above grad_tol.
  int failed_starts = 0;
  /// Converged to a stationary point with negative curvature.
  int saddle_starts = 0;
  /// Descent results in start order; the best converged one is used for SolveResult.
  std::vector<DescentResult> runs;
};

struct SolveResult {
  Method method = Method::kLSM;
  /// Sum-one normalization; product_one() gives the other form.
  WeightVector weights = WeightVector::normalized({1.0}, Normalization::kSumOne);
  /// Least-squares objective sum_ij (a_ij - w_i/w_j)^2 at the weights.
  double objective = 0.0;
  /// The method's own objective (WLSM quadratic, LLSM log residual, EVM lambda_max - n).
  double method_objective = 0.0;
  int iterations = 0;
  bool converged = true;
  std::vector<LocalMinimum> minima_found;
  bool unique = true;
  int starts = 1;
  int failed_starts = 0;
  /// EVM only.
  std::optional<double> eigenvalue;
  std::vector<std::string> warnings;

  WeightVector product_one() const { return weights.as(Normalization::kProductOne); }
};

/// sum over all ordered pairs (a_ij - w_i / w_j)^2, diagonal included.
double objective_lsm(const PCMatrix& a, const WeightVector& w);
/// sum over i<j of f_{a_ij}(t_i - t_j).
double phi_objective(const PCMatrix& a, const LogPoint& p);
double phi_objective(const PCMatrix& a, std::span<const double> t);
/// Gradient of phi_objective projected onto sum(t) = 0.
std::vector<double> phi_gradient(const PCMatrix& a, const LogPoint& p);
/// Row-major n x n Hessian. Its null space contains the all-ones vector.
std::vector<double> phi_hessian(const PCMatrix& a, const LogPoint& p);

/// sum_ij (a_ij w_j - w_i)^2
double objective_wlsm(const PCMatrix& a, const WeightVector& w);
/// sum over i<j of (log a_ij - log(w_i / w_j))^2
double objective_llsm(const PCMatrix& a, const WeightVector& w);

/// Damped Newton with Armijo backtracking from a single start; falls back
/// to projected steepest descent where the Hessian is not positive definite.
DescentResult descend_lsm(const PCMatrix& a, const LogPoint& start,
                          const SolveOptions& opts = {});

/// Start points drawn uniformly from [-log M, log M]^n, M = max entry, then
/// centered. Start s uses its own stream derived from (seed, s).
std::vector<LogPoint> lsm_start_points(const PCMatrix& a, int starts, std::uint64_t seed);

Census census_local_minima(const PCMatrix& a, const SolveOptions& opts = {});

SolveResult solve_lsm(const PCMatrix& a, const SolveOptions& opts = {});
/// Throws Error{kSingularSystem}. A non-positive component is reported as a
/// warning and the weights are clamped to stay representable.
SolveResult solve_wlsm(const PCMatrix& a);
SolveResult solve_llsm(const PCMatrix& a);
SolveResult solve_evm(const PCMatrix& a, double tol = 1e-12, int max_iters = 10000);

}  // namespace pcx
