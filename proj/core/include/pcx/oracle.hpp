#pragma once

// Brute-force references used to check the solvers: exhaustive grid search
// over the log-weight hyperplane for n = 3, 4 and central finite differences.
// Nothing here calls into the Newton solver.

#include <functional>
#include <optional>
#include <vector>

#include "pcx/pcm.hpp"
#include "pcx/solvers.hpp"

namespace pcx::oracle {

struct GridSpec {
  /// Grid covers [-half_width, half_width] per free coordinate. Unset:
  /// log(max entry) + 1.
  std::optional<double> half_width;
  /// Must be odd so that t = 0 is a grid point.
  int points_per_axis = 601;
  /// Each round re-centers on the incumbent with half_width scaled by 0.1.
  int refine_rounds = 2;
};

struct GridResult {
  LogPoint point;
  double objective;
  /// Incumbent objective after the coarse pass and after each refinement.
  std::vector<double> round_objectives;
};

/// Throws Error{kUnsupportedSize} for n > 4, kInvalidConfig for a bad spec.
GridResult grid_min_lsm(const PCMatrix& a, const GridSpec& spec = {});

/// Grid points (n = 3) whose objective is strictly below all 8 neighbours,
/// merged when closer than max(distinct_tol, 2 grid steps).
std::vector<LogPoint> grid_local_minima(const PCMatrix& a, const GridSpec& spec = {},
                                        double distinct_tol = 1e-4);

enum class DiffOrder { kFirst = 1, kSecond = 2 };

double finite_diff(const std::function<double(double)>& fn, double x, double step,
                   DiffOrder order);

}  // namespace pcx::oracle
