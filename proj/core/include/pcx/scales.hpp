#pragma once

// Judgment scales, the demonstration mapping between scales of different
// size, Monte-Carlo comparison of scales, and the random search for 3x3
// matrices whose least-squares problem has several local minima.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcx/convexity.hpp"
#include "pcx/pcm.hpp"

namespace pcx::scales {

class Scale {
 public:
  /// values must be strictly increasing, start at 1. Throws kInvalidConfig.
  Scale(std::string name, std::vector<double> values);

  const std::string& name() const noexcept { return name_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double top() const noexcept { return values_.back(); }

  /// Scale values and their reciprocals, ascending.
  std::vector<double> admissible() const;
  /// True if v equals a scale value or reciprocal within 1e-9 relative.
  bool admits(double v) const;
  /// Nearest admissible value in log distance; ties go to the smaller value.
  double snap(double v) const;

 private:
  std::string name_;
  std::vector<double> values_;
};

/// "1-3", "1-3-half", "1-5", "1-9".
const std::vector<Scale>& builtin_scales();
/// Accepts the names above, optionally prefixed with "scale-".
std::optional<Scale> find_scale(std::string_view name);

/// Affine map of [1, from.top] onto [1, to.top], extended to reciprocals by
/// m(1/v) = 1/m(v). Demonstration-grade: there is no canonical mapping
/// between scales. Throws Error{kOutOfScale}.
double map_scale(double v, const Scale& from, const Scale& to);

struct MonteCarloConfig {
  Scale scale = builtin_scales().front();
  std::size_t n = 4;
  std::size_t trials = 100;
  /// Half-width of the log-space perturbation.
  double perturb_delta = 0.5;
  bool snap = true;
  std::uint64_t seed = 0;
  /// Least-squares starts per trial.
  int starts = 10;
  /// Worker threads; results do not depend on this.
  unsigned threads = 1;
};

struct TrialRecord {
  std::size_t trial = 0;
  double inconsistency = 0.0;
  bool acceptable = true;
  convexity::Verdict verdict = convexity::Verdict::kUniqueGuaranteed;
  double max_entry = 1.0;
  double lsm_objective = 0.0;
  bool lsm_converged = true;
  std::size_t clusters = 1;
  /// Max sup-norm distance between the sum-one LSM weights and the other three methods.
  double weight_disagreement = 0.0;
};

struct MonteCarloAggregate {
  double mean_inconsistency = 0.0;
  double max_inconsistency = 0.0;
  double fraction_acceptable = 0.0;
  double fraction_unique = 0.0;
  double fraction_certified = 0.0;
  double mean_weight_disagreement = 0.0;
};

struct MonteCarloReport {
  MonteCarloConfig config;
  std::vector<TrialRecord> records;
  MonteCarloAggregate aggregate;
};

/// Throws Error{kInvalidConfig}.
void validate(const MonteCarloConfig& cfg);
/// The matrix of one trial, before solving. Exposed for tests.
PCMatrix trial_matrix(const MonteCarloConfig& cfg, std::size_t trial);
MonteCarloReport run_monte_carlo(const MonteCarloConfig& cfg);
MonteCarloAggregate aggregate(const std::vector<TrialRecord>& records);

/// Column order of the per-trial CSV.
inline constexpr std::string_view kCsvHeader =
    "trial,inconsistency,acceptable,verdict,max_entry,lsm_objective,lsm_converged,clusters,"
    "weight_disagreement";
void write_csv(std::ostream& os, const MonteCarloReport& report);
/// Aggregate block plus the configuration, as JSON text.
std::string aggregate_json(const MonteCarloReport& report);

struct CounterexampleOptions {
  /// Newton starts per candidate.
  int starts = 20;
  /// Grid used for the independent confirmation.
  int grid_points = 301;
};

struct Counterexample {
  PCMatrix matrix;
  std::size_t candidates_tried;
  std::size_t newton_minima;
  std::size_t grid_minima;
};

/// Random 3x3 candidates whose largest entry lies in [lambda_min, 2 lambda_min].
/// Returns the first with >= 2 distinct Newton-converged minima that the
/// grid oracle also resolves into >= 2 basins, or nothing after `budget`
/// candidates.
std::optional<Counterexample> search_counterexample(double lambda_min, std::size_t budget,
                                                    std::uint64_t seed,
                                                    const CounterexampleOptions& opts = {});

}  // namespace pcx::scales
