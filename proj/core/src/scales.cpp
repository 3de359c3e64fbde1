#include "pcx/scales.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>
#include "pcx/error.hpp"
#include "pcx/oracle.hpp"
#include "pcx/rng.hpp"
#include "pcx/solvers.hpp"

namespace pcx::scales {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double sup_distance(const WeightVector& x, const WeightVector& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

}  // namespace

Scale::Scale(std::string name, std::vector<double> values)
    : name_(std::move(name)), values_(std::move(values)) {
  if (values_.empty() || values_.front() != 1.0) {
    throw Error(ErrorCode::kInvalidConfig, "scale '" + name_ + "' must start at 1");
  }
  for (std::size_t k = 1; k < values_.size(); ++k) {
    if (!(values_[k] > values_[k - 1]) || !std::isfinite(values_[k])) {
      throw Error(ErrorCode::kInvalidConfig,
                  "scale '" + name_ + "' values must be finite and strictly increasing");
    }
  }
}

std::vector<double> Scale::admissible() const {
  std::vector<double> out;
  for (auto it = values_.rbegin(); it != values_.rend(); ++it)
    if (*it != 1.0) out.push_back(1.0 / *it);
  out.insert(out.end(), values_.begin(), values_.end());
  return out;
}

bool Scale::admits(double v) const {
  if (!(v > 0.0)) return false;
  const auto adm = admissible();
  return std::any_of(adm.begin(), adm.end(),
                     [&](double s) { return std::abs(v - s) <= 1e-9 * s; });
}

double Scale::snap(double v) const {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kNonPositiveEntry, "cannot snap a non-positive value");
  }
  const double lv = std::log(v);
  double best = 0.0;
  double best_dist = INFINITY;
  // Ascending scan; an equal distance never replaces the smaller value.
  for (double s : admissible()) {
    const double d = std::abs(lv - std::log(s));
    if (d < best_dist - 1e-12) {
      best = s;
      best_dist = d;
    }
  }
  return best;
}

const std::vector<Scale>& builtin_scales() {
  static const std::vector<Scale> scales{
      Scale("1-3", {1, 2, 3}),
      Scale("1-3-half", {1, 1.5, 2, 2.5, 3}),
      Scale("1-5", {1, 2, 3, 4, 5}),
      Scale("1-9", {1, 2, 3, 4, 5, 6, 7, 8, 9}),
  };
  return scales;
}

std::optional<Scale> find_scale(std::string_view name) {
  if (name.starts_with("scale-")) name.remove_prefix(6);
  for (const Scale& s : builtin_scales())
    if (s.name() == name) return s;
  return std::nullopt;
}

double map_scale(double v, const Scale& from, const Scale& to) {
  const double tol = 1e-12;
  const bool direct = v >= 1.0;
  const double base = direct ? v : 1.0 / v;
  if (!(v > 0.0) || base > from.top() * (1.0 + tol)) {
    throw Error(ErrorCode::kOutOfScale, "value " + fmt17(v) + " lies outside scale '" +
                                            from.name() + "' [1/" + fmt17(from.top()) + ", " +
                                            fmt17(from.top()) + "]");
  }
  if (from.top() == 1.0) return 1.0;
  const double mapped = 1.0 + (base - 1.0) * (to.top() - 1.0) / (from.top() - 1.0);
  return direct ? mapped : 1.0 / mapped;
}

void validate(const MonteCarloConfig& cfg) {
  if (cfg.trials < 1) throw Error(ErrorCode::kInvalidConfig, "trials must be >= 1");
  if (cfg.n < 2) throw Error(ErrorCode::kInvalidConfig, "n must be >= 2");
  if (!(cfg.perturb_delta >= 0.0) || !std::isfinite(cfg.perturb_delta)) {
    throw Error(ErrorCode::kInvalidConfig, "perturb_delta must be finite and >= 0");
  }
  if (cfg.starts < 1) throw Error(ErrorCode::kInvalidConfig, "starts must be >= 1");
  if (cfg.threads < 1) throw Error(ErrorCode::kInvalidConfig, "threads must be >= 1");
}

PCMatrix trial_matrix(const MonteCarloConfig& cfg, std::size_t trial) {
  auto gen = make_stream(cfg.seed, trial);
  const double span = std::log(cfg.scale.top());
  std::vector<double> w(cfg.n);
  for (double& x : w) x = std::exp(uniform(gen, -span, span));
  std::vector<double> upper;
  upper.reserve(cfg.n * (cfg.n - 1) / 2);
  for (std::size_t i = 0; i < cfg.n; ++i)
    for (std::size_t j = i + 1; j < cfg.n; ++j) {
      double a = w[i] / w[j];
      if (cfg.perturb_delta > 0.0) a *= std::exp(uniform(gen, -cfg.perturb_delta, cfg.perturb_delta));
      if (cfg.snap) a = cfg.scale.snap(a);
      upper.push_back(a);
    }
  return PCMatrix(cfg.n, std::move(upper));
}

namespace {

TrialRecord run_trial(const MonteCarloConfig& cfg, std::size_t trial) {
  const PCMatrix a = trial_matrix(cfg, trial);
  TrialRecord rec;
  rec.trial = trial;
  const auto inc = inconsistency(a);
  rec.inconsistency = inc.global_value;
  rec.acceptable = inc.acceptable;
  const auto cert = convexity::certify(a);
  rec.verdict = cert.verdict;
  rec.max_entry = cert.max_entry;

  SolveOptions opts;
  opts.starts = cfg.starts;
  // Separate stream from the matrix draw so start points never alias it.
  opts.start_seed = make_stream(cfg.seed ^ 0x9e3779b97f4a7c15ULL, trial)();
  const SolveResult lsm = solve_lsm(a, opts);
  rec.lsm_objective = lsm.objective;
  rec.lsm_converged = lsm.converged;
  rec.clusters = lsm.minima_found.size();

  for (const SolveResult& other : {solve_wlsm(a), solve_llsm(a), solve_evm(a)})
    rec.weight_disagreement =
        std::max(rec.weight_disagreement, sup_distance(lsm.weights, other.weights));
  return rec;
}

}  // namespace

MonteCarloAggregate aggregate(const std::vector<TrialRecord>& records) {
  MonteCarloAggregate agg;
  if (records.empty()) return agg;
  double acceptable = 0, unique = 0, certified = 0;
  for (const TrialRecord& r : records) {
    agg.mean_inconsistency += r.inconsistency;
    agg.max_inconsistency = std::max(agg.max_inconsistency, r.inconsistency);
    agg.mean_weight_disagreement += r.weight_disagreement;
    acceptable += r.acceptable ? 1 : 0;
    unique += r.clusters == 1 ? 1 : 0;
    certified += r.verdict == convexity::Verdict::kUniqueGuaranteed ? 1 : 0;
  }
  const double count = static_cast<double>(records.size());
  agg.mean_inconsistency /= count;
  agg.mean_weight_disagreement /= count;
  agg.fraction_acceptable = acceptable / count;
  agg.fraction_unique = unique / count;
  agg.fraction_certified = certified / count;
  return agg;
}

MonteCarloReport run_monte_carlo(const MonteCarloConfig& cfg) {
  validate(cfg);
  MonteCarloReport report{cfg, std::vector<TrialRecord>(cfg.trials), {}};
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(cfg.threads, cfg.trials));
  if (workers <= 1) {
    for (std::size_t t = 0; t < cfg.trials; ++t) report.records[t] = run_trial(cfg, t);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned k = 0; k < workers; ++k) {
      pool.emplace_back([&, k] {
        try {
          for (std::size_t t = k; t < cfg.trials; t += workers)
            report.records[t] = run_trial(cfg, t);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  report.aggregate = aggregate(report.records);
  return report;
}

void write_csv(std::ostream& os, const MonteCarloReport& report) {
  os << kCsvHeader << '\n';
  for (const TrialRecord& r : report.records) {
    os << r.trial << ',' << fmt17(r.inconsistency) << ',' << (r.acceptable ? 1 : 0) << ','
       << convexity::to_string(r.verdict) << ',' << fmt17(r.max_entry) << ','
       << fmt17(r.lsm_objective) << ',' << (r.lsm_converged ? 1 : 0) << ',' << r.clusters
       << ',' << fmt17(r.weight_disagreement) << '\n';
  }
}

std::string aggregate_json(const MonteCarloReport& report) {
  const auto& c = report.config;
  const auto& a = report.aggregate;
  nlohmann::ordered_json j;
  j["config"] = {{"scale", c.scale.name()},     {"n", c.n},
                 {"trials", c.trials},          {"perturb_delta", c.perturb_delta},
                 {"snap", c.snap},              {"seed", c.seed},
                 {"starts", c.starts}};
  j["aggregate"] = {{"mean_inconsistency", a.mean_inconsistency},
                    {"max_inconsistency", a.max_inconsistency},
                    {"fraction_acceptable", a.fraction_acceptable},
                    {"fraction_unique", a.fraction_unique},
                    {"fraction_certified", a.fraction_certified},
                    {"mean_weight_disagreement", a.mean_weight_disagreement}};
  return j.dump(2) + "\n";
}

std::optional<Counterexample> search_counterexample(double lambda_min, std::size_t budget,
                                                    std::uint64_t seed,
                                                    const CounterexampleOptions& opts) {
  if (!(lambda_min >= 1.0) || !std::isfinite(lambda_min)) {
    throw Error(ErrorCode::kInvalidConfig, "lambda_min must be finite and >= 1");
  }
  if (budget < 1) throw Error(ErrorCode::kInvalidConfig, "budget must be >= 1");

  const double lo = std::log(lambda_min);
  const double hi = std::log(2.0 * lambda_min);
  SolveOptions sopts;
  sopts.starts = opts.starts;
  oracle::GridSpec grid;
  grid.points_per_axis = opts.grid_points;

  for (std::size_t c = 0; c < budget; ++c) {
    auto gen = make_stream(seed, c);
    std::vector<double> e(3);
    for (double& x : e) x = uniform(gen, -hi, hi);
    // One entry carries the largest magnitude, in either orientation.
    const auto pos = uniform_index(gen, 3);
    const double sign = uniform(gen, 0.0, 1.0) < 0.5 ? 1.0 : -1.0;
    e[pos] = sign * uniform(gen, lo, hi);
    for (double& x : e) x = std::clamp(x, -hi, hi);
    const PCMatrix a(3, {std::exp(e[0]), std::exp(e[1]), std::exp(e[2])});

    if (convexity::certify(a).admissible) continue;
    sopts.start_seed = gen();
    const Census census = census_local_minima(a, sopts);
    if (census.minima.size() < 2) continue;
    const auto basins = oracle::grid_local_minima(a, grid, sopts.distinct_tol);
    if (basins.size() < 2) continue;
    return Counterexample{a, c + 1, census.minima.size(), basins.size()};
  }
  return std::nullopt;
}

}  // namespace pcx::scales
