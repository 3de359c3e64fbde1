#include "pcx/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pcx/convexity.hpp"
#include "pcx/error.hpp"
#include "pcx/rng.hpp"

namespace pcx {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void require_size(const PCMatrix& a, std::size_t n) {
  if (a.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix is " + std::to_string(a.size()) + "x" + std::to_string(a.size()) +
                    " but vector has " + std::to_string(n) + " components");
  }
}

void center(std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Smallest eigenvalue of H restricted to the hyperplane sum(t) = 0.
double restricted_min_eigenvalue(const MatrixXd& h) {
  const Eigen::Index n = h.rows();
  const VectorXd ones = VectorXd::Ones(n);
  Eigen::HouseholderQR<MatrixXd> qr(ones);
  const MatrixXd q = qr.householderQ();
  const MatrixXd basis = q.rightCols(n - 1);
  const MatrixXd reduced = basis.transpose() * h * basis;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(reduced, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

MatrixXd hessian_matrix(const PCMatrix& a, std::span<const double> t) {
  const std::size_t n = a.size();
  MatrixXd h = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = convexity::f_a_second(t[i] - t[j], a(i, j));
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      h(ii, ii) += c;
      h(jj, jj) += c;
      h(ii, jj) -= c;
      h(jj, ii) -= c;
    }
  return h;
}

std::vector<double> gradient(const PCMatrix& a, std::span<const double> t) {
  const std::size_t n = a.size();
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = convexity::f_a_prime(t[i] - t[j], a(i, j));
      g[i] += d;
      g[j] -= d;
    }
  center(g);
  return g;
}

SolveResult finish(const PCMatrix& a, Method m, WeightVector w) {
  SolveResult r;
  r.method = m;
  r.weights = w.as(Normalization::kSumOne);
  r.objective = objective_lsm(a, r.weights);
  return r;
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::kLSM: return "lsm";
    case Method::kWLSM: return "wlsm";
    case Method::kLLSM: return "llsm";
    case Method::kEVM: return "evm";
  }
  return "?";
}

LogPoint LogPoint::centered(std::vector<double> t) {
  if (t.empty()) throw Error(ErrorCode::kTooSmall, "empty log point");
  center(t);
  return LogPoint(std::move(t));
}

LogPoint LogPoint::from_weights(const WeightVector& w) {
  std::vector<double> t(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) t[i] = std::log(w[i]);
  return centered(std::move(t));
}

WeightVector LogPoint::weights(Normalization norm) const {
  std::vector<double> w(t_.size());
  for (std::size_t i = 0; i < t_.size(); ++i) w[i] = std::exp(t_[i]);
  return WeightVector::normalized(std::move(w), norm);
}

double objective_lsm(const PCMatrix& a, const WeightVector& w) {
  require_size(a, w.size());
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double r = a(i, j) - w[i] / w[j];
      s += r * r;
    }
  return s;
}

double phi_objective(const PCMatrix& a, std::span<const double> t) {
  require_size(a, t.size());
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += convexity::f_a(t[i] - t[j], a(i, j));
  return s;
}

double phi_objective(const PCMatrix& a, const LogPoint& p) { return phi_objective(a, p.t()); }

std::vector<double> phi_gradient(const PCMatrix& a, const LogPoint& p) {
  require_size(a, p.size());
  return gradient(a, p.t());
}

std::vector<double> phi_hessian(const PCMatrix& a, const LogPoint& p) {
  require_size(a, p.size());
  const MatrixXd h = hessian_matrix(a, p.t());
  std::vector<double> out(static_cast<std::size_t>(h.size()));
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out[i * n + j] = h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

double objective_wlsm(const PCMatrix& a, const WeightVector& w) {
  require_size(a, w.size());
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double r = a(i, j) * w[j] - w[i];
      s += r * r;
    }
  return s;
}

double objective_llsm(const PCMatrix& a, const WeightVector& w) {
  require_size(a, w.size());
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = std::log(a(i, j)) - std::log(w[i] / w[j]);
      s += r * r;
    }
  return s;
}

DescentResult descend_lsm(const PCMatrix& a, const LogPoint& start, const SolveOptions& opts) {
  require_size(a, start.size());
  const std::size_t n = a.size();
  std::vector<double> t(start.t().begin(), start.t().end());
  double f = phi_objective(a, t);

  DescentResult res{start, f, 0, false, 0.0, {f}};

  auto try_step = [&](const std::vector<double>& d, double slope, std::vector<double>& tn,
                      double& fn) {
    double alpha = 1.0;
    for (int k = 0; k < 64; ++k, alpha *= opts.backtrack) {
      for (std::size_t i = 0; i < n; ++i) tn[i] = t[i] + alpha * d[i];
      fn = phi_objective(a, tn);
      if (std::isfinite(fn) && fn <= f + opts.armijo_c1 * alpha * slope) return true;
    }
    return false;
  };

  std::vector<double> tn(n);
  double fn = f;
  for (;;) {
    const std::vector<double> g = gradient(a, t);
    const double gnorm = sup_norm(g);
    if (gnorm <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= opts.max_iters) break;

    const MatrixXd h = hessian_matrix(a, t);
    const MatrixXd m = h + MatrixXd::Constant(h.rows(), h.cols(), 1.0 / static_cast<double>(n));
    Eigen::LLT<MatrixXd> llt(m);
    bool newton = llt.info() == Eigen::Success;

    std::vector<double> d(n);
    double slope = 0.0;
    if (newton) {
      d = to_std(-llt.solve(to_eigen(g)));
      center(d);
      slope = std::inner_product(g.begin(), g.end(), d.begin(), 0.0);
      if (!(slope < 0.0)) newton = false;
    }
    if (!newton) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
    }

    // Close to the minimizer the predicted decrease falls below the rounding
    // of phi and Armijo degenerates into comparing equal values. There, take
    // the full Newton step if it shrinks the gradient and raises phi by no
    // more than a few ulps.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, f);
    const auto full_newton = [&] {
      for (std::size_t i = 0; i < n; ++i) tn[i] = t[i] + d[i];
      fn = phi_objective(a, tn);
      return fn <= f + slack && sup_norm(gradient(a, tn)) < gnorm;
    };
    bool accepted = false;
    if (newton && -slope <= slack) accepted = full_newton();
    if (!accepted) accepted = try_step(d, slope, tn, fn);
    if (!accepted && newton) accepted = full_newton();
    if (!accepted && newton) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
      accepted = try_step(d, slope, tn, fn);
    }
    if (!accepted) break;

    center(tn);
    t = tn;
    f = phi_objective(a, t);
    res.trace.push_back(f);
    ++res.iterations;
  }

  res.point = LogPoint::centered(t);
  res.objective = f;
  res.min_curvature = restricted_min_eigenvalue(hessian_matrix(a, t));
  return res;
}

std::vector<LogPoint> lsm_start_points(const PCMatrix& a, int starts, std::uint64_t seed) {
  const double span = std::log(a.max_entry());
  std::vector<LogPoint> out;
  out.reserve(static_cast<std::size_t>(std::max(starts, 0)));
  for (int s = 0; s < starts; ++s) {
    auto gen = make_stream(seed, static_cast<std::uint64_t>(s));
    std::vector<double> t(a.size());
    for (double& x : t) x = uniform(gen, -span, span);
    out.push_back(LogPoint::centered(std::move(t)));
  }
  return out;
}

Census census_local_minima(const PCMatrix& a, const SolveOptions& opts) {
  const int starts =
      opts.starts.value_or(convexity::certify(a).admissible ? 1 : 20);
  if (starts < 1) throw Error(ErrorCode::kInvalidConfig, "starts must be >= 1");
  if (!(opts.grad_tol > 0.0) || !(opts.distinct_tol > 0.0) || opts.max_iters < 1) {
    throw Error(ErrorCode::kInvalidConfig, "solver tolerances and max_iters must be positive");
  }

  Census census;
  census.starts = starts;
  std::vector<LocalMinimum> candidates;
  for (const LogPoint& p : lsm_start_points(a, starts, opts.start_seed)) {
    DescentResult r = descend_lsm(a, p, opts);
    if (!r.converged) {
      ++census.failed_starts;
    } else {
      ++census.converged_starts;
      // Relative slack for a numerically singular Hessian at the a0 boundary.
      const double scale = std::max(1.0, std::abs(r.objective));
      if (r.min_curvature < -1e-8 * scale) {
        ++census.saddle_starts;
      } else {
        candidates.push_back({r.point, r.objective});
      }
    }
    census.runs.push_back(std::move(r));
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const LocalMinimum& x, const LocalMinimum& y) {
              if (x.objective != y.objective) return x.objective < y.objective;
              return std::lexicographical_compare(x.point.t().begin(), x.point.t().end(),
                                                  y.point.t().begin(), y.point.t().end());
            });
  for (const LocalMinimum& c : candidates) {
    const bool seen = std::any_of(
        census.minima.begin(), census.minima.end(), [&](const LocalMinimum& m) {
          double dist = 0.0;
          for (std::size_t i = 0; i < c.point.size(); ++i)
            dist = std::max(dist, std::abs(c.point[i] - m.point[i]));
          return dist <= opts.distinct_tol;
        });
    if (!seen) census.minima.push_back(c);
  }
  return census;
}

SolveResult solve_lsm(const PCMatrix& a, const SolveOptions& opts) {
  Census census = census_local_minima(a, opts);

  const DescentResult* best = nullptr;
  for (const DescentResult& r : census.runs) {
    const bool better =
        !best || (r.converged && !best->converged) ||
        (r.converged == best->converged && r.objective < best->objective);
    if (better) best = &r;
  }

  SolveResult res = finish(a, Method::kLSM, best->point.weights(Normalization::kSumOne));
  res.method_objective = best->objective;
  res.iterations = best->iterations;
  res.converged = best->converged;
  res.starts = census.starts;
  res.failed_starts = census.failed_starts;
  res.minima_found = std::move(census.minima);
  res.unique = res.minima_found.size() == 1;
  if (!res.converged) res.warnings.emplace_back("NotConverged");
  if (census.saddle_starts > 0) {
    res.warnings.push_back(std::to_string(census.saddle_starts) +
                           " start(s) stopped at a saddle point");
  }
  return res;
}

SolveResult solve_wlsm(const PCMatrix& a) {
  const std::size_t n = a.size();
  const auto N = static_cast<Eigen::Index>(n);

  // sum_ij (a_ij w_j - w_i)^2 = w^T Q w
  MatrixXd q = MatrixXd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) {
      if (i == j) continue;
      const double aij = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      q(j, j) += aij * aij;
      q(i, i) += 1.0;
      q(i, j) -= aij;
      q(j, i) -= aij;
    }

  // Stationarity 2Qw - lambda 1 = 0 with the constraint sum(w) = 1.
  MatrixXd kkt = MatrixXd::Zero(N + 1, N + 1);
  kkt.topLeftCorner(N, N) = 2.0 * q;
  kkt.block(0, N, N, 1).setConstant(-1.0);
  kkt.block(N, 0, 1, N).setConstant(1.0);
  VectorXd rhs = VectorXd::Zero(N + 1);
  rhs(N) = 1.0;

  Eigen::FullPivLU<MatrixXd> lu(kkt);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kSingularSystem, "WLSM KKT matrix is numerically singular");
  }
  const VectorXd sol = lu.solve(rhs);
  std::vector<double> w = to_std(sol.head(N));

  std::vector<std::string> warnings;
  if (std::any_of(w.begin(), w.end(), [](double x) { return !(x > 0.0); })) {
    warnings.emplace_back("NonPositiveSolution");
    for (double& x : w) x = std::max(x, std::numeric_limits<double>::min());
  }
  const WeightVector wv = WeightVector::normalized(w, Normalization::kSumOne);

  // The KKT point must not lose to nearby feasible points.
  const double base = objective_wlsm(a, wv);
  const double min_w = *std::min_element(wv.values().begin(), wv.values().end());
  auto gen = make_stream(0x776c736dULL, n);
  int losses = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> d(n);
    for (double& x : d) x = uniform(gen, -1.0, 1.0);
    center(d);
    std::vector<double> p(wv.values().begin(), wv.values().end());
    for (std::size_t i = 0; i < n; ++i) p[i] += 1e-3 * min_w * d[i];
    const double other = objective_wlsm(a, WeightVector::normalized(p, Normalization::kSumOne));
    if (other < base - 1e-12 * std::max(1.0, base)) ++losses;
  }
  if (losses > 0) {
    warnings.push_back("KKT point lost to " + std::to_string(losses) +
                       " feasible perturbation(s)");
  }

  SolveResult res = finish(a, Method::kWLSM, wv);
  res.method_objective = base;
  res.iterations = 1;
  res.warnings = std::move(warnings);
  return res;
}

SolveResult solve_llsm(const PCMatrix& a) {
  const std::size_t n = a.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::log(a(i, j));
    w[i] = std::exp(s / static_cast<double>(n));
  }
  const WeightVector wv = WeightVector::normalized(std::move(w), Normalization::kProductOne);
  SolveResult res = finish(a, Method::kLLSM, wv);
  res.method_objective = objective_llsm(a, wv);
  res.iterations = 1;
  return res;
}

SolveResult solve_evm(const PCMatrix& a, double tol, int max_iters) {
  if (!(tol > 0.0) || max_iters < 1) {
    throw Error(ErrorCode::kInvalidConfig, "EVM tolerance and max_iters must be positive");
  }
  const std::size_t n = a.size();
  const auto dense = a.dense();
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      m(dense.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  VectorXd x = VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  int iters = 0;
  bool converged = false;
  while (iters < max_iters) {
    VectorXd y = m * x;
    y /= y.sum();
    ++iters;
    const double change = (y - x).cwiseAbs().maxCoeff();
    x = y;
    if (change <= tol) {
      converged = true;
      break;
    }
  }
  // With sum(x) = 1, sum(Ax) / sum(x) is the eigenvalue at a fixed point.
  const double lambda = (m * x).sum() / x.sum();

  SolveResult res = finish(a, Method::kEVM, WeightVector::normalized(to_std(x), Normalization::kSumOne));
  res.eigenvalue = lambda;
  res.method_objective = lambda - static_cast<double>(n);
  res.iterations = iters;
  res.converged = converged;
  if (!converged) res.warnings.emplace_back("NotConverged");
  return res;
}

}  // namespace pcx
