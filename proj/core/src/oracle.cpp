#include "pcx/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "pcx/error.hpp"

namespace pcx::oracle {

namespace {

void validate(const PCMatrix& a, const GridSpec& spec, std::size_t max_n) {
  if (a.size() > max_n) {
    throw Error(ErrorCode::kUnsupportedSize,
                "grid oracle supports n <= " + std::to_string(max_n) + ", got n=" +
                    std::to_string(a.size()));
  }
  if (spec.points_per_axis < 3 || spec.points_per_axis % 2 == 0) {
    throw Error(ErrorCode::kInvalidConfig, "points_per_axis must be odd and >= 3");
  }
  if (spec.half_width && !(*spec.half_width > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "half_width must be positive");
  }
  if (spec.refine_rounds < 0) {
    throw Error(ErrorCode::kInvalidConfig, "refine_rounds must be >= 0");
  }
}

double default_half_width(const PCMatrix& a) { return std::log(a.max_entry()) + 1.0; }

// Free coordinates t_1..t_{n-1}; the last one closes the hyperplane.
std::vector<double> full_point(const std::vector<double>& free) {
  std::vector<double> t(free);
  double s = 0.0;
  for (double x : free) s += x;
  t.push_back(-s);
  return t;
}

struct Best {
  std::vector<double> free;
  double value;
};

Best scan(const PCMatrix& a, const std::vector<double>& center, double half_width, int m) {
  const std::size_t dims = center.size();
  const double step = 2.0 * half_width / static_cast<double>(m - 1);
  std::vector<int> idx(dims, 0);
  std::vector<double> free(dims);
  Best best{center, phi_objective(a, full_point(center))};
  bool first = true;
  for (;;) {
    for (std::size_t d = 0; d < dims; ++d)
      free[d] = center[d] - half_width + step * static_cast<double>(idx[d]);
    const double v = phi_objective(a, full_point(free));
    // Lexicographic scan order + strict improvement breaks ties toward the
    // lexicographically smallest point.
    if (first || v < best.value) {
      best = {free, v};
      first = false;
    }
    std::size_t d = dims;
    while (d > 0) {
      --d;
      if (++idx[d] < m) break;
      idx[d] = 0;
      if (d == 0) return best;
    }
  }
}

}  // namespace

GridResult grid_min_lsm(const PCMatrix& a, const GridSpec& spec) {
  validate(a, spec, 4);
  double hw = spec.half_width.value_or(default_half_width(a));
  std::vector<double> center(a.size() - 1, 0.0);
  std::vector<double> rounds;
  Best best{center, 0.0};
  for (int r = 0; r <= spec.refine_rounds; ++r) {
    Best cand = scan(a, center, hw, spec.points_per_axis);
    // The incumbent stays unless a refined grid strictly improves on it.
    if (r == 0 || cand.value < best.value) best = cand;
    rounds.push_back(best.value);
    center = best.free;
    hw *= 0.1;
  }
  return {LogPoint::centered(full_point(best.free)), best.value, std::move(rounds)};
}

std::vector<LogPoint> grid_local_minima(const PCMatrix& a, const GridSpec& spec,
                                        double distinct_tol) {
  validate(a, spec, 3);
  if (a.size() != 3) {
    throw Error(ErrorCode::kUnsupportedSize, "grid_local_minima requires n = 3");
  }
  const int m = spec.points_per_axis;
  const double hw = spec.half_width.value_or(default_half_width(a));
  const double step = 2.0 * hw / static_cast<double>(m - 1);
  const auto coord = [&](int k) { return -hw + step * static_cast<double>(k); };

  std::vector<double> values(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  const auto at = [&](int x, int y) -> double& {
    return values[static_cast<std::size_t>(x) * static_cast<std::size_t>(m) +
                  static_cast<std::size_t>(y)];
  };
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) at(x, y) = phi_objective(a, full_point({coord(x), coord(y)}));

  struct Hit {
    double value;
    std::vector<double> t;
  };
  std::vector<Hit> hits;
  for (int x = 1; x + 1 < m; ++x)
    for (int y = 1; y + 1 < m; ++y) {
      const double v = at(x, y);
      bool is_min = true;
      for (int dx = -1; dx <= 1 && is_min; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          if ((dx != 0 || dy != 0) && !(v < at(x + dx, y + dy))) {
            is_min = false;
            break;
          }
        }
      if (is_min) hits.push_back({v, full_point({coord(x), coord(y)})});
    }

  std::stable_sort(hits.begin(), hits.end(),
                   [](const Hit& p, const Hit& q) { return p.value < q.value; });
  const double radius = std::max(distinct_tol, 2.0 * step);
  std::vector<LogPoint> out;
  for (const Hit& h : hits) {
    const bool merged = std::any_of(out.begin(), out.end(), [&](const LogPoint& p) {
      double d = 0.0;
      for (std::size_t i = 0; i < 3; ++i) d = std::max(d, std::abs(p[i] - h.t[i]));
      return d <= radius;
    });
    if (!merged) out.push_back(LogPoint::centered(h.t));
  }
  return out;
}

double finite_diff(const std::function<double(double)>& fn, double x, double step,
                   DiffOrder order) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidConfig, "finite difference step must be > 0");
  if (order == DiffOrder::kFirst) return (fn(x + step) - fn(x - step)) / (2.0 * step);
  return (fn(x + step) - 2.0 * fn(x) + fn(x - step)) / (step * step);
}

}  // namespace pcx::oracle
