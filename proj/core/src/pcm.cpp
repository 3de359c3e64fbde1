#include "pcx/pcm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pcx/error.hpp"

namespace pcx {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveEntry: return "NonPositiveEntry";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kNonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kUnsupportedSize: return "UnsupportedSize";
    case ErrorCode::kOutOfScale: return "OutOfScale";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kStorage: return "StorageError";
  }
  return "Unknown";
}

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

PCMatrix::PCMatrix(std::size_t n, std::vector<double> upper,
                   std::vector<std::string> labels)
    : n_(n), upper_(std::move(upper)), labels_(std::move(labels)) {
  if (n_ < 2) {
    throw Error(ErrorCode::kTooSmall, "a comparison matrix needs n >= 2");
  }
  const std::size_t expected = n_ * (n_ - 1) / 2;
  if (upper_.size() != expected) {
    std::ostringstream os;
    os << "expected " << expected << " upper-triangle entries for n=" << n_
       << ", got " << upper_.size();
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
  if (!labels_.empty() && labels_.size() != n_) {
    std::ostringstream os;
    os << "expected " << n_ << " labels, got " << labels_.size();
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
  for (std::size_t p = 0; p < upper_.size(); ++p) {
    if (!positive_finite(upper_[p])) {
      std::ostringstream os;
      os << "entry #" << p << " (" << upper_[p]
         << ") must be finite and strictly positive";
      throw Error(ErrorCode::kNonPositiveEntry, os.str());
    }
  }
}

std::size_t PCMatrix::upper_index(std::size_t i, std::size_t j) const {
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

double PCMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i == j) return 1.0;
  if (i < j) return upper_[upper_index(i, j)];
  return 1.0 / upper_[upper_index(j, i)];
}

double PCMatrix::max_entry() const {
  double m = 1.0;
  for (double v : upper_) m = std::max({m, v, 1.0 / v});
  return m;
}

PCMatrix PCMatrix::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != n_) {
    throw Error(ErrorCode::kDimensionMismatch, "permutation length differs from n");
  }
  std::vector<double> up;
  up.reserve(upper_.size());
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) up.push_back((*this)(perm[i], perm[j]));
  std::vector<std::string> lab;
  if (!labels_.empty())
    for (std::size_t i = 0; i < n_; ++i) lab.push_back(labels_[perm[i]]);
  return PCMatrix(n_, std::move(up), std::move(lab));
}

std::vector<double> PCMatrix::dense() const {
  std::vector<double> out(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i * n_ + j] = (*this)(i, j);
  return out;
}

WeightVector WeightVector::normalized(std::vector<double> raw, Normalization norm) {
  if (raw.empty()) throw Error(ErrorCode::kTooSmall, "empty weight vector");
  for (double v : raw) {
    if (!positive_finite(v)) {
      throw Error(ErrorCode::kNonPositiveEntry,
                  "weights must be finite and strictly positive");
    }
  }
  if (norm == Normalization::kSumOne) {
    const double s = std::accumulate(raw.begin(), raw.end(), 0.0);
    for (double& v : raw) v /= s;
  } else {
    double mean_log = 0.0;
    for (double v : raw) mean_log += std::log(v);
    mean_log /= static_cast<double>(raw.size());
    for (double& v : raw) v = std::exp(std::log(v) - mean_log);
  }
  return WeightVector(std::move(raw), norm);
}

WeightVector WeightVector::as(Normalization norm) const {
  if (norm == norm_) return *this;
  return normalized(w_, norm);
}

PCMatrix build_matrix(std::size_t n, std::vector<double> upper_entries,
                      std::vector<std::string> labels) {
  return PCMatrix(n, std::move(upper_entries), std::move(labels));
}

PCMatrix from_weights(const WeightVector& w) {
  const std::size_t n = w.size();
  std::vector<double> up;
  up.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) up.push_back(w[i] / w[j]);
  return PCMatrix(n, std::move(up));
}

bool is_consistent(const PCMatrix& a, double tol) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t j = k + 1; j < n; ++j) {
        const double path = a(i, k) * a(k, j);
        const double direct = a(i, j);
        if (std::abs(path - direct) > tol * std::max(direct, path)) return false;
      }
  return true;
}

double triad_inconsistency(double a_ik, double a_ij, double a_kj) {
  if (!positive_finite(a_ik) || !positive_finite(a_ij) || !positive_finite(a_kj)) {
    throw Error(ErrorCode::kNonPositiveEntry,
                "triad entries must be finite and strictly positive");
  }
  const double path = a_ik * a_kj;
  return std::min(std::abs(1.0 - a_ij / path), std::abs(1.0 - path / a_ij));
}

InconsistencyReport inconsistency(const PCMatrix& a, bool collect_all,
                                  double threshold) {
  InconsistencyReport report;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t j = k + 1; j < n; ++j) {
        TriadReport t{i, k, j, a(i, k), a(k, j), a(i, j), 0.0};
        t.value = triad_inconsistency(t.a_ik, t.a_ij, t.a_kj);
        // Strict comparison keeps the lexicographically first argmax.
        if (!report.worst || t.value > report.worst->value) report.worst = t;
        if (collect_all) report.all_triads.push_back(t);
      }
  if (report.worst) report.global_value = report.worst->value;
  std::stable_sort(report.all_triads.begin(), report.all_triads.end(),
                   [](const TriadReport& x, const TriadReport& y) {
                     return x.value > y.value;
                   });
  report.acceptable = report.global_value <= threshold;
  return report;
}

}  // namespace pcx
