#pragma once

// Reciprocal pairwise comparison matrices, weight vectors, and the
// distance-based (triad) inconsistency indicator.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pcx {

/// Default acceptability threshold for the triad inconsistency indicator.
inline constexpr double kAcceptableInconsistency = 1.0 / 3.0;

/// Default relative tolerance used by is_consistent().
inline constexpr double kConsistencyTolerance = 1e-10;

/// n x n positive reciprocal matrix. Only the strict upper triangle is stored,
/// so a_ii = 1 and a_ji = 1 / a_ij hold by construction.
class PCMatrix {
 public:
  /// Throws Error{kTooSmall | kDimensionMismatch | kNonPositiveEntry}.
  PCMatrix(std::size_t n, std::vector<double> upper,
           std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return n_; }

  /// Entry a_ij for 0-based indices.
  double operator()(std::size_t i, std::size_t j) const;

  /// Row-major strict upper triangle: a_01, a_02, ..., a_0(n-1), a_12, ...
  std::span<const double> upper() const noexcept { return upper_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Position of a_ij (i < j) inside upper().
  std::size_t upper_index(std::size_t i, std::size_t j) const;

  /// Largest entry of the full matrix, i.e. max over i<j of max(a_ij, 1/a_ij).
  double max_entry() const;

  /// Matrix with rows and columns relabeled: result(i, j) = (*this)(perm[i], perm[j]).
  PCMatrix permuted(std::span<const std::size_t> perm) const;

  /// Dense row-major copy of the full matrix.
  std::vector<double> dense() const;

  friend bool operator==(const PCMatrix&, const PCMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<double> upper_;
  std::vector<std::string> labels_;
};

enum class Normalization { kSumOne, kProductOne };

/// Strictly positive priority vector under one of two normalizations.
class WeightVector {
 public:
  /// Rescales any strictly positive, finite vector to the requested
  /// normalization. Throws Error{kNonPositiveEntry | kTooSmall}.
  static WeightVector normalized(std::vector<double> raw, Normalization norm);

  std::span<const double> values() const noexcept { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }
  std::size_t size() const noexcept { return w_.size(); }
  Normalization normalization() const noexcept { return norm_; }

  WeightVector as(Normalization norm) const;

 private:
  WeightVector(std::vector<double> w, Normalization norm)
      : w_(std::move(w)), norm_(norm) {}

  std::vector<double> w_;
  Normalization norm_;
};

struct TriadReport {
  std::size_t i = 0, k = 0, j = 0;
  double a_ik = 1.0, a_kj = 1.0, a_ij = 1.0;
  double value = 0.0;
};

struct InconsistencyReport {
  double global_value = 0.0;
  std::optional<TriadReport> worst;
  /// Filled only when requested; sorted by value descending, ties by (i, k, j).
  std::vector<TriadReport> all_triads;
  bool acceptable = true;
};

PCMatrix build_matrix(std::size_t n, std::vector<double> upper_entries,
                      std::vector<std::string> labels = {});

/// Consistent matrix a_ij = w_i / w_j.
PCMatrix from_weights(const WeightVector& w);

/// True iff |a_ik a_kj - a_ij| <= tol * max(a_ij, a_ik a_kj) for every triad.
bool is_consistent(const PCMatrix& a, double tol = kConsistencyTolerance);

/// min(|1 - a_ij / (a_ik a_kj)|, |1 - a_ik a_kj / a_ij|), always in [0, 1).
/// Argument order follows the written triad [a_ik, a_ij, a_kj].
double triad_inconsistency(double a_ik, double a_ij, double a_kj);

InconsistencyReport inconsistency(const PCMatrix& a, bool collect_all = false,
                                  double threshold = kAcceptableInconsistency);

}  // namespace pcx
