#pragma once

#include <optional>
#include <vector>

#include "dioph/matrix.hpp"

namespace dioph {

struct MatroidConfig {
  std::size_t max_cols = 24;  // cap for subset enumerations
};

/// mu(d): the largest number of columns whose span has dimension at most d.
/// Defined for 0 <= d <= rows; constant (= cols) once d reaches rank(M).
std::size_t mu(const QMatrix& m, std::size_t d, const MatroidConfig& cfg = {});

struct MuProfile {
  std::vector<std::size_t> values;  // mu(0), ..., mu(rank)
};
MuProfile mu_profile(const QMatrix& m, const MatroidConfig& cfg = {});

/// q(d): the minimum size of the union of supports of d linearly independent
/// row-space vectors. Computed through the complement-rank characterization
///   q(d) = min{ |T| : rank of M without the columns in T <= n - d }
///        = cols - mu(n - d),
/// which requires full row rank.
struct QProfile {
  std::vector<std::size_t> values;  // q(0) = 0, ..., q(rank)
};
QProfile q_profile(const QMatrix& m, const MatroidConfig& cfg = {});

struct ConditionIFailure {
  std::size_t d;
  std::size_t q_d;
  std::size_t threshold;  // d*k^2 + 1
};

struct ConditionIReport {
  bool holds = false;
  unsigned degree = 0;
  std::vector<ConditionIFailure> failures;
  QProfile profile;
};

/// Checks q(d) >= d*k^2 + 1 for all 1 <= d <= rank(M). Requires full row rank.
ConditionIReport check_condition_I(const QMatrix& m, unsigned k, const MatroidConfig& cfg = {});

struct PartitionCertificate {
  std::vector<std::vector<std::size_t>> blocks;  // k disjoint blocks of size rows
};

/// True iff mu(d) <= d*k for all 0 <= d <= rows (requires cols == k*rows).
bool aigner_criterion(const QMatrix& m, std::size_t k, const MatroidConfig& cfg = {});

/// Edmonds-style augmenting search over k copies of the column matroid.
/// Returns some partition of the columns into k bases, if one exists.
std::optional<std::vector<std::vector<std::size_t>>> matroid_partition(const QMatrix& m,
                                                                       std::size_t k);

/// Decides k-partitionability by both the Aigner criterion and constructive
/// matroid partitioning (the two must agree), and emits the lexicographically
/// least certificate.
std::optional<PartitionCertificate> is_k_partitionable(const QMatrix& m, std::size_t k,
                                                       const MatroidConfig& cfg = {});

struct QuasiReport {
  bool holds = false;
  bool size_ok = false;                    // cols >= rows * q
  std::optional<std::size_t> violated_d;   // first d < rows with mu(d) > d*q
  std::optional<std::size_t> mu_at_violation;
};

/// Quasi-q-partitionability: cols >= rows*q and mu(d) <= d*q for 0 <= d < rows.
QuasiReport is_quasi_partitionable(const QMatrix& m, std::size_t q,
                                   const MatroidConfig& cfg = {});

}  // namespace dioph
