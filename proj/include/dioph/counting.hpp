#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dioph/matrix.hpp"

namespace dioph {

/// The system M x^(k) = 0 over positive integers, where x^(k) raises every
/// coordinate to the k-th power. k = 1 covers linear and linearised systems.
struct DiagonalSystem {
  QMatrix matrix;  // integer entries
  unsigned degree = 1;
};

DiagonalSystem make_system(QMatrix m, unsigned degree);

struct CountConfig {
  // Meet-in-the-middle table cap; at rough table overhead this corresponds
  // to a couple of GiB. Exceeding any cap is an error, never approximation.
  std::size_t max_table_entries = std::size_t{1} << 25;
  std::size_t max_array_entries = std::size_t{1} << 28;
  std::size_t max_distinctness_vars = 12;  // set-partition analysis cap
};

/// Domain of one variable: increasing positive values.
using Domain = std::vector<long>;

struct SolutionCount {
  Int total = 0;
  Int trivial = 0;     // some pair of coordinates equal
  Int nontrivial = 0;  // all coordinates pairwise distinct
  long bound = 0;
};

/// Exact solution counts over the product of the domains (default [1, N]^s).
/// Split enumeration joined through an exact-key table; identical to naive
/// enumeration by construction.
SolutionCount count_solutions(const DiagonalSystem& sys, long n_bound,
                              const std::optional<std::vector<Domain>>& domains = std::nullopt,
                              const CountConfig& cfg = {});

/// Serial reference: full enumeration with explicit distinctness tracking.
SolutionCount count_solutions_reference(const DiagonalSystem& sys, long n_bound,
                                        const std::optional<std::vector<Domain>>& domains =
                                            std::nullopt);

/// Number of solutions with x_u = x_v (0-based indices).
Int count_trivial_pair(const DiagonalSystem& sys, long n_bound, std::size_t u, std::size_t v,
                       const std::optional<std::vector<Domain>>& domains = std::nullopt,
                       const CountConfig& cfg = {});

/// Low-level joint counter: tuples choosing one value per variable with
/// sum_j column_j * value_j = 0. Columns and values are exact integers.
Int count_zero_sums(const std::vector<std::vector<Int>>& columns,
                    const std::vector<std::vector<Int>>& values, const CountConfig& cfg = {});

struct MomentRecord {
  unsigned k = 0;
  unsigned t = 0;
  long n = 0;
  Int value = 0;  // number of (x, y) in [N]^2t with equal sums of k-th powers
};

/// Even moment of the degree-k power counting sequence, via t-fold integer
/// convolution of the k-th power indicator followed by a sum of squares.
MomentRecord mean_value(unsigned k, unsigned t, long n, const CountConfig& cfg = {});

/// Serial reference: tabulates the sums of t k-th powers directly and pairs
/// them off.
Int mean_value_reference(unsigned k, unsigned t, long n, const CountConfig& cfg = {});

/// (convolution route, direct pairing route); the two must agree exactly.
std::pair<Int, Int> even_moment_check(unsigned k, unsigned t, long n,
                                      const CountConfig& cfg = {});

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  double max_residual = 0;
};

/// Least-squares slope of log(value) against log(N).
ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& series);
ExponentFit exponent_fit(const std::vector<std::pair<long, Int>>& series);

struct AnalyticConstants {
  Rat p;          // k^2 + 1/(2n)
  Rat eta;        // 1/(2 k^2 n + 2)
  Rat delta_triv; // 2kn/(k^2 n + 1)
  unsigned t_k = 0;  // floor(k^2 / 2)
};

AnalyticConstants analytic_constants(unsigned k, unsigned n);

}  // namespace dioph
