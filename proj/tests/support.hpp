#pragma once

// Shared helpers for the test suites: seeded generators and tiny brute-force
// oracles that stay independent of the library's fast paths.

#include <cstdint>
#include <random>
#include <vector>

#include "dioph/linalg.hpp"
#include "dioph/matrix.hpp"

namespace dioph::testsupport {

using Rng = std::mt19937_64;

inline QMatrix random_int_matrix(Rng& rng, std::size_t rows, std::size_t cols, long lo, long hi) {
  std::uniform_int_distribution<long> dist(lo, hi);
  QMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = Rat(dist(rng));
  return m;
}

inline QMatrix random_full_row_rank_matrix(Rng& rng, std::size_t rows, std::size_t cols, long lo,
                                           long hi) {
  for (;;) {
    QMatrix m = random_int_matrix(rng, rows, cols, lo, hi);
    if (has_full_row_rank(m)) return m;
  }
}

// Enumerates all rows x cols matrices with entries from the given values,
// invoking fn on each. Intended for very small shapes only.
template <typename Fn>
void for_each_matrix(std::size_t rows, std::size_t cols, const std::vector<long>& values, Fn fn) {
  const std::size_t cells = rows * cols;
  std::vector<std::size_t> digits(cells, 0);
  for (;;) {
    QMatrix m(rows, cols);
    for (std::size_t c = 0; c < cells; ++c) m.at(c / cols, c % cols) = Rat(values[digits[c]]);
    fn(m);
    std::size_t pos = 0;
    while (pos < cells && ++digits[pos] == values.size()) digits[pos++] = 0;
    if (pos == cells) break;
  }
}

// Rank by exhaustive minor evaluation: the largest r such that some r x r
// submatrix has nonzero determinant. Independent of the rref path.
inline Rat minor_determinant(const QMatrix& m, const std::vector<std::size_t>& rows,
                             const std::vector<std::size_t>& cols) {
  const std::size_t n = rows.size();
  if (n == 0) return Rat(1);
  // Laplace expansion along the first row.
  Rat det(0);
  for (std::size_t j = 0; j < n; ++j) {
    if (m.at(rows[0], cols[j]) == 0) continue;
    std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
    std::vector<std::size_t> sub_cols;
    for (std::size_t jj = 0; jj < n; ++jj)
      if (jj != j) sub_cols.push_back(cols[jj]);
    Rat term = m.at(rows[0], cols[j]) * minor_determinant(m, sub_rows, sub_cols);
    det += (j % 2 == 0) ? term : Rat(-term);
  }
  return det;
}

template <typename Fn>
void for_each_subset_of_size(std::size_t n, std::size_t k, Fn fn) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::size_t rank_by_minors(const QMatrix& m) {
  std::size_t best = 0;
  const std::size_t rmax = std::min(m.rows(), m.cols());
  for (std::size_t r = 1; r <= rmax; ++r) {
    bool found = false;
    for_each_subset_of_size(m.rows(), r, [&](const std::vector<std::size_t>& rs) {
      if (found) return;
      for_each_subset_of_size(m.cols(), r, [&](const std::vector<std::size_t>& cs) {
        if (found) return;
        if (minor_determinant(m, rs, cs) != 0) found = true;
      });
    });
    if (found) best = r;
  }
  return best;
}

}  // namespace dioph::testsupport
