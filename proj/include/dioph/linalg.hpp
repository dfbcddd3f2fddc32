#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dioph/matrix.hpp"

namespace dioph {

struct RrefResult {
  QMatrix matrix;
  Transform transform;                // identity column permutation
  std::vector<std::size_t> pivot_cols;
};

/// Reduced row echelon form with a replayable transcript:
/// apply_transform(r.transform, m) == r.matrix, exactly.
RrefResult rref(const QMatrix& m);

std::size_t rank(const QMatrix& m);

/// Rank of the submatrix formed by the given columns.
std::size_t column_span_dim(const QMatrix& m, const std::vector<std::size_t>& subset);

enum class AllOnesNormalization {
  WhenAvailable,  // normalize if the columns of M sum to zero, else plain basis
  Require,        // error if the columns do not sum to zero
};

/// Exact basis of ker(M) = {v : M v = 0}, of size cols - rank(M).
/// When the columns of M sum to zero, the first basis vector is all-ones and
/// every later vector has first coordinate 0.
std::vector<std::vector<Rat>> kernel_basis(
    const QMatrix& m, AllOnesNormalization norm = AllOnesNormalization::WhenAvailable);

/// Unique solution c of (basis columns) * c = target, if any. The columns
/// indexed by basis_cols must be linearly independent.
std::optional<std::vector<Rat>> solve_in_column_span(const QMatrix& m,
                                                     const std::vector<std::size_t>& basis_cols,
                                                     const std::vector<Rat>& target);

/// True iff target lies in the span of the given columns.
bool in_column_span(const QMatrix& m, const std::vector<std::size_t>& span_cols,
                    const std::vector<Rat>& target);

bool has_full_row_rank(const QMatrix& m);

/// Indices of a maximal independent set of rows, greedy from the top.
std::vector<std::size_t> independent_row_indices(const QMatrix& m);

/// Deletes rows that are linear combinations of earlier ones. Column ranks,
/// spans and the row space are unchanged.
QMatrix drop_dependent_rows(const QMatrix& m);

/// Incremental echelon basis for span membership tests over Q.
class ColumnEchelon {
 public:
  explicit ColumnEchelon(std::size_t dim) : dim_(dim) {}

  std::size_t size() const { return rows_.size(); }

  bool in_span(const std::vector<Rat>& v) const { return reduce(v).empty(); }

  /// Adds v to the basis; returns false (and leaves the basis unchanged)
  /// if v already lies in the span.
  bool add(const std::vector<Rat>& v) {
    std::vector<Rat> r = reduce(v);
    if (r.empty()) return false;
    std::size_t p = 0;
    while (r[p] == 0) ++p;
    Rat inv = Rat(1) / r[p];
    for (Rat& e : r) e *= inv;
    rows_.push_back(std::move(r));
    pivots_.push_back(p);
    return true;
  }

 private:
  // Residual of v against the basis; empty vector encodes zero residual.
  std::vector<Rat> reduce(const std::vector<Rat>& v) const {
    std::vector<Rat> r = v;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rat& c = r[pivots_[i]];
      if (c == 0) continue;
      Rat f = c;
      for (std::size_t j = 0; j < dim_; ++j) r[j] -= f * rows_[i][j];
    }
    for (const Rat& e : r)
      if (e != 0) return r;
    return {};
  }

  std::size_t dim_;
  std::vector<std::vector<Rat>> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace dioph
