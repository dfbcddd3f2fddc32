#include "dioph/linalg.hpp"

#include <algorithm>
#include <numeric>

#include "dioph/errors.hpp"

namespace dioph {

RrefResult rref(const QMatrix& m) {
  RrefResult res;
  res.matrix = m;
  res.transform = Transform::identity(m.rows(), m.cols());
  QMatrix& a = res.matrix;
  auto& ops = res.transform.row_ops;

  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < a.cols() && pivot_row < a.rows(); ++col) {
    // Topmost nonzero entry at or below pivot_row.
    std::size_t sel = pivot_row;
    while (sel < a.rows() && a.at(sel, col) == 0) ++sel;
    if (sel == a.rows()) continue;
    if (sel != pivot_row) {
      ops.push_back(RowSwap{pivot_row, sel});
      apply_row_op(a, ops.back());
    }
    if (a.at(pivot_row, col) != 1) {
      ops.push_back(RowScale{pivot_row, Rat(1) / a.at(pivot_row, col)});
      apply_row_op(a, ops.back());
    }
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == pivot_row || a.at(r, col) == 0) continue;
      ops.push_back(RowAddMul{pivot_row, r, Rat(-a.at(r, col))});
      apply_row_op(a, ops.back());
    }
    res.pivot_cols.push_back(col);
    ++pivot_row;
  }
  return res;
}

std::size_t rank(const QMatrix& m) { return rref(m).pivot_cols.size(); }

std::size_t column_span_dim(const QMatrix& m, const std::vector<std::size_t>& subset) {
  for (std::size_t j : subset)
    if (j >= m.cols()) throw_invalid("column index out of range");
  if (subset.empty()) return 0;
  return rank(m.select_columns(subset));
}

std::vector<std::vector<Rat>> kernel_basis(const QMatrix& m, AllOnesNormalization norm) {
  const std::size_t s = m.cols();

  bool zero_colsum = true;
  for (const Rat& c : m.column_sum())
    if (c != 0) {
      zero_colsum = false;
      break;
    }

  auto plain_kernel = [](const QMatrix& a) {
    RrefResult r = rref(a);
    const std::size_t n = a.cols();
    std::vector<bool> is_pivot(n, false);
    for (std::size_t p : r.pivot_cols) is_pivot[p] = true;
    std::vector<std::vector<Rat>> basis;
    for (std::size_t free = 0; free < n; ++free) {
      if (is_pivot[free]) continue;
      std::vector<Rat> v(n, Rat(0));
      v[free] = 1;
      for (std::size_t pi = 0; pi < r.pivot_cols.size(); ++pi)
        v[r.pivot_cols[pi]] = -r.matrix.at(pi, free);
      basis.push_back(std::move(v));
    }
    return basis;
  };

  if (s == 0 || !zero_colsum) {
    if (!zero_colsum && norm == AllOnesNormalization::Require)
      throw_invalid("all-ones kernel normalization unavailable: columns do not sum to zero");
    return plain_kernel(m);
  }

  // Columns sum to zero, so all-ones is in the kernel. The rest of the basis
  // spans the kernel vectors with vanishing first coordinate, obtained by
  // adjoining the row e_1.
  QMatrix aug(m.rows() + 1, s);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < s; ++j) aug.at(i, j) = m.at(i, j);
  aug.at(m.rows(), 0) = 1;

  std::vector<std::vector<Rat>> basis;
  basis.emplace_back(s, Rat(1));
  for (auto& v : plain_kernel(aug)) basis.push_back(std::move(v));
  check_internal(basis.size() == s - rank(m), "kernel basis size mismatch");
  return basis;
}

std::optional<std::vector<Rat>> solve_in_column_span(const QMatrix& m,
                                                     const std::vector<std::size_t>& basis_cols,
                                                     const std::vector<Rat>& target) {
  if (target.size() != m.rows()) throw_invalid("target dimension mismatch");
  QMatrix aug(m.rows(), basis_cols.size() + 1);
  for (std::size_t j = 0; j < basis_cols.size(); ++j) {
    if (basis_cols[j] >= m.cols()) throw_invalid("column index out of range");
    for (std::size_t i = 0; i < m.rows(); ++i) aug.at(i, j) = m.at(i, basis_cols[j]);
  }
  for (std::size_t i = 0; i < m.rows(); ++i) aug.at(i, basis_cols.size()) = target[i];

  RrefResult r = rref(aug);
  // Inconsistent iff the last column is a pivot.
  for (std::size_t p : r.pivot_cols)
    if (p == basis_cols.size()) return std::nullopt;
  std::vector<Rat> coeff(basis_cols.size(), Rat(0));
  for (std::size_t pi = 0; pi < r.pivot_cols.size(); ++pi)
    coeff[r.pivot_cols[pi]] = r.matrix.at(pi, basis_cols.size());
  return coeff;
}

bool in_column_span(const QMatrix& m, const std::vector<std::size_t>& span_cols,
                    const std::vector<Rat>& target) {
  QMatrix sub = m.select_columns(span_cols);
  QMatrix aug(m.rows(), span_cols.size() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < span_cols.size(); ++j) aug.at(i, j) = sub.at(i, j);
    aug.at(i, span_cols.size()) = target[i];
  }
  return rank(aug) == rank(sub);
}

bool has_full_row_rank(const QMatrix& m) { return rank(m) == m.rows(); }

std::vector<std::size_t> independent_row_indices(const QMatrix& m) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto cand = kept;
    cand.push_back(i);
    if (rank(m.select_rows(cand)) == cand.size()) kept = std::move(cand);
  }
  return kept;
}

QMatrix drop_dependent_rows(const QMatrix& m) {
  return m.select_rows(independent_row_indices(m));
}

}  // namespace dioph
