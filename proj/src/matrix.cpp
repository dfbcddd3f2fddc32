#include "dioph/matrix.hpp"

#include <numeric>

#include "dioph/errors.hpp"

namespace dioph {

QMatrix::QMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw_invalid("ragged matrix literal");
    for (long v : r) entries_.emplace_back(v);
  }
}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

QMatrix QMatrix::from_rows(const std::vector<std::vector<Rat>>& rows) {
  QMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) throw_invalid("ragged row list");
    for (std::size_t j = 0; j < m.cols_; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

std::vector<Rat> QMatrix::row(std::size_t i) const {
  std::vector<Rat> r(cols_);
  for (std::size_t j = 0; j < cols_; ++j) r[j] = at(i, j);
  return r;
}

std::vector<Rat> QMatrix::column(std::size_t j) const {
  std::vector<Rat> c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = at(i, j);
  return c;
}

QMatrix QMatrix::transposed() const {
  QMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

QMatrix QMatrix::select_columns(const std::vector<std::size_t>& idx) const {
  QMatrix m(rows_, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= cols_) throw_invalid("column index out of range");
    for (std::size_t i = 0; i < rows_; ++i) m.at(i, j) = at(i, idx[j]);
  }
  return m;
}

QMatrix QMatrix::select_rows(const std::vector<std::size_t>& idx) const {
  QMatrix m(idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= rows_) throw_invalid("row index out of range");
    for (std::size_t j = 0; j < cols_; ++j) m.at(i, j) = at(idx[i], j);
  }
  return m;
}

QMatrix QMatrix::block(std::size_t r0, std::size_t c0, std::size_t nrows,
                       std::size_t ncols) const {
  if (r0 + nrows > rows_ || c0 + ncols > cols_) throw_invalid("block out of range");
  QMatrix m(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i)
    for (std::size_t j = 0; j < ncols; ++j) m.at(i, j) = at(r0 + i, c0 + j);
  return m;
}

bool QMatrix::is_integral() const {
  for (const Rat& e : entries_)
    if (!is_integer(e)) return false;
  return true;
}

bool QMatrix::is_zero() const {
  for (const Rat& e : entries_)
    if (e != 0) return false;
  return true;
}

std::vector<Rat> QMatrix::column_sum() const {
  std::vector<Rat> s(rows_, Rat(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) s[i] += at(i, j);
  return s;
}

std::vector<Rat> QMatrix::multiply(const std::vector<Rat>& x) const {
  if (x.size() != cols_) throw_invalid("dimension mismatch in matrix-vector product");
  std::vector<Rat> y(rows_, Rat(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) y[i] += at(i, j) * x[j];
  return y;
}

Transform Transform::identity(std::size_t /*rows*/, std::size_t cols) {
  Transform t;
  t.col_perm.resize(cols);
  std::iota(t.col_perm.begin(), t.col_perm.end(), std::size_t{0});
  return t;
}

void apply_row_op(QMatrix& m, const RowOp& op) {
  if (const auto* sw = std::get_if<RowSwap>(&op)) {
    if (sw->i >= m.rows() || sw->j >= m.rows()) throw_invalid("row op index out of range");
    for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m.at(sw->i, c), m.at(sw->j, c));
  } else if (const auto* sc = std::get_if<RowScale>(&op)) {
    if (sc->i >= m.rows()) throw_invalid("row op index out of range");
    if (sc->factor == 0) throw_invalid("row scale by zero");
    for (std::size_t c = 0; c < m.cols(); ++c) m.at(sc->i, c) *= sc->factor;
  } else {
    const auto& am = std::get<RowAddMul>(op);
    if (am.src >= m.rows() || am.dst >= m.rows() || am.src == am.dst)
      throw_invalid("row op index out of range");
    for (std::size_t c = 0; c < m.cols(); ++c) m.at(am.dst, c) += am.factor * m.at(am.src, c);
  }
}

QMatrix apply_transform(const Transform& t, const QMatrix& m) {
  if (!is_permutation(t.col_perm, m.cols())) throw_invalid("transform column permutation invalid");
  QMatrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out.at(i, j) = m.at(i, t.col_perm[j]);
  for (const RowOp& op : t.row_ops) apply_row_op(out, op);
  return out;
}

bool is_permutation(const std::vector<std::size_t>& perm, std::size_t n) {
  if (perm.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

}  // namespace dioph
