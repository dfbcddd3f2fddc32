#pragma once

#include <cstddef>
#include <initializer_list>
#include <variant>
#include <vector>

#include "dioph/rational.hpp"

namespace dioph {

/// Dense matrix over Q, row-major. Empty matrices (0 rows and/or 0 columns)
/// are first-class values.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, Rat(0)) {}

  // Integer-literal construction, mostly for tests and fixtures.
  QMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static QMatrix identity(std::size_t n);
  static QMatrix from_rows(const std::vector<std::vector<Rat>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  const Rat& at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  Rat& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

  std::vector<Rat> row(std::size_t i) const;
  std::vector<Rat> column(std::size_t j) const;

  QMatrix transposed() const;
  /// Keeps the selected columns, in the order given.
  QMatrix select_columns(const std::vector<std::size_t>& idx) const;
  /// Keeps the selected rows, in the order given.
  QMatrix select_rows(const std::vector<std::size_t>& idx) const;
  QMatrix block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const;

  bool is_integral() const;
  bool is_zero() const;
  /// Sum of all columns (the vector M·1).
  std::vector<Rat> column_sum() const;

  std::vector<Rat> multiply(const std::vector<Rat>& x) const;

  bool operator==(const QMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rat> entries_;
};

// Elementary row operations, recorded so that third parties can replay a
// computation transcript against the original matrix.
struct RowSwap {
  std::size_t i, j;
  bool operator==(const RowSwap&) const = default;
};
struct RowScale {
  std::size_t i;
  Rat factor;  // nonzero
  bool operator==(const RowScale&) const = default;
};
struct RowAddMul {
  std::size_t src, dst;  // row dst += factor * row src
  Rat factor;
  bool operator==(const RowAddMul&) const = default;
};
using RowOp = std::variant<RowSwap, RowScale, RowAddMul>;

/// A column permutation followed by a sequence of elementary row operations.
/// col_perm[j] is the source index of the column placed at position j.
struct Transform {
  std::vector<std::size_t> col_perm;
  std::vector<RowOp> row_ops;

  static Transform identity(std::size_t rows, std::size_t cols);
  bool operator==(const Transform&) const = default;
};

void apply_row_op(QMatrix& m, const RowOp& op);
QMatrix apply_transform(const Transform& t, const QMatrix& m);

/// Checks that perm is a bijection on [0, n).
bool is_permutation(const std::vector<std::size_t>& perm, std::size_t n);

}  // namespace dioph
