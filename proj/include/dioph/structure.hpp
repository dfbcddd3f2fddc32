#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dioph/matrix.hpp"
#include "dioph/matroid.hpp"

namespace dioph {

struct StructureConfig {
  std::size_t max_cols = 12;  // cap for the ordered-partition search
  MatroidConfig matroid;
};

/// Ordered partition J_1, ..., J_p of the column indices with the first block
/// summing to zero and every later block sum lying in the span of the columns
/// of the earlier blocks; the witnesses record one exact such combination per
/// later block as (column index, coefficient) pairs.
struct ColumnsCertificate {
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::vector<std::pair<std::size_t, Rat>>> witnesses;  // one per block t >= 2
};

/// Canonical (lexicographically least) certificate, or nothing if the
/// columns condition fails. Exponential search, capped by cfg.max_cols.
std::optional<ColumnsCertificate> check_columns_condition(const QMatrix& m,
                                                          const StructureConfig& cfg = {});

/// Replays a certificate against the matrix: partition well-formed, block-1
/// sum zero, every witness combination reproduces its block sum exactly.
bool validate_columns_certificate(const QMatrix& m, const ColumnsCertificate& cert);

/// Samples random integer combinations of the rows and reports a row-space
/// vector whose nonzero entries admit no zero-sum nonempty subcollection.
/// Such a witness disproves the columns condition; absence proves nothing.
/// The witness is normalized to a primitive integer vector with positive
/// leading entry.
std::optional<std::vector<Rat>> falsify_property_iii(const QMatrix& m, std::size_t samples,
                                                     std::uint64_t seed,
                                                     const StructureConfig& cfg = {});

/// Constructive equivalence to a block matrix (A B; 0 C): A of full rank n
/// with columns summing to zero, C obeying the columns condition when
/// nonempty. The transform replays the construction exactly.
struct NormalForm {
  Transform transform;
  std::size_t n = 0, s = 0, m = 0, t = 0;
  QMatrix A, B, C;
  std::optional<ColumnsCertificate> c_certificate;  // present when m,t > 0
};

NormalForm to_normal_form(const QMatrix& m, const StructureConfig& cfg = {});

/// Equivalence to a block upper triangular matrix whose diagonal blocks are
/// all quasi-q-partitionable with s_i > n_i * q.
struct DecompositionResult {
  Transform transform;
  std::size_t q = 0;
  std::vector<std::pair<std::size_t, std::size_t>> block_shapes;  // (n_i, s_i)
  std::vector<QMatrix> diagonal;
  QMatrix transformed;
};

DecompositionResult decompose_quasi(const QMatrix& m, std::size_t q,
                                    const StructureConfig& cfg = {});

/// Rescaled and row-reduced system data: A holds a nonsingular diagonal
/// submatrix, each row of A has coprime entries, and every entry of B is
/// divisible by every nonzero entry of A. Solutions (x, y) of the output
/// system map to solutions (x, K^k y) of the input system.
struct PreprocessedSystem {
  QMatrix A, B, C;
  Int K;
  unsigned k = 0;
  Int rescale_factor;  // K^k
};

PreprocessedSystem preprocess_system(const QMatrix& a, const QMatrix& b, const QMatrix& c,
                                     unsigned k);

/// Condition validators for preprocessed systems.
bool has_nonsingular_diagonal_submatrix(const QMatrix& a);
bool rows_have_coprime_entries(const QMatrix& a);
bool divisibility_condition(const QMatrix& a, const QMatrix& b);

}  // namespace dioph
