#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dioph/errors.hpp"
#include "dioph/linalg.hpp"
#include "support.hpp"

using namespace dioph;
namespace ts = dioph::testsupport;

TEST_CASE("rref of proportional rows") {
  QMatrix m{{2, 4}, {1, 2}};
  RrefResult r = rref(m);
  CHECK(r.matrix == QMatrix{{1, 2}, {0, 0}});
  CHECK(r.pivot_cols == std::vector<std::size_t>{0});
  CHECK(apply_transform(r.transform, m) == r.matrix);
}

TEST_CASE("rref of identity is identity with empty transcript") {
  QMatrix m = QMatrix::identity(3);
  RrefResult r = rref(m);
  CHECK(r.matrix == m);
  CHECK(r.transform.row_ops.empty());
}

TEST_CASE("fermat matrix has rank 2") {
  QMatrix fermat{{1, -2, 1, 0}, {1, -1, 0, 1}};
  CHECK(rank(fermat) == 2);
  CHECK(ts::rank_by_minors(fermat) == 2);
}

TEST_CASE("rank conventions") {
  CHECK(rank(QMatrix(2, 3)) == 0);
  CHECK(rank(QMatrix(0, 4)) == 0);
  CHECK(rank(QMatrix(3, 0)) == 0);
  CHECK(rank(QMatrix()) == 0);
}

TEST_CASE("kernel basis normalization") {
  SUBCASE("single difference equation") {
    auto b = kernel_basis(QMatrix{{1, -1}});
    REQUIRE(b.size() == 1);
    CHECK(b[0] == std::vector<Rat>{Rat(1), Rat(1)});
  }
  SUBCASE("columns summing to zero get all-ones first") {
    QMatrix m{{1, 1, -2}};
    auto b = kernel_basis(m);
    REQUIRE(b.size() == 2);
    CHECK(b[0] == std::vector<Rat>{Rat(1), Rat(1), Rat(1)});
    CHECK(b[1][0] == 0);
    for (const auto& v : b) {
      auto mv = m.multiply(v);
      for (const Rat& e : mv) CHECK(e == 0);
    }
    // Matches the expected basis up to the stated normalization.
    CHECK(b[1] == std::vector<Rat>{Rat(0), Rat(2), Rat(1)});
  }
  SUBCASE("identity has empty kernel") {
    CHECK(kernel_basis(QMatrix::identity(2)).empty());
  }
  SUBCASE("normalization unavailable") {
    CHECK_THROWS_AS(kernel_basis(QMatrix{{1, 1}}, AllOnesNormalization::Require), Error);
    CHECK(kernel_basis(QMatrix{{1, 1}}).size() == 1);
  }
  SUBCASE("zero-row matrix") {
    QMatrix m(0, 3);
    auto b = kernel_basis(m);
    REQUIRE(b.size() == 3);
    CHECK(b[0] == std::vector<Rat>(3, Rat(1)));
    CHECK(b[1][0] == 0);
    CHECK(b[2][0] == 0);
    CHECK(rank(QMatrix::from_rows(b)) == 3);
  }
}

TEST_CASE("column span dimension") {
  QMatrix fermat{{1, -2, 1, 0}, {1, -1, 0, 1}};
  CHECK(column_span_dim(fermat, {}) == 0);
  CHECK(column_span_dim(fermat, {0, 1}) == 2);
  QMatrix dup{{1, 0, 1, 0}, {0, 1, 0, 1}};
  CHECK(column_span_dim(dup, {0, 2}) == 1);
  CHECK_THROWS_AS(column_span_dim(dup, {7}), Error);
}

TEST_CASE("random matrices: transcript replay, kernel, transpose, minors") {
  ts::Rng rng(20240811);
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  for (int iter = 0; iter < 300; ++iter) {
    QMatrix m = ts::random_int_matrix(rng, dim(rng), dim(rng), -2, 2);
    RrefResult r = rref(m);
    CHECK(apply_transform(r.transform, m) == r.matrix);
    CHECK(r.pivot_cols.size() == ts::rank_by_minors(m));
    CHECK(rank(m) == rank(m.transposed()));
    auto basis = kernel_basis(m);
    CHECK(basis.size() == m.cols() - r.pivot_cols.size());
    for (const auto& v : basis)
      for (const Rat& e : m.multiply(v)) CHECK(e == 0);
    if (!basis.empty())
      CHECK(rank(QMatrix::from_rows(basis)) == basis.size());
  }
}

TEST_CASE("solve in column span") {
  QMatrix m{{1, -2, 1, 0}, {1, -1, 0, 1}};
  auto c = solve_in_column_span(m, {0, 1}, m.column(2));
  REQUIRE(c.has_value());
  CHECK(m.column(2) ==
        std::vector<Rat>{(*c)[0] * m.at(0, 0) + (*c)[1] * m.at(0, 1),
                         (*c)[0] * m.at(1, 0) + (*c)[1] * m.at(1, 1)});
  CHECK(in_column_span(m, {0, 1}, m.column(3)));
  QMatrix dup{{1, 0, 1, 0}, {0, 1, 0, 1}};
  CHECK_FALSE(in_column_span(dup, {0, 2}, dup.column(1)));
}

TEST_CASE("dependent row removal preserves column relations") {
  QMatrix m{{1, 2, 3}, {2, 4, 6}, {0, 1, 1}};
  QMatrix d = drop_dependent_rows(m);
  CHECK(d.rows() == 2);
  CHECK(has_full_row_rank(d));
  for (std::size_t j1 = 0; j1 < 3; ++j1)
    for (std::size_t j2 = 0; j2 < 3; ++j2)
      CHECK(column_span_dim(m, {j1, j2}) == column_span_dim(d, {j1, j2}));
}

TEST_CASE("matrix json-ish invariants: empty matrices are first class") {
  QMatrix e(0, 4);
  CHECK(e.empty());
  CHECK(e.column_sum().empty());
  RrefResult r = rref(e);
  CHECK(r.matrix == e);
}
