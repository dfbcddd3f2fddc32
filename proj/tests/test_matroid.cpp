#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <algorithm>

#include "dioph/errors.hpp"
#include "dioph/matroid.hpp"
#include "support.hpp"

using namespace dioph;
namespace ts = dioph::testsupport;

namespace {

const QMatrix kFermat{{1, -2, 1, 0}, {1, -1, 0, 1}};

// Definitional q oracle: minimize |T| over column sets T such that the row
// space contains d independent vectors supported inside T. The dimension of
// that vector space is rows - rank(columns outside T), with rank evaluated
// by exhaustive minors, independent of the library's elimination code.
std::size_t q_oracle(const QMatrix& m, std::size_t d) {
  const std::size_t s = m.cols();
  std::size_t best = s + 1;
  for (std::size_t size = 0; size <= s && best == s + 1; ++size) {
    ts::for_each_subset_of_size(s, size, [&](const std::vector<std::size_t>& t) {
      if (best != s + 1) return;
      std::vector<bool> in_t(s, false);
      for (std::size_t j : t) in_t[j] = true;
      std::vector<std::size_t> complement;
      for (std::size_t j = 0; j < s; ++j)
        if (!in_t[j]) complement.push_back(j);
      std::size_t dim = m.rows() - ts::rank_by_minors(m.select_columns(complement));
      if (dim >= d) best = size;
    });
  }
  return best;
}

// Exhaustive 2-partition search: split the columns into two blocks of size
// rows and test both determinants.
bool two_partitionable_exhaustive(const QMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;
  bool found = false;
  ts::for_each_subset_of_size(2 * n, n, [&](const std::vector<std::size_t>& left) {
    if (found || left[0] != 0) return;  // fix column 0 in the left block
    std::vector<bool> in_left(2 * n, false);
    for (std::size_t j : left) in_left[j] = true;
    std::vector<std::size_t> right;
    for (std::size_t j = 0; j < 2 * n; ++j)
      if (!in_left[j]) right.push_back(j);
    if (ts::minor_determinant(m, all_rows, left) != 0 &&
        ts::minor_determinant(m, all_rows, right) != 0)
      found = true;
  });
  return found;
}

}  // namespace

TEST_CASE("mu basics") {
  CHECK(mu(QMatrix::identity(3), 2) == 2);
  CHECK(mu(kFermat, 1) == 1);
  CHECK(mu(QMatrix{{1, 0, 1, 0}, {0, 1, 0, 1}}, 1) == 2);
  CHECK(mu(kFermat, 0) == 0);
  CHECK(mu(QMatrix{{1, 0, 0}}, 0) == 2);  // zero columns
}

TEST_CASE("mu pairwise non-proportionality oracle for fermat") {
  // mu(1) = 1 iff no zero column and no two proportional columns.
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b)
      CHECK(ts::rank_by_minors(kFermat.select_columns({a, b})) == 2);
}

TEST_CASE("mu enumeration cap") {
  QMatrix wide(1, 30);
  CHECK_THROWS_AS(mu(wide, 1), Error);
  MatroidConfig cfg;
  cfg.max_cols = 32;
  CHECK(mu(wide, 1, cfg) == 30);
}

TEST_CASE("q profile examples") {
  SUBCASE("identity") {
    QProfile q = q_profile(QMatrix::identity(4));
    for (std::size_t d = 0; d <= 4; ++d) CHECK(q.values[d] == d);
  }
  SUBCASE("fermat") {
    QProfile q = q_profile(kFermat);
    CHECK(q.values == std::vector<std::size_t>{0, 3, 4});
  }
  SUBCASE("single row") {
    QProfile q = q_profile(QMatrix{{1, 1, 1, 1, -4}});
    CHECK(q.values == std::vector<std::size_t>{0, 5});
  }
  SUBCASE("requires full row rank") {
    CHECK_THROWS_AS(q_profile(QMatrix{{1, 2}, {2, 4}}), Error);
  }
}

TEST_CASE("fermat q(1) via row-space parameterization") {
  // Vectors a*(1,-2,1,0) + b*(1,-1,0,1) with small a,b: the support never
  // drops below 3, and 3 is attained (a=1, b=-1).
  std::size_t smallest = 4;
  for (long a = -6; a <= 6; ++a)
    for (long b = -6; b <= 6; ++b) {
      if (a == 0 && b == 0) continue;
      std::vector<long> v{a + b, -2 * a - b, a, b};
      std::size_t supp = 0;
      for (long e : v)
        if (e != 0) ++supp;
      smallest = std::min(smallest, supp);
    }
  CHECK(smallest == 3);
  CHECK(q_profile(kFermat).values[1] == 3);
}

TEST_CASE("q complement-rank formula equals definitional oracle") {
  ts::Rng rng(117);
  std::uniform_int_distribution<std::size_t> rows_dist(1, 3);
  std::uniform_int_distribution<std::size_t> cols_dist(1, 6);
  int tested = 0;
  while (tested < 120) {
    std::size_t r = rows_dist(rng), c = cols_dist(rng);
    if (c < r) continue;
    QMatrix m = ts::random_full_row_rank_matrix(rng, r, c, -2, 2);
    QProfile q = q_profile(m);
    for (std::size_t d = 1; d <= r; ++d) CHECK(q.values[d] == q_oracle(m, d));
    ++tested;
  }
}

TEST_CASE("q profile monotonicity and endpoint") {
  ts::Rng rng(2218);
  for (int iter = 0; iter < 60; ++iter) {
    QMatrix m = ts::random_full_row_rank_matrix(rng, 2, 5, -2, 2);
    MuProfile mp = mu_profile(m);
    QProfile qp = q_profile(m);
    for (std::size_t d = 1; d < mp.values.size(); ++d) CHECK(mp.values[d - 1] <= mp.values[d]);
    for (std::size_t d = 2; d < qp.values.size(); ++d) CHECK(qp.values[d - 1] < qp.values[d]);
    CHECK(mp.values.back() == m.cols());
    if (mu(m, 0) == 0) CHECK(qp.values.back() == m.cols());
  }
}

TEST_CASE("condition I") {
  SUBCASE("single equation in five variables holds at k=2") {
    ConditionIReport rep = check_condition_I(QMatrix{{1, 1, 1, 1, -4}}, 2);
    CHECK(rep.holds);
    CHECK(rep.failures.empty());
  }
  SUBCASE("fermat fails at k=2 with d=1") {
    ConditionIReport rep = check_condition_I(kFermat, 2);
    CHECK_FALSE(rep.holds);
    REQUIRE(rep.failures.size() == 2);
    CHECK(rep.failures[0].d == 1);
    CHECK(rep.failures[0].q_d == 3);
    CHECK(rep.failures[0].threshold == 5);
  }
  SUBCASE("2x9 reformulation: holds iff q(1) >= 5 and q(2) = 9") {
    ts::Rng rng(42);
    for (int iter = 0; iter < 40; ++iter) {
      QMatrix m = ts::random_full_row_rank_matrix(rng, 2, 9, -2, 2);
      ConditionIReport rep = check_condition_I(m, 2);
      QProfile q = q_profile(m);
      bool expected = q.values[1] >= 5 && q.values[2] == 9;
      CHECK(rep.holds == expected);
    }
  }
}

TEST_CASE("k-partitionability") {
  SUBCASE("two identity blocks") {
    auto cert = is_k_partitionable(QMatrix{{1, 0, 1, 0}, {0, 1, 0, 1}}, 2);
    REQUIRE(cert.has_value());
    CHECK(cert->blocks == std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}});
  }
  SUBCASE("zero row is singular") {
    CHECK_FALSE(is_k_partitionable(QMatrix{{1, 1}, {0, 0}}, 1).has_value());
    CHECK_FALSE(is_k_partitionable(QMatrix{{1, 1, 1, 1}, {0, 0, 0, 0}}, 2).has_value());
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(is_k_partitionable(kFermat, 3), Error);
  }
  SUBCASE("random 3x6 matrices agree with exhaustive partition search") {
    ts::Rng rng(9090);
    for (int iter = 0; iter < 40; ++iter) {
      QMatrix m = ts::random_int_matrix(rng, 3, 6, -3, 3);
      auto cert = is_k_partitionable(m, 2);
      CHECK(cert.has_value() == two_partitionable_exhaustive(m));
      if (cert) {
        std::vector<std::size_t> rows{0, 1, 2};
        for (const auto& b : cert->blocks) CHECK(ts::minor_determinant(m, rows, b) != 0);
      }
    }
  }
}

TEST_CASE("aigner equivalence, exhaustive 2x4 over {-1,0,1}") {
  int disagreements = 0;
  ts::for_each_matrix(2, 4, {-1, 0, 1}, [&](const QMatrix& m) {
    bool by_mu = aigner_criterion(m, 2);
    auto by_edmonds = matroid_partition(m, 2);
    auto cert = is_k_partitionable(m, 2);
    bool by_brute = two_partitionable_exhaustive(m);
    if (by_mu != by_brute || by_edmonds.has_value() != by_brute || cert.has_value() != by_brute)
      ++disagreements;
    if (cert) {
      std::vector<std::size_t> rows{0, 1};
      for (const auto& b : cert->blocks) {
        CHECK(b.size() == 2);
        CHECK(ts::minor_determinant(m, rows, b) != 0);
      }
    }
  });
  CHECK(disagreements == 0);
}

TEST_CASE("emitted certificate is lexicographically least") {
  // Columns 0 and 1 are parallel, so {0,1} is singular; least valid first
  // block is {0,2}.
  QMatrix m{{1, 2, 0, 1}, {0, 0, 1, 1}};
  auto cert = is_k_partitionable(m, 2);
  REQUIRE(cert.has_value());
  CHECK(cert->blocks == std::vector<std::vector<std::size_t>>{{0, 2}, {1, 3}});
}

TEST_CASE("quasi-partitionability") {
  SUBCASE("holds") {
    QuasiReport rep = is_quasi_partitionable(QMatrix{{1, 1, -2, 0}, {0, 1, 1, -2}}, 1);
    CHECK(rep.holds);
  }
  SUBCASE("parallel columns violate mu(1) <= 1") {
    QuasiReport rep = is_quasi_partitionable(QMatrix{{1, -1, 0, 0}, {0, 0, 1, -1}}, 1);
    CHECK_FALSE(rep.holds);
    REQUIRE(rep.violated_d.has_value());
    CHECK(*rep.violated_d == 1);
    CHECK(*rep.mu_at_violation == 2);
  }
  SUBCASE("size clause") {
    QuasiReport rep = is_quasi_partitionable(QMatrix{{1, 0, 1}, {0, 1, 1}}, 2);
    CHECK_FALSE(rep.holds);
    CHECK_FALSE(rep.size_ok);
  }
}

TEST_CASE("quasi implies full rank and all n x nq submatrices partitionable") {
  ts::Rng rng(515);
  int positives = 0;
  while (positives < 8) {
    QMatrix m = ts::random_int_matrix(rng, 2, 5, -2, 2);
    QuasiReport rep = is_quasi_partitionable(m, 2);
    if (!rep.holds) continue;
    ++positives;
    CHECK(rank(m) == m.rows());
    ts::for_each_subset_of_size(m.cols(), 4, [&](const std::vector<std::size_t>& cols) {
      CHECK(is_k_partitionable(m.select_columns(cols), 2).has_value());
    });
  }
}

TEST_CASE("mu is deterministic under thread count") {
  ts::Rng rng(77);
  for (int iter = 0; iter < 10; ++iter) {
    QMatrix m = ts::random_int_matrix(rng, 3, 7, -2, 2);
    std::size_t with_threads = mu(m, 2);
    omp_set_num_threads(1);
    std::size_t serial = mu(m, 2);
    omp_set_num_threads(omp_get_num_procs());
    CHECK(with_threads == serial);
  }
}
