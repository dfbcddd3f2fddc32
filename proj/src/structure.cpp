#include "dioph/structure.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_set>

#include "dioph/errors.hpp"
#include "dioph/linalg.hpp"

namespace dioph {

namespace {

std::vector<Rat> column_subset_sum(const QMatrix& m, const std::vector<std::size_t>& cols) {
  std::vector<Rat> s(m.rows(), Rat(0));
  for (std::size_t j : cols)
    for (std::size_t i = 0; i < m.rows(); ++i) s[i] += m.at(i, j);
  return s;
}

bool is_zero_vector(const std::vector<Rat>& v) {
  for (const Rat& e : v)
    if (e != 0) return false;
  return true;
}

struct PartitionSearch {
  const QMatrix& m;
  // When set, the first block may not contain zero columns (the normal form
  // needs its leading block free of them).
  bool zero_free_first = false;
  std::vector<std::vector<std::size_t>> blocks;
  std::unordered_set<std::uint32_t> dead;  // used-column masks with no completion

  explicit PartitionSearch(const QMatrix& mat) : m(mat) {}

  bool valid_block(std::uint32_t used_mask, const std::vector<std::size_t>& cand) const {
    if (used_mask == 0 && zero_free_first) {
      for (std::size_t j : cand) {
        bool zero = true;
        for (std::size_t i = 0; i < m.rows() && zero; ++i)
          if (m.at(i, j) != 0) zero = false;
        if (zero) return false;
      }
    }
    std::vector<Rat> sum = column_subset_sum(m, cand);
    if (used_mask == 0) return is_zero_vector(sum);
    std::vector<std::size_t> used;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (used_mask & (1u << j)) used.push_back(j);
    return in_column_span(m, used, sum);
  }

  // Candidate blocks are enumerated in lexicographic order of their sorted
  // index vectors, so the first complete partition found is canonical.
  bool search(std::uint32_t used_mask) {
    if (used_mask + 1 == (1u << m.cols())) return true;
    if (dead.contains(used_mask)) return false;
    std::vector<std::size_t> remaining;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!(used_mask & (1u << j))) remaining.push_back(j);

    std::vector<std::size_t> cand;
    auto gen = [&](auto&& self, std::size_t from) -> bool {
      for (std::size_t i = from; i < remaining.size(); ++i) {
        cand.push_back(remaining[i]);
        if (valid_block(used_mask, cand)) {
          blocks.push_back(cand);
          std::uint32_t next = used_mask;
          for (std::size_t j : cand) next |= (1u << j);
          if (search(next)) return true;
          blocks.pop_back();
        }
        if (self(self, i + 1)) return true;
        cand.pop_back();
      }
      return false;
    };
    if (gen(gen, 0)) return true;
    dead.insert(used_mask);
    return false;
  }
};

}  // namespace

std::optional<ColumnsCertificate> check_columns_condition(const QMatrix& m,
                                                          const StructureConfig& cfg) {
  if (m.cols() == 0) throw_invalid("columns condition requires at least one column");
  if (m.cols() > cfg.max_cols)
    throw_budget("columns-condition search over " + std::to_string(m.cols()) +
                 " columns exceeds the cap of " + std::to_string(cfg.max_cols));

  PartitionSearch search(m);
  if (!search.search(0)) return std::nullopt;

  ColumnsCertificate cert;
  cert.blocks = search.blocks;
  std::vector<std::size_t> earlier;
  for (std::size_t t = 0; t < cert.blocks.size(); ++t) {
    if (t > 0) {
      auto coeff = solve_in_column_span(m, earlier, column_subset_sum(m, cert.blocks[t]));
      check_internal(coeff.has_value(), "block sum left the span of earlier columns");
      std::vector<std::pair<std::size_t, Rat>> witness;
      for (std::size_t i = 0; i < earlier.size(); ++i)
        if ((*coeff)[i] != 0) witness.emplace_back(earlier[i], (*coeff)[i]);
      cert.witnesses.push_back(std::move(witness));
    }
    earlier.insert(earlier.end(), cert.blocks[t].begin(), cert.blocks[t].end());
  }
  check_internal(validate_columns_certificate(m, cert), "emitted certificate failed validation");
  return cert;
}

bool validate_columns_certificate(const QMatrix& m, const ColumnsCertificate& cert) {
  std::vector<bool> seen(m.cols(), false);
  std::size_t covered = 0;
  for (const auto& block : cert.blocks) {
    if (block.empty()) return false;
    for (std::size_t j : block) {
      if (j >= m.cols() || seen[j]) return false;
      seen[j] = true;
      ++covered;
    }
  }
  if (covered != m.cols() || cert.blocks.empty()) return false;
  if (cert.witnesses.size() + 1 != cert.blocks.size()) return false;

  if (!is_zero_vector(column_subset_sum(m, cert.blocks[0]))) return false;

  std::vector<bool> earlier(m.cols(), false);
  for (std::size_t j : cert.blocks[0]) earlier[j] = true;
  for (std::size_t t = 1; t < cert.blocks.size(); ++t) {
    std::vector<Rat> sum = column_subset_sum(m, cert.blocks[t]);
    std::vector<Rat> combo(m.rows(), Rat(0));
    for (const auto& [col, coeff] : cert.witnesses[t - 1]) {
      if (col >= m.cols() || !earlier[col]) return false;
      for (std::size_t i = 0; i < m.rows(); ++i) combo[i] += coeff * m.at(i, col);
    }
    if (sum != combo) return false;
    for (std::size_t j : cert.blocks[t]) earlier[j] = true;
  }
  return true;
}

std::optional<std::vector<Rat>> falsify_property_iii(const QMatrix& m, std::size_t samples,
                                                     std::uint64_t seed,
                                                     const StructureConfig& cfg) {
  if (m.cols() > cfg.max_cols)
    throw_budget("zero-sum subcollection check over " + std::to_string(m.cols()) +
                 " columns exceeds the cap of " + std::to_string(cfg.max_cols));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> coeff(-9, 9);

  for (std::size_t iter = 0; iter < samples; ++iter) {
    std::vector<Rat> v(m.cols(), Rat(0));
    for (std::size_t i = 0; i < m.rows(); ++i) {
      long y = coeff(rng);
      if (y == 0) continue;
      for (std::size_t j = 0; j < m.cols(); ++j) v[j] += Rat(y) * m.at(i, j);
    }
    if (is_zero_vector(v)) continue;

    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (v[j] != 0) support.push_back(j);

    bool has_zero_sum_subset = false;
    for (std::uint32_t mask = 1; mask < (1u << support.size()); ++mask) {
      Rat sum(0);
      for (std::size_t b = 0; b < support.size(); ++b)
        if (mask & (1u << b)) sum += v[support[b]];
      if (sum == 0) {
        has_zero_sum_subset = true;
        break;
      }
    }
    if (has_zero_sum_subset) continue;

    // Normalize to a primitive integer vector with positive leading entry.
    Int denom_lcm(1);
    for (const Rat& e : v) denom_lcm = lcm_int(denom_lcm, rat_den(e));
    Int content(0);
    std::vector<Int> w(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      w[j] = rat_num(v[j]) * (denom_lcm / rat_den(v[j]));
      content = gcd_int(content, w[j]);
    }
    Int lead(0);
    for (const Int& e : w)
      if (e != 0) {
        lead = e;
        break;
      }
    if (lead < 0) content = -content;
    std::vector<Rat> result(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) result[j] = Rat(Int(w[j] / content));
    return result;
  }
  return std::nullopt;
}

namespace {

// Forward elimination restricted to the columns [c0, c0+width) and rows
// [r0, rows), recording ops. Pivot rows end up at r0, r0+1, ...; rows
// without pivots are left zero on the column range. Affected rows are then
// rescaled to integrality. Returns the pivot count.
std::size_t eliminate_on_columns(QMatrix& w, std::vector<RowOp>& ops, std::size_t r0,
                                 std::size_t c0, std::size_t width) {
  std::size_t pivot_row = r0;
  for (std::size_t col = c0; col < c0 + width && pivot_row < w.rows(); ++col) {
    std::size_t sel = pivot_row;
    while (sel < w.rows() && w.at(sel, col) == 0) ++sel;
    if (sel == w.rows()) continue;
    if (sel != pivot_row) {
      ops.push_back(RowSwap{pivot_row, sel});
      apply_row_op(w, ops.back());
    }
    for (std::size_t r = pivot_row + 1; r < w.rows(); ++r) {
      if (w.at(r, col) == 0) continue;
      ops.push_back(RowAddMul{pivot_row, r, Rat(-w.at(r, col) / w.at(pivot_row, col))});
      apply_row_op(w, ops.back());
    }
    ++pivot_row;
  }
  for (std::size_t r = r0; r < w.rows(); ++r) {
    Int scale(1);
    for (std::size_t j = 0; j < w.cols(); ++j) scale = lcm_int(scale, rat_den(w.at(r, j)));
    if (scale != 1) {
      ops.push_back(RowScale{r, Rat(scale)});
      apply_row_op(w, ops.back());
    }
  }
  return pivot_row - r0;
}

// Permutes the columns [c0, cols) of w so that the listed absolute column
// indices come first (in the order given), composing into perm.
void pull_columns_front(QMatrix& w, std::vector<std::size_t>& perm, std::size_t c0,
                        const std::vector<std::size_t>& front) {
  std::vector<std::size_t> local;
  std::vector<bool> in_front(w.cols(), false);
  for (std::size_t j : front) in_front[j] = true;
  local.insert(local.end(), front.begin(), front.end());
  for (std::size_t j = c0; j < w.cols(); ++j)
    if (!in_front[j]) local.push_back(j);

  std::vector<std::size_t> new_perm(w.cols());
  QMatrix out = w;
  for (std::size_t j = 0; j < c0; ++j) new_perm[j] = perm[j];
  for (std::size_t j = c0; j < w.cols(); ++j) {
    new_perm[j] = perm[local[j - c0]];
    for (std::size_t i = 0; i < w.rows(); ++i) out.at(i, j) = w.at(i, local[j - c0]);
  }
  perm = std::move(new_perm);
  w = std::move(out);
}

}  // namespace

NormalForm to_normal_form(const QMatrix& m, const StructureConfig& cfg) {
  if (!has_full_row_rank(m)) throw_invalid("normal form requires full row rank");
  if (m.rows() == 0) {
    NormalForm nf;
    nf.transform = Transform::identity(0, m.cols());
    nf.s = m.cols();
    nf.A = m;
    nf.B = QMatrix(0, 0);
    nf.C = QMatrix(0, 0);
    return nf;
  }
  if (m.cols() == 0) throw_invalid("columns condition requires at least one column");
  if (m.cols() > cfg.max_cols)
    throw_budget("columns-condition search over " + std::to_string(m.cols()) +
                 " columns exceeds the cap of " + std::to_string(cfg.max_cols));

  // The leading block must carry full weight: no zero columns (those belong
  // in the trailing part) and a zero sum. Such a certificate exists exactly
  // when the columns condition holds: strip the zero columns out of any
  // certificate and append them as trailing singleton blocks.
  PartitionSearch search(m);
  search.zero_free_first = true;
  if (!search.search(0)) throw_invalid("columns condition fails; no normal form exists");

  // Leading column set I = J_1, moved to the front in increasing order.
  std::vector<std::size_t> lead = search.blocks[0];
  std::sort(lead.begin(), lead.end());

  QMatrix w = m;
  std::vector<std::size_t> perm(m.cols());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  pull_columns_front(w, perm, 0, lead);

  NormalForm nf;
  nf.transform.col_perm = perm;
  nf.s = lead.size();
  nf.n = rank(w.block(0, 0, m.rows(), nf.s));
  // Row operations are only needed to clear the rows below the leading
  // block's rank; a full-rank leading block keeps the matrix untouched.
  if (nf.n < m.rows()) {
    std::size_t pivots = eliminate_on_columns(w, nf.transform.row_ops, 0, 0, nf.s);
    check_internal(pivots == nf.n, "leading block rank changed during elimination");
  }
  nf.m = m.rows() - nf.n;
  nf.t = m.cols() - nf.s;
  nf.A = w.block(0, 0, nf.n, nf.s);
  nf.B = w.block(0, nf.s, nf.n, nf.t);
  nf.C = w.block(nf.n, nf.s, nf.m, nf.t);

  std::vector<Rat> a_colsum = nf.A.column_sum();
  check_internal(w.block(nf.n, 0, nf.m, nf.s).is_zero(), "lower-left block is not zero");
  check_internal(rank(nf.A) == nf.n, "leading block lost rank");
  check_internal(is_zero_vector(a_colsum), "leading block columns do not sum to zero");
  check_internal(apply_transform(nf.transform, m) == w, "normal form transcript does not replay");

  if (nf.m > 0 && nf.t > 0) {
    nf.c_certificate = check_columns_condition(nf.C, cfg);
    check_internal(nf.c_certificate.has_value(), "trailing block violates the columns condition");
  }
  return nf;
}

DecompositionResult decompose_quasi(const QMatrix& m, std::size_t q, const StructureConfig& cfg) {
  if (q == 0) throw_invalid("decomposition requires q >= 1");
  if (!has_full_row_rank(m)) throw_invalid("decomposition requires full row rank");
  if (mu(m, 0, cfg.matroid) != 0) throw_invalid("decomposition requires no zero columns");
  QProfile prof = q_profile(m, cfg.matroid);
  for (std::size_t d = 1; d < prof.values.size(); ++d)
    if (prof.values[d] <= d * q)
      throw_invalid("decomposition hypothesis fails at d=" + std::to_string(d) +
                    ": q(d)=" + std::to_string(prof.values[d]) +
                    " <= d*q=" + std::to_string(d * q));

  DecompositionResult res;
  res.q = q;
  QMatrix w = m;
  res.transform.col_perm.resize(m.cols());
  std::iota(res.transform.col_perm.begin(), res.transform.col_perm.end(), std::size_t{0});

  std::size_t r0 = 0, c0 = 0;
  while (r0 < m.rows()) {
    QMatrix active = w.block(r0, c0, m.rows() - r0, m.cols() - c0);
    check_internal(mu(active, 0, cfg.matroid) == 0, "active block acquired a zero column");

    if (is_quasi_partitionable(active, q, cfg.matroid).holds) {
      res.block_shapes.emplace_back(active.rows(), active.cols());
      res.diagonal.push_back(active);
      break;
    }

    // Minimal d0 with mu(d0) > d0*q; it exists below the active rank.
    std::size_t d0 = 0, s0 = 0;
    for (std::size_t d = 1; d < active.rows(); ++d) {
      std::size_t v = mu(active, d, cfg.matroid);
      if (v > d * q) {
        d0 = d;
        s0 = v;
        break;
      }
    }
    check_internal(d0 > 0, "no violating dimension in a non-quasi block");

    // Lexicographically least maximal column set spanning dimension d0.
    std::vector<std::size_t> front;
    {
      std::vector<std::vector<std::size_t>> closures;
      auto dfs = [&](auto&& self, ColumnEchelon span, std::size_t from,
                     std::size_t depth) -> void {
        if (depth == 0) {
          std::vector<std::size_t> closure;
          for (std::size_t c = 0; c < active.cols(); ++c)
            if (span.in_span(active.column(c))) closure.push_back(c);
          if (closure.size() == s0) closures.push_back(std::move(closure));
          return;
        }
        for (std::size_t c = from; c < active.cols(); ++c) {
          ColumnEchelon next = span;
          if (!next.add(active.column(c))) continue;
          self(self, next, c + 1, depth - 1);
        }
      };
      dfs(dfs, ColumnEchelon(active.rows()), 0, d0);
      check_internal(!closures.empty(), "mu maximizer not found");
      front = *std::min_element(closures.begin(), closures.end());
    }

    std::vector<std::size_t> front_abs;
    for (std::size_t c : front) front_abs.push_back(c0 + c);
    pull_columns_front(w, res.transform.col_perm, c0, front_abs);

    std::size_t got = eliminate_on_columns(w, res.transform.row_ops, r0, c0, s0);
    check_internal(got == d0, "front block rank mismatch");

    QMatrix head = w.block(r0, c0, d0, s0);
    check_internal(is_quasi_partitionable(head, q, cfg.matroid).holds,
                   "extracted block is not quasi-partitionable");
    res.block_shapes.emplace_back(d0, s0);
    res.diagonal.push_back(head);
    r0 += d0;
    c0 += s0;
  }

  res.transformed = w;
  check_internal(apply_transform(res.transform, m) == w,
                 "decomposition transcript does not replay");

  // Zero lower-left sub-blocks.
  std::size_t ro = 0, co = 0;
  for (const auto& [ni, si] : res.block_shapes) {
    check_internal(w.block(ro + ni, co, m.rows() - ro - ni, si).is_zero(),
                   "matrix is not block upper triangular");
    ro += ni;
    co += si;
  }
  check_internal(ro == m.rows() && co == m.cols(), "block shapes do not tile the matrix");
  return res;
}

bool has_nonsingular_diagonal_submatrix(const QMatrix& a) {
  // Needs, for every row i, a column supported exactly on row i.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < a.cols() && !found; ++j) {
      if (a.at(i, j) == 0) continue;
      bool clean = true;
      for (std::size_t r = 0; r < a.rows(); ++r)
        if (r != i && a.at(r, j) != 0) clean = false;
      found = clean;
    }
    if (!found) return false;
  }
  return true;
}

bool rows_have_coprime_entries(const QMatrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Int g(0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (!is_integer(a.at(i, j))) return false;
      g = gcd_int(g, rat_num(a.at(i, j)));
    }
    if (g != 1) return false;
  }
  return true;
}

bool divisibility_condition(const QMatrix& a, const QMatrix& b) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Rat& e = a.at(i, j);
      if (e == 0) continue;
      for (std::size_t bi = 0; bi < b.rows(); ++bi)
        for (std::size_t bj = 0; bj < b.cols(); ++bj) {
          if (!is_integer(b.at(bi, bj))) return false;
          if (!mpz_divisible_p(rat_num(b.at(bi, bj)).get_mpz_t(), rat_num(e).get_mpz_t()))
            return false;
        }
    }
  return true;
}

PreprocessedSystem preprocess_system(const QMatrix& a, const QMatrix& b, const QMatrix& c,
                                     unsigned k) {
  if (k == 0) throw_invalid("degree must be at least 1");
  if (!a.is_integral() || !b.is_integral() || !c.is_integral())
    throw_invalid("preprocessing requires integer matrices");
  if (!has_full_row_rank(a)) throw_invalid("preprocessing requires A of full row rank");
  if (b.rows() != a.rows()) throw_invalid("A and B must have the same number of rows");
  if (c.cols() != b.cols()) throw_invalid("B and C must have the same number of columns");
  for (const Rat& e : a.column_sum())
    if (e != 0) throw_invalid("preprocessing requires the columns of A to sum to zero");

  QMatrix ra = a, rb = b;
  if (!has_nonsingular_diagonal_submatrix(ra)) {
    // Gauss-Jordan on [A | B] pivoting on A's columns, then rescale each row
    // to integrality; the pivot columns become a positive diagonal submatrix.
    QMatrix ab(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) ab.at(i, j) = a.at(i, j);
      for (std::size_t j = 0; j < b.cols(); ++j) ab.at(i, a.cols() + j) = b.at(i, j);
    }
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < a.cols() && pivot_row < ab.rows(); ++col) {
      std::size_t sel = pivot_row;
      while (sel < ab.rows() && ab.at(sel, col) == 0) ++sel;
      if (sel == ab.rows()) continue;
      if (sel != pivot_row) apply_row_op(ab, RowSwap{pivot_row, sel});
      if (ab.at(pivot_row, col) != 1)
        apply_row_op(ab, RowScale{pivot_row, Rat(1) / ab.at(pivot_row, col)});
      for (std::size_t r = 0; r < ab.rows(); ++r)
        if (r != pivot_row && ab.at(r, col) != 0)
          apply_row_op(ab, RowAddMul{pivot_row, r, Rat(-ab.at(r, col))});
      ++pivot_row;
    }
    for (std::size_t i = 0; i < ab.rows(); ++i) {
      Int scale(1);
      for (std::size_t j = 0; j < ab.cols(); ++j) scale = lcm_int(scale, rat_den(ab.at(i, j)));
      if (scale != 1)
        for (std::size_t j = 0; j < ab.cols(); ++j) ab.at(i, j) *= Rat(scale);
    }
    ra = ab.block(0, 0, a.rows(), a.cols());
    rb = ab.block(0, a.cols(), a.rows(), b.cols());
    check_internal(has_nonsingular_diagonal_submatrix(ra),
                   "row reduction failed to produce a diagonal submatrix");
  }

  PreprocessedSystem out;
  out.k = k;
  out.K = 1;
  for (std::size_t i = 0; i < ra.rows(); ++i)
    for (std::size_t j = 0; j < ra.cols(); ++j)
      if (ra.at(i, j) != 0) out.K *= rat_num(ra.at(i, j));
  out.K = abs_int(out.K);

  Rat scale{Rat(pow_int(out.K, static_cast<unsigned long>(k) * k))};
  QMatrix sb = rb, sc = c;
  for (std::size_t i = 0; i < sb.rows(); ++i)
    for (std::size_t j = 0; j < sb.cols(); ++j) sb.at(i, j) *= scale;
  for (std::size_t i = 0; i < sc.rows(); ++i)
    for (std::size_t j = 0; j < sc.cols(); ++j) sc.at(i, j) *= scale;

  // Divide each row of [A | B] by the gcd of its A-part.
  for (std::size_t i = 0; i < ra.rows(); ++i) {
    Int g(0);
    for (std::size_t j = 0; j < ra.cols(); ++j) g = gcd_int(g, rat_num(ra.at(i, j)));
    check_internal(g > 0, "zero row in A");
    if (g == 1) continue;
    Rat inv = make_rat(Int(1), g);
    for (std::size_t j = 0; j < ra.cols(); ++j) ra.at(i, j) *= inv;
    for (std::size_t j = 0; j < sb.cols(); ++j) sb.at(i, j) *= inv;
  }

  out.A = ra;
  out.B = sb;
  out.C = sc;
  out.rescale_factor = pow_int(out.K, k);

  check_internal(out.A.is_integral() && out.B.is_integral() && out.C.is_integral(),
                 "preprocessing produced non-integer entries");
  check_internal(has_nonsingular_diagonal_submatrix(out.A), "diagonal submatrix condition failed");
  check_internal(rows_have_coprime_entries(out.A), "coprime rows condition failed");
  check_internal(divisibility_condition(out.A, out.B), "divisibility condition failed");
  return out;
}

}  // namespace dioph
