#include "dioph/matroid.hpp"

#include <algorithm>
#include <deque>

#include "dioph/errors.hpp"
#include "dioph/linalg.hpp"

namespace dioph {

namespace {

void check_cols_cap(const QMatrix& m, const MatroidConfig& cfg) {
  if (m.cols() > cfg.max_cols)
    throw_budget("subset enumeration over " + std::to_string(m.cols()) +
                 " columns exceeds the cap of " + std::to_string(cfg.max_cols));
}

std::size_t closure_size(const QMatrix& m, const ColumnEchelon& span) {
  std::size_t count = 0;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (span.in_span(m.column(c))) ++count;
  return count;
}

// Max closure size over independent column subsets of size <= depth that
// extend the given echelon using columns >= start.
std::size_t mu_search(const QMatrix& m, ColumnEchelon& span, std::size_t start,
                      std::size_t depth) {
  std::size_t best = closure_size(m, span);
  if (depth == 0) return best;
  for (std::size_t c = start; c < m.cols(); ++c) {
    ColumnEchelon next = span;
    if (!next.add(m.column(c))) continue;
    best = std::max(best, mu_search(m, next, c + 1, depth - 1));
  }
  return best;
}

bool is_independent(const QMatrix& m, const std::vector<std::size_t>& cols) {
  ColumnEchelon e(m.rows());
  for (std::size_t c : cols)
    if (!e.add(m.column(c))) return false;
  return true;
}

}  // namespace

std::size_t mu(const QMatrix& m, std::size_t d, const MatroidConfig& cfg) {
  if (d > m.rows()) throw_invalid("mu(d): d exceeds the number of rows");
  check_cols_cap(m, cfg);
  ColumnEchelon empty(m.rows());
  if (d == 0) return closure_size(m, empty);

  std::size_t best = closure_size(m, empty);
  // Branches by first chosen column; the max-reduction makes the result
  // independent of scheduling.
#pragma omp parallel for schedule(dynamic) reduction(max : best)
  for (std::size_t c = 0; c < m.cols(); ++c) {
    ColumnEchelon span(m.rows());
    if (!span.add(m.column(c))) continue;
    std::size_t local = mu_search(m, span, c + 1, d - 1);
    best = std::max(best, local);
  }
  return best;
}

MuProfile mu_profile(const QMatrix& m, const MatroidConfig& cfg) {
  MuProfile p;
  const std::size_t r = rank(m);
  p.values.reserve(r + 1);
  for (std::size_t d = 0; d <= r; ++d) p.values.push_back(mu(m, d, cfg));
  return p;
}

QProfile q_profile(const QMatrix& m, const MatroidConfig& cfg) {
  if (!has_full_row_rank(m)) throw_invalid("q profile requires full row rank");
  const std::size_t n = m.rows();
  QProfile q;
  q.values.resize(n + 1);
  q.values[0] = 0;
  for (std::size_t d = 1; d <= n; ++d) q.values[d] = m.cols() - mu(m, n - d, cfg);
  return q;
}

ConditionIReport check_condition_I(const QMatrix& m, unsigned k, const MatroidConfig& cfg) {
  ConditionIReport rep;
  rep.degree = k;
  rep.profile = q_profile(m, cfg);
  for (std::size_t d = 1; d < rep.profile.values.size(); ++d) {
    std::size_t threshold = d * std::size_t{k} * k + 1;
    if (rep.profile.values[d] < threshold)
      rep.failures.push_back({d, rep.profile.values[d], threshold});
  }
  rep.holds = rep.failures.empty();
  return rep;
}

bool aigner_criterion(const QMatrix& m, std::size_t k, const MatroidConfig& cfg) {
  if (m.cols() != k * m.rows()) throw_invalid("aigner criterion requires cols == k*rows");
  for (std::size_t d = 0; d <= m.rows(); ++d)
    if (mu(m, d, cfg) > d * k) return false;
  return true;
}

std::optional<std::vector<std::vector<std::size_t>>> matroid_partition(const QMatrix& m,
                                                                       std::size_t k) {
  const std::size_t s = m.cols();
  const std::size_t n = m.rows();
  if (s != k * n) throw_invalid("matroid partition requires cols == k*rows");

  std::vector<std::vector<std::size_t>> parts(k);
  // assigned_to[c] = copy index holding column c, or k if unassigned.
  std::vector<std::size_t> assigned_to(s, k);

  auto part_with = [&](std::size_t copy, std::size_t without, std::size_t with) {
    std::vector<std::size_t> cols;
    for (std::size_t c : parts[copy])
      if (c != without) cols.push_back(c);
    cols.push_back(with);
    return cols;
  };

  for (std::size_t e = 0; e < s; ++e) {
    // Breadth-first search for an augmenting exchange path starting at e.
    // Nodes are columns; an arc z -> x (x assigned to copy j) means z can
    // take x's place in copy j. Neighbours are scanned in increasing column
    // order, so the chosen path is deterministic.
    std::deque<std::size_t> queue{e};
    std::vector<std::size_t> parent(s, s);  // s = none
    std::vector<bool> visited(s, false);
    visited[e] = true;
    std::size_t terminal = s, terminal_copy = k;

    while (!queue.empty() && terminal == s) {
      std::size_t z = queue.front();
      queue.pop_front();
      for (std::size_t i = 0; i < k; ++i) {
        if (assigned_to[z] == i) continue;
        auto cand = parts[i];
        cand.push_back(z);
        if (is_independent(m, cand)) {
          terminal = z;
          terminal_copy = i;
          break;
        }
      }
      if (terminal != s) break;
      for (std::size_t x = 0; x < s; ++x) {
        if (visited[x] || assigned_to[x] == k || x == z) continue;
        std::size_t j = assigned_to[x];
        if (assigned_to[z] == j) continue;
        if (is_independent(m, part_with(j, x, z))) {
          visited[x] = true;
          parent[x] = z;
          queue.push_back(x);
        }
      }
    }

    if (terminal == s) return std::nullopt;

    // Walk the path back from the terminal to e, shifting assignments.
    std::size_t cur = terminal;
    std::size_t dest = terminal_copy;
    while (true) {
      std::size_t prev_copy = assigned_to[cur];
      if (prev_copy != k) std::erase(parts[prev_copy], cur);
      parts[dest].push_back(cur);
      std::sort(parts[dest].begin(), parts[dest].end());
      assigned_to[cur] = dest;
      if (cur == e) break;
      cur = parent[cur];
      dest = prev_copy;
      check_internal(cur != s, "broken augmenting path");
    }
    for (std::size_t i = 0; i < k; ++i)
      check_internal(is_independent(m, parts[i]), "augmentation broke independence");
  }

  return parts;
}

namespace {

// Lexicographically least valid certificate, built block by block. Candidate
// blocks must contain the smallest unused column; feasibility of the
// remainder is decided exactly by the Aigner criterion, so no backtracking
// across blocks is ever needed.
bool lex_least_blocks(const QMatrix& m, std::size_t k, const MatroidConfig& cfg,
                      const std::vector<std::size_t>& remaining,
                      std::vector<std::vector<std::size_t>>& out) {
  const std::size_t n = m.rows();
  if (k == 1) {
    if (!is_independent(m, remaining)) return false;
    out.push_back(remaining);
    return true;
  }

  const std::size_t r = remaining.size();
  // Combinations of n-1 further positions from {1,...,r-1}, in lex order.
  std::vector<std::size_t> idx(n - 1);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i + 1;
  for (;;) {
    std::vector<std::size_t> block{remaining[0]};
    std::vector<bool> chosen(r, false);
    chosen[0] = true;
    for (std::size_t p : idx) {
      block.push_back(remaining[p]);
      chosen[p] = true;
    }
    std::vector<std::size_t> rest;
    for (std::size_t p = 0; p < r; ++p)
      if (!chosen[p]) rest.push_back(remaining[p]);

    if (is_independent(m, block) && aigner_criterion(m.select_columns(rest), k - 1, cfg)) {
      out.push_back(block);
      check_internal(lex_least_blocks(m, k - 1, cfg, rest, out),
                     "aigner-feasible remainder failed to complete");
      return true;
    }

    if (idx.empty()) return false;
    std::size_t i = idx.size();
    while (i > 0 && idx[i - 1] == r - idx.size() + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < idx.size(); ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::optional<PartitionCertificate> is_k_partitionable(const QMatrix& m, std::size_t k,
                                                       const MatroidConfig& cfg) {
  if (k == 0 || m.cols() != k * m.rows())
    throw_invalid("k-partitionability requires cols == k*rows with k >= 1");
  check_cols_cap(m, cfg);

  bool by_mu = aigner_criterion(m, k, cfg);
  auto by_search = matroid_partition(m, k);
  check_internal(by_mu == by_search.has_value(),
                 "aigner criterion and matroid partition search disagree");
  if (!by_mu) return std::nullopt;

  if (m.rows() == 0) return PartitionCertificate{std::vector<std::vector<std::size_t>>(k)};

  std::vector<std::size_t> all(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) all[c] = c;
  PartitionCertificate cert;
  check_internal(lex_least_blocks(m, k, cfg, all, cert.blocks),
                 "certificate construction failed despite positive decision");
  for (const auto& block : cert.blocks)
    check_internal(is_independent(m, block), "emitted block is singular");
  return cert;
}

QuasiReport is_quasi_partitionable(const QMatrix& m, std::size_t q, const MatroidConfig& cfg) {
  if (m.rows() == 0 || m.cols() == 0)
    throw_invalid("quasi-partitionability requires a non-empty matrix");
  QuasiReport rep;
  rep.size_ok = m.cols() >= m.rows() * q;
  if (!rep.size_ok) {
    rep.holds = false;
    return rep;
  }
  for (std::size_t d = 0; d < m.rows(); ++d) {
    std::size_t v = mu(m, d, cfg);
    if (v > d * q) {
      rep.violated_d = d;
      rep.mu_at_violation = v;
      rep.holds = false;
      return rep;
    }
  }
  rep.holds = true;
  return rep;
}

}  // namespace dioph
