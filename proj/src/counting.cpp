#include "dioph/counting.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "dioph/errors.hpp"
#include "dioph/linalg.hpp"

namespace dioph {

namespace {

struct I64VecHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t x : v) {
      h ^= static_cast<std::uint64_t>(x);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct StringKey {
  static std::string make(const std::vector<Int>& v) {
    std::string s;
    for (const Int& x : v) {
      s += x.get_str(62);
      s += '|';
    }
    return s;
  }
};

Int int_from_u128(unsigned __int128 v) {
  Int hi(static_cast<std::uint64_t>(v >> 64));
  Int lo(static_cast<std::uint64_t>(v));
  return (hi << 64) + lo;
}

// Contribution of one variable value: the column scaled by the value, as a
// length-n vector. Two key representations share the same enumeration logic.
template <typename Scalar>
struct Enumerator {
  // contrib[var][value_index] is a length-n vector.
  std::vector<std::vector<std::vector<Scalar>>> contrib;
  std::size_t n = 0;

  template <typename Leaf>
  void walk(std::size_t from, std::size_t to, std::vector<Scalar>& acc, const Leaf& leaf) const {
    if (from == to) {
      leaf(acc);
      return;
    }
    for (const auto& delta : contrib[from]) {
      for (std::size_t i = 0; i < n; ++i) acc[i] += delta[i];
      walk(from + 1, to, acc, leaf);
      for (std::size_t i = 0; i < n; ++i) acc[i] -= delta[i];
    }
  }
};

std::size_t balanced_split(const std::vector<std::vector<Int>>& values,
                           std::size_t max_table_entries) {
  const std::size_t s = values.size();
  // Product of domain sizes left of each split, saturating.
  auto product_up_to = [&](std::size_t from, std::size_t to) {
    double p = 1;
    for (std::size_t j = from; j < to; ++j) p *= static_cast<double>(values[j].size());
    return p;
  };
  std::size_t best = 1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t split = 1; split <= s; ++split) {
    double left = product_up_to(0, split);
    double right = product_up_to(split, s);
    double cost = std::max(left, right);
    if (left <= static_cast<double>(max_table_entries) && cost < best_cost) {
      best_cost = cost;
      best = split;
    }
  }
  if (!std::isfinite(best_cost))
    throw_budget("meet-in-the-middle table would exceed the configured budget");
  return best;
}

Int count_zero_sums_i64(const std::vector<std::vector<Int>>& columns,
                        const std::vector<std::vector<Int>>& values, std::size_t n,
                        std::size_t split) {
  const std::size_t s = values.size();
  Enumerator<std::int64_t> en;
  en.n = n;
  en.contrib.resize(s);
  for (std::size_t j = 0; j < s; ++j) {
    en.contrib[j].reserve(values[j].size());
    for (const Int& v : values[j]) {
      std::vector<std::int64_t> delta(n);
      for (std::size_t i = 0; i < n; ++i) delta[i] = mpz_get_si(Int(columns[j][i] * v).get_mpz_t());
      en.contrib[j].push_back(std::move(delta));
    }
  }

  std::unordered_map<std::vector<std::int64_t>, std::uint64_t, I64VecHash> table;
  {
    std::vector<std::int64_t> acc(n, 0);
    en.walk(0, split, acc, [&](const std::vector<std::int64_t>& key) { ++table[key]; });
  }

  Int total = 0;
  if (split == s) {
    std::vector<std::int64_t> zero(n, 0);
    auto it = table.find(zero);
    return it == table.end() ? Int(0) : Int(static_cast<unsigned long>(it->second));
  }

  const auto& first_right = en.contrib[split];
#pragma omp parallel
  {
    Int local = 0;
    std::vector<std::int64_t> acc(n, 0);
#pragma omp for schedule(dynamic) nowait
    for (std::size_t idx = 0; idx < first_right.size(); ++idx) {
      for (std::size_t i = 0; i < n; ++i) acc[i] = first_right[idx][i];
      en.walk(split + 1, s, acc, [&](const std::vector<std::int64_t>& key) {
        std::vector<std::int64_t> neg(n);
        for (std::size_t i = 0; i < n; ++i) neg[i] = -key[i];
        auto it = table.find(neg);
        if (it != table.end()) local += static_cast<unsigned long>(it->second);
      });
      for (std::size_t i = 0; i < n; ++i) acc[i] = 0;
    }
#pragma omp critical
    total += local;
  }
  return total;
}

Int count_zero_sums_big(const std::vector<std::vector<Int>>& columns,
                        const std::vector<std::vector<Int>>& values, std::size_t n,
                        std::size_t split) {
  const std::size_t s = values.size();
  Enumerator<Int> en;
  en.n = n;
  en.contrib.resize(s);
  for (std::size_t j = 0; j < s; ++j) {
    en.contrib[j].reserve(values[j].size());
    for (const Int& v : values[j]) {
      std::vector<Int> delta(n);
      for (std::size_t i = 0; i < n; ++i) delta[i] = columns[j][i] * v;
      en.contrib[j].push_back(std::move(delta));
    }
  }

  std::unordered_map<std::string, std::uint64_t> table;
  {
    std::vector<Int> acc(n, Int(0));
    en.walk(0, split, acc, [&](const std::vector<Int>& key) { ++table[StringKey::make(key)]; });
  }

  if (split == s) {
    auto it = table.find(StringKey::make(std::vector<Int>(n, Int(0))));
    return it == table.end() ? Int(0) : Int(static_cast<unsigned long>(it->second));
  }

  Int total = 0;
  const auto& first_right = en.contrib[split];
#pragma omp parallel
  {
    Int local = 0;
    std::vector<Int> acc(n, Int(0));
    std::vector<Int> neg(n, Int(0));
#pragma omp for schedule(dynamic) nowait
    for (std::size_t idx = 0; idx < first_right.size(); ++idx) {
      for (std::size_t i = 0; i < n; ++i) acc[i] = first_right[idx][i];
      en.walk(split + 1, s, acc, [&](const std::vector<Int>& key) {
        for (std::size_t i = 0; i < n; ++i) neg[i] = -key[i];
        auto it = table.find(StringKey::make(neg));
        if (it != table.end()) local += static_cast<unsigned long>(it->second);
      });
      for (std::size_t i = 0; i < n; ++i) acc[i] = 0;
    }
#pragma omp critical
    total += local;
  }
  return total;
}

}  // namespace

DiagonalSystem make_system(QMatrix m, unsigned degree) {
  if (degree == 0) throw_invalid("degree must be at least 1");
  if (!m.is_integral()) throw_invalid("diagonal systems require integer coefficients");
  return DiagonalSystem{std::move(m), degree};
}

Int count_zero_sums(const std::vector<std::vector<Int>>& columns,
                    const std::vector<std::vector<Int>>& values, const CountConfig& cfg) {
  const std::size_t s = values.size();
  if (columns.size() != s) throw_invalid("columns/values arity mismatch");
  if (s == 0) return 1;
  const std::size_t n = columns[0].size();
  for (const auto& c : columns)
    if (c.size() != n) throw_invalid("ragged column list");
  for (const auto& v : values)
    if (v.empty()) return 0;

  std::size_t split = balanced_split(values, cfg.max_table_entries);

  // The 64-bit fast path applies when every partial sum provably fits.
  bool fits = true;
  for (std::size_t i = 0; i < n && fits; ++i) {
    Int bound = 0;
    for (std::size_t j = 0; j < s; ++j) {
      Int vmax = 0;
      for (const Int& v : values[j]) vmax = std::max(vmax, abs_int(v));
      bound += abs_int(columns[j][i]) * vmax;
    }
    if (bound >= Int(std::int64_t{1} << 62)) fits = false;
  }
  return fits ? count_zero_sums_i64(columns, values, n, split)
              : count_zero_sums_big(columns, values, n, split);
}

namespace {

std::vector<Domain> resolve_domains(std::size_t s, long n_bound,
                                    const std::optional<std::vector<Domain>>& domains) {
  if (n_bound < 0) throw_invalid("domain bound must be nonnegative");
  std::vector<Domain> out;
  if (domains) {
    if (domains->size() != s) throw_invalid("one domain per variable required");
    out = *domains;
    for (auto& d : out) {
      std::sort(d.begin(), d.end());
      d.erase(std::unique(d.begin(), d.end()), d.end());
      for (long v : d)
        if (v < 1 || v > n_bound) throw_invalid("domain values must lie in [1, N]");
    }
  } else {
    out.assign(s, Domain());
    Domain full(static_cast<std::size_t>(std::max<long>(n_bound, 0)));
    for (long v = 1; v <= n_bound; ++v) full[static_cast<std::size_t>(v - 1)] = v;
    for (auto& d : out) d = full;
  }
  return out;
}

// Set partitions enumerated as restricted growth strings: rgs[0] = 0 and
// rgs[i] <= max(rgs[0..i-1]) + 1. fn receives the block index of every
// variable plus the number of blocks.
template <typename Fn>
void for_each_set_partition(std::size_t s, Fn fn) {
  if (s == 0) {
    fn(std::vector<std::size_t>{}, std::size_t{0});
    return;
  }
  std::vector<std::size_t> rgs(s, 0);
  for (;;) {
    std::size_t blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    fn(rgs, blocks);
    bool advanced = false;
    for (std::size_t i = s; i-- > 1;) {
      std::size_t prefix_max = 0;
      for (std::size_t j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs[j]);
      if (rgs[i] <= prefix_max) {
        ++rgs[i];
        std::fill(rgs.begin() + static_cast<std::ptrdiff_t>(i) + 1, rgs.end(), 0);
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
}

Int factorial(std::size_t n) {
  Int f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<unsigned long>(i);
  return f;
}

// Total solution count of the system collapsed along a variable partition:
// variables in one block share a value ranging over the intersection of
// their domains, and contribute the sum of their columns.
Int collapsed_total(const DiagonalSystem& sys, const std::vector<Domain>& domains,
                    const std::vector<std::size_t>& rgs, std::size_t blocks,
                    const CountConfig& cfg) {
  const std::size_t n = sys.matrix.rows();
  std::vector<std::vector<Int>> columns(blocks, std::vector<Int>(n, Int(0)));
  std::vector<Domain> merged(blocks);
  std::vector<bool> started(blocks, false);
  for (std::size_t j = 0; j < rgs.size(); ++j) {
    std::size_t b = rgs[j];
    for (std::size_t i = 0; i < n; ++i) columns[b][i] += rat_num(sys.matrix.at(i, j));
    if (!started[b]) {
      merged[b] = domains[j];
      started[b] = true;
    } else {
      Domain inter;
      std::set_intersection(merged[b].begin(), merged[b].end(), domains[j].begin(),
                            domains[j].end(), std::back_inserter(inter));
      merged[b] = std::move(inter);
    }
  }
  std::vector<std::vector<Int>> values(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    values[b].reserve(merged[b].size());
    for (long x : merged[b]) values[b].push_back(pow_int(Int(x), sys.degree));
  }
  return count_zero_sums(columns, values, cfg);
}

}  // namespace

SolutionCount count_solutions(const DiagonalSystem& sys, long n_bound,
                              const std::optional<std::vector<Domain>>& domains,
                              const CountConfig& cfg) {
  const std::size_t s = sys.matrix.cols();
  std::vector<Domain> dom = resolve_domains(s, n_bound, domains);
  SolutionCount out;
  out.bound = n_bound;
  if (s == 0) {
    out.total = 1;
    out.nontrivial = 1;
    return out;
  }
  if (s > cfg.max_distinctness_vars)
    throw_budget("distinctness analysis over " + std::to_string(s) +
                 " variables exceeds the cap of " + std::to_string(cfg.max_distinctness_vars));

  // Moebius inversion over the partition lattice: the count of solutions
  // with pairwise distinct coordinates is the sum over all set partitions Q
  // of prod_blocks (-1)^(|b|-1) (|b|-1)! times the collapsed total of Q.
  Int nontrivial = 0;
  Int total = 0;
  for_each_set_partition(s, [&](const std::vector<std::size_t>& rgs, std::size_t blocks) {
    Int t = collapsed_total(sys, dom, rgs, blocks, cfg);
    if (blocks == s) total = t;
    std::vector<std::size_t> sizes(blocks, 0);
    for (std::size_t b : rgs) ++sizes[b];
    Int coeff = 1;
    for (std::size_t b = 0; b < blocks; ++b) {
      coeff *= factorial(sizes[b] - 1);
      if ((sizes[b] - 1) % 2 == 1) coeff = -coeff;
    }
    nontrivial += coeff * t;
  });
  out.total = total;
  out.nontrivial = nontrivial;
  out.trivial = total - nontrivial;
  return out;
}

SolutionCount count_solutions_reference(const DiagonalSystem& sys, long n_bound,
                                        const std::optional<std::vector<Domain>>& domains) {
  const std::size_t s = sys.matrix.cols();
  const std::size_t n = sys.matrix.rows();
  std::vector<Domain> dom = resolve_domains(s, n_bound, domains);
  SolutionCount out;
  out.bound = n_bound;
  if (s == 0) {
    out.total = 1;
    out.nontrivial = 1;
    return out;
  }

  std::vector<std::vector<Int>> powers(s);
  for (std::size_t j = 0; j < s; ++j)
    for (long x : dom[j]) powers[j].push_back(pow_int(Int(x), sys.degree));

  std::vector<long> tuple(s, 0);
  std::vector<Int> acc(n, Int(0));
  auto rec = [&](auto&& self, std::size_t j) -> void {
    if (j == s) {
      for (const Int& e : acc)
        if (e != 0) return;
      out.total += 1;
      bool distinct = true;
      for (std::size_t a = 0; a < s && distinct; ++a)
        for (std::size_t b = a + 1; b < s; ++b)
          if (tuple[a] == tuple[b]) {
            distinct = false;
            break;
          }
      if (distinct) out.nontrivial += 1;
      return;
    }
    for (std::size_t idx = 0; idx < dom[j].size(); ++idx) {
      tuple[j] = dom[j][idx];
      for (std::size_t i = 0; i < n; ++i) acc[i] += rat_num(sys.matrix.at(i, j)) * powers[j][idx];
      self(self, j + 1);
      for (std::size_t i = 0; i < n; ++i) acc[i] -= rat_num(sys.matrix.at(i, j)) * powers[j][idx];
    }
  };
  rec(rec, 0);
  out.trivial = out.total - out.nontrivial;
  return out;
}

Int count_trivial_pair(const DiagonalSystem& sys, long n_bound, std::size_t u, std::size_t v,
                       const std::optional<std::vector<Domain>>& domains,
                       const CountConfig& cfg) {
  const std::size_t s = sys.matrix.cols();
  if (u >= v || v >= s) throw_invalid("indices must satisfy u < v < cols");
  std::vector<Domain> dom = resolve_domains(s, n_bound, domains);
  // Partition with one merged block {u, v} and singletons elsewhere.
  std::vector<std::size_t> rgs(s);
  std::size_t next = 0;
  for (std::size_t j = 0; j < s; ++j) {
    if (j == v)
      rgs[j] = rgs[u];
    else
      rgs[j] = next++;
  }
  return collapsed_total(sys, dom, rgs, next, cfg);
}

MomentRecord mean_value(unsigned k, unsigned t, long n, const CountConfig& cfg) {
  if (k == 0 || t == 0 || n < 1) throw_invalid("mean value requires k, t, N >= 1");
  Int top = Int(t) * pow_int(Int(n), k);
  if (top + 1 > Int(static_cast<unsigned long>(cfg.max_array_entries)))
    throw_budget("convolution array of " + top.get_str() + " entries exceeds the budget");
  const std::size_t len = static_cast<std::size_t>(top.get_ui()) + 1;

  std::vector<std::uint64_t> powers(static_cast<std::size_t>(n));
  for (long x = 1; x <= n; ++x) {
    Int p = pow_int(Int(x), k);
    powers[static_cast<std::size_t>(x - 1)] = p.get_ui();
  }

  std::vector<std::uint64_t> cur(len, 0), next(len, 0);
  for (std::uint64_t p : powers) cur[p] = 1;

  bool overflow = false;
  for (unsigned step = 1; step < t; ++step) {
    std::fill(next.begin(), next.end(), 0);
#pragma omp parallel for schedule(static) reduction(|| : overflow)
    for (std::size_t m = 0; m < len; ++m) {
      std::uint64_t sum = 0;
      for (std::uint64_t p : powers) {
        if (p > m) break;
        std::uint64_t add = cur[m - p];
        if (__builtin_add_overflow(sum, add, &sum)) overflow = true;
      }
      next[m] = sum;
    }
    if (overflow) throw_budget("representation counts exceed the 64-bit range");
    std::swap(cur, next);
  }

  std::uint64_t max_count = 0;
  for (std::uint64_t c : cur) max_count = std::max(max_count, c);

  MomentRecord rec{k, t, n, Int(0)};
  if (max_count < (std::uint64_t{1} << 32)) {
    // Squares fit in 128 bits with ample headroom for the sum.
    Int total = 0;
#pragma omp parallel
    {
      unsigned __int128 local = 0;
#pragma omp for schedule(static) nowait
      for (std::size_t m = 0; m < len; ++m)
        local += static_cast<unsigned __int128>(cur[m]) * cur[m];
#pragma omp critical
      total += int_from_u128(local);
    }
    rec.value = total;
  } else {
    Int total = 0;
    for (std::size_t m = 0; m < len; ++m) {
      Int c(static_cast<unsigned long>(cur[m]));
      total += c * c;
    }
    rec.value = total;
  }
  return rec;
}

Int mean_value_reference(unsigned k, unsigned t, long n, const CountConfig& cfg) {
  if (k == 0 || t == 0 || n < 1) throw_invalid("mean value requires k, t, N >= 1");
  if (Int(t) * pow_int(Int(n), k) >= Int(std::int64_t{1} << 62))
    throw_budget("power sums exceed the 64-bit range");
  std::unordered_map<std::uint64_t, std::uint64_t> sums;
  std::vector<std::uint64_t> powers(static_cast<std::size_t>(n));
  for (long x = 1; x <= n; ++x) powers[static_cast<std::size_t>(x - 1)] = pow_int(Int(x), k).get_ui();

  double leaves = std::pow(static_cast<double>(n), static_cast<double>(t));
  if (leaves > static_cast<double>(cfg.max_array_entries))
    throw_budget("direct pairing enumeration exceeds the budget");

  std::vector<std::size_t> idx(t, 0);
  for (;;) {
    std::uint64_t sum = 0;
    for (unsigned j = 0; j < t; ++j) sum += powers[idx[j]];
    ++sums[sum];
    unsigned j = 0;
    while (j < t && ++idx[j] == static_cast<std::size_t>(n)) idx[j++] = 0;
    if (j == t) break;
  }
  Int total = 0;
  for (const auto& [sum, cnt] : sums) {
    Int c(static_cast<unsigned long>(cnt));
    total += c * c;
  }
  return total;
}

std::pair<Int, Int> even_moment_check(unsigned k, unsigned t, long n, const CountConfig& cfg) {
  return {mean_value(k, t, n, cfg).value, mean_value_reference(k, t, n, cfg)};
}

ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 3) throw_invalid("exponent fit requires at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> logs;
  logs.reserve(series.size());
  for (const auto& [x, y] : series) {
    if (x <= 0 || y <= 0) throw_invalid("exponent fit requires positive data");
    logs.emplace_back(std::log(x), std::log(y));
  }
  for (const auto& [lx, ly] : logs) {
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(logs.size());
  double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) throw_invalid("degenerate series: log-abscissae coincide");
  ExponentFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  for (const auto& [lx, ly] : logs)
    fit.max_residual = std::max(fit.max_residual, std::abs(ly - (fit.slope * lx + fit.intercept)));
  return fit;
}

ExponentFit exponent_fit(const std::vector<std::pair<long, Int>>& series) {
  std::vector<std::pair<double, double>> d;
  d.reserve(series.size());
  for (const auto& [x, y] : series) d.emplace_back(static_cast<double>(x), y.get_d());
  return exponent_fit(d);
}

AnalyticConstants analytic_constants(unsigned k, unsigned n) {
  if (k < 2 || n < 1) throw_invalid("analytic constants require k >= 2, n >= 1");
  AnalyticConstants c;
  unsigned long kk = static_cast<unsigned long>(k) * k;
  c.p = Rat(kk) + make_rat(Int(1), Int(2 * n));
  c.eta = make_rat(Int(1), Int(2 * kk * n + 2));
  c.delta_triv = make_rat(Int(2ul * k * n), Int(kk * n + 1));
  c.t_k = static_cast<unsigned>(kk / 2);
  return c;
}

}  // namespace dioph
