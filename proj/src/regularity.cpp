#include "dioph/regularity.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_set>

#include "dioph/errors.hpp"
#include "dioph/linalg.hpp"
#include "dioph/structure.hpp"

namespace dioph {

namespace {

long to_long(const Int& v, const char* what) {
  if (!v.fits_slong_p()) throw_budget(std::string(what) + " exceeds the machine range");
  return mpz_get_si(v.get_mpz_t());
}

std::vector<long> primes_up_to(unsigned w) {
  std::vector<long> primes;
  std::vector<bool> sieve(w + 1, true);
  for (long p = 2; p <= static_cast<long>(w); ++p) {
    if (!sieve[static_cast<std::size_t>(p)]) continue;
    primes.push_back(p);
    for (long q = p * p; q <= static_cast<long>(w); q += p) sieve[static_cast<std::size_t>(q)] = false;
  }
  return primes;
}

}  // namespace

// --- coloring ---------------------------------------------------------

std::vector<std::vector<long>> enumerate_solutions(const DiagonalSystem& sys,
                                                   const std::vector<Domain>& domains,
                                                   std::size_t max_tuples) {
  const std::size_t s = sys.matrix.cols();
  const std::size_t n = sys.matrix.rows();
  if (domains.size() != s) throw_invalid("one domain per variable required");
  double product = 1;
  for (const auto& d : domains) product *= static_cast<double>(d.size());
  if (product > static_cast<double>(max_tuples))
    throw_budget("solution enumeration space exceeds the budget");

  std::vector<std::vector<std::vector<Int>>> contrib(s);
  for (std::size_t j = 0; j < s; ++j)
    for (long x : domains[j]) {
      std::vector<Int> delta(n);
      Int p = pow_int(Int(x), sys.degree);
      for (std::size_t i = 0; i < n; ++i) delta[i] = rat_num(sys.matrix.at(i, j)) * p;
      contrib[j].push_back(std::move(delta));
    }

  std::vector<std::vector<long>> out;
  std::vector<long> tuple(s);
  std::vector<Int> acc(n, Int(0));
  auto rec = [&](auto&& self, std::size_t j) -> void {
    if (j == s) {
      for (const Int& e : acc)
        if (e != 0) return;
      out.push_back(tuple);
      return;
    }
    for (std::size_t idx = 0; idx < domains[j].size(); ++idx) {
      tuple[j] = domains[j][idx];
      for (std::size_t i = 0; i < n; ++i) acc[i] += contrib[j][idx][i];
      self(self, j + 1);
      for (std::size_t i = 0; i < n; ++i) acc[i] -= contrib[j][idx][i];
    }
  };
  rec(rec, 0);
  return out;
}

bool coloring_avoids_solutions(const Coloring& coloring,
                               const std::vector<std::vector<long>>& solutions) {
  for (const auto& sol : solutions) {
    std::set<long> values(sol.begin(), sol.end());
    if (values.size() < 2) continue;
    unsigned first = coloring.colors[static_cast<std::size_t>(*values.begin() - 1)];
    bool mono = true;
    for (long v : values)
      if (coloring.colors[static_cast<std::size_t>(v - 1)] != first) {
        mono = false;
        break;
      }
    if (mono) return false;
  }
  return true;
}

namespace {

struct ColoringSearch {
  long n;
  unsigned r;
  std::uint64_t budget;
  std::uint64_t nodes = 0;

  // Constraints are the distinct value sets of non-constant solutions.
  std::vector<std::vector<long>> constraints;
  std::vector<std::vector<std::size_t>> by_member;  // constraints touching value v

  std::vector<unsigned> color;        // 1-based values; 0 = unassigned
  std::vector<std::uint32_t> banned;  // bitmask of excluded colors per value

  // Per-constraint bookkeeping: how many members are colored, and the common
  // color so far (0 = none yet, r+1 = mixed).
  std::vector<std::size_t> colored_count;
  std::vector<unsigned> common;

  struct TrailEntry {
    std::size_t constraint;
    unsigned old_common;
    long banned_value;  // 0 when no ban was placed
    std::uint32_t old_banned_mask;
  };

  bool assign(long v, unsigned c, std::vector<TrailEntry>& trail) {
    color[static_cast<std::size_t>(v)] = c;
    for (std::size_t ci : by_member[static_cast<std::size_t>(v)]) {
      TrailEntry entry{ci, common[ci], 0, 0};
      ++colored_count[ci];
      if (common[ci] == 0)
        common[ci] = c;
      else if (common[ci] != c && common[ci] <= r)
        common[ci] = r + 1;  // mixed
      const auto& members = constraints[ci];
      if (colored_count[ci] == members.size() && common[ci] <= r) {
        trail.push_back(entry);
        return false;  // monochromatic solution completed
      }
      if (colored_count[ci] + 1 == members.size() && common[ci] <= r) {
        // One member left; it must avoid the common color.
        long missing = 0;
        for (long m : members)
          if (color[static_cast<std::size_t>(m)] == 0) missing = m;
        entry.banned_value = missing;
        entry.old_banned_mask = banned[static_cast<std::size_t>(missing)];
        banned[static_cast<std::size_t>(missing)] |= (1u << (common[ci] - 1));
        std::uint32_t all = (r >= 32) ? ~0u : ((1u << r) - 1);
        if ((banned[static_cast<std::size_t>(missing)] & all) == all) {
          trail.push_back(entry);
          return false;
        }
      }
      trail.push_back(entry);
    }
    return true;
  }

  void undo(long v, const std::vector<TrailEntry>& trail) {
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
      --colored_count[it->constraint];
      common[it->constraint] = it->old_common;
      if (it->banned_value != 0)
        banned[static_cast<std::size_t>(it->banned_value)] = it->old_banned_mask;
    }
    color[static_cast<std::size_t>(v)] = 0;
  }

  bool dfs(long v) {
    if (v > n) return true;
    for (unsigned c = 1; c <= r; ++c) {
      if (banned[static_cast<std::size_t>(v)] & (1u << (c - 1))) continue;
      if (++nodes > budget) throw_budget("coloring search exceeded the node budget");
      std::vector<TrailEntry> trail;
      if (assign(v, c, trail)) {
        if (dfs(v + 1)) return true;
      }
      undo(v, trail);
    }
    return false;
  }
};

}  // namespace

std::optional<Coloring> find_bad_coloring(const DiagonalSystem& sys, long n, unsigned r,
                                          const ColoringConfig& cfg) {
  if (r < 1 || r > 31) throw_invalid("color count must be in [1, 31]");
  if (n < 0) throw_invalid("negative bound");
  Coloring result;
  result.n = n;
  if (n == 0) return result;

  std::vector<Domain> domains(sys.matrix.cols());
  Domain full(static_cast<std::size_t>(n));
  for (long v = 1; v <= n; ++v) full[static_cast<std::size_t>(v - 1)] = v;
  for (auto& d : domains) d = full;
  auto sols = enumerate_solutions(sys, domains, cfg.max_tuples);

  std::set<std::vector<long>> distinct;
  for (const auto& sol : sols) {
    std::vector<long> values(sol.begin(), sol.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.size() >= 2) distinct.insert(std::move(values));
  }

  ColoringSearch search;
  search.n = n;
  search.r = r;
  search.budget = cfg.node_budget;
  search.constraints.assign(distinct.begin(), distinct.end());
  search.by_member.resize(static_cast<std::size_t>(n) + 1);
  for (std::size_t ci = 0; ci < search.constraints.size(); ++ci)
    for (long v : search.constraints[ci]) search.by_member[static_cast<std::size_t>(v)].push_back(ci);
  search.color.assign(static_cast<std::size_t>(n) + 1, 0);
  search.banned.assign(static_cast<std::size_t>(n) + 1, 0);
  search.colored_count.assign(search.constraints.size(), 0);
  search.common.assign(search.constraints.size(), 0);

  // Color 1 is fixed on the value 1 to break the color-permutation symmetry.
  std::vector<ColoringSearch::TrailEntry> trail;
  if (!search.assign(1, 1, trail)) return std::nullopt;
  if (!search.dfs(2)) return std::nullopt;

  result.colors.resize(static_cast<std::size_t>(n));
  for (long v = 1; v <= n; ++v) result.colors[static_cast<std::size_t>(v - 1)] =
      search.color[static_cast<std::size_t>(v)];
  check_internal(coloring_avoids_solutions(result, sols), "emitted coloring is invalid");
  return result;
}

// --- density experiments ----------------------------------------------

DensityStats density_experiment(const DiagonalSystem& sys, long n, const Rat& delta,
                                unsigned trials, std::uint64_t seed, const CountConfig& cfg) {
  if (n < 1) throw_invalid("density experiment requires N >= 1");
  if (delta <= 0 || delta > 1) throw_invalid("density must lie in (0, 1]");
  Int m_int;
  mpz_cdiv_q(m_int.get_mpz_t(), Int(rat_num(delta) * n).get_mpz_t(), rat_den(delta).get_mpz_t());
  const long m = to_long(m_int, "sample size");

  DensityStats stats;
  stats.trials = trials;
  stats.sample_size = static_cast<std::size_t>(m);

  Domain prefix(static_cast<std::size_t>(m));
  for (long v = 1; v <= m; ++v) prefix[static_cast<std::size_t>(v - 1)] = v;
  std::vector<Domain> domains(sys.matrix.cols(), prefix);
  stats.prefix_count = count_solutions(sys, n, domains, cfg).nontrivial;

  stats.min_count = stats.prefix_count;
  stats.max_count = stats.prefix_count;
  Rat sum(0);

  std::mt19937_64 rng(seed);
  std::vector<long> pool(static_cast<std::size_t>(n));
  for (long v = 1; v <= n; ++v) pool[static_cast<std::size_t>(v - 1)] = v;
  for (unsigned trial = 0; trial < trials; ++trial) {
    std::shuffle(pool.begin(), pool.end(), rng);
    Domain sample(pool.begin(), pool.begin() + m);
    std::sort(sample.begin(), sample.end());
    std::vector<Domain> doms(sys.matrix.cols(), sample);
    Int count = count_solutions(sys, n, doms, cfg).nontrivial;
    stats.min_count = std::min(stats.min_count, count);
    stats.max_count = std::max(stats.max_count, count);
    sum += Rat(count);
  }
  stats.mean_count = trials > 0 ? Rat(sum / Rat(static_cast<unsigned long>(trials)))
                                : Rat(stats.prefix_count);
  return stats;
}

// --- multiplicative syndeticity ----------------------------------------

IntegerSet multiples_of(long m, long limit) {
  if (m < 1 || limit < 0) throw_invalid("invalid multiples-of parameters");
  IntegerSet s;
  s.limit = limit;
  s.member.assign(static_cast<std::size_t>(limit) + 1, false);
  for (long x = m; x <= limit; x += m) s.member[static_cast<std::size_t>(x)] = true;
  return s;
}

IntegerSet explicit_set(const std::vector<long>& values, long limit) {
  IntegerSet s;
  s.limit = limit;
  s.member.assign(static_cast<std::size_t>(limit) + 1, false);
  for (long v : values) {
    if (v < 1 || v > limit) throw_invalid("set member outside [1, limit]");
    s.member[static_cast<std::size_t>(v)] = true;
  }
  return s;
}

IntegerSet random_syndetic_set(long window, long limit, std::uint64_t seed) {
  if (window < 1 || limit < window) throw_invalid("invalid syndetic construction parameters");
  IntegerSet s;
  s.limit = limit;
  s.member.assign(static_cast<std::size_t>(limit) + 1, false);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> pick(1, window);
  for (long x = 1; x * window <= limit; ++x) {
    bool hit = false;
    for (long m = 1; m <= window; ++m)
      if (s.member[static_cast<std::size_t>(m * x)]) {
        hit = true;
        break;
      }
    if (!hit) s.member[static_cast<std::size_t>(pick(rng) * x)] = true;
  }
  return s;
}

SyndeticityReport check_mult_syndetic(const IntegerSet& s, long window, long n) {
  if (window < 1 || n < 0) throw_invalid("invalid syndeticity parameters");
  if (s.limit < window * n) throw_invalid("set must cover [1, N*M]");
  SyndeticityReport rep;
  rep.window = window;
  rep.checked_up_to = n;

  std::vector<std::vector<long>> local_failures(
      static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel for schedule(static)
  for (long x = 1; x <= n; ++x) {
    bool hit = false;
    for (long m = 1; m <= window; ++m)
      if (s.contains(m * x)) {
        hit = true;
        break;
      }
    if (!hit) local_failures[static_cast<std::size_t>(omp_get_thread_num())].push_back(x);
  }
  for (const auto& f : local_failures) rep.failures.insert(rep.failures.end(), f.begin(), f.end());
  std::sort(rep.failures.begin(), rep.failures.end());
  return rep;
}

SyndeticDensityReport syndetic_density_check(const IntegerSet& s, long window, long n) {
  if (window < 1 || n < 0) throw_invalid("invalid density-check parameters");
  if (s.limit < n) throw_invalid("set must cover [1, N]");
  SyndeticDensityReport rep;
  rep.count = 0;
  for (long x = 1; x <= n; ++x)
    if (s.contains(x)) rep.count += 1;
  rep.bound = make_rat(Int(n / window), Int(window));
  rep.pass = Rat(rep.count) >= rep.bound;
  return rep;
}

// --- Bohr sets -----------------------------------------------------------

BohrSpec make_bohr_spec(unsigned h, std::vector<Rat> phases, Rat rho) {
  if (h < 1) throw_invalid("Bohr power must be at least 1");
  if (rho <= 0 || rho > 1) throw_invalid("Bohr radius must lie in (0, 1]");
  for (const Rat& a : phases)
    if (a < 0 || a >= 1) throw_invalid("Bohr phases must lie in [0, 1)");
  return BohrSpec{h, std::move(phases), std::move(rho)};
}

bool bohr_contains(const BohrSpec& spec, long n) {
  Int nh = pow_int(Int(n), spec.h);
  for (const Rat& alpha : spec.phases)
    if (nearest_int_distance(Rat(nh) * alpha) >= spec.rho) return false;
  return true;
}

std::vector<long> bohr_set(const BohrSpec& spec, long n) {
  if (n < 0) throw_invalid("negative bound");
  std::vector<char> in(static_cast<std::size_t>(n) + 1, 0);
#pragma omp parallel for schedule(static)
  for (long x = 1; x <= n; ++x) in[static_cast<std::size_t>(x)] = bohr_contains(spec, x) ? 1 : 0;
  std::vector<long> members;
  for (long x = 1; x <= n; ++x)
    if (in[static_cast<std::size_t>(x)]) members.push_back(x);
  return members;
}

RecurrenceReport bohr_recurrence_check(unsigned h, const Rat& alpha, long n, double c_budget) {
  if (n < 1 || h < 1) throw_invalid("recurrence check requires N, h >= 1");
  RecurrenceReport rep;
  rep.min_distance = Rat(1);
  rep.argmin = 0;
  for (long x = 1; x <= n; ++x) {
    Rat d = nearest_int_distance(Rat(pow_int(Int(x), h)) * alpha);
    if (rep.argmin == 0 || d < rep.min_distance) {
      rep.min_distance = d;
      rep.argmin = x;
      if (d == 0) break;
    }
  }
  rep.budget = c_budget * std::pow(static_cast<double>(n), -std::pow(2.0, -static_cast<double>(h)));
  rep.within_budget = rep.min_distance.get_d() <= rep.budget;
  return rep;
}

BohrSyndeticityResult bohr_syndetic_constant(const BohrSpec& spec, long cap) {
  if (cap < 1) throw_invalid("cap must be positive");
  Int period(1);
  for (const Rat& a : spec.phases) period = lcm_int(period, rat_den(a));
  BohrSyndeticityResult res;
  res.period = to_long(period, "phase period");

  // Membership of m*x depends on m*x mod period, so one period of x decides
  // syndeticity for every x. m0 = max over x of the least m with m*x inside.
  long worst = 0;
  bool exceeded = false;
#pragma omp parallel for schedule(dynamic) reduction(max : worst) reduction(|| : exceeded)
  for (long x = 1; x <= res.period; ++x) {
    long need = 0;
    for (long m = 1; m <= cap; ++m)
      if (bohr_contains(spec, m * x)) {
        need = m;
        break;
      }
    if (need == 0)
      exceeded = true;
    else
      worst = std::max(worst, need);
  }
  if (exceeded) throw_budget("no window within the cap meets the Bohr set");
  res.m0 = worst;
  return res;
}

// --- W-trick -------------------------------------------------------------

WTrickParams w_params(unsigned k, unsigned w, long n, const Int& zeta, const Int& xi) {
  if (k < 1 || w < 1 || n < 1) throw_invalid("w-trick parameters require k, w, N >= 1");
  if (xi < 1 || zeta < 1) throw_invalid("xi and zeta must be positive");
  WTrickParams p;
  p.k = k;
  p.w = w;
  p.n = n;
  p.xi = xi;
  p.zeta = zeta;

  p.W = pow_int(Int(k), k - 1);
  p.kw_root = k;
  for (long prime : primes_up_to(w)) {
    p.W *= pow_int(Int(prime), k);
    p.kw_root *= prime;
  }
  check_internal(pow_int(p.kw_root, k) == Int(k) * p.W, "k-th root of kW is not exact");

  if (gcd_int(xi, p.W) != 1) throw_invalid("xi must be coprime to W");
  Int rest = zeta;
  for (long prime : primes_up_to(w))
    while (mpz_divisible_ui_p(rest.get_mpz_t(), static_cast<unsigned long>(prime)))
      rest /= prime;
  if (rest != 1) throw_invalid("zeta must be free of primes exceeding w");

  p.x_cap = make_rat(pow_int(Int(n), k), Int(k) * p.W * pow_int(zeta, k));
  return p;
}

ProgressionChoice select_progression(const IntegerSet& a, long n, unsigned k, unsigned w,
                                     const Rat& delta, long zeta_cap) {
  if (n < 1 || zeta_cap < 1) throw_invalid("invalid progression search parameters");
  if (a.limit < n) throw_invalid("set must cover [1, N]");
  Int count_a = 0;
  for (long x = 1; x <= n; ++x)
    if (a.contains(x)) count_a += 1;
  if (Rat(count_a) < delta * Rat(n)) throw_invalid("set is sparser than the declared density");

  Int w_value = pow_int(Int(k), k - 1);
  for (long prime : primes_up_to(w)) w_value *= pow_int(Int(prime), k);
  const long w_long = to_long(w_value, "W");

  auto is_smooth = [&](long z) {
    for (long prime : primes_up_to(w))
      while (z % prime == 0) z /= prime;
    return z == 1;
  };

  for (long zeta = 1; zeta <= zeta_cap; ++zeta) {
    if (!is_smooth(zeta)) continue;
    for (long xi = 1; xi <= w_long; ++xi) {
      if (gcd_int(Int(xi), Int(w_long)) != 1) continue;
      Int hits_a = 0, hits_range = 0;
      for (long v = zeta * xi; v <= n; v += zeta * w_long) {
        hits_range += 1;
        if (a.contains(v)) hits_a += 1;
      }
      if (hits_range == 0) continue;
      // hits_a >= (1/2) delta hits_range, exactly.
      if (Rat(hits_a) * 2 >= delta * Rat(hits_range))
        return ProgressionChoice{Int(xi), Int(zeta), hits_a, hits_range};
    }
  }
  throw_budget("no admissible progression found within the zeta cap");
}

Int weight_nu(const WTrickParams& params, const Int& value) {
  if (value < 1) return 0;
  Int target = value * params.k * params.W + pow_int(params.xi, params.k);
  bool exact = false;
  Int x = kth_root_floor(target, params.k, &exact);
  if (!exact) return 0;
  if (!mpz_congruent_p(x.get_mpz_t(), params.xi.get_mpz_t(), params.W.get_mpz_t())) return 0;
  if (x * params.zeta > params.n || x < 1) return 0;
  return pow_int(x, params.k - 1);
}

Int weight_nu_mass(const WTrickParams& params) {
  Int mass = 0;
  Int cap;
  mpz_fdiv_q(cap.get_mpz_t(), Int(params.n).get_mpz_t(), params.zeta.get_mpz_t());
  for (Int x = params.xi + params.W; x <= cap; x += params.W)
    mass += pow_int(x, params.k - 1);
  return mass;
}

// --- crude transfer -------------------------------------------------------

TransferReport crude_transfer_check(const TransferInstance& inst, const CountConfig& cfg) {
  const QMatrix& a = inst.a;
  const QMatrix& b = inst.b;
  const QMatrix& c = inst.c;
  const std::size_t s = a.cols(), t = b.cols(), nr = a.rows(), mr = c.rows();
  if (!a.is_integral() || !b.is_integral() || !c.is_integral())
    throw_invalid("transfer requires integer matrices");
  if (b.rows() != nr || c.cols() != t) throw_invalid("transfer block shapes are inconsistent");
  if (inst.k != inst.params.k) throw_invalid("degree mismatch between system and parameters");
  for (const Rat& e : a.column_sum())
    if (e != 0) throw_invalid("transfer requires the columns of A to sum to zero");
  if (!divisibility_condition(a, b))
    throw_invalid("preprocessing missing: B entries must be divisible by the entries of A");

  const WTrickParams& p = inst.params;
  const long n = p.n;
  if (inst.set_a.limit < n || inst.set_s.limit < n)
    throw_invalid("transfer sets must cover [1, N]");

  // Linearised left-hand data: A1 from the progression in A, S1 from the
  // rescaled members of S, cut off at X^(1/k).
  std::vector<Int> a1_values, a1_origin;
  for (Int z = 1;; z += 1) {
    Int u = p.zeta * (p.W * z + p.xi);
    if (u > n) break;
    if (!inst.set_a.contains(to_long(u, "progression member"))) continue;
    Int num = pow_int(p.W * z + p.xi, p.k) - pow_int(p.xi, p.k);
    Int den = Int(p.k) * p.W;
    check_internal(mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t()),
                   "linearised value is not integral");
    a1_values.push_back(num / den);
    a1_origin.push_back(u);
  }

  Int y_cap_int;
  mpz_fdiv_q(y_cap_int.get_mpz_t(), Int(n).get_mpz_t(), Int(p.zeta * p.kw_root).get_mpz_t());
  const long y_cap = to_long(y_cap_int, "linearised y range");
  std::vector<Int> s1_values, s1_origin;
  for (long y = 1; y <= y_cap; ++y) {
    Int v = p.zeta * p.kw_root * y;
    if (inst.set_s.contains(to_long(v, "rescaled member"))) {
      s1_values.push_back(Int(y));
      s1_origin.push_back(v);
    }
  }

  TransferReport rep;
  rep.a1_size = static_cast<long>(a1_values.size());
  rep.s1_size = static_cast<long>(s1_values.size());

  // Stacked columns: x-variables carry (A_j; 0), y-variables (-B_j; C_j).
  std::vector<std::vector<Int>> cols(s + t, std::vector<Int>(nr + mr, Int(0)));
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t i = 0; i < nr; ++i) cols[j][i] = rat_num(a.at(i, j));
  for (std::size_t j = 0; j < t; ++j) {
    for (std::size_t i = 0; i < nr; ++i) cols[s + j][i] = -rat_num(b.at(i, j));
    for (std::size_t i = 0; i < mr; ++i) cols[s + j][nr + i] = rat_num(c.at(i, j));
  }

  // Left: x linear over A1, y at degree k over S1. Solutions are enumerated
  // explicitly to drive the injectivity check.
  std::vector<std::vector<Int>> left_values(s + t);
  for (std::size_t j = 0; j < s; ++j) left_values[j] = a1_values;
  for (std::size_t j = 0; j < t; ++j) {
    left_values[s + j].reserve(s1_values.size());
    for (const Int& y : s1_values) left_values[s + j].push_back(pow_int(y, p.k));
  }

  double leaves = 1;
  for (const auto& v : left_values) leaves *= static_cast<double>(v.size());
  if (leaves > static_cast<double>(cfg.max_table_entries))
    throw_budget("left-side enumeration exceeds the budget");

  std::vector<std::vector<std::size_t>> left_solutions;
  {
    std::vector<std::size_t> idx(s + t);
    std::vector<Int> acc(nr + mr, Int(0));
    auto rec = [&](auto&& self, std::size_t j) -> void {
      if (j == s + t) {
        for (const Int& e : acc)
          if (e != 0) return;
        left_solutions.push_back(idx);
        return;
      }
      for (std::size_t i = 0; i < left_values[j].size(); ++i) {
        idx[j] = i;
        for (std::size_t r0 = 0; r0 < nr + mr; ++r0) acc[r0] += cols[j][r0] * left_values[j][i];
        self(self, j + 1);
        for (std::size_t r0 = 0; r0 < nr + mr; ++r0) acc[r0] -= cols[j][r0] * left_values[j][i];
      }
    };
    rec(rec, 0);
  }
  rep.left_solutions = left_solutions.size();
  rep.lhs = Int(static_cast<unsigned long>(left_solutions.size()));

  // Right: everything at degree k, x over A, y over S, both within [N].
  std::vector<std::vector<Int>> right_values(s + t);
  std::vector<Int> a_powers, s_powers;
  for (long x = 1; x <= n; ++x) {
    if (inst.set_a.contains(x)) a_powers.push_back(pow_int(Int(x), p.k));
    if (inst.set_s.contains(x)) s_powers.push_back(pow_int(Int(x), p.k));
  }
  for (std::size_t j = 0; j < s; ++j) right_values[j] = a_powers;
  for (std::size_t j = 0; j < t; ++j) right_values[s + j] = s_powers;
  rep.rhs = count_zero_sums(cols, right_values, cfg);

  // The instance map sends each left solution to (zeta(Wz+xi), zeta(kW)^(1/k) y).
  rep.images_are_solutions = true;
  std::set<std::vector<Int>> images;
  for (const auto& sol : left_solutions) {
    std::vector<Int> image(s + t);
    for (std::size_t j = 0; j < s; ++j) image[j] = a1_origin[sol[j]];
    for (std::size_t j = 0; j < t; ++j) image[s + j] = s1_origin[sol[s + j]];
    std::vector<Int> acc(nr + mr, Int(0));
    for (std::size_t j = 0; j < s + t; ++j) {
      Int pk = pow_int(image[j], p.k);
      for (std::size_t r0 = 0; r0 < nr + mr; ++r0) acc[r0] += cols[j][r0] * pk;
    }
    for (const Int& e : acc)
      if (e != 0) rep.images_are_solutions = false;
    images.insert(std::move(image));
  }
  rep.injective = images.size() == left_solutions.size();
  rep.pass = rep.injective && rep.images_are_solutions && rep.lhs <= rep.rhs;
  return rep;
}

// --- auxiliary counting operator ------------------------------------------

AuxOperatorSpec make_aux_spec(const QMatrix& a, const QMatrix& b, unsigned k,
                              const std::vector<Int>& y, std::vector<long> b_set) {
  const std::size_t n = a.rows(), s = a.cols();
  if (n == 0 || s < n + 1) throw_invalid("operator requires at least n+1 variables");
  if (b.rows() != n) throw_invalid("A and B must have the same number of rows");
  if (y.size() != b.cols()) throw_invalid("one y coordinate per column of B required");
  for (std::size_t i = 0; i < n; ++i) {
    if (a.at(i, i) == 0) throw_invalid("leading diagonal entry of A vanishes");
    for (std::size_t r = 0; r < n; ++r)
      if (r != i && a.at(r, i) != 0)
        throw_invalid("the first n columns of A must form a diagonal matrix");
  }

  AuxOperatorSpec spec;
  spec.s = s;
  spec.n = n;
  spec.y = y;
  std::sort(b_set.begin(), b_set.end());
  b_set.erase(std::unique(b_set.begin(), b_set.end()), b_set.end());
  spec.b_set = std::move(b_set);

  auto basis = kernel_basis(a, AllOnesNormalization::Require);
  check_internal(basis.size() == s - n, "kernel dimension mismatch");
  spec.kernel.reserve(basis.size());
  for (const auto& v : basis) {
    Int denom_lcm(1);
    for (const Rat& e : v) denom_lcm = lcm_int(denom_lcm, rat_den(e));
    std::vector<Int> w(v.size());
    Int content(0);
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
    for (Int& e : w) e /= content;
    spec.kernel.push_back(std::move(w));
  }

  spec.poly_at_y.assign(s, Int(0));
  for (std::size_t i = 0; i < n; ++i) {
    Int row_value(0);
    for (std::size_t j = 0; j < b.cols(); ++j)
      row_value += rat_num(b.at(i, j)) * pow_int(y[j], k);
    if (!mpz_divisible_p(row_value.get_mpz_t(), rat_num(a.at(i, i)).get_mpz_t()))
      throw_invalid("preprocessing missing: row of B y^(k) is not divisible by A's diagonal");
    spec.poly_at_y[i] = row_value / rat_num(a.at(i, i));
  }
  return spec;
}

Rat aux_psi(const AuxOperatorSpec& spec, const std::vector<Weights>& weights) {
  if (weights.size() != spec.s) throw_invalid("one weight per variable required");
  const std::size_t q = spec.kernel.size() - 1;
  if (q > 0 && spec.b_set.empty()) return Rat(0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < q; ++i) {
    total *= spec.b_set.size();
    if (total > std::size_t{20'000'000}) throw_budget("B^q enumeration exceeds the budget");
  }

  Rat result(0);
#pragma omp parallel
  {
    Rat local(0);
    std::vector<long> d(q);
#pragma omp for schedule(dynamic, 16) nowait
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (std::size_t i = 0; i < q; ++i) {
        d[i] = spec.b_set[rem % spec.b_set.size()];
        rem /= spec.b_set.size();
      }
      std::vector<long> shift(spec.s);
      for (std::size_t j = 0; j < spec.s; ++j) {
        Int qj = spec.poly_at_y[j];
        for (std::size_t i = 0; i < q; ++i) qj += spec.kernel[i + 1][j] * d[i];
        shift[j] = to_long(qj, "operator shift");
      }
      // Sum over x through the support of the first weight.
      for (const auto& [key, w0] : weights[0]) {
        long x = key - shift[0];
        Rat prod = w0;
        bool zero = false;
        for (std::size_t j = 1; j < spec.s && !zero; ++j) {
          auto it = weights[j].find(x + shift[j]);
          if (it == weights[j].end() || it->second == 0)
            zero = true;
          else
            prod *= it->second;
        }
        if (!zero) local += prod;
      }
    }
#pragma omp critical
    result += local;
  }
  return result;
}

Rat lambda_weighted(const QMatrix& a, const QMatrix& b, const QMatrix& c, unsigned k,
                    const std::vector<Weights>& f, const std::vector<Weights>& g) {
  const std::size_t s = a.cols(), t = b.cols(), nr = a.rows(), mr = c.rows();
  if (f.size() != s || g.size() != t) throw_invalid("weight arity mismatch");
  if (b.rows() != nr || c.cols() != t) throw_invalid("block shapes are inconsistent");

  std::vector<std::vector<std::pair<long, Rat>>> gs(t), fs(s);
  for (std::size_t j = 0; j < t; ++j) gs[j].assign(g[j].begin(), g[j].end());
  for (std::size_t j = 0; j < s; ++j) fs[j].assign(f[j].begin(), f[j].end());

  Rat result(0);
  std::vector<long> y(t);
  auto inner = [&](const std::vector<Int>& rhs, const Rat& gw) {
    std::vector<long> x(s);
    auto rec = [&](auto&& self, std::size_t j, Rat acc) -> void {
      if (j == s) {
        std::vector<Int> lhs(nr, Int(0));
        for (std::size_t jj = 0; jj < s; ++jj)
          for (std::size_t i = 0; i < nr; ++i) lhs[i] += rat_num(a.at(i, jj)) * x[jj];
        if (lhs == rhs) result += acc * gw;
        return;
      }
      for (const auto& [key, w] : fs[j]) {
        if (w == 0) continue;
        x[j] = key;
        self(self, j + 1, Rat(acc * w));
      }
    };
    rec(rec, 0, Rat(1));
  };

  auto outer = [&](auto&& self, std::size_t j, Rat acc) -> void {
    if (j == t) {
      std::vector<Int> ypow(t);
      for (std::size_t jj = 0; jj < t; ++jj) ypow[jj] = pow_int(Int(y[jj]), k);
      std::vector<Int> crows(mr, Int(0));
      for (std::size_t jj = 0; jj < t; ++jj)
        for (std::size_t i = 0; i < mr; ++i) crows[i] += rat_num(c.at(i, jj)) * ypow[jj];
      for (const Int& e : crows)
        if (e != 0) return;
      std::vector<Int> rhs(nr, Int(0));
      for (std::size_t jj = 0; jj < t; ++jj)
        for (std::size_t i = 0; i < nr; ++i) rhs[i] += rat_num(b.at(i, jj)) * ypow[jj];
      inner(rhs, acc);
      return;
    }
    for (const auto& [key, w] : gs[j]) {
      if (w == 0) continue;
      y[j] = key;
      self(self, j + 1, Rat(acc * w));
    }
  };
  outer(outer, 0, Rat(1));
  return result;
}

}  // namespace dioph
