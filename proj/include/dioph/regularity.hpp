#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dioph/counting.hpp"
#include "dioph/matrix.hpp"

namespace dioph {

// --- coloring ---------------------------------------------------------

struct Coloring {
  long n = 0;
  std::vector<unsigned> colors;  // colors[i] is the color of i+1, in [1, r]
};

struct ColoringConfig {
  std::uint64_t node_budget = 20'000'000;
  std::size_t max_tuples = 20'000'000;  // solution enumeration cap
};

/// All solutions of the system over the given domains, as value tuples.
std::vector<std::vector<long>> enumerate_solutions(const DiagonalSystem& sys,
                                                   const std::vector<Domain>& domains,
                                                   std::size_t max_tuples);

/// Searches for a coloring of [N] with r colors under which no solution with
/// at least two distinct coordinate values is monochromatic. Returns the
/// lexicographically least such coloring, or nothing once the search space is
/// exhausted. Depth-first over the colors of 2..N with color(1) = 1 fixed and
/// forced-color propagation from almost-complete monochromatic solutions.
std::optional<Coloring> find_bad_coloring(const DiagonalSystem& sys, long n, unsigned r,
                                          const ColoringConfig& cfg = {});

/// Validation helper: true iff no solution set with >= 2 distinct values is
/// monochromatic under the coloring.
bool coloring_avoids_solutions(const Coloring& coloring,
                               const std::vector<std::vector<long>>& solutions);

// --- density experiments ----------------------------------------------

struct DensityStats {
  Int prefix_count;           // deterministic A = [ceil(delta N)] case
  Int min_count, max_count;   // over the sampled sets
  Rat mean_count;
  unsigned trials = 0;
  std::size_t sample_size = 0;
};

/// Counts solutions with pairwise distinct coordinates over random subsets
/// A of [N] with |A| = ceil(delta N).
DensityStats density_experiment(const DiagonalSystem& sys, long n, const Rat& delta,
                                unsigned trials, std::uint64_t seed,
                                const CountConfig& cfg = {});

// --- multiplicative syndeticity ----------------------------------------

/// Membership over an initial segment of the positive integers;
/// values[x] answers for x (index 0 unused).
struct IntegerSet {
  std::vector<bool> member;  // size limit+1
  long limit = 0;
  bool contains(long x) const { return x >= 1 && x <= limit && member[static_cast<std::size_t>(x)]; }
};

IntegerSet multiples_of(long m, long limit);
IntegerSet explicit_set(const std::vector<long>& values, long limit);
/// Random multiplicatively [window]-syndetic set: scanning x upward, any
/// empty window {x, 2x, ..., window*x} gets one uniformly chosen multiple
/// of x inserted. Syndetic up to limit/window by construction.
IntegerSet random_syndetic_set(long window, long limit, std::uint64_t seed);

struct SyndeticityReport {
  long window = 0;  // M
  long checked_up_to = 0;
  std::vector<long> failures;  // x with S and {x, 2x, ..., Mx} disjoint
  bool syndetic() const { return failures.empty(); }
};

/// Exhaustive check of S ∩ {x, 2x, ..., Mx} != {} for all x <= N. The set
/// must cover [1, N*M].
SyndeticityReport check_mult_syndetic(const IntegerSet& s, long window, long n);

struct SyndeticDensityReport {
  Int count;   // |S ∩ [N]|
  Rat bound;   // floor(N/M) / M
  bool pass = false;
};

SyndeticDensityReport syndetic_density_check(const IntegerSet& s, long window, long n);

// --- Bohr sets -----------------------------------------------------------

struct BohrSpec {
  unsigned h = 1;
  std::vector<Rat> phases;  // each in [0, 1)
  Rat rho;                  // in (0, 1]
};

BohrSpec make_bohr_spec(unsigned h, std::vector<Rat> phases, Rat rho);

/// Exact membership of n: distance of n^h * phase to the nearest integer is
/// below rho, for every phase.
bool bohr_contains(const BohrSpec& spec, long n);
std::vector<long> bohr_set(const BohrSpec& spec, long n);

struct RecurrenceReport {
  Rat min_distance;
  long argmin = 0;
  double budget = 0;  // C * N^(-2^-h)
  bool within_budget = false;
};

RecurrenceReport bohr_recurrence_check(unsigned h, const Rat& alpha, long n, double c_budget);

struct BohrSyndeticityResult {
  long m0 = 0;      // least window size that works for all x
  long period = 0;  // lcm of the phase denominators
};

/// Least M0 <= cap such that {x, ..., M0 x} meets the Bohr set for every x.
/// Membership is periodic in x with period lcm(denominators), so scanning one
/// period decides the question for all x.
BohrSyndeticityResult bohr_syndetic_constant(const BohrSpec& spec, long cap);

// --- W-trick -------------------------------------------------------------

struct WTrickParams {
  unsigned k = 0;
  unsigned w = 0;
  Int W;        // k^(k-1) * prod_{p <= w} p^k
  Int kw_root;  // (k W)^(1/k) = k * prod_{p <= w} p, exact
  Int xi;       // coprime to W
  Int zeta;     // w-smooth
  long n = 0;
  Rat x_cap;    // X = N^k / (k W zeta^k)
};

WTrickParams w_params(unsigned k, unsigned w, long n, const Int& zeta, const Int& xi);

struct ProgressionChoice {
  Int xi, zeta;
  Int hits_in_a;       // |{x : zeta (xi + W x) in A}|
  Int hits_in_range;   // |{x : zeta (xi + W x) in [N]}|
};

/// Exhaustive scan over w-smooth zeta <= zeta_cap and xi in [W] coprime to W
/// for a progression capturing at least half the declared density of A.
ProgressionChoice select_progression(const IntegerSet& a, long n, unsigned k, unsigned w,
                                     const Rat& delta, long zeta_cap);

/// The k-th power progression weight: x^(k-1) when n = (x^k - xi^k)/(kW) for
/// some x in [N/zeta] with x = xi mod W, else 0.
Int weight_nu(const WTrickParams& params, const Int& value);
/// Exact l1 mass of the weight.
Int weight_nu_mass(const WTrickParams& params);

// --- crude transfer -------------------------------------------------------

struct TransferInstance {
  QMatrix a, b, c;  // A x^(k) = B y^(k), C y^(k) = 0
  unsigned k = 2;
  WTrickParams params;
  IntegerSet set_a;  // subset of [N]
  IntegerSet set_s;  // multiplicatively syndetic candidate, covering [1, N]
};

struct TransferReport {
  Int lhs;  // solutions of the linearised system over A_1 x (S_1 cap [X^(1/k)])
  Int rhs;  // solutions of the degree-k system over A x (S cap [N])
  std::size_t left_solutions = 0;
  bool injective = false;
  bool images_are_solutions = false;
  long a1_size = 0;
  long s1_size = 0;
  bool pass = false;
};

TransferReport crude_transfer_check(const TransferInstance& inst, const CountConfig& cfg = {});

// --- auxiliary counting operator ------------------------------------------

/// Finitely supported rational weight on the integers.
using Weights = std::unordered_map<long, Rat>;

struct AuxOperatorSpec {
  std::vector<std::vector<Int>> kernel;  // primitive integer basis; kernel[0] all-ones
  std::vector<Int> poly_at_y;            // P_j(y), zero for j > n
  std::vector<long> b_set;
  std::size_t s = 0, n = 0;
  std::vector<Int> y;
};

/// Builds the operator data for A with a leading nonsingular diagonal block
/// and columns summing to zero; P_i(y) divides row i of B y^(k) by A(i,i).
AuxOperatorSpec make_aux_spec(const QMatrix& a, const QMatrix& b, unsigned k,
                              const std::vector<Int>& y, std::vector<long> b_set);

/// Exact evaluation of sum_x sum_{d in B^q} prod_j f_j(x + Q_j(d, y)).
Rat aux_psi(const AuxOperatorSpec& spec, const std::vector<Weights>& weights);

/// Exact evaluation of the linearised counting operator
/// sum_{C y^(k) = 0} sum_{A x = B y^(k)} prod f_i(x_i) prod g_j(y_j),
/// by direct enumeration over the weight supports.
Rat lambda_weighted(const QMatrix& a, const QMatrix& b, const QMatrix& c, unsigned k,
                    const std::vector<Weights>& f, const std::vector<Weights>& g);

}  // namespace dioph
