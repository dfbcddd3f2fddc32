// Timing comparison between the parallel kernels, their single-thread runs,
// and the serial reference implementations. Wall-clock only; agreement of
// the results is asserted on the fly.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "dioph/counting.hpp"
#include "dioph/errors.hpp"
#include "dioph/regularity.hpp"

using namespace dioph;

namespace {

double time_seconds(const std::function<void()>& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const char* name, double baseline, double candidate) {
  std::printf("%-52s %9.3fs %9.3fs %7.1fx\n", name, baseline, candidate,
              candidate > 0 ? baseline / candidate : 0.0);
}

}  // namespace

int main() {
  const int procs = omp_get_num_procs();
  std::printf("threads available: %d\n\n", procs);
  std::printf("%-52s %10s %10s %8s\n", "workload", "baseline", "candidate", "speedup");

  {
    DiagonalSystem sys = make_system(QMatrix{{1, 1, 1, 1, -4}}, 2);
    const long n = 25;
    SolutionCount naive, split;
    double t_naive = time_seconds([&] { naive = count_solutions_reference(sys, n); });
    double t_split = time_seconds([&] { split = count_solutions(sys, n); });
    check_internal(naive.total == split.total && naive.nontrivial == split.nontrivial,
                   "counting engines disagree");
    row("count N=25 s=5: naive reference vs split-join", t_naive, t_split);
  }

  {
    const long n = 70;
    SolutionCount s1, sp;
    DiagonalSystem sys = make_system(QMatrix{{1, 1, 1, 1, -4}}, 2);
    omp_set_num_threads(1);
    double t1 = time_seconds([&] { s1 = count_solutions(sys, n); });
    omp_set_num_threads(procs);
    double tp = time_seconds([&] { sp = count_solutions(sys, n); });
    check_internal(s1.total == sp.total, "thread count changed the totals");
    row("count N=70 s=5: split-join, 1 thread vs all", t1, tp);
  }

  {
    Int v1, vp;
    omp_set_num_threads(1);
    double t1 = time_seconds([&] { v1 = mean_value(3, 4, 110).value; });
    omp_set_num_threads(procs);
    double tp = time_seconds([&] { vp = mean_value(3, 4, 110).value; });
    check_internal(v1 == vp, "thread count changed the moment");
    row("moments k=3 t=4 N=110: convolution, 1 vs all", t1, tp);

    Int pairing, conv;
    double t_pairing = time_seconds([&] { pairing = mean_value_reference(3, 3, 110); });
    double t_conv = time_seconds([&] { conv = mean_value(3, 3, 110).value; });
    check_internal(pairing == conv, "pairing route disagrees");
    row("moments k=3 t=3 N=110: pairing ref vs convolution", t_pairing, t_conv);
  }

  {
    BohrSpec spec = make_bohr_spec(2, {make_rat(355, 1130)}, make_rat(1, 25));
    std::vector<long> m1, mp;
    omp_set_num_threads(1);
    double t1 = time_seconds([&] { m1 = bohr_set(spec, 300000); });
    omp_set_num_threads(procs);
    double tp = time_seconds([&] { mp = bohr_set(spec, 300000); });
    check_internal(m1 == mp, "thread count changed the Bohr set");
    row("bohr membership scan N=300000: 1 thread vs all", t1, tp);
  }

  return 0;
}
