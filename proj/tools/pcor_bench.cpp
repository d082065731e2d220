// Benchmark: serial reference paths against the OpenMP kernels.
//   1. brute-force refutation sweep over all 3-vertex structures
//   2. summary-machine transition rows over a filtered alphabet
//   3. graph-language oracle over an unrolled star

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef PCOR_HAVE_OPENMP
#include <omp.h>
#endif

#include "pcor/automata.hpp"
#include "pcor/graphs.hpp"

using namespace pcor;

namespace {

double seconds(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel, int jobs) {
  std::printf("%-28s serial %8.3fs   %2d jobs %8.3fs   speedup %5.2fx\n", name, serial, jobs,
              parallel, parallel > 0 ? serial / parallel : 0.0);
}

}  // namespace

int main() {
#ifdef PCOR_HAVE_OPENMP
  int jobs = omp_get_max_threads();
#else
  int jobs = 1;
  std::printf("built without OpenMP: parallel timings run the serial path\n");
#endif

  {  // refutation sweep (validity: no countermodel exists)
    Term t1 = parse_term("(a b + b a)*");
    Term t2 = parse_term("(a + b)*");
    ClassFilter filter;
    auto serial = seconds([&] { refute_models(t1, t2, 3, filter, 1); });
    auto par = seconds([&] { refute_models(t1, t2, 3, filter, jobs); });
    report("refutation sweep n<=3", serial, par, jobs);
  }

  {  // summary rows: one machine, all letters, one frontier row per state
    Term w = wrap_for_decision(to_kl(parse_term("(a* b*)*")));
    std::vector<std::string> names = term_variables(w);
    int k = int(intersection_width(w)) + 1;
    std::vector<Letter> admitted;
    int top = 0;
    while (names[top] != "c_top") ++top;
    for_each_letter(k, names.size(), [&](const Letter& a) {
      if (letter_top_total(a, top)) admitted.push_back(a);
    });
    TwoAFA A = build_2afa(k, w, names);
    std::vector<const Letter*> reps;
    for (const Letter& a : admitted) reps.push_back(&a);
    auto run = [&](int j) {
      SummaryMachine m(A);
      std::vector<int> row = m.next_batch(m.initial(), reps, j);
      m.next_batch(row[row.size() / 2], reps, j);
    };
    auto serial = seconds([&] { run(1); });
    auto par = seconds([&] { run(jobs); });
    std::printf("  (alphabet %zu letters, k=%d)\n", admitted.size(), k);
    report("summary rows", serial, par, jobs);
  }

  {  // oracle: graphs of an unrolled star checked against the right side
    Term t1 = parse_term("(a b)*");
    Term t2 = parse_term("a (b a)* b + 1");
    auto serial = seconds([&] { oracle_leq(t1, t2, 6, 1); });
    auto par = seconds([&] { oracle_leq(t1, t2, 6, jobs); });
    report("graph oracle depth 6", serial, par, jobs);
  }

  return 0;
}
