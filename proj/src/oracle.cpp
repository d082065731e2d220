#include <atomic>
#include <stdexcept>

#include "pcor/graphs.hpp"

#ifdef PCOR_HAVE_OPENMP
#include <omp.h>
#endif

namespace pcor {

namespace {

bool has_star(Term t) {
  if (!t) return false;
  if (t->op == Op::Star) return true;
  return has_star(t->a) || has_star(t->b);
}

bool has_complement(Term t) {
  if (!t) return false;
  if (t->op == Op::TestNot) return true;
  return has_complement(t->a) || has_complement(t->b);
}

// one generated graph, checked by evaluating the right-hand term over the
// graph read as a structure
bool graph_satisfies(const BiGraph& g, Term t2, const std::vector<std::string>& names) {
  Structure s = bigraph_as_structure(g, names);
  return eval(s, t2).get(g.srcs[0], g.dsts[0]);
}

}  // namespace

OracleResult oracle_leq(Term t1, Term t2, int star_depth, int jobs) {
  if (has_complement(t1) || has_complement(t2))
    throw std::invalid_argument("oracle_leq: complemented tests are not supported");
  std::vector<std::string> names;
  for (const auto& n : term_variables(t2)) names.push_back(n);

  auto gs = glang(t1, star_depth);
  std::atomic<long> worst{static_cast<long>(gs.size())};

#ifdef PCOR_HAVE_OPENMP
  if (jobs > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long i = 0; i < static_cast<long>(gs.size()); ++i) {
      if (i > worst.load(std::memory_order_relaxed)) continue;
      if (!graph_satisfies(gs[i], t2, names)) {
        long cur = worst.load(std::memory_order_relaxed);
        while (i < cur && !worst.compare_exchange_weak(cur, i)) {
        }
      }
    }
  } else
#else
  (void)jobs;
#endif
  {
    for (long i = 0; i < static_cast<long>(gs.size()); ++i)
      if (!graph_satisfies(gs[i], t2, names)) {
        worst = i;
        break;
      }
  }

  OracleResult res;
  res.depth = star_depth;
  if (worst < static_cast<long>(gs.size())) {
    res.kind = OracleResult::Invalid;
    res.counter = gs[worst];
  } else {
    res.kind = has_star(t1) ? OracleResult::ValidUpToDepth : OracleResult::Valid;
  }
  return res;
}

}  // namespace pcor
