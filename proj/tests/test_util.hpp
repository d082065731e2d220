#pragma once

#include <random>
#include <string>
#include <vector>

#include "pcor/model.hpp"
#include "pcor/term.hpp"

namespace pcor::testutil {

// random structure over `names` with `n` vertices named "1".."n"
inline Structure gen_structure(std::mt19937_64& rng, int n,
                               const std::vector<std::string>& names,
                               double density = 0.4) {
  Structure s;
  for (int i = 1; i <= n; ++i) s.universe.push_back(std::to_string(i));
  std::bernoulli_distribution edge(density);
  for (const auto& name : names) {
    s.ensure_name(name);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (edge(rng)) s.rel[name].set(i, j);
  }
  return s;
}

// random term generator; `ops` selects the grammar fragment
struct TermGen {
  std::mt19937_64 rng;
  std::vector<std::string> vars;
  bool with_top = false;
  bool with_conv = false;
  bool with_star = true;
  bool with_inter = true;

  explicit TermGen(uint64_t seed, std::vector<std::string> names = {"a", "b"})
      : rng(seed), vars(std::move(names)) {}

  Term leaf() {
    std::uniform_int_distribution<int> d(0, static_cast<int>(vars.size()) + (with_top ? 2 : 1));
    int k = d(rng);
    if (k < static_cast<int>(vars.size())) return mk_var(vars[static_cast<size_t>(k)]);
    k -= static_cast<int>(vars.size());
    if (k == 0) return mk_one();
    if (k == 1 && with_top) return mk_top();
    return mk_zero();
  }

  Term gen(int depth) {
    if (depth <= 0) return leaf();
    std::uniform_int_distribution<int> d(0, 9);
    switch (d(rng)) {
      case 0:
      case 1: return leaf();
      case 2:
      case 3: return mk_seq(gen(depth - 1), gen(depth - 1));
      case 4:
      case 5: return mk_plus(gen(depth - 1), gen(depth - 1));
      case 6:
      case 7:
        if (with_inter) return mk_inter(gen(depth - 1), gen(depth - 1));
        return mk_seq(gen(depth - 1), gen(depth - 1));
      case 8:
        if (with_star) return mk_star(gen(depth - 1));
        return leaf();
      default:
        if (with_conv) return mk_conv(gen(depth - 1));
        return mk_plus(gen(depth - 1), gen(depth - 1));
    }
  }
};

}  // namespace pcor::testutil
