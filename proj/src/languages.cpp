#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pcor/graphs.hpp"

namespace pcor {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// glue vertex pairs of g, renumbering by smallest representative; fills the
// old-to-new vertex map
BiGraph glue_pairs(const BiGraph& g, const std::vector<std::pair<int, int>>& pairs,
                   std::vector<int>& map) {
  UnionFind uf(g.n);
  for (auto& [a, b] : pairs) uf.unite(a, b);
  map.assign(g.n, -1);
  int next = 0;
  for (int v = 0; v < g.n; ++v)
    if (uf.find(v) == v) map[v] = next++;
  for (int v = 0; v < g.n; ++v) map[v] = map[uf.find(v)];

  BiGraph out;
  out.n = next;
  for (const auto& e : g.edges) {
    BgEdge f = e;
    for (int& x : f.src) x = map[x];
    for (int& x : f.dst) x = map[x];
    out.edges.push_back(std::move(f));
  }
  out.srcs = g.srcs;
  out.dsts = g.dsts;
  for (int& x : out.srcs) x = map[x];
  for (int& x : out.dsts) x = map[x];
  return out;
}

std::vector<int> mapped_bag(const std::vector<int>& bag, const std::vector<int>& map, int off) {
  std::set<int> s;
  for (int v : bag) s.insert(map[v + off]);
  return {s.begin(), s.end()};
}

// series of witnessed graphs: glue targets of a to sources of b and
// concatenate both witnesses through the renaming.
//
// The path bags stay valid because each merged vertex's occurrence interval
// already touches the seam: it lies in a's last bag (a target) and b's first
// bag (a source), and occurrence intervals are contiguous.
LangGraph series_w(const LangGraph& a, const LangGraph& b) {
  if (a.g.dsts.size() != b.g.srcs.size())
    throw std::invalid_argument("series: interface arity mismatch");
  BiGraph par = parallel(a.g, b.g);
  int off = a.g.n;
  std::vector<std::pair<int, int>> pairs;
  for (size_t i = 0; i < a.g.dsts.size(); ++i)
    pairs.push_back({a.g.dsts[i], off + b.g.srcs[i]});
  std::vector<int> map;
  LangGraph out;
  out.g = glue_pairs(par, pairs, map);
  out.g.srcs.clear();
  out.g.dsts.clear();
  for (int v : a.g.srcs) out.g.srcs.push_back(map[v]);
  for (int v : b.g.dsts) out.g.dsts.push_back(map[v + off]);

  for (const auto& bag : a.path.bags) out.path.bags.push_back(mapped_bag(bag, map, 0));
  for (const auto& bag : b.path.bags) out.path.bags.push_back(mapped_bag(bag, map, off));

  // new tree root: sources, targets, and every seam vertex; both old roots
  // become children. With <1,1> operands the bag is {s, m, t}, size <= 3.
  std::set<int> root_bag;
  for (int v : out.g.srcs) root_bag.insert(v);
  for (int v : out.g.dsts) root_bag.insert(v);
  for (auto& [x, y] : pairs) {
    root_bag.insert(map[x]);
    (void)y;
  }
  out.tree.bags.push_back({root_bag.begin(), root_bag.end()});
  out.tree.parent.push_back(-1);
  out.tree.root = 0;
  int toff = 1;
  for (size_t i = 0; i < a.tree.bags.size(); ++i) {
    out.tree.bags.push_back(mapped_bag(a.tree.bags[i], map, 0));
    int p = a.tree.parent[i];
    out.tree.parent.push_back(p < 0 ? 0 : p + toff);
  }
  int toff2 = toff + static_cast<int>(a.tree.bags.size());
  for (size_t i = 0; i < b.tree.bags.size(); ++i) {
    out.tree.bags.push_back(mapped_bag(b.tree.bags[i], map, off));
    int p = b.tree.parent[i];
    out.tree.parent.push_back(p < 0 ? 0 : p + toff2);
  }
  return out;
}

// intersection of <1,1> witnessed graphs: both sources glued, both targets
// glued (no extra edges).
//
// Path witness: run a's bags with the shared source pinned in, then b's bags
// with the shared target pinned in.  s's occurrences span all of phase one
// plus a prefix of phase two (its interval in b starts at b's first bag); t's
// span a suffix of phase one plus all of phase two.  Width is at most
// max(wa, wb) + 1 <= wa + wb since widths are >= 1.
LangGraph inter_w(const LangGraph& a, const LangGraph& b) {
  if (a.g.srcs.size() != 1 || a.g.dsts.size() != 1 || b.g.srcs.size() != 1 ||
      b.g.dsts.size() != 1)
    throw std::invalid_argument("inter: operands must have <1,1> interfaces");
  BiGraph par = parallel(a.g, b.g);
  int off = a.g.n;
  std::vector<std::pair<int, int>> pairs = {{a.g.srcs[0], off + b.g.srcs[0]},
                                            {a.g.dsts[0], off + b.g.dsts[0]}};
  std::vector<int> map;
  LangGraph out;
  out.g = glue_pairs(par, pairs, map);
  out.g.srcs = {map[a.g.srcs[0]]};
  out.g.dsts = {map[a.g.dsts[0]]};
  int s = out.g.srcs[0], t = out.g.dsts[0];

  for (const auto& bag : a.path.bags) {
    auto nb = mapped_bag(bag, map, 0);
    if (!std::binary_search(nb.begin(), nb.end(), s)) nb.insert(std::lower_bound(nb.begin(), nb.end(), s), s);
    out.path.bags.push_back(std::move(nb));
  }
  for (const auto& bag : b.path.bags) {
    auto nb = mapped_bag(bag, map, off);
    if (!std::binary_search(nb.begin(), nb.end(), t)) nb.insert(std::lower_bound(nb.begin(), nb.end(), t), t);
    out.path.bags.push_back(std::move(nb));
  }

  out.tree.bags.push_back(s == t ? std::vector<int>{s} : std::vector<int>{std::min(s, t), std::max(s, t)});
  out.tree.parent.push_back(-1);
  out.tree.root = 0;
  int toff = 1;
  for (size_t i = 0; i < a.tree.bags.size(); ++i) {
    out.tree.bags.push_back(mapped_bag(a.tree.bags[i], map, 0));
    int p = a.tree.parent[i];
    out.tree.parent.push_back(p < 0 ? 0 : p + toff);
  }
  int toff2 = toff + static_cast<int>(a.tree.bags.size());
  for (size_t i = 0; i < b.tree.bags.size(); ++i) {
    out.tree.bags.push_back(mapped_bag(b.tree.bags[i], map, off));
    int p = b.tree.parent[i];
    out.tree.parent.push_back(p < 0 ? 0 : p + toff2);
  }
  return out;
}

LangGraph mirror_w(const LangGraph& a) {
  LangGraph out;
  out.g = mirror(a.g);
  out.path.bags.assign(a.path.bags.rbegin(), a.path.bags.rend());
  out.tree = a.tree;  // root bag holds {source, target} either way round
  return out;
}

LangGraph leaf_w(const BiGraph& g) {
  LangGraph out;
  out.g = g;
  if (g.n == 1) {
    out.path.bags = {{0}};
    out.tree.bags = {{0}};
  } else if (g.edges.empty()) {  // two isolated vertices (the total relation)
    out.path.bags = {{0}, {1}};
    out.tree.bags = {{0, 1}};
  } else {
    out.path.bags = {{0, 1}};
    out.tree.bags = {{0, 1}};
  }
  out.tree.parent = {-1};
  out.tree.root = 0;
  return out;
}

void dedup_lang(std::vector<LangGraph>& gs) {
  std::map<std::string, std::vector<size_t>> buckets;
  std::vector<LangGraph> out;
  out.reserve(gs.size());
  for (auto& g : gs) {
    auto key = bigraph_bucket_key(g.g);
    bool dup = false;
    for (size_t idx : buckets[key])
      if (bigraph_isomorphic(g.g, out[idx].g)) {
        dup = true;
        break;
      }
    if (!dup) {
      buckets[key].push_back(out.size());
      out.push_back(std::move(g));
    }
  }
  gs = std::move(out);
}

std::vector<LangGraph> glang_rec(Term t, int depth, bool dedup) {
  std::vector<LangGraph> out;
  switch (t->op) {
    case Op::Var:
      out.push_back(leaf_w(BiGraph::single_edge(t->name)));
      break;
    case Op::One:
      out.push_back(leaf_w(BiGraph::identity(1)));
      break;
    case Op::Zero:
      break;
    case Op::Top: {
      BiGraph g;
      g.n = 2;
      g.srcs = {0};
      g.dsts = {1};
      out.push_back(leaf_w(g));
      break;
    }
    case Op::Seq: {
      auto l = glang_rec(t->a, depth, dedup);
      auto r = glang_rec(t->b, depth, dedup);
      for (const auto& x : l)
        for (const auto& y : r) out.push_back(series_w(x, y));
      break;
    }
    case Op::Plus: {
      out = glang_rec(t->a, depth, dedup);
      auto r = glang_rec(t->b, depth, dedup);
      std::move(r.begin(), r.end(), std::back_inserter(out));
      break;
    }
    case Op::Inter: {
      auto l = glang_rec(t->a, depth, dedup);
      auto r = glang_rec(t->b, depth, dedup);
      for (const auto& x : l)
        for (const auto& y : r) out.push_back(inter_w(x, y));
      break;
    }
    case Op::Conv: {
      for (auto& x : glang_rec(t->a, depth, dedup)) out.push_back(mirror_w(x));
      break;
    }
    case Op::Star: {
      auto base = glang_rec(t->a, depth, dedup);
      std::vector<LangGraph> level = {leaf_w(BiGraph::identity(1))};
      out = level;
      for (int i = 1; i <= depth; ++i) {
        std::vector<LangGraph> next;
        for (const auto& g : level)
          for (const auto& h : base) next.push_back(series_w(g, h));
        if (dedup) dedup_lang(next);
        if (next.empty()) break;
        level = std::move(next);
        for (const auto& g : level) out.push_back(g);
      }
      break;
    }
    case Op::TestNot:
      throw std::invalid_argument("glang: complemented tests are not supported");
  }
  if (dedup) dedup_lang(out);
  return out;
}

}  // namespace

std::vector<LangGraph> glang_witnessed(Term t, int star_depth, bool dedup) {
  return glang_rec(t, star_depth, dedup);
}

std::vector<BiGraph> glang(Term t, int star_depth, bool dedup) {
  std::vector<BiGraph> out;
  for (auto& g : glang_rec(t, star_depth, dedup)) out.push_back(std::move(g.g));
  return out;
}

// --------------------------------------------------------------------------
// witness checkers
// --------------------------------------------------------------------------

namespace {

bool fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

bool bags_cover(const BiGraph& g, const std::vector<std::vector<int>>& bags, int max_width,
                std::string* why) {
  std::vector<bool> seen(g.n, false);
  size_t widest = 0;
  for (const auto& bag : bags) {
    widest = std::max(widest, bag.size());
    for (int v : bag) {
      if (v < 0 || v >= g.n) return fail(why, "bag vertex out of range");
      seen[v] = true;
    }
  }
  for (int v = 0; v < g.n; ++v)
    if (!seen[v]) return fail(why, "vertex " + std::to_string(v) + " not covered");
  if (static_cast<int>(widest) - 1 > max_width)
    return fail(why, "width " + std::to_string(widest - 1) + " exceeds bound");
  for (const auto& e : g.edges) {
    std::vector<int> touch = e.src;
    touch.insert(touch.end(), e.dst.begin(), e.dst.end());
    bool covered = false;
    for (const auto& bag : bags) {
      bool all = true;
      for (int v : touch) all &= std::count(bag.begin(), bag.end(), v) > 0;
      if (all) {
        covered = true;
        break;
      }
    }
    if (!covered) return fail(why, "edge not inside any bag");
  }
  return true;
}

}  // namespace

bool check_path_witness(const BiGraph& g, const PathWitness& w, int max_width, std::string* why) {
  if (w.bags.empty()) return fail(why, "no bags");
  if (!bags_cover(g, w.bags, max_width, why)) return false;
  for (int v = 0; v < g.n; ++v) {
    int first = -1, last = -1;
    for (size_t i = 0; i < w.bags.size(); ++i)
      if (std::count(w.bags[i].begin(), w.bags[i].end(), v)) {
        if (first < 0) first = static_cast<int>(i);
        last = static_cast<int>(i);
      }
    for (int i = first; i <= last; ++i)
      if (!std::count(w.bags[i].begin(), w.bags[i].end(), v))
        return fail(why, "occurrence gap for vertex " + std::to_string(v));
  }
  for (int v : g.srcs)
    if (!std::count(w.bags.front().begin(), w.bags.front().end(), v))
      return fail(why, "first bag misses a source");
  for (int v : g.dsts)
    if (!std::count(w.bags.back().begin(), w.bags.back().end(), v))
      return fail(why, "last bag misses a target");
  return true;
}

bool check_tree_witness(const BiGraph& g, const TreeWitness& w, int max_width, std::string* why) {
  size_t nb = w.bags.size();
  if (nb == 0 || w.parent.size() != nb) return fail(why, "malformed tree");
  if (w.root < 0 || w.root >= static_cast<int>(nb) || w.parent[w.root] != -1)
    return fail(why, "bad root");
  for (size_t i = 0; i < nb; ++i) {
    if (static_cast<int>(i) == w.root) continue;
    int p = w.parent[i];
    if (p < 0 || p >= static_cast<int>(nb)) return fail(why, "bad parent pointer");
  }
  // parent pointers must reach the root (no cycles)
  for (size_t i = 0; i < nb; ++i) {
    int v = static_cast<int>(i), hops = 0;
    while (v != w.root) {
      v = w.parent[v];
      if (v < 0 || ++hops > static_cast<int>(nb)) return fail(why, "parent cycle");
    }
  }
  if (!bags_cover(g, w.bags, max_width, why)) return false;
  // per-vertex bags form a connected subtree: every bag containing v, other
  // than the v-minimal one, must have a parent containing v
  for (int v = 0; v < g.n; ++v) {
    std::vector<char> has(nb, 0);
    for (size_t i = 0; i < nb; ++i) has[i] = std::count(w.bags[i].begin(), w.bags[i].end(), v) > 0;
    int root_holder = -1;
    for (size_t i = 0; i < nb; ++i) {
      if (!has[i]) continue;
      if (static_cast<int>(i) == w.root || !has[w.parent[i]]) {
        if (root_holder >= 0) return fail(why, "disconnected bags for vertex " + std::to_string(v));
        root_holder = static_cast<int>(i);
      }
    }
  }
  for (int v : g.srcs)
    if (!std::count(w.bags[w.root].begin(), w.bags[w.root].end(), v))
      return fail(why, "root bag misses a source");
  for (int v : g.dsts)
    if (!std::count(w.bags[w.root].begin(), w.bags[w.root].end(), v))
      return fail(why, "root bag misses a target");
  return true;
}

// --------------------------------------------------------------------------
// run language
// --------------------------------------------------------------------------

namespace {

std::vector<BiGraph> run_rec(Term t, int depth, bool dedup) {
  std::vector<BiGraph> out;
  switch (t->op) {
    case Op::Var:
      out.push_back(BiGraph::single_edge(t->name));
      break;
    case Op::One:
      out.push_back(BiGraph::identity(1));
      break;
    case Op::Zero:
      break;
    case Op::Seq: {
      auto l = run_rec(t->a, depth, dedup);
      auto r = run_rec(t->b, depth, dedup);
      for (const auto& x : l)
        for (const auto& y : r) out.push_back(series(x, y));
      break;
    }
    case Op::Plus: {
      out = run_rec(t->a, depth, dedup);
      auto r = run_rec(t->b, depth, dedup);
      std::move(r.begin(), r.end(), std::back_inserter(out));
      break;
    }
    case Op::Inter: {
      auto l = run_rec(t->a, depth, dedup);
      auto r = run_rec(t->b, depth, dedup);
      for (const auto& x : l)
        for (const auto& y : r)
          out.push_back(series(series(BiGraph::fork_edge(), parallel(x, y)), BiGraph::join_edge()));
      break;
    }
    case Op::Star: {
      auto base = run_rec(t->a, depth, dedup);
      std::vector<BiGraph> level = {BiGraph::identity(1)};
      out = level;
      for (int i = 1; i <= depth; ++i) {
        std::vector<BiGraph> next;
        for (const auto& g : level)
          for (const auto& h : base) next.push_back(series(g, h));
        if (dedup) dedup_isomorphic(next);
        if (next.empty()) break;
        level = std::move(next);
        for (const auto& g : level) out.push_back(g);
      }
      break;
    }
    default:
      throw std::invalid_argument("run_lang: term must be star-intersection-kleene only");
  }
  if (dedup) dedup_isomorphic(out);
  return out;
}

}  // namespace

std::vector<BiGraph> run_lang(Term t, int star_depth, bool dedup) {
  return run_rec(t, star_depth, dedup);
}

// --------------------------------------------------------------------------
// word language
// --------------------------------------------------------------------------

namespace {

using WordSet = std::set<std::vector<int>>;

WordSet word_rec(Term t, int depth, const std::vector<int>& alphabet) {
  WordSet out;
  switch (t->op) {
    case Op::Var:
      out.insert(std::vector<int>{t->name});
      break;
    case Op::One:
      out.insert(std::vector<int>{});
      break;
    case Op::Zero:
      break;
    case Op::Top: {
      // all words of length <= depth over the whole term's alphabet
      std::vector<std::vector<int>> level = {{}};
      out.insert(std::vector<int>{});
      for (int i = 1; i <= depth; ++i) {
        std::vector<std::vector<int>> next;
        for (const auto& w : level)
          for (int a : alphabet) {
            auto w2 = w;
            w2.push_back(a);
            next.push_back(std::move(w2));
          }
        for (const auto& w : next) out.insert(w);
        level = std::move(next);
      }
      break;
    }
    case Op::Seq: {
      auto l = word_rec(t->a, depth, alphabet);
      auto r = word_rec(t->b, depth, alphabet);
      for (const auto& x : l)
        for (const auto& y : r) {
          auto w = x;
          w.insert(w.end(), y.begin(), y.end());
          out.insert(std::move(w));
        }
      break;
    }
    case Op::Plus: {
      out = word_rec(t->a, depth, alphabet);
      auto r = word_rec(t->b, depth, alphabet);
      out.insert(r.begin(), r.end());
      break;
    }
    case Op::Inter: {
      auto l = word_rec(t->a, depth, alphabet);
      auto r = word_rec(t->b, depth, alphabet);
      for (const auto& w : l)
        if (r.count(w)) out.insert(w);
      break;
    }
    case Op::Star: {
      auto base = word_rec(t->a, depth, alphabet);
      WordSet level = {{}};
      out.insert(std::vector<int>{});
      for (int i = 1; i <= depth; ++i) {
        WordSet next;
        for (const auto& x : level)
          for (const auto& y : base) {
            auto w = x;
            w.insert(w.end(), y.begin(), y.end());
            next.insert(std::move(w));
          }
        if (next.empty()) break;
        out.insert(next.begin(), next.end());
        level = std::move(next);
      }
      break;
    }
    default:
      throw std::invalid_argument("word_lang: converse/complement not supported");
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> word_lang(Term t, int star_depth) {
  std::vector<int> alphabet;
  for (const auto& name : term_variables(t)) alphabet.push_back(sym_id(name));
  auto set = word_rec(t, star_depth, alphabet);
  return {set.begin(), set.end()};
}

}  // namespace pcor
