#include "pcor/graphs.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pcor {

BiGraph BiGraph::single_edge(int label) {
  BiGraph g;
  g.n = 2;
  g.edges.push_back({label, {0}, {1}});
  g.srcs = {0};
  g.dsts = {1};
  return g;
}

BiGraph BiGraph::identity(int k) {
  BiGraph g;
  g.n = k;
  g.srcs.resize(k);
  std::iota(g.srcs.begin(), g.srcs.end(), 0);
  g.dsts = g.srcs;
  return g;
}

BiGraph BiGraph::fork_edge() {
  BiGraph g;
  g.n = 3;
  g.edges.push_back({FORK, {0}, {1, 2}});
  g.srcs = {0};
  g.dsts = {1, 2};
  return g;
}

BiGraph BiGraph::join_edge() {
  BiGraph g;
  g.n = 3;
  g.edges.push_back({JOIN, {0, 1}, {2}});
  g.srcs = {0, 1};
  g.dsts = {2};
  return g;
}

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

void remap(std::vector<int>& v, const std::vector<int>& m) {
  for (int& x : v) x = m[x];
}

}  // namespace

// series glues g1's target interface to g2's source interface pointwise; the
// vertex merging is done with a union-find and vertices are renumbered by
// smallest representative, so results are deterministic
BiGraph series(const BiGraph& g1, const BiGraph& g2) {
  if (g1.dsts.size() != g2.srcs.size())
    throw std::invalid_argument("series: interface arity mismatch");
  int off = g1.n;
  UnionFind uf(g1.n + g2.n);
  for (size_t i = 0; i < g1.dsts.size(); ++i) uf.unite(g1.dsts[i], off + g2.srcs[i]);

  std::vector<int> newid(g1.n + g2.n, -1);
  int next = 0;
  for (int v = 0; v < g1.n + g2.n; ++v)
    if (uf.find(v) == v) newid[v] = next++;
  for (int v = 0; v < g1.n + g2.n; ++v) newid[v] = newid[uf.find(v)];

  BiGraph g;
  g.n = next;
  for (const auto& e : g1.edges) {
    BgEdge f = e;
    remap(f.src, newid);
    remap(f.dst, newid);
    g.edges.push_back(std::move(f));
  }
  for (const auto& e : g2.edges) {
    BgEdge f = e;
    for (int& x : f.src) x = newid[x + off];
    for (int& x : f.dst) x = newid[x + off];
    g.edges.push_back(std::move(f));
  }
  g.srcs = g1.srcs;
  remap(g.srcs, newid);
  g.dsts = g2.dsts;
  for (int& x : g.dsts) x = newid[x + off];
  return g;
}

BiGraph parallel(const BiGraph& g1, const BiGraph& g2) {
  BiGraph g = g1;
  int off = g1.n;
  g.n += g2.n;
  for (const auto& e : g2.edges) {
    BgEdge f = e;
    for (int& x : f.src) x += off;
    for (int& x : f.dst) x += off;
    g.edges.push_back(std::move(f));
  }
  for (int x : g2.srcs) g.srcs.push_back(x + off);
  for (int x : g2.dsts) g.dsts.push_back(x + off);
  return g;
}

BiGraph mirror(const BiGraph& g) {
  BiGraph m = g;
  std::swap(m.srcs, m.dsts);
  return m;
}

// --------------------------------------------------------------------------
// homomorphism and isomorphism
// --------------------------------------------------------------------------

namespace {

// backtracking over vertex assignments in a static order (interface vertices
// first, then BFS along edges); an edge is checked once fully assigned
struct HomSearch {
  const BiGraph& g;
  const BiGraph& h;
  bool injective;        // isomorphism mode: bijective vertices + edge bijection
  std::vector<int> map;  // g vertex -> h vertex, -1 unset
  std::vector<bool> used_h;
  std::vector<int> order;

  HomSearch(const BiGraph& g_, const BiGraph& h_, bool inj)
      : g(g_), h(h_), injective(inj), map(g_.n, -1), used_h(h_.n, false) {
    std::vector<bool> seen(g.n, false);
    auto push = [&](int v) {
      if (v >= 0 && v < g.n && !seen[v]) {
        seen[v] = true;
        order.push_back(v);
      }
    };
    for (int v : g.srcs) push(v);
    for (int v : g.dsts) push(v);
    // crude BFS over edge incidence from the already-ordered seeds
    for (size_t i = 0; i < order.size(); ++i) {
      int v = order[i];
      for (const auto& e : g.edges) {
        bool touches = false;
        for (int x : e.src) touches |= (x == v);
        for (int x : e.dst) touches |= (x == v);
        if (!touches) continue;
        for (int x : e.src) push(x);
        for (int x : e.dst) push(x);
      }
    }
    for (int v = 0; v < g.n; ++v) push(v);  // isolated vertices
  }

  bool edge_ok(const BgEdge& e) const {
    bool full = true;
    for (int x : e.src) full &= (map[x] >= 0);
    for (int x : e.dst) full &= (map[x] >= 0);
    if (!full) return true;  // checked later
    for (const auto& f : h.edges) {
      if (f.label != e.label || f.src.size() != e.src.size() || f.dst.size() != e.dst.size())
        continue;
      bool ok = true;
      for (size_t i = 0; i < e.src.size() && ok; ++i) ok &= (map[e.src[i]] == f.src[i]);
      for (size_t i = 0; i < e.dst.size() && ok; ++i) ok &= (map[e.dst[i]] == f.dst[i]);
      if (ok) return true;
    }
    return false;
  }

  bool consistent(int v) const {
    for (const auto& e : g.edges) {
      bool touches = false;
      for (int x : e.src) touches |= (x == v);
      for (int x : e.dst) touches |= (x == v);
      if (touches && !edge_ok(e)) return false;
    }
    return true;
  }

  template <typename Fn>
  bool search(size_t k, Fn&& accept) {
    if (k == order.size()) return accept(map);
    int v = order[k];
    if (map[v] >= 0) return search(k + 1, accept);
    for (int w = 0; w < h.n; ++w) {
      if (injective && used_h[w]) continue;
      map[v] = w;
      if (injective) used_h[w] = true;
      if (consistent(v) && search(k + 1, accept)) return true;
      if (injective) used_h[w] = false;
      map[v] = -1;
    }
    return false;
  }
};

std::string edge_code(const BgEdge& e, const std::vector<int>& map) {
  std::ostringstream os;
  os << e.label << ':';
  for (int x : e.src) os << map[x] << ',';
  os << '>';
  for (int x : e.dst) os << map[x] << ',';
  return os.str();
}

bool edges_bijective(const BiGraph& a, const BiGraph& b, const std::vector<int>& map) {
  if (a.edges.size() != b.edges.size()) return false;
  std::vector<int> self(b.n);
  std::iota(self.begin(), self.end(), 0);
  std::multiset<std::string> ea, eb;
  for (const auto& e : a.edges) ea.insert(edge_code(e, map));
  for (const auto& e : b.edges) eb.insert(edge_code(e, self));
  return ea == eb;
}

}  // namespace

bool hom_exists(const BiGraph& g, const BiGraph& h) {
  if (g.srcs.size() != h.srcs.size() || g.dsts.size() != h.dsts.size()) return false;
  HomSearch s(g, h, /*inj=*/false);
  // pin the interfaces before searching
  for (size_t i = 0; i < g.srcs.size(); ++i) {
    int v = g.srcs[i], w = h.srcs[i];
    if (s.map[v] >= 0 && s.map[v] != w) return false;
    s.map[v] = w;
  }
  for (size_t i = 0; i < g.dsts.size(); ++i) {
    int v = g.dsts[i], w = h.dsts[i];
    if (s.map[v] >= 0 && s.map[v] != w) return false;
    s.map[v] = w;
  }
  for (int v = 0; v < g.n; ++v)
    if (s.map[v] >= 0 && !s.consistent(v)) return false;
  return s.search(0, [](const std::vector<int>&) { return true; });
}

std::vector<std::vector<int>> hom_all(const BiGraph& g, const BiGraph& h) {
  std::vector<std::vector<int>> out;
  if (g.srcs.size() != h.srcs.size() || g.dsts.size() != h.dsts.size()) return out;
  HomSearch s(g, h, /*inj=*/false);
  for (size_t i = 0; i < g.srcs.size(); ++i) {
    int v = g.srcs[i], w = h.srcs[i];
    if (s.map[v] >= 0 && s.map[v] != w) return out;
    s.map[v] = w;
  }
  for (size_t i = 0; i < g.dsts.size(); ++i) {
    int v = g.dsts[i], w = h.dsts[i];
    if (s.map[v] >= 0 && s.map[v] != w) return out;
    s.map[v] = w;
  }
  for (int v = 0; v < g.n; ++v)
    if (s.map[v] >= 0 && !s.consistent(v)) return out;
  s.search(0, [&](const std::vector<int>& m) {
    out.push_back(m);
    return false;  // keep enumerating
  });
  return out;
}

bool bigraph_isomorphic(const BiGraph& a, const BiGraph& b) {
  if (a.n != b.n || a.edges.size() != b.edges.size()) return false;
  if (a.srcs.size() != b.srcs.size() || a.dsts.size() != b.dsts.size()) return false;
  HomSearch s(a, b, /*inj=*/true);
  for (size_t i = 0; i < a.srcs.size(); ++i) {
    int v = a.srcs[i], w = b.srcs[i];
    if (s.map[v] >= 0 && s.map[v] != w) return false;
    if (s.used_h[w] && s.map[v] != w) return false;
    s.map[v] = w;
    s.used_h[w] = true;
  }
  for (size_t i = 0; i < a.dsts.size(); ++i) {
    int v = a.dsts[i], w = b.dsts[i];
    if (s.map[v] >= 0) {
      if (s.map[v] != w) return false;
      continue;
    }
    if (s.used_h[w]) return false;
    s.map[v] = w;
    s.used_h[w] = true;
  }
  for (int v = 0; v < a.n; ++v)
    if (s.map[v] >= 0 && !s.consistent(v)) return false;
  return s.search(0, [&](const std::vector<int>& m) { return edges_bijective(a, b, m); });
}

std::string bigraph_bucket_key(const BiGraph& g) {
  // invariants only: vertex/edge counts, interface arities, per-label edge
  // counts, sorted (in,out) degree profile
  std::map<int, int> label_count;
  std::vector<std::pair<int, int>> deg(g.n, {0, 0});
  for (const auto& e : g.edges) {
    label_count[e.label]++;
    for (int x : e.src) deg[x].second++;
    for (int x : e.dst) deg[x].first++;
  }
  for (int v : g.srcs) deg[v].first++;
  for (int v : g.dsts) deg[v].second++;
  std::sort(deg.begin(), deg.end());
  std::ostringstream os;
  os << g.n << '|' << g.srcs.size() << '|' << g.dsts.size() << '|';
  for (auto& [l, c] : label_count) os << l << ':' << c << ',';
  os << '|';
  for (auto& [i, o] : deg) os << i << '/' << o << ' ';
  return os.str();
}

void dedup_isomorphic(std::vector<BiGraph>& gs) {
  std::map<std::string, std::vector<size_t>> buckets;
  std::vector<BiGraph> out;
  out.reserve(gs.size());
  for (auto& g : gs) {
    auto key = bigraph_bucket_key(g);
    bool dup = false;
    for (size_t idx : buckets[key])
      if (bigraph_isomorphic(g, out[idx])) {
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

std::string bigraph_to_dot(const BiGraph& g, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << name << " {\n  rankdir=LR;\n";
  std::vector<std::string> marks(g.n);
  for (size_t i = 0; i < g.srcs.size(); ++i)
    marks[g.srcs[i]] += " s" + std::to_string(i + 1);
  for (size_t i = 0; i < g.dsts.size(); ++i)
    marks[g.dsts[i]] += " t" + std::to_string(i + 1);
  for (int v = 0; v < g.n; ++v) {
    os << "  v" << v << " [label=\"" << v << marks[v] << "\"";
    if (!marks[v].empty()) os << ", shape=doublecircle";
    os << "];\n";
  }
  int hyper = 0;
  for (const auto& e : g.edges) {
    std::string label = e.label == FORK ? "f" : e.label == JOIN ? "j" : sym_name(e.label);
    if (e.src.size() == 1 && e.dst.size() == 1) {
      os << "  v" << e.src[0] << " -> v" << e.dst[0] << " [label=\"" << label << "\"];\n";
    } else {
      std::string hub = "e" + std::to_string(hyper++);
      os << "  " << hub << " [label=\"" << label << "\", shape=box];\n";
      for (size_t i = 0; i < e.src.size(); ++i)
        os << "  v" << e.src[i] << " -> " << hub << " [label=\"" << (i + 1) << "\"];\n";
      for (size_t i = 0; i < e.dst.size(); ++i)
        os << "  " << hub << " -> v" << e.dst[i] << " [label=\"" << (i + 1) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string bigraph_to_json(const BiGraph& g) {
  nlohmann::ordered_json j;
  j["vertices"] = g.n;
  j["sources"] = g.srcs;
  j["targets"] = g.dsts;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    nlohmann::ordered_json je;
    je["label"] = e.label == FORK ? "f" : e.label == JOIN ? "j" : sym_name(e.label);
    je["src"] = e.src;
    je["dst"] = e.dst;
    edges.push_back(je);
  }
  j["edges"] = edges;
  return j.dump();
}

Structure bigraph_as_structure(const BiGraph& g, const std::vector<std::string>& extra_names) {
  Structure s;
  for (int v = 0; v < g.n; ++v) s.universe.push_back("v" + std::to_string(v));
  for (const auto& e : g.edges) {
    if (e.label < 0) throw std::invalid_argument("bigraph_as_structure: fork/join edge");
    s.ensure_name(sym_name(e.label));
    s.rel[sym_name(e.label)].set(e.src[0], e.dst[0], true);
  }
  for (const auto& name : extra_names) s.ensure_name(name);
  return s;
}

}  // namespace pcor
