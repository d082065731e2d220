#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pcor/graphs.hpp"

namespace pcor {

// --------------------------------------------------------------------------
// run invariants
// --------------------------------------------------------------------------

bool is_run(const BiGraph& g, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  // fan-in counts productions of a vertex (source-interface occurrences plus
  // edge-target tentacles), fan-out its consumptions; both must be exactly 1
  std::vector<int> in(g.n, 0), out(g.n, 0);
  for (int v : g.srcs) in[v]++;
  for (int v : g.dsts) out[v]++;
  for (const auto& e : g.edges) {
    for (int v : e.src) out[v]++;
    for (int v : e.dst) in[v]++;
    if (e.label == FORK && (e.src.size() != 1 || e.dst.size() != 2))
      return fail("fork arity");
    if (e.label == JOIN && (e.src.size() != 2 || e.dst.size() != 1))
      return fail("join arity");
    if (e.label >= 0 && (e.src.size() != 1 || e.dst.size() != 1))
      return fail("labeled edge arity");
  }
  for (int v = 0; v < g.n; ++v) {
    if (in[v] != 1) return fail("fan-in of vertex " + std::to_string(v) + " is " + std::to_string(in[v]));
    if (out[v] != 1) return fail("fan-out of vertex " + std::to_string(v) + " is " + std::to_string(out[v]));
  }
  // acyclicity of the edge-successor relation
  std::vector<std::vector<int>> succ(g.n);
  for (const auto& e : g.edges)
    for (int u : e.src)
      for (int v : e.dst) succ[u].push_back(v);
  std::vector<int> state(g.n, 0);  // 0 unseen, 1 active, 2 done
  std::function<bool(int)> dfs = [&](int v) {
    state[v] = 1;
    for (int w : succ[v]) {
      if (state[w] == 1) return false;
      if (state[w] == 0 && !dfs(w)) return false;
    }
    state[v] = 2;
    return true;
  };
  for (int v = 0; v < g.n; ++v)
    if (state[v] == 0 && !dfs(v)) return fail("cycle through vertex " + std::to_string(v));
  return true;
}

// --------------------------------------------------------------------------
// series-parallel shape of <1,1> runs
// --------------------------------------------------------------------------

namespace {

BiGraph induced_sub(const BiGraph& g, const std::vector<int>& verts,
                    const std::vector<int>& edge_ids, int s, int t) {
  std::vector<int> newid(g.n, -1);
  int next = 0;
  for (int v : verts) newid[v] = next++;
  BiGraph out;
  out.n = next;
  for (int ei : edge_ids) {
    BgEdge e = g.edges[ei];
    for (int& x : e.src) x = newid[x];
    for (int& x : e.dst) x = newid[x];
    out.edges.push_back(std::move(e));
  }
  out.srcs = {newid[s]};
  out.dsts = {newid[t]};
  return out;
}

bool sp_rec(const BiGraph& g) {
  int s = g.srcs[0], t = g.dsts[0];
  if (g.edges.empty()) return g.n == 1 && s == t;
  if (g.edges.size() == 1 && g.edges[0].label >= 0) {
    const auto& e = g.edges[0];
    return g.n == 2 && e.src[0] == s && e.dst[0] == t;
  }

  // series split: a vertex z such that everything either reaches z or is
  // reachable from z, with every edge wholly on one side
  std::vector<std::vector<int>> succ(g.n), pred(g.n);
  for (const auto& e : g.edges)
    for (int u : e.src)
      for (int v : e.dst) {
        succ[u].push_back(v);
        pred[v].push_back(u);
      }
  auto reach_set = [&](int z, const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(g.n, 0);
    std::vector<int> stack = {z};
    seen[z] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    return seen;
  };
  for (int z = 0; z < g.n; ++z) {
    auto before = reach_set(z, pred);  // vertices that reach z
    auto after = reach_set(z, succ);   // vertices z reaches
    bool proper = true;
    int cnt_b = 0, cnt_a = 0;
    for (int v = 0; v < g.n; ++v) {
      if (before[v] && after[v] && v != z) proper = false;
      if (!before[v] && !after[v]) proper = false;
      cnt_b += before[v];
      cnt_a += after[v];
    }
    if (!proper || cnt_b <= 1 || cnt_a <= 1) continue;
    std::vector<int> e1, e2;
    bool clean = true;
    for (size_t i = 0; i < g.edges.size() && clean; ++i) {
      const auto& e = g.edges[i];
      bool in_b = true, in_a = true;
      for (int v : e.src) {
        in_b &= static_cast<bool>(before[v]);
        in_a &= static_cast<bool>(after[v]);
      }
      for (int v : e.dst) {
        in_b &= static_cast<bool>(before[v]);
        in_a &= static_cast<bool>(after[v]);
      }
      if (in_b)
        e1.push_back(static_cast<int>(i));
      else if (in_a)
        e2.push_back(static_cast<int>(i));
      else
        clean = false;
    }
    if (!clean) continue;
    std::vector<int> v1, v2;
    for (int v = 0; v < g.n; ++v) {
      if (before[v]) v1.push_back(v);
      if (after[v]) v2.push_back(v);
    }
    if (sp_rec(induced_sub(g, v1, e1, s, z)) && sp_rec(induced_sub(g, v2, e2, z, t)))
      return true;
  }

  // parallel split: outermost fork/join bracket around two components
  int fi = -1, ji = -1;
  for (size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (e.label == FORK && e.src[0] == s) fi = static_cast<int>(i);
    if (e.label == JOIN && e.dst[0] == t) ji = static_cast<int>(i);
  }
  if (fi < 0 || ji < 0) return false;
  const auto& f = g.edges[fi];
  const auto& j = g.edges[ji];
  // undirected components of the middle
  std::vector<int> comp(g.n, -1);
  std::vector<std::vector<int>> adj(g.n);
  for (size_t i = 0; i < g.edges.size(); ++i) {
    if (static_cast<int>(i) == fi || static_cast<int>(i) == ji) continue;
    const auto& e = g.edges[i];
    std::vector<int> touch = e.src;
    touch.insert(touch.end(), e.dst.begin(), e.dst.end());
    for (size_t a = 0; a + 1 < touch.size(); ++a) {
      adj[touch[a]].push_back(touch[a + 1]);
      adj[touch[a + 1]].push_back(touch[a]);
    }
  }
  std::function<void(int, int)> paint = [&](int v, int c) {
    comp[v] = c;
    for (int w : adj[v])
      if (comp[w] < 0) paint(w, c);
  };
  if (f.dst[0] == f.dst[1]) return false;
  paint(f.dst[0], 0);
  if (comp[f.dst[1]] >= 0) return false;  // branches touch: not two components
  paint(f.dst[1], 1);
  if (comp[j.src[0]] != 0 || comp[j.src[1]] != 1) return false;
  std::vector<int> v1, v2, e1, e2;
  for (int v = 0; v < g.n; ++v) {
    if (comp[v] == 0) v1.push_back(v);
    if (comp[v] == 1) v2.push_back(v);
    if (comp[v] < 0 && v != s && v != t) return false;  // stray piece
  }
  for (size_t i = 0; i < g.edges.size(); ++i) {
    if (static_cast<int>(i) == fi || static_cast<int>(i) == ji) continue;
    int c = comp[g.edges[i].src[0]];
    if (c == 0)
      e1.push_back(static_cast<int>(i));
    else if (c == 1)
      e2.push_back(static_cast<int>(i));
    else
      return false;
  }
  return sp_rec(induced_sub(g, v1, e1, f.dst[0], j.src[0])) &&
         sp_rec(induced_sub(g, v2, e2, f.dst[1], j.src[1]));
}

}  // namespace

bool is_sp_run(const BiGraph& g) {
  if (g.srcs.size() != 1 || g.dsts.size() != 1) return false;
  if (!is_run(g)) return false;
  return sp_rec(g);
}

// --------------------------------------------------------------------------
// atomic decomposition
// --------------------------------------------------------------------------

BiGraph atomic_to_bigraph(const AtomicRun& a) {
  int before, after;  // identity strands left and right of the action
  switch (a.kind) {
    case AtomicRun::Var:
      before = a.pos - 1;
      after = a.width - a.pos;
      return parallel(parallel(BiGraph::identity(before), BiGraph::single_edge(a.label)),
                      BiGraph::identity(after));
    case AtomicRun::Fork:
      before = a.pos - 1;
      after = a.width - a.pos;
      return parallel(parallel(BiGraph::identity(before), BiGraph::fork_edge()),
                      BiGraph::identity(after));
    case AtomicRun::Join:
      before = a.pos - 1;
      after = a.width - a.pos;  // width is the target width for joins
      return parallel(parallel(BiGraph::identity(before), BiGraph::join_edge()),
                      BiGraph::identity(after));
  }
  throw std::logic_error("unreachable");
}

namespace {

// the shared frontier walk; labels != nullptr additionally tracks structure
// vertices along the frontier (for runs living on a structure)
std::vector<AtomicRun> decompose_impl(const BiGraph& g, const std::vector<int>* labels) {
  std::string why;
  if (!is_run(g, &why)) throw std::invalid_argument("decompose: not a run: " + why);
  std::vector<int> frontier = g.srcs;
  std::vector<int> lab;
  if (labels)
    for (int v : frontier) lab.push_back((*labels)[v]);
  std::vector<bool> used(g.edges.size(), false);
  std::vector<AtomicRun> out;
  size_t remaining = g.edges.size();

  auto pos_of = [&](int v) -> int {
    for (size_t i = 0; i < frontier.size(); ++i)
      if (frontier[i] == v) return static_cast<int>(i);
    return -1;
  };

  while (remaining > 0) {
    bool stepped = false;
    for (size_t ei = 0; ei < g.edges.size() && !stepped; ++ei) {
      if (used[ei]) continue;
      const auto& e = g.edges[ei];
      AtomicRun a;
      if (e.label >= 0) {
        int p = pos_of(e.src[0]);
        if (p < 0) continue;
        a.kind = AtomicRun::Var;
        a.label = e.label;
        a.width = static_cast<int>(frontier.size());
        a.pos = p + 1;
        if (labels) {
          a.src_labels = lab;
          a.tgt_label = (*labels)[e.dst[0]];
          lab[p] = a.tgt_label;
        }
        frontier[p] = e.dst[0];
      } else if (e.label == FORK) {
        int p = pos_of(e.src[0]);
        if (p < 0) continue;
        a.kind = AtomicRun::Fork;
        a.width = static_cast<int>(frontier.size());  // source width
        a.pos = p + 1;
        if (labels) a.src_labels = lab;
        frontier[p] = e.dst[0];
        frontier.insert(frontier.begin() + p + 1, e.dst[1]);
        if (labels) lab.insert(lab.begin() + p + 1, lab[p]);
      } else {  // JOIN: the two sources must sit at adjacent positions
        int p = pos_of(e.src[0]);
        if (p < 0 || p + 1 >= static_cast<int>(frontier.size()) || frontier[p + 1] != e.src[1])
          continue;
        a.kind = AtomicRun::Join;
        a.width = static_cast<int>(frontier.size()) - 1;  // target width
        a.pos = p + 1;
        frontier[p] = e.dst[0];
        frontier.erase(frontier.begin() + p + 1);
        if (labels) {
          lab.erase(lab.begin() + p + 1);
          a.src_labels = lab;  // target-side label vector, per convention
        }
      }
      used[ei] = true;
      remaining--;
      out.push_back(std::move(a));
      stepped = true;
    }
    if (!stepped) throw std::invalid_argument("decompose: stuck with edges remaining");
  }
  if (frontier != g.dsts) throw std::invalid_argument("decompose: frontier does not end at targets");
  return out;
}

}  // namespace

std::vector<AtomicRun> decompose_atomic(const BiGraph& run) { return decompose_impl(run, nullptr); }

// --------------------------------------------------------------------------
// left quotient
// --------------------------------------------------------------------------

namespace {

struct QuotientSearch {
  const BiGraph& r;
  const BiGraph& p;
  std::vector<int> phi;        // p vertex -> r vertex
  std::vector<bool> used_v;    // r vertices hit
  std::vector<int> edge_of;    // p edge -> r edge
  std::vector<bool> used_e;
  std::vector<BiGraph> found;

  QuotientSearch(const BiGraph& r_, const BiGraph& p_)
      : r(r_), p(p_), phi(p_.n, -1), used_v(r_.n, false), edge_of(p_.edges.size(), -1),
        used_e(r_.edges.size(), false) {}

  bool assign(int pv, int rv) {
    if (phi[pv] >= 0) return phi[pv] == rv;
    if (used_v[rv]) return false;
    phi[pv] = rv;
    used_v[rv] = true;
    return true;
  }

  void unassign(const std::vector<int>& touched) {
    for (int pv : touched) {
      used_v[phi[pv]] = false;
      phi[pv] = -1;
    }
  }

  void match_edges(size_t k) {
    if (k == p.edges.size()) {
      finish();
      return;
    }
    const auto& pe = p.edges[k];
    for (size_t ri = 0; ri < r.edges.size(); ++ri) {
      if (used_e[ri]) continue;
      const auto& re = r.edges[ri];
      if (re.label != pe.label || re.src.size() != pe.src.size() || re.dst.size() != pe.dst.size())
        continue;
      std::vector<int> touched;
      bool ok = true;
      auto bind = [&](int pv, int rv) {
        if (phi[pv] < 0) {
          if (used_v[rv]) return false;
          phi[pv] = rv;
          used_v[rv] = true;
          touched.push_back(pv);
          return true;
        }
        return phi[pv] == rv;
      };
      for (size_t i = 0; i < pe.src.size() && ok; ++i) ok = bind(pe.src[i], re.src[i]);
      for (size_t i = 0; i < pe.dst.size() && ok; ++i) ok = bind(pe.dst[i], re.dst[i]);
      if (ok) {
        used_e[ri] = true;
        edge_of[k] = static_cast<int>(ri);
        match_edges(k + 1);
        used_e[ri] = false;
        edge_of[k] = -1;
      }
      unassign(touched);
    }
  }

  // any p vertex not fixed by an edge or the interfaces (isolated interior
  // vertices) still needs an image; enumerate those, then validate
  void finish() {
    int free_pv = -1;
    for (int v = 0; v < p.n; ++v)
      if (phi[v] < 0) {
        free_pv = v;
        break;
      }
    if (free_pv >= 0) {
      for (int rv = 0; rv < r.n; ++rv) {
        if (used_v[rv]) continue;
        phi[free_pv] = rv;
        used_v[rv] = true;
        finish();
        used_v[rv] = false;
        phi[free_pv] = -1;
      }
      return;
    }
    validate();
  }

  void validate() {
    // vertices of p that persist into the remainder: exactly the targets
    std::vector<bool> persists(r.n, false);
    for (int v : p.dsts) persists[phi[v]] = true;
    std::vector<bool> consumed(r.n, false);
    for (int v = 0; v < p.n; ++v)
      if (!persists[phi[v]]) consumed[phi[v]] = true;
    for (int v : r.dsts)
      if (consumed[v]) return;
    for (size_t ri = 0; ri < r.edges.size(); ++ri) {
      if (used_e[ri]) continue;
      const auto& e = r.edges[ri];
      for (int v : e.src)
        if (consumed[v]) return;
      for (int v : e.dst)
        if (consumed[v]) return;
    }
    // build the remainder
    std::vector<int> newid(r.n, -1);
    int next = 0;
    for (int v = 0; v < r.n; ++v)
      if (!consumed[v]) newid[v] = next++;
    BiGraph s;
    s.n = next;
    for (size_t ri = 0; ri < r.edges.size(); ++ri) {
      if (used_e[ri]) continue;
      BgEdge e = r.edges[ri];
      for (int& x : e.src) x = newid[x];
      for (int& x : e.dst) x = newid[x];
      s.edges.push_back(std::move(e));
    }
    for (int v : p.dsts) s.srcs.push_back(newid[phi[v]]);
    for (int v : r.dsts) s.dsts.push_back(newid[v]);
    // recomposition must reproduce r exactly
    if (!bigraph_isomorphic(series(p, s), r)) return;
    for (const auto& g : found)
      if (bigraph_isomorphic(g, s)) return;
    found.push_back(std::move(s));
  }
};

}  // namespace

std::vector<BiGraph> left_quotient(const BiGraph& r, const BiGraph& p) {
  if (p.srcs.size() != r.srcs.size()) return {};
  QuotientSearch qs(r, p);
  bool ok = true;
  for (size_t i = 0; i < p.srcs.size() && ok; ++i) ok = qs.assign(p.srcs[i], r.srcs[i]);
  if (!ok) return {};
  qs.match_edges(0);
  return std::move(qs.found);
}

// --------------------------------------------------------------------------
// runs on structures
// --------------------------------------------------------------------------

BiGraph structure_run_target(const Structure& s, int x, int y) {
  BiGraph g;
  g.n = s.n();
  for (const auto& [name, rel] : s.rel)
    for (auto [i, j] : rel.pairs()) g.edges.push_back({sym_id(name), {i}, {j}});
  for (int z = 0; z < g.n; ++z) {
    g.edges.push_back({FORK, {z}, {z, z}});
    g.edges.push_back({JOIN, {z, z}, {z}});
  }
  g.srcs = {x};
  g.dsts = {y};
  return g;
}

std::vector<SRun> enumerate_sruns(const Structure& s, int x, int y, const BiGraph& run) {
  std::vector<SRun> out;
  BiGraph target = structure_run_target(s, x, y);
  for (auto& m : hom_all(run, target)) out.push_back({run, std::move(m)});
  return out;
}

std::vector<AtomicRun> decompose_atomic_srun(const SRun& r) {
  return decompose_impl(r.run, &r.map);
}

}  // namespace pcor
