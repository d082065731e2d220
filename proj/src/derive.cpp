#include "pcor/derive.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace pcor {

// ---------------------------------------------------------------------------
// hash-consing (same scheme as the term pool)
// ---------------------------------------------------------------------------

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

struct LKey {
  LOp op;
  int32_t label;
  Term term;
  LTerm a;
  LTerm b;
  bool operator==(const LKey& o) const {
    return op == o.op && label == o.label && term == o.term && a == o.a && b == o.b;
  }
};

struct LKeyHash {
  size_t operator()(const LKey& k) const {
    uint64_t h = static_cast<uint64_t>(k.op);
    h = mix(h, static_cast<uint64_t>(static_cast<uint32_t>(k.label)));
    h = mix(h, reinterpret_cast<uintptr_t>(k.term));
    h = mix(h, reinterpret_cast<uintptr_t>(k.a));
    h = mix(h, reinterpret_cast<uintptr_t>(k.b));
    return static_cast<size_t>(h);
  }
};

struct LInterner {
  std::mutex mu;
  std::unordered_map<LKey, LTerm, LKeyHash> table;
  std::deque<LTermNode> pool;
};

LInterner& linterner() {
  static LInterner i;
  return i;
}

LTerm intern(LOp op, int32_t label, Term term, LTerm a, LTerm b) {
  auto& in = linterner();
  LKey key{op, label, term, a, b};
  std::lock_guard<std::mutex> lk(in.mu);
  auto it = in.table.find(key);
  if (it != in.table.end()) return it->second;

  LTermNode n;
  n.op = op;
  n.label = label;
  n.term = term;
  n.a = a;
  n.b = b;
  switch (op) {
    case LOp::LAt: n.width = 1; break;
    case LOp::LSeq: n.width = a->width; break;
    case LOp::LInter: n.width = a->width + b->width; break;
    case LOp::LBot: n.width = 0; break;
  }
  uint64_t h = static_cast<uint64_t>(op);
  h = mix(h, static_cast<uint64_t>(static_cast<uint32_t>(label)));
  h = mix(h, term ? term->hash : 0);
  h = mix(h, a ? a->hash : 0);
  h = mix(h, b ? b->hash : 0);
  n.hash = h;
  n.id = in.pool.size();

  in.pool.push_back(n);
  LTerm out = &in.pool.back();
  in.table.emplace(key, out);
  return out;
}

}  // namespace

LTerm mk_at(int32_t label, Term t) {
  if (!t->kl)
    throw std::invalid_argument("labeled terms embed star-intersection-kleene terms only");
  return intern(LOp::LAt, label, t, nullptr, nullptr);
}

LTerm mk_seq1(LTerm a, Term t) {
  // (@z.1) ;1 t and @z.t step and accept identically; fold to the anchored
  // form so reachable sets match the short notation used in examples. The
  // bare-0 stand-in has no anchored counterpart, hence the exception.
  if (a->op == LOp::LAt && a->term->op == Op::One && t->op != Op::Zero)
    return mk_at(a->label, t);
  if (!t->kl)
    throw std::invalid_argument("labeled terms embed star-intersection-kleene terms only");
  return intern(LOp::LSeq, -1, t, a, nullptr);
}

LTerm mk_inter1(LTerm a, LTerm b) { return intern(LOp::LInter, -1, nullptr, a, b); }

LTerm mk_lbot() { return intern(LOp::LBot, -1, nullptr, nullptr, nullptr); }

// ---------------------------------------------------------------------------
// label bookkeeping
// ---------------------------------------------------------------------------

namespace {

void collect_labels(LTerm l, std::vector<int32_t>& out) {
  switch (l->op) {
    case LOp::LAt: out.push_back(l->label); return;
    case LOp::LSeq: collect_labels(l->a, out); return;
    case LOp::LInter:
      collect_labels(l->a, out);
      collect_labels(l->b, out);
      return;
    case LOp::LBot: return;
  }
}

}  // namespace

std::vector<int32_t> label_vector(LTerm l) {
  std::vector<int32_t> out;
  out.reserve(l->width);
  collect_labels(l, out);
  return out;
}

LTerm relabel(LTerm l, int pos, int32_t label) {
  if (pos < 1 || pos > static_cast<int>(l->width))
    throw std::out_of_range("relabel: no such label position");
  switch (l->op) {
    case LOp::LAt: return mk_at(label, l->term);
    case LOp::LSeq: return intern(LOp::LSeq, -1, l->term, relabel(l->a, pos, label), nullptr);
    case LOp::LInter: {
      int wa = static_cast<int>(l->a->width);
      if (pos <= wa) return mk_inter1(relabel(l->a, pos, label), l->b);
      return mk_inter1(l->a, relabel(l->b, pos - wa, label));
    }
    case LOp::LBot: break;
  }
  throw std::out_of_range("relabel: no such label position");
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

namespace {

std::string label_str(int32_t lab, const Structure* s) {
  if (s && lab >= 0 && lab < s->n()) return s->universe[lab];
  return std::to_string(lab);
}

void render_l(LTerm l, const Structure* s, std::string& out) {
  switch (l->op) {
    case LOp::LAt: {
      out += '@';
      out += label_str(l->label, s);
      out += '.';
      bool par = l->term->op == Op::Seq || l->term->op == Op::Plus || l->term->op == Op::Inter;
      if (par) out += '(';
      out += render_term(l->term);
      if (par) out += ')';
      return;
    }
    case LOp::LSeq: {
      bool par = l->a->op == LOp::LInter;
      if (par) out += '(';
      render_l(l->a, s, out);
      if (par) out += ')';
      out += " ;1 ";
      bool tpar = l->term->op == Op::Seq || l->term->op == Op::Plus || l->term->op == Op::Inter;
      if (tpar) out += '(';
      out += render_term(l->term);
      if (tpar) out += ')';
      return;
    }
    case LOp::LInter: {
      bool pa = l->a->op == LOp::LSeq || l->a->op == LOp::LInter;
      if (pa) out += '(';
      render_l(l->a, s, out);
      if (pa) out += ')';
      out += " &1 ";
      bool pb = l->b->op == LOp::LSeq || l->b->op == LOp::LInter;
      if (pb) out += '(';
      render_l(l->b, s, out);
      if (pb) out += ')';
      return;
    }
    case LOp::LBot: out += '0'; return;
  }
}

}  // namespace

std::string render_lterm(LTerm l) {
  std::string out;
  render_l(l, nullptr, out);
  return out;
}

std::string render_lterm(LTerm l, const Structure& s) {
  std::string out;
  render_l(l, &s, out);
  return out;
}

// ---------------------------------------------------------------------------
// the empty-run test
// ---------------------------------------------------------------------------

namespace {

// eps at z for the anchored term @x.t, without building nodes
bool eps_at(int32_t z, int32_t x, Term t) {
  switch (t->op) {
    case Op::Var:
    case Op::Zero:
    case Op::Inter:
      return false;
    case Op::One:
    case Op::Star:
      return x == z;
    case Op::Seq:
      return eps_at(z, x, t->a) && eps_at(z, z, t->b);
    case Op::Plus:
      return eps_at(z, x, t->a) || eps_at(z, x, t->b);
    default:
      throw std::invalid_argument("eps: star-intersection-kleene terms only");
  }
}

}  // namespace

bool eps(int32_t z, LTerm l) {
  switch (l->op) {
    case LOp::LAt: return eps_at(z, l->label, l->term);
    case LOp::LSeq: return eps(z, l->a) && eps_at(z, z, l->term);
    case LOp::LInter:
    case LOp::LBot: return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// closure
// ---------------------------------------------------------------------------

namespace {

struct LIdLess {
  bool operator()(LTerm a, LTerm b) const { return a->id < b->id; }
};

using LSet = std::set<LTerm, LIdLess>;

LSet cl_term(Term t, const std::vector<int32_t>& labels);

LSet cl_lterm(LTerm l, const std::vector<int32_t>& labels) {
  LSet out;
  switch (l->op) {
    case LOp::LAt:
      return cl_term(l->term, labels);
    case LOp::LSeq: {
      for (LTerm m : cl_lterm(l->a, labels)) out.insert(mk_seq1(m, l->term));
      for (LTerm m : cl_term(l->term, labels)) out.insert(m);
      return out;
    }
    case LOp::LInter: {
      for (int32_t z : labels) out.insert(mk_at(z, mk_one()));
      LSet ca = cl_lterm(l->a, labels);
      LSet cb = cl_lterm(l->b, labels);
      for (LTerm ma : ca)
        for (LTerm mb : cb) out.insert(mk_inter1(ma, mb));
      return out;
    }
    case LOp::LBot:
      out.insert(mk_lbot());
      return out;
  }
  return out;
}

LSet cl_term(Term t, const std::vector<int32_t>& labels) {
  LSet out;
  switch (t->op) {
    case Op::Var:
      for (int32_t z : labels) {
        out.insert(mk_at(z, t));
        out.insert(mk_at(z, mk_one()));
      }
      break;
    case Op::One:
      for (int32_t z : labels) out.insert(mk_at(z, t));
      break;
    case Op::Zero:
      // the bare term, not an anchored one; see mk_lbot
      out.insert(mk_lbot());
      break;
    case Op::Seq: {
      for (int32_t z : labels) out.insert(mk_at(z, t));
      for (LTerm m : cl_term(t->a, labels)) out.insert(mk_seq1(m, t->b));
      for (LTerm m : cl_term(t->b, labels)) out.insert(m);
      break;
    }
    case Op::Plus: {
      for (int32_t z : labels) out.insert(mk_at(z, t));
      for (LTerm m : cl_term(t->a, labels)) out.insert(m);
      for (LTerm m : cl_term(t->b, labels)) out.insert(m);
      break;
    }
    case Op::Star: {
      for (int32_t z : labels) out.insert(mk_at(z, t));
      for (LTerm m : cl_term(t->a, labels)) out.insert(mk_seq1(m, t));
      break;
    }
    case Op::Inter: {
      for (int32_t z : labels) {
        out.insert(mk_at(z, t));
        out.insert(mk_at(z, mk_one()));
      }
      LSet ca = cl_term(t->a, labels);
      LSet cb = cl_term(t->b, labels);
      for (LTerm ma : ca)
        for (LTerm mb : cb) out.insert(mk_inter1(ma, mb));
      break;
    }
    default:
      throw std::invalid_argument("closure: star-intersection-kleene terms only");
  }
  return out;
}

}  // namespace

std::vector<LTerm> closure(Term t, const std::vector<int32_t>& labels) {
  LSet s = cl_term(t, labels);
  return {s.begin(), s.end()};
}

std::vector<LTerm> closure(LTerm l, const std::vector<int32_t>& labels) {
  LSet s = cl_lterm(l, labels);
  return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------
// one-step derivatives
// ---------------------------------------------------------------------------

namespace {

// pad an atomic run with identity wires carrying `labs` on the right/left;
// Join descriptors store the post-step vector, which padding extends the
// same way since the padded wires keep their labels
AtomicRun pad_right(AtomicRun a, const std::vector<int32_t>& labs) {
  a.width += static_cast<int>(labs.size());
  for (int32_t z : labs) a.src_labels.push_back(z);
  return a;
}

AtomicRun pad_left(const std::vector<int32_t>& labs, AtomicRun a) {
  a.width += static_cast<int>(labs.size());
  a.pos += static_cast<int>(labs.size());
  a.src_labels.insert(a.src_labels.begin(), labs.begin(), labs.end());
  return a;
}

void emit(std::vector<DeriveStep>& out, AtomicRun run, LTerm to) {
  for (const auto& d : out)
    if (d.to == to && d.run == run) return;
  out.push_back({std::move(run), to});
}

void step_rec(const Structure& s, LTerm l, std::vector<DeriveStep>& out);

void step_at(const Structure& s, int32_t x, Term t, std::vector<DeriveStep>& out) {
  switch (t->op) {
    case Op::Var: {
      const BitRel* r = s.find(sym_name(t->name));
      for (int y = 0; y < s.n(); ++y)
        if (r && r->get(x, y)) {
          AtomicRun a;
          a.kind = AtomicRun::Var;
          a.label = t->name;
          a.width = 1;
          a.pos = 1;
          a.src_labels = {x};
          a.tgt_label = y;
          emit(out, std::move(a), mk_at(y, mk_one()));
        }
      return;
    }
    case Op::One:
    case Op::Zero:
      return;
    case Op::Seq: {
      std::vector<DeriveStep> left;
      step_at(s, x, t->a, left);
      for (auto& d : left) emit(out, std::move(d.run), mk_seq1(d.to, t->b));
      for (int32_t z = 0; z < s.n(); ++z)
        if (eps_at(z, x, t->a)) step_at(s, z, t->b, out);
      return;
    }
    case Op::Plus:
      step_at(s, x, t->a, out);
      step_at(s, x, t->b, out);
      return;
    case Op::Star: {
      std::vector<DeriveStep> inner;
      step_at(s, x, t->a, inner);
      for (auto& d : inner) emit(out, std::move(d.run), mk_seq1(d.to, t));
      return;
    }
    case Op::Inter: {
      AtomicRun a;
      a.kind = AtomicRun::Fork;
      a.width = 1;
      a.pos = 1;
      a.src_labels = {x};
      emit(out, std::move(a), mk_inter1(mk_at(x, t->a), mk_at(x, t->b)));
      return;
    }
    default:
      throw std::invalid_argument("step: star-intersection-kleene terms only");
  }
}

void step_rec(const Structure& s, LTerm l, std::vector<DeriveStep>& out) {
  switch (l->op) {
    case LOp::LAt:
      step_at(s, l->label, l->term, out);
      return;
    case LOp::LSeq: {
      std::vector<DeriveStep> left;
      step_rec(s, l->a, left);
      for (auto& d : left) emit(out, std::move(d.run), mk_seq1(d.to, l->term));
      for (int32_t z = 0; z < s.n(); ++z)
        if (eps(z, l->a)) step_at(s, z, l->term, out);
      return;
    }
    case LOp::LInter: {
      std::vector<int32_t> la = label_vector(l->a);
      std::vector<int32_t> lb = label_vector(l->b);
      std::vector<DeriveStep> part;
      step_rec(s, l->a, part);
      for (auto& d : part) emit(out, pad_right(std::move(d.run), lb), mk_inter1(d.to, l->b));
      part.clear();
      step_rec(s, l->b, part);
      for (auto& d : part) emit(out, pad_left(la, std::move(d.run)), mk_inter1(l->a, d.to));
      for (int32_t z = 0; z < s.n(); ++z)
        if (eps(z, l->a) && eps(z, l->b)) {
          AtomicRun a;
          a.kind = AtomicRun::Join;
          a.width = 1;  // target side
          a.pos = 1;
          a.src_labels = {z};
          emit(out, std::move(a), mk_at(z, mk_one()));
        }
      return;
    }
    case LOp::LBot:
      return;
  }
}

}  // namespace

std::vector<DeriveStep> step(const Structure& s, LTerm l) {
  std::vector<DeriveStep> out;
  step_rec(s, l, out);
  return out;
}

// ---------------------------------------------------------------------------
// reachability
// ---------------------------------------------------------------------------

namespace {

struct ReachCache {
  std::mutex mu;
  std::map<std::pair<std::string, LTerm>, std::shared_ptr<const std::vector<LTerm>>> memo;
};

ReachCache& reach_cache() {
  static ReachCache c;
  return c;
}

std::vector<LTerm> reach_bfs(const Structure& s, LTerm l) {
  LSet seen;
  seen.insert(l);
  std::queue<LTerm> work;
  work.push(l);
  while (!work.empty()) {
    LTerm cur = work.front();
    work.pop();
    for (const auto& d : step(s, cur))
      if (seen.insert(d.to).second) work.push(d.to);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

std::vector<LTerm> reach(const Structure& s, LTerm l) {
  auto key = std::make_pair(s.canonical_bytes(), l);
  auto& c = reach_cache();
  {
    std::lock_guard<std::mutex> lk(c.mu);
    auto it = c.memo.find(key);
    if (it != c.memo.end()) return *it->second;
  }
  auto result = std::make_shared<const std::vector<LTerm>>(reach_bfs(s, l));
  std::lock_guard<std::mutex> lk(c.mu);
  auto [it, fresh] = c.memo.emplace(std::move(key), result);
  (void)fresh;  // concurrent compute of the same key yields equal vectors
  return *it->second;
}

// ---------------------------------------------------------------------------
// derived semantics
// ---------------------------------------------------------------------------

Structure with_isolated(const Structure& s) {
  Structure out;
  out.universe = s.universe;
  std::string fresh = "*";
  while (out.vertex(fresh) >= 0) fresh += "*";
  out.universe.push_back(fresh);
  for (const auto& [name, r] : s.rel) {
    BitRel grown(out.n());
    for (auto [i, j] : r.pairs()) grown.set(i, j, true);
    out.rel[name] = std::move(grown);
  }
  return out;
}

std::optional<std::vector<DeriveStep>> derivation_to(const Structure& s, LTerm start,
                                                     int32_t accept) {
  std::map<LTerm, std::pair<LTerm, DeriveStep>, LIdLess> parent;
  LSet seen;
  seen.insert(start);
  std::queue<LTerm> work;
  work.push(start);
  LTerm goal = nullptr;
  if (eps(accept, start)) goal = start;
  while (!work.empty() && !goal) {
    LTerm cur = work.front();
    work.pop();
    for (const auto& d : step(s, cur)) {
      if (!seen.insert(d.to).second) continue;
      parent.emplace(d.to, std::make_pair(cur, d));
      if (eps(accept, d.to)) {
        goal = d.to;
        break;
      }
      work.push(d.to);
    }
  }
  if (!goal) return std::nullopt;
  std::vector<DeriveStep> path;
  for (LTerm cur = goal; cur != start;) {
    auto it = parent.find(cur);
    path.push_back(it->second.second);
    cur = it->second.first;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

BitRel semantics_via_derivatives(const Structure& s, Term t) {
  if (!t->kl)
    throw std::invalid_argument(
        "derivative semantics: star-intersection-kleene terms only");
  Structure sdot = with_isolated(s);
  BitRel out(s.n());
  for (int x = 0; x < s.n(); ++x)
    for (LTerm m : reach(sdot, mk_at(x, t)))
      for (int z = 0; z < s.n(); ++z)
        if (!out.get(x, z) && eps(z, m)) out.set(x, z, true);
  return out;
}

}  // namespace pcor
