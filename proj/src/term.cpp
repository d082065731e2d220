#include "pcor/term.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace pcor {

// ---------------------------------------------------------------------------
// symbol table
// ---------------------------------------------------------------------------

namespace {

struct SymTable {
  std::mutex mu;
  std::unordered_map<std::string, int> ids;
  std::deque<std::string> names;
};

SymTable& symtab() {
  static SymTable t;
  return t;
}

}  // namespace

int sym_id(const std::string& name) {
  auto& t = symtab();
  std::lock_guard<std::mutex> lk(t.mu);
  auto it = t.ids.find(name);
  if (it != t.ids.end()) return it->second;
  int id = static_cast<int>(t.names.size());
  t.names.push_back(name);
  t.ids.emplace(name, id);
  return id;
}

const std::string& sym_name(int id) {
  auto& t = symtab();
  std::lock_guard<std::mutex> lk(t.mu);
  return t.names.at(static_cast<size_t>(id));
}

bool is_reserved_name(const std::string& name) {
  return name == "c_top" || name == "__l" || name == "__r";
}

bool is_derived_name(const std::string& name) {
  return name.rfind("conv_", 0) == 0 || name.rfind("not_", 0) == 0;
}

std::string dual_name(const std::string& name) {
  if (name.rfind("conv_", 0) == 0) return name.substr(5);
  return "conv_" + name;
}

std::string complement_name(const std::string& name) {
  if (name.rfind("not_", 0) == 0) return name.substr(4);
  return "not_" + name;
}

void Signature::declare_test(const std::string& b) {
  if (is_reserved_name(b) || is_derived_name(b))
    throw std::invalid_argument("test name collides with reserved/derived namespace: " + b);
  tests.insert(b);
}

void Signature::declare_nominal(const std::string& l) {
  if (is_reserved_name(l) || is_derived_name(l))
    throw std::invalid_argument("nominal name collides with reserved/derived namespace: " + l);
  nominals.insert(l);
}

// ---------------------------------------------------------------------------
// hash-consing
// ---------------------------------------------------------------------------

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

struct NodeKey {
  Op op;
  int32_t name;
  Term a;
  Term b;
  bool operator==(const NodeKey& o) const {
    return op == o.op && name == o.name && a == o.a && b == o.b;
  }
};

struct NodeKeyHash {
  size_t operator()(const NodeKey& k) const {
    uint64_t h = static_cast<uint64_t>(k.op);
    h = mix(h, static_cast<uint64_t>(static_cast<uint32_t>(k.name)));
    h = mix(h, reinterpret_cast<uintptr_t>(k.a));
    h = mix(h, reinterpret_cast<uintptr_t>(k.b));
    return static_cast<size_t>(h);
  }
};

struct Interner {
  std::mutex mu;
  std::unordered_map<NodeKey, Term, NodeKeyHash> table;
  std::deque<TermNode> pool;  // stable addresses
};

Interner& interner() {
  static Interner i;
  return i;
}

Term intern(Op op, int32_t name, Term a, Term b) {
  auto& in = interner();
  NodeKey key{op, name, a, b};
  std::lock_guard<std::mutex> lk(in.mu);
  auto it = in.table.find(key);
  if (it != in.table.end()) return it->second;

  TermNode n;
  n.op = op;
  n.name = name;
  n.a = a;
  n.b = b;
  switch (op) {
    case Op::Var:
    case Op::One:
    case Op::Zero:
    case Op::Top:
      n.size = 1;
      n.iw = 1;
      n.kl = (op != Op::Top);
      break;
    case Op::Seq:
    case Op::Plus:
      n.size = 1 + a->size + b->size;
      n.iw = std::max(a->iw, b->iw);
      n.kl = a->kl && b->kl;
      break;
    case Op::Inter:
      n.size = 1 + a->size + b->size;
      n.iw = a->iw + b->iw;
      n.kl = a->kl && b->kl;
      break;
    case Op::Star:
      n.size = 1 + a->size;
      n.iw = a->iw;
      n.kl = a->kl;
      break;
    case Op::Conv:
    case Op::TestNot:
      n.size = 1 + a->size;
      n.iw = a->iw;
      n.kl = false;
      break;
  }
  uint64_t h = static_cast<uint64_t>(op);
  h = mix(h, static_cast<uint64_t>(static_cast<uint32_t>(name)));
  h = mix(h, a ? a->hash : 0);
  h = mix(h, b ? b->hash : 0);
  n.hash = h;
  n.id = static_cast<uint32_t>(in.pool.size());

  in.pool.push_back(n);
  Term out = &in.pool.back();
  in.table.emplace(key, out);
  return out;
}

}  // namespace

Term mk_var(int name_id) { return intern(Op::Var, name_id, nullptr, nullptr); }
Term mk_var(const std::string& name) { return mk_var(sym_id(name)); }
Term mk_one() { return intern(Op::One, -1, nullptr, nullptr); }
Term mk_zero() { return intern(Op::Zero, -1, nullptr, nullptr); }
Term mk_top() { return intern(Op::Top, -1, nullptr, nullptr); }
Term mk_seq(Term a, Term b) { return intern(Op::Seq, -1, a, b); }
Term mk_plus(Term a, Term b) { return intern(Op::Plus, -1, a, b); }
Term mk_inter(Term a, Term b) { return intern(Op::Inter, -1, a, b); }
Term mk_conv(Term a) { return intern(Op::Conv, -1, a, nullptr); }
Term mk_star(Term a) { return intern(Op::Star, -1, a, nullptr); }
Term mk_testnot(Term a) { return intern(Op::TestNot, -1, a, nullptr); }

// ---------------------------------------------------------------------------

namespace {

void collect_vars(Term t, std::set<std::string>& out) {
  if (t->op == Op::Var) {
    out.insert(sym_name(t->name));
    return;
  }
  if (t->a) collect_vars(t->a, out);
  if (t->b) collect_vars(t->b, out);
}

}  // namespace

std::vector<std::string> term_variables(Term t) {
  std::set<std::string> s;
  collect_vars(t, s);
  return {s.begin(), s.end()};
}

bool term_mentions(Term t, const std::string& name) {
  if (t->op == Op::Var) return sym_name(t->name) == name;
  if (t->a && term_mentions(t->a, name)) return true;
  if (t->b && term_mentions(t->b, name)) return true;
  return false;
}

bool is_test_term(Term t, const Signature& sig) {
  switch (t->op) {
    case Op::Var:
      return sig.is_test(sym_name(t->name));
    case Op::One:
    case Op::Zero:
      return true;
    case Op::Seq:
    case Op::Plus:
      return is_test_term(t->a, sig) && is_test_term(t->b, sig);
    case Op::TestNot:
      return is_test_term(t->a, sig);
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// rendering with minimal parentheses; structure-preserving: the right operand
// of a binary operator at equal precedence keeps its parentheses so that
// parse(render(t)) == t on the nose, not just up to associativity
// ---------------------------------------------------------------------------

namespace {

int prec(Op op) {
  switch (op) {
    case Op::Plus: return 1;
    case Op::Inter: return 2;
    case Op::Seq: return 3;
    default: return 4;  // atoms and postfix chains
  }
}

void render(Term t, std::string& out) {
  switch (t->op) {
    case Op::Var: out += sym_name(t->name); return;
    case Op::One: out += '1'; return;
    case Op::Zero: out += '0'; return;
    case Op::Top: out += 'T'; return;
    case Op::Seq:
    case Op::Plus:
    case Op::Inter: {
      int p = prec(t->op);
      bool pl = prec(t->a->op) < p;
      bool pr = prec(t->b->op) <= p;  // strict right-nesting stays explicit
      if (pl) out += '(';
      render(t->a, out);
      if (pl) out += ')';
      out += (t->op == Op::Seq ? ";" : t->op == Op::Plus ? "+" : "&");
      if (pr) out += '(';
      render(t->b, out);
      if (pr) out += ')';
      return;
    }
    case Op::Conv:
    case Op::Star:
    case Op::TestNot: {
      bool par = prec(t->a->op) < 4;
      if (par) out += '(';
      render(t->a, out);
      if (par) out += ')';
      out += (t->op == Op::Star ? "*" : t->op == Op::Conv ? "~" : "^-");
      return;
    }
  }
}

}  // namespace

std::string render_term(Term t) {
  std::string s;
  render(t, s);
  return s;
}

}  // namespace pcor
