#include "pcor/model.hpp"

#include <algorithm>
#include <json.hpp>

namespace pcor {

// ---------------------------------------------------------------------------
// BitRel
// ---------------------------------------------------------------------------

BitRel BitRel::identity(int n) {
  BitRel r(n);
  for (int i = 0; i < n; ++i) r.set(i, i);
  return r;
}

BitRel BitRel::full(int n) {
  BitRel r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.set(i, j);
  return r;
}

BitRel BitRel::compose(const BitRel& o) const {
  BitRel r(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (get(i, k))
        for (int j = 0; j < n; ++j)
          if (o.get(k, j)) r.set(i, j);
  return r;
}

BitRel BitRel::transpose() const {
  BitRel r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (get(i, j)) r.set(j, i);
  return r;
}

BitRel BitRel::star() const {
  BitRel r = identity(n) | *this;
  for (int k = 0; k < n; ++k)  // Warshall
    for (int i = 0; i < n; ++i)
      if (r.get(i, k))
        for (int j = 0; j < n; ++j)
          if (r.get(k, j)) r.set(i, j);
  return r;
}

BitRel BitRel::operator|(const BitRel& o) const {
  BitRel r(n);
  for (size_t w = 0; w < bits.size(); ++w) r.bits[w] = bits[w] | o.bits[w];
  return r;
}

BitRel BitRel::operator&(const BitRel& o) const {
  BitRel r(n);
  for (size_t w = 0; w < bits.size(); ++w) r.bits[w] = bits[w] & o.bits[w];
  return r;
}

BitRel BitRel::minus(const BitRel& o) const {
  BitRel r(n);
  for (size_t w = 0; w < bits.size(); ++w) r.bits[w] = bits[w] & ~o.bits[w];
  return r;
}

bool BitRel::subset_of(const BitRel& o) const {
  for (size_t w = 0; w < bits.size(); ++w)
    if (bits[w] & ~o.bits[w]) return false;
  return true;
}

bool BitRel::empty() const {
  for (uint64_t w : bits)
    if (w) return false;
  return true;
}

int BitRel::count() const {
  int c = 0;
  for (uint64_t w : bits) c += __builtin_popcountll(w);
  return c;
}

std::vector<std::pair<int, int>> BitRel::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (get(i, j)) out.emplace_back(i, j);
  return out;
}

// ---------------------------------------------------------------------------
// Structure
// ---------------------------------------------------------------------------

int Structure::vertex(const std::string& name) const {
  for (size_t i = 0; i < universe.size(); ++i)
    if (universe[i] == name) return static_cast<int>(i);
  return -1;
}

void Structure::ensure_name(const std::string& name) {
  auto it = rel.find(name);
  if (it == rel.end()) rel.emplace(name, BitRel(n()));
}

const BitRel* Structure::find(const std::string& name) const {
  auto it = rel.find(name);
  return it == rel.end() ? nullptr : &it->second;
}

bool Structure::add_edge(const std::string& name, const std::string& from,
                         const std::string& to) {
  int i = vertex(from), j = vertex(to);
  if (i < 0 || j < 0) return false;
  ensure_name(name);
  rel[name].set(i, j);
  return true;
}

std::string Structure::canonical_bytes() const {
  std::string out;
  out += std::to_string(n());
  out += '#';
  for (const auto& v : universe) {
    out += v;
    out += ',';
  }
  for (const auto& [name, r] : rel) {
    out += '|';
    out += name;
    out += ':';
    for (uint64_t w : r.bits)
      for (int b = 0; b < 8; ++b) out += static_cast<char>((w >> (8 * b)) & 0xff);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

std::string structure_to_json(const Structure& s) {
  nlohmann::ordered_json j;
  j["universe"] = s.universe;
  nlohmann::ordered_json rels = nlohmann::ordered_json::object();
  for (const auto& [name, r] : s.rel) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (auto [i, k] : r.pairs())
      list.push_back({s.universe[static_cast<size_t>(i)], s.universe[static_cast<size_t>(k)]});
    rels[name] = std::move(list);
  }
  j["rel"] = std::move(rels);
  return j.dump();
}

Structure structure_from_json_obj(const nlohmann::json& j) {
  Structure s;
  for (const auto& v : j.at("universe")) s.universe.push_back(v.get<std::string>());
  if (s.universe.empty()) throw std::invalid_argument("structure universe must be nonempty");
  if (j.contains("rel"))
    for (const auto& [name, list] : j.at("rel").items()) {
      s.ensure_name(name);
      for (const auto& pr : list) {
        if (!s.add_edge(name, pr.at(0).get<std::string>(), pr.at(1).get<std::string>()))
          throw std::invalid_argument("edge endpoint outside universe in relation " + name);
      }
    }
  return s;
}

Structure structure_from_json(const std::string& text) {
  return structure_from_json_obj(nlohmann::json::parse(text));
}

std::string word_to_json(const std::vector<Structure>& w) {
  std::string out = "[";
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += ",";
    out += structure_to_json(w[i]);
  }
  out += "]";
  return out;
}

std::vector<Structure> word_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (!j.is_array()) throw std::invalid_argument("word file must be a JSON array");
  std::vector<Structure> w;
  for (const auto& item : j) w.push_back(structure_from_json_obj(item));
  return w;
}

// ---------------------------------------------------------------------------
// semantics
// ---------------------------------------------------------------------------

BitRel eval(const Structure& s, Term t) {
  switch (t->op) {
    case Op::Var: {
      const BitRel* r = s.find(sym_name(t->name));
      if (!r) throw std::invalid_argument("unknown name in term: " + sym_name(t->name));
      return *r;
    }
    case Op::One: return BitRel::identity(s.n());
    case Op::Zero: return BitRel(s.n());
    case Op::Top: return BitRel::full(s.n());
    case Op::Seq: return eval(s, t->a).compose(eval(s, t->b));
    case Op::Plus: return eval(s, t->a) | eval(s, t->b);
    case Op::Inter: return eval(s, t->a) & eval(s, t->b);
    case Op::Conv: return eval(s, t->a).transpose();
    case Op::Star: return eval(s, t->a).star();
    case Op::TestNot: return BitRel::identity(s.n()).minus(eval(s, t->a));
  }
  return BitRel(s.n());
}

std::optional<std::pair<std::string, std::string>> check_leq_on(const Structure& s,
                                                                Term t1, Term t2) {
  BitRel d = eval(s, t1).minus(eval(s, t2));
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j)
      if (d.get(i, j))
        return std::make_pair(s.universe[static_cast<size_t>(i)],
                              s.universe[static_cast<size_t>(j)]);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// gluing
// ---------------------------------------------------------------------------

namespace {

// per (bag, local vertex): index of its glued class; classes are intervals of
// consecutive bags sharing the name, represented by the first occurrence
std::vector<std::vector<int>> glue_classes(const std::vector<Structure>& bags,
                                           std::vector<std::string>& names_out) {
  std::vector<std::vector<int>> cls(bags.size());
  for (size_t i = 0; i < bags.size(); ++i) {
    cls[i].assign(static_cast<size_t>(bags[i].n()), -1);
    for (int v = 0; v < bags[i].n(); ++v) {
      const std::string& x = bags[i].universe[static_cast<size_t>(v)];
      int prev = i > 0 ? bags[i - 1].vertex(x) : -1;
      if (prev >= 0) {
        cls[i][static_cast<size_t>(v)] = cls[i - 1][static_cast<size_t>(prev)];
      } else {
        cls[i][static_cast<size_t>(v)] = static_cast<int>(names_out.size());
        names_out.push_back(std::to_string(i + 1) + "." + x);
      }
    }
  }
  return cls;
}

}  // namespace

Structure glue(const std::vector<Structure>& bags) {
  if (bags.empty()) throw std::invalid_argument("glue needs a nonempty bag sequence");
  Structure g;
  auto cls = glue_classes(bags, g.universe);
  for (size_t i = 0; i < bags.size(); ++i)
    for (const auto& [name, r] : bags[i].rel) {
      g.ensure_name(name);
      for (auto [x, y] : r.pairs())
        g.rel[name].set(cls[i][static_cast<size_t>(x)], cls[i][static_cast<size_t>(y)]);
    }
  return g;
}

std::vector<Structure> glue_images(const std::vector<Structure>& bags) {
  std::vector<std::string> names;
  auto cls = glue_classes(bags, names);
  std::vector<Structure> out;
  for (size_t i = 0; i < bags.size(); ++i) {
    Structure b;
    for (int v = 0; v < bags[i].n(); ++v)
      b.universe.push_back(names[static_cast<size_t>(cls[i][static_cast<size_t>(v)])]);
    for (const auto& [name, r] : bags[i].rel) {
      b.ensure_name(name);
      for (auto [x, y] : r.pairs()) b.rel[name].set(x, y);  // same local indices
    }
    out.push_back(std::move(b));
  }
  return out;
}

PathDecompCheck is_path_decomposition(const std::vector<Structure>& bags,
                                      const Structure& s) {
  PathDecompCheck c;
  if (bags.empty()) {
    c.reason = "no bags";
    return c;
  }
  int width = 0;
  for (const auto& b : bags) width = std::max(width, b.n() - 1);

  // bags must sit inside s, and their edges must be s-edges
  for (size_t i = 0; i < bags.size(); ++i) {
    for (const auto& x : bags[i].universe)
      if (s.vertex(x) < 0) {
        c.reason = "bag vertex not in structure: " + x;
        return c;
      }
    for (const auto& [name, r] : bags[i].rel) {
      const BitRel* sr = s.find(name);
      for (auto [x, y] : r.pairs()) {
        int sx = s.vertex(bags[i].universe[static_cast<size_t>(x)]);
        int sy = s.vertex(bags[i].universe[static_cast<size_t>(y)]);
        if (!sr || !sr->get(sx, sy)) {
          c.reason = "bag edge absent from structure (relation " + name + ")";
          return c;
        }
      }
    }
  }
  // vertex cover
  for (const auto& x : s.universe) {
    bool found = false;
    for (const auto& b : bags)
      if (b.vertex(x) >= 0) {
        found = true;
        break;
      }
    if (!found) {
      c.reason = "vertex not covered: " + x;
      return c;
    }
  }
  // edge cover: every structure edge lies (with its label) inside some bag
  for (const auto& [name, r] : s.rel)
    for (auto [i, j] : r.pairs()) {
      const std::string& x = s.universe[static_cast<size_t>(i)];
      const std::string& y = s.universe[static_cast<size_t>(j)];
      bool found = false;
      for (const auto& b : bags) {
        int bx = b.vertex(x), by = b.vertex(y);
        const BitRel* br = b.find(name);
        if (bx >= 0 && by >= 0 && br && br->get(bx, by)) {
          found = true;
          break;
        }
      }
      if (!found) {
        c.reason = "edge not covered: " + name + "(" + x + "," + y + ")";
        return c;
      }
    }
  // interval property
  for (const auto& x : s.universe) {
    int first = -1, last = -1;
    for (size_t i = 0; i < bags.size(); ++i)
      if (bags[i].vertex(x) >= 0) {
        if (first < 0) first = static_cast<int>(i);
        last = static_cast<int>(i);
      }
    for (int i = first; i <= last; ++i)
      if (bags[static_cast<size_t>(i)].vertex(x) < 0) {
        c.reason = "interval property violated at vertex " + x;
        return c;
      }
  }
  c.ok = true;
  c.width = width;
  return c;
}

// ---------------------------------------------------------------------------
// model classes
// ---------------------------------------------------------------------------

bool class_membership_conv(const Structure& s) {
  for (const auto& [name, r] : s.rel)
    if (name.rfind("conv_", 0) == 0) {
      const BitRel* base = s.find(name.substr(5));
      BitRel expect = base ? base->transpose() : BitRel(s.n());
      if (!(r == expect)) return false;
    }
  return true;
}

bool class_membership_tests(const Structure& s, const std::set<std::string>& tests) {
  BitRel diag = BitRel::identity(s.n());
  for (const auto& b : tests) {
    const BitRel* pb = s.find(b);
    const BitRel* nb = s.find(complement_name(b));
    BitRel rb = pb ? *pb : BitRel(s.n());
    BitRel rn = nb ? *nb : BitRel(s.n());
    if (!rb.subset_of(diag) || !rn.subset_of(diag)) return false;
    if (!(rb & rn).empty()) return false;
    if (!((rb | rn) == diag)) return false;
  }
  return true;
}

bool class_membership_noms(const Structure& s, const std::set<std::string>& noms) {
  BitRel diag = BitRel::identity(s.n());
  for (const auto& l : noms) {
    const BitRel* pl = s.find(l);
    if (!pl || pl->count() != 1 || !pl->subset_of(diag)) return false;
  }
  return true;
}

bool ClassFilter::admits(const Structure& s) const {
  if (conv && !class_membership_conv(s)) return false;
  if (!tests.empty() && !class_membership_tests(s, tests)) return false;
  if (!noms.empty() && !class_membership_noms(s, noms)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// enumeration
// ---------------------------------------------------------------------------

Structure structure_from_mask(int n, const std::vector<std::string>& names, uint64_t mask) {
  Structure s;
  for (int i = 1; i <= n; ++i) s.universe.push_back(std::to_string(i));
  int bit = 0;
  for (const auto& name : names) {
    s.ensure_name(name);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++bit)
        if ((mask >> bit) & 1) s.rel[name].set(i, j);
  }
  return s;
}

void for_each_structure(int maxN, const std::vector<std::string>& names,
                        const ClassFilter& filter,
                        const std::function<bool(const Structure&)>& fn) {
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  for (int n = 1; n <= maxN; ++n) {
    int nbits = static_cast<int>(sorted.size()) * n * n;
    if (nbits >= 63) throw std::invalid_argument("enumeration space too large");
    for (uint64_t mask = 0; mask < (1ULL << nbits); ++mask) {
      Structure s = structure_from_mask(n, sorted, mask);
      if (!filter.admits(s)) continue;
      if (!fn(s)) return;
    }
  }
}

std::vector<Structure> enumerate_structures(int maxN, const std::vector<std::string>& names,
                                            const ClassFilter& filter) {
  std::vector<Structure> out;
  for_each_structure(maxN, names, filter, [&](const Structure& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// isomorphism (desk-scale backtracking over vertex bijections)
// ---------------------------------------------------------------------------

namespace {

bool iso_extend(const Structure& a, const Structure& b, std::vector<int>& map,
                std::vector<bool>& used, size_t v) {
  int n = a.n();
  if (v == static_cast<size_t>(n)) return true;
  for (int w = 0; w < n; ++w) {
    if (used[static_cast<size_t>(w)]) continue;
    bool ok = true;
    for (const auto& [name, ra] : a.rel) {
      const BitRel* rb = b.find(name);
      for (size_t u = 0; u <= v && ok; ++u) {
        if (u == v) {
          bool loop_b = rb ? rb->get(w, w) : false;
          if (ra.get(static_cast<int>(v), static_cast<int>(v)) != loop_b) ok = false;
          continue;
        }
        int mu = map[u];
        bool fwd_a = ra.get(static_cast<int>(v), static_cast<int>(u));
        bool bwd_a = ra.get(static_cast<int>(u), static_cast<int>(v));
        bool fwd_b = rb ? rb->get(w, mu) : false;
        bool bwd_b = rb ? rb->get(mu, w) : false;
        if (fwd_a != fwd_b || bwd_a != bwd_b) ok = false;
      }
      if (!ok) break;
    }
    if (!ok) continue;
    map[v] = w;
    used[static_cast<size_t>(w)] = true;
    if (iso_extend(a, b, map, used, v + 1)) return true;
    used[static_cast<size_t>(w)] = false;
  }
  return false;
}

int edge_count(const Structure& s, const std::string& name) {
  const BitRel* r = s.find(name);
  return r ? r->count() : 0;
}

}  // namespace

bool structure_isomorphic(const Structure& a, const Structure& b) {
  if (a.n() != b.n()) return false;
  std::set<std::string> names;
  for (const auto& [k, _] : a.rel) names.insert(k);
  for (const auto& [k, _] : b.rel) names.insert(k);
  for (const auto& k : names)
    if (edge_count(a, k) != edge_count(b, k)) return false;
  std::vector<int> map(static_cast<size_t>(a.n()), -1);
  std::vector<bool> used(static_cast<size_t>(a.n()), false);
  return iso_extend(a, b, map, used, 0);
}

}  // namespace pcor
