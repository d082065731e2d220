#include <algorithm>
#include <bit>
#include <cstring>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "pcor/automata.hpp"

#ifdef PCOR_HAVE_OPENMP
#include <omp.h>
#endif

namespace pcor {

// ---------------------------------------------------------------------------
// Boundary summaries. A summary of a word prefix records, over the nodes
// still visible at the boundary (derivative terms whose labels survive, plus
// virtual sources for the first bag's spawn facts and virtual targets for
// completed acceptance facts), which facts hold. Tier 1 (intersection-free
// closures, every node of width 1) keeps a plain reachability matrix:
// pad-labeled nodes never carry derivative edges, so relabeling never fires
// and composition is transitive closure. Tier 2 keeps guarded facts
// (p, q, conditions): the fact holds once every condition, a pad-labeled
// boundary pair, is established; relabeling enters as a guarded seed and
// discharge is resolution. Both tiers are deterministic functions of the
// letter, so complementation is flipping acceptance.
// ---------------------------------------------------------------------------

namespace {

struct Entry {
  int p, q;
  std::vector<std::pair<int, int>> conds;  // sorted pad-pair guards
};

void append_int(std::string& s, uint64_t v) {
  s.append(reinterpret_cast<const char*>(&v), sizeof v);
}

uint64_t fnv(const void* data, size_t len, uint64_t h = 1469598103934665603ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) h = (h ^ p[i]) * 1099511628211ull;
  return h;
}

}  // namespace

struct SummaryMachine::Impl {
  TwoAFA A;
  Budget budget;
  int k, pad;
  int tier = 1;

  // node table: closure plus every derivative reachable over the saturated
  // letter (monotone in the edge set, so it covers every letter)
  std::vector<LTerm> nodes;
  std::unordered_map<LTerm, int> node_idx;
  std::vector<uint32_t> node_labels;  // bit l per occurring label l in 0..k
  std::vector<int> node_eps;          // anchor in 0..k-1, or -1
  std::vector<int> node_width;
  int nn = 0;

  std::vector<std::pair<int, int>> static_steps;             // fork/join rewrites
  std::vector<std::vector<std::pair<int, int>>> edge_steps;  // index (n*k + x)*k + y
  std::vector<int> sigma_node;                               // per label x: @x.t

  // ----- tier 1 -----
  int rn = 0;                 // real (non-pad-labeled) node count
  std::vector<int> t1_of;     // node -> tier-1 index or -1
  std::vector<int> t1_label;  // tier-1 node -> label
  std::vector<int> t1_eps;
  std::vector<std::vector<std::pair<int, int>>> t1_edge_steps;
  int N = 0, W = 0;  // matrix nodes (rn + 2k) and words per row

  // ----- interned states (both tiers) -----
  std::vector<std::string> state_bytes;
  std::unordered_map<std::string, int> intern;
  std::vector<char> state_accept;
  std::vector<uint32_t> state_alive;
  std::vector<std::vector<Entry>> t2_entries;  // tier 2 parsed form

  explicit Impl(const TwoAFA& a, Budget b) : A(a), budget(b) {
    k = A.k();
    pad = k;
    build_nodes();
    build_tier_tables();
    // state 0: no letters read yet
    state_bytes.push_back("init");
    intern.emplace("init", 0);
    state_accept.push_back(0);
    state_alive.push_back(0);
    if (tier == 2) t2_entries.emplace_back();
  }

  Letter full_letter() const {
    Letter a;
    a.k = k;
    a.mask = (uint32_t(1) << k) - 1;
    uint64_t grid = 0;
    for (int x = 0; x < k; ++x)
      for (int y = 0; y < k; ++y) grid |= uint64_t(1) << (x * k + y);
    a.rel.assign(A.names().size(), grid);
    return a;
  }

  void build_nodes() {
    Structure s_full = with_isolated(letter_structure_padded(full_letter(), A.names()));
    auto add_node = [&](LTerm l) {
      if (node_idx.count(l)) return;
      node_idx.emplace(l, nn++);
      nodes.push_back(l);
    };
    for (LTerm c : A.cl()) add_node(c);
    for (LTerm c : A.cl())
      for (LTerm r : reach(s_full, c)) add_node(r);
    node_labels.assign(nn, 0);
    node_eps.assign(nn, -1);
    node_width.assign(nn, 0);
    for (int i = 0; i < nn; ++i) {
      auto lv = label_vector(nodes[i]);
      node_width[i] = int(lv.size());
      for (int32_t l : lv) node_labels[i] |= uint32_t(1) << l;
      for (int z = 0; z < k; ++z)
        if (eps(z, nodes[i])) {
          node_eps[i] = z;
          break;
        }
    }
    // one-step lifts: a derivative step either consumes one labeled edge
    // (recorded under that edge) or rewrites in place (fork/join)
    edge_steps.assign(size_t(A.names().size()) * k * k, {});
    std::unordered_map<std::string, int> name_of;
    for (size_t n = 0; n < A.names().size(); ++n) name_of.emplace(A.names()[n], int(n));
    for (int i = 0; i < nn; ++i) {
      for (const DeriveStep& d : step(s_full, nodes[i])) {
        auto it = node_idx.find(d.to);
        if (it == node_idx.end()) continue;  // outside the table: a dead end
        int j = it->second;
        if (d.run.kind == AtomicRun::Var) {
          int n = name_of.at(sym_name(d.run.label));
          int x = d.run.src_labels[d.run.pos - 1];
          int y = d.run.tgt_label;
          if (x >= 0 && x < k && y >= 0 && y < k)
            edge_steps[size_t(n * k + x) * k + y].push_back({i, j});
        } else {
          static_steps.push_back({i, j});
        }
      }
    }
    sigma_node.assign(k, -1);
    for (int x = 0; x < k; ++x) {
      auto it = node_idx.find(mk_at(x, A.term()));
      if (it != node_idx.end()) sigma_node[x] = it->second;
    }
    tier = 1;
    for (int i = 0; i < nn; ++i)
      if (node_width[i] > 1) tier = 2;
  }

  void build_tier_tables() {
    if (tier != 1) return;
    // An accept bit is a chain from an initial spawn to an eps hook, each hop a
    // one-step lift, so only nodes forward-reachable from a spawn and backward-
    // reachable from a hook can ever matter.  The closure carries companions
    // (alternation middles and relabeled twins) that fail this; their facts
    // would only inflate the state space, so the matrix drops them.
    std::vector<std::vector<int>> out(nn), in(nn);
    for (auto& es : edge_steps)
      for (auto [f, t] : es)
        if (!(node_labels[f] >> pad & 1) && !(node_labels[t] >> pad & 1)) {
          out[f].push_back(t);
          in[t].push_back(f);
        }
    auto closure = [&](const std::vector<std::vector<int>>& adj, const std::vector<int>& seeds) {
      std::vector<char> seen(nn, 0);
      std::vector<int> stack;
      for (int i : seeds)
        if (i >= 0 && !seen[i]) {
          seen[i] = 1;
          stack.push_back(i);
        }
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
          if (!seen[v]) {
            seen[v] = 1;
            stack.push_back(v);
          }
      }
      return seen;
    };
    std::vector<int> hooks;
    for (int i = 0; i < nn; ++i)
      if (node_eps[i] >= 0 && !(node_labels[i] >> pad & 1)) hooks.push_back(i);
    std::vector<char> fwd = closure(out, sigma_node), bwd = closure(in, hooks);

    t1_of.assign(nn, -1);
    for (int i = 0; i < nn; ++i)
      if (!(node_labels[i] >> pad & 1) && fwd[i] && bwd[i]) {
        t1_of[i] = rn++;
        t1_label.push_back(std::countr_zero(node_labels[i]));
        t1_eps.push_back(node_eps[i]);
      }
    N = rn + 2 * k;
    W = (N + 63) / 64;
    t1_edge_steps.assign(edge_steps.size(), {});
    for (size_t e = 0; e < edge_steps.size(); ++e)
      for (auto [f, t] : edge_steps[e])
        if (t1_of[f] >= 0 && t1_of[t] >= 0) t1_edge_steps[e].push_back({t1_of[f], t1_of[t]});
  }

  int sigma_row(int x) const { return rn + x; }
  int tau_col(int y) const { return rn + k + y; }

  int intern_state(std::string&& bytes, bool accept, uint32_t alive, std::vector<Entry>&& es) {
    auto it = intern.find(bytes);
    if (it != intern.end()) return it->second;
    if (state_bytes.size() >= budget.max_states)
      throw BudgetExceeded("summary state budget exceeded");
    int id = int(state_bytes.size());
    intern.emplace(bytes, id);
    state_bytes.push_back(std::move(bytes));
    state_accept.push_back(accept);
    state_alive.push_back(alive);
    if (tier == 2) t2_entries.push_back(std::move(es));
    return id;
  }

  // ------------------------------------------------------------------ tier 1
  void tier1_raw(int state, const Letter& a, std::string* bytes, bool* accept) const {
    uint32_t U = a.mask;
    uint32_t alive = state == 0 ? U : (state_alive[state] & U);
    std::vector<uint64_t> R(size_t(N) * W, 0);
    auto set_bit = [&](int i, int j) { R[size_t(i) * W + (j >> 6)] |= uint64_t(1) << (j & 63); };
    if (state == 0) {
      for (int x = 0; x < k; ++x)
        if ((U >> x & 1) && sigma_node[x] >= 0 && t1_of[sigma_node[x]] >= 0)
          set_bit(sigma_row(x), t1_of[sigma_node[x]]);
    } else {
      std::vector<uint64_t> prev(size_t(N) * W);
      std::memcpy(prev.data(), state_bytes[state].data() + sizeof(uint32_t),
                  prev.size() * sizeof(uint64_t));
      std::vector<uint64_t> colmask(W, 0);
      for (int i = 0; i < rn; ++i)
        if (U >> t1_label[i] & 1) colmask[i >> 6] |= uint64_t(1) << (i & 63);
      for (int i = rn; i < N; ++i) colmask[i >> 6] |= uint64_t(1) << (i & 63);
      for (int i = 0; i < N; ++i) {
        bool live = i >= rn || (U >> t1_label[i] & 1);
        if (!live) continue;
        for (int w = 0; w < W; ++w) R[size_t(i) * W + w] = prev[size_t(i) * W + w] & colmask[w];
      }
    }
    for (size_t n = 0; n < a.rel.size(); ++n) {
      uint64_t bits = a.rel[n];
      while (bits) {
        int b = std::countr_zero(bits);
        bits &= bits - 1;
        int x = b / k, y = b % k;  // vertex indices = labels
        for (auto [f, t] : t1_edge_steps[(n * k + x) * k + y]) set_bit(f, t);
      }
    }
    for (int i = 0; i < rn; ++i)
      if (t1_eps[i] >= 0 && (alive >> t1_eps[i] & 1)) set_bit(i, tau_col(t1_eps[i]));
    // transitive closure
    for (int via = 0; via < N; ++via) {
      const uint64_t* vr = &R[size_t(via) * W];
      for (int i = 0; i < N; ++i) {
        if (!(R[size_t(i) * W + (via >> 6)] >> (via & 63) & 1)) continue;
        uint64_t* ir = &R[size_t(i) * W];
        for (int w = 0; w < W; ++w) ir[w] |= vr[w];
      }
    }
    bool acc = false;
    for (int x = 0; x < k && !acc; ++x)
      for (int y = 0; y < k && !acc; ++y)
        if (R[size_t(sigma_row(x)) * W + (tau_col(y) >> 6)] >> (tau_col(y) & 63) & 1) acc = true;
    bytes->clear();
    bytes->append(reinterpret_cast<const char*>(&alive), sizeof alive);
    bytes->append(reinterpret_cast<const char*>(R.data()), R.size() * sizeof(uint64_t));
    *accept = acc;
  }

  // ------------------------------------------------------------------ tier 2
  bool node_valid(int i, uint32_t U) const {
    return (node_labels[i] & ~(U | (uint32_t(1) << pad))) == 0;
  }

  void tier2_raw(int state, const Letter& a, std::string* bytes, bool* accept,
                 std::vector<Entry>* entries_out, uint32_t* alive_out) const {
    uint32_t U = a.mask;
    uint32_t alive = state == 0 ? U : (state_alive[state] & U);
    // virtual ids live above the node table
    auto sigma_id = [&](int x) { return nn + x; };
    auto tau_id = [&](int y) { return nn + k + y; };
    auto id_valid = [&](int i) { return i >= nn || node_valid(i, U); };

    std::map<std::pair<int, int>, std::vector<std::vector<std::pair<int, int>>>> anti;
    std::deque<Entry> work;
    size_t entry_count = 0;
    auto insert = [&](int p, int q, std::vector<std::pair<int, int>> conds) {
      if (p == q) return;
      std::sort(conds.begin(), conds.end());
      conds.erase(std::unique(conds.begin(), conds.end()), conds.end());
      auto& sets = anti[{p, q}];
      for (const auto& have : sets)
        if (std::includes(conds.begin(), conds.end(), have.begin(), have.end())) return;
      size_t removed = 0;
      for (auto& have : sets)
        if (std::includes(have.begin(), have.end(), conds.begin(), conds.end())) {
          have.clear();
          ++removed;
        }
      if (removed) {
        sets.erase(std::remove_if(sets.begin(), sets.end(),
                                  [](const auto& s) { return s.empty(); }),
                   sets.end());
        entry_count -= removed;
      }
      sets.push_back(conds);
      if (++entry_count > budget.max_entries)
        throw BudgetExceeded("summary entry budget exceeded");
      work.push_back(Entry{p, q, std::move(conds)});
    };

    // surviving prefix facts: endpoints and guards must stay visible
    if (state != 0) {
      for (const Entry& e : t2_entries[state]) {
        if (!id_valid(e.p) || !id_valid(e.q)) continue;
        bool ok = true;
        for (auto [u, v] : e.conds)
          if (!id_valid(u) || !id_valid(v)) {
            ok = false;
            break;
          }
        if (ok) insert(e.p, e.q, e.conds);
      }
    } else {
      for (int x = 0; x < k; ++x)
        if ((U >> x & 1) && sigma_node[x] >= 0 && node_valid(sigma_node[x], U))
          insert(sigma_id(x), sigma_node[x], {});
    }
    // this window's derivative edges
    for (auto [f, t] : static_steps)
      if (node_valid(f, U) && node_valid(t, U)) insert(f, t, {});
    for (size_t n = 0; n < a.rel.size(); ++n) {
      uint64_t bits = a.rel[n];
      while (bits) {
        int b = std::countr_zero(bits);
        bits &= bits - 1;
        int x = b / k, y = b % k;
        for (auto [f, t] : edge_steps[(n * k + x) * k + y])
          if (node_valid(f, U) && node_valid(t, U)) insert(f, t, {});
      }
    }
    // acceptance hooks for anchors alive since the first bag
    for (int i = 0; i < nn; ++i)
      if (node_eps[i] >= 0 && (alive >> node_eps[i] & 1) && node_valid(i, U))
        insert(i, tau_id(node_eps[i]), {});
    // relabeling seeds: an x-labeled pair follows from its pad-labeled twin
    std::vector<int> valid_nodes;
    for (int i = 0; i < nn; ++i)
      if (node_valid(i, U)) valid_nodes.push_back(i);
    for (int a1 : valid_nodes) {
      auto lv1 = label_vector(nodes[a1]);
      for (int b1 : valid_nodes) {
        auto lv2 = label_vector(nodes[b1]);
        for (size_t p = 0; p < lv1.size(); ++p)
          for (size_t q = 0; q < lv2.size(); ++q) {
            if (lv1[p] != lv2[q] || lv1[p] == pad) continue;
            auto itp = node_idx.find(relabel(nodes[a1], int(p) + 1, pad));
            auto itq = node_idx.find(relabel(nodes[b1], int(q) + 1, pad));
            if (itp == node_idx.end() || itq == node_idx.end()) continue;
            insert(a1, b1, {{itp->second, itq->second}});
          }
      }
    }
    // saturation: composition and guard resolution
    while (!work.empty()) {
      Entry e = std::move(work.front());
      work.pop_front();
      {
        const auto& cur = anti[{e.p, e.q}];
        bool still = false;
        for (const auto& s : cur)
          if (s == e.conds) {
            still = true;
            break;
          }
        if (!still) continue;  // subsumed meanwhile
      }
      std::vector<Entry> snapshot;
      for (const auto& [pq, sets] : anti)
        for (const auto& c : sets) snapshot.push_back(Entry{pq.first, pq.second, c});
      for (const Entry& o : snapshot) {
        if (o.q == e.p) {  // o ; e
          auto conds = o.conds;
          conds.insert(conds.end(), e.conds.begin(), e.conds.end());
          insert(o.p, e.q, std::move(conds));
        }
        if (e.q == o.p) {  // e ; o
          auto conds = e.conds;
          conds.insert(conds.end(), o.conds.begin(), o.conds.end());
          insert(e.p, o.q, std::move(conds));
        }
        // e discharges a guard of o
        if (std::find(o.conds.begin(), o.conds.end(), std::make_pair(e.p, e.q)) !=
            o.conds.end()) {
          std::vector<std::pair<int, int>> conds;
          for (auto c : o.conds)
            if (c != std::make_pair(e.p, e.q)) conds.push_back(c);
          conds.insert(conds.end(), e.conds.begin(), e.conds.end());
          insert(o.p, o.q, std::move(conds));
        }
        // o discharges a guard of e
        if (std::find(e.conds.begin(), e.conds.end(), std::make_pair(o.p, o.q)) !=
            e.conds.end()) {
          std::vector<std::pair<int, int>> conds;
          for (auto c : e.conds)
            if (c != std::make_pair(o.p, o.q)) conds.push_back(c);
          conds.insert(conds.end(), o.conds.begin(), o.conds.end());
          insert(e.p, e.q, std::move(conds));
        }
      }
    }
    // canonical form
    std::vector<Entry> out;
    for (const auto& [pq, sets] : anti) {
      auto sorted_sets = sets;
      std::sort(sorted_sets.begin(), sorted_sets.end());
      for (const auto& c : sorted_sets) out.push_back(Entry{pq.first, pq.second, c});
    }
    bool acc = false;
    for (const Entry& e : out)
      if (e.p >= nn && e.p < nn + k && e.q >= nn + k && e.conds.empty()) acc = true;
    bytes->clear();
    append_int(*bytes, alive);
    for (const Entry& e : out) {
      append_int(*bytes, uint64_t(e.p));
      append_int(*bytes, uint64_t(e.q));
      append_int(*bytes, uint64_t(e.conds.size()));
      for (auto [u, v] : e.conds) {
        append_int(*bytes, uint64_t(u));
        append_int(*bytes, uint64_t(v));
      }
    }
    *accept = acc;
    *entries_out = std::move(out);
    *alive_out = alive;
  }

  int next(int state, const Letter& a) {
    std::string bytes;
    bool accept = false;
    if (tier == 1) {
      tier1_raw(state, a, &bytes, &accept);
      uint32_t alive;
      std::memcpy(&alive, bytes.data(), sizeof alive);
      return intern_state(std::move(bytes), accept, alive, {});
    }
    std::vector<Entry> es;
    uint32_t alive = 0;
    tier2_raw(state, a, &bytes, &accept, &es, &alive);
    int id = intern_state(std::move(bytes), accept, alive, std::move(es));
    return id;
  }
};

SummaryMachine::SummaryMachine(const TwoAFA& A, Budget budget)
    : impl_(std::make_unique<Impl>(A, budget)) {}
SummaryMachine::~SummaryMachine() = default;
SummaryMachine::SummaryMachine(SummaryMachine&&) noexcept = default;

int SummaryMachine::tier() const { return impl_->tier; }
int SummaryMachine::initial() const { return 0; }
bool SummaryMachine::accepting(int state) const { return impl_->state_accept[state] != 0; }
size_t SummaryMachine::interned_states() const { return impl_->state_bytes.size(); }
int SummaryMachine::next(int state, const Letter& a) { return impl_->next(state, a); }

// The machine sees a letter only through the node pairs its edges lift to
// (plus the universe mask, which drives restriction and the virtual hooks).
std::vector<std::pair<int, int>> SummaryMachine::letter_lifts(const Letter& a) const {
  std::vector<std::pair<int, int>> lifted;
  for (size_t n = 0; n < a.rel.size(); ++n) {
    uint64_t bits = a.rel[n];
    while (bits) {
      int b = std::countr_zero(bits);
      bits &= bits - 1;
      size_t e = (n * impl_->k + b / impl_->k) * impl_->k + b % impl_->k;
      const auto& steps =
          impl_->tier == 1 ? impl_->t1_edge_steps[e] : impl_->edge_steps[e];
      lifted.insert(lifted.end(), steps.begin(), steps.end());
    }
  }
  std::sort(lifted.begin(), lifted.end());
  lifted.erase(std::unique(lifted.begin(), lifted.end()), lifted.end());
  return lifted;
}

uint64_t SummaryMachine::letter_fingerprint(const Letter& a) const {
  std::vector<std::pair<int, int>> lifted = letter_lifts(a);
  std::string buf;
  append_int(buf, a.mask);
  for (auto [f, t] : lifted) {
    append_int(buf, uint64_t(f));
    append_int(buf, uint64_t(t));
  }
  return fnv(buf.data(), buf.size());
}

std::vector<int> SummaryMachine::next_batch(int state, const std::vector<const Letter*>& as,
                                            int jobs) {
  const size_t n = as.size();
  std::vector<std::string> bytes(n);
  std::vector<char> accept(n, 0);
  std::vector<std::vector<Entry>> entries;
  std::vector<uint32_t> alive;
  if (impl_->tier == 1) {
#ifdef PCOR_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(std::max(1, jobs))
#endif
    for (size_t i = 0; i < n; ++i) {
      bool acc = false;
      impl_->tier1_raw(state, *as[i], &bytes[i], &acc);
      accept[i] = acc;
    }
#ifndef PCOR_HAVE_OPENMP
    (void)jobs;
#endif
    std::vector<int> ids(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t alive;
      std::memcpy(&alive, bytes[i].data(), sizeof alive);
      ids[i] = impl_->intern_state(std::move(bytes[i]), accept[i], alive, {});
    }
    return ids;
  }
  entries.resize(n);
  alive.assign(n, 0);
  std::vector<int> ids(n);
  for (size_t i = 0; i < n; ++i) {
    bool acc = false;
    impl_->tier2_raw(state, *as[i], &bytes[i], &acc, &entries[i], &alive[i]);
    ids[i] = impl_->intern_state(std::move(bytes[i]), acc, alive[i], std::move(entries[i]));
  }
  return ids;
}

// ---------------------------------------------------------------------------
// DFA materialization over an explicit class alphabet
// ---------------------------------------------------------------------------

NFA twoafa_to_nfa(const TwoAFA& A, const std::vector<LetterClass>& alphabet,
                  SummaryMachine::Budget budget) {
  SummaryMachine m(A, budget);
  NFA out;
  out.alphabet = int(alphabet.size());
  out.deterministic = true;
  out.starts = {0};
  std::unordered_map<int, int> dfa_of;  // machine state -> dfa state
  std::vector<int> rev;
  std::deque<int> queue;
  dfa_of.emplace(m.initial(), 0);
  rev.push_back(m.initial());
  queue.push_back(m.initial());
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    int sd = dfa_of.at(s);
    if (int(out.next.size()) <= sd) out.next.resize(sd + 1);
    out.next[sd].assign(alphabet.size(), {});
    for (size_t c = 0; c < alphabet.size(); ++c) {
      int t = m.next(s, alphabet[c].rep);
      auto [it, fresh] = dfa_of.emplace(t, int(dfa_of.size()));
      if (fresh) {
        if (dfa_of.size() > budget.max_states) throw BudgetExceeded("dfa state budget exceeded");
        rev.push_back(t);
        queue.push_back(t);
      }
      out.next[sd][c] = {it->second};
    }
  }
  out.next.resize(dfa_of.size());
  for (auto& row : out.next)
    if (row.empty()) row.assign(alphabet.size(), {});
  out.accept.resize(dfa_of.size());
  for (size_t i = 0; i < rev.size(); ++i) out.accept[i] = m.accepting(rev[i]);
  return out;
}

// ---------------------------------------------------------------------------
// NFA algebra
// ---------------------------------------------------------------------------

bool NFA::accepts(const std::vector<int>& word) const {
  std::vector<char> cur(accept.size(), 0);
  for (int s : starts) cur[s] = 1;
  for (int a : word) {
    std::vector<char> nxt(accept.size(), 0);
    for (size_t s = 0; s < cur.size(); ++s)
      if (cur[s])
        for (int t : next[s][a]) nxt[t] = 1;
    cur.swap(nxt);
  }
  for (size_t s = 0; s < cur.size(); ++s)
    if (cur[s] && accept[s]) return true;
  return false;
}

NFA nfa_union(const NFA& a, const NFA& b) {
  if (a.alphabet != b.alphabet) throw std::invalid_argument("nfa_union: alphabet mismatch");
  NFA out;
  out.alphabet = a.alphabet;
  out.deterministic = false;
  int off = a.state_count();
  out.accept = a.accept;
  out.accept.insert(out.accept.end(), b.accept.begin(), b.accept.end());
  out.next = a.next;
  for (const auto& row : b.next) {
    auto shifted = row;
    for (auto& cell : shifted)
      for (int& t : cell) t += off;
    out.next.push_back(std::move(shifted));
  }
  out.starts = a.starts;
  for (int s : b.starts) out.starts.push_back(s + off);
  return out;
}

NFA nfa_intersect(const NFA& a, const NFA& b) {
  if (a.alphabet != b.alphabet) throw std::invalid_argument("nfa_intersect: alphabet mismatch");
  NFA out;
  out.alphabet = a.alphabet;
  out.deterministic = a.deterministic && b.deterministic;
  std::map<std::pair<int, int>, int> id;
  std::deque<std::pair<int, int>> queue;
  auto get = [&](int x, int y) {
    auto [it, fresh] = id.emplace(std::make_pair(x, y), int(id.size()));
    if (fresh) queue.push_back({x, y});
    return it->second;
  };
  for (int x : a.starts)
    for (int y : b.starts) out.starts.push_back(get(x, y));
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    int s = id.at({x, y});
    if (int(out.next.size()) <= s) out.next.resize(s + 1);
    out.next[s].assign(a.alphabet, {});
    out.accept.resize(id.size());
    for (int c = 0; c < a.alphabet; ++c) {
      std::set<int> targets;
      for (int tx : a.next[x][c])
        for (int ty : b.next[y][c]) targets.insert(get(tx, ty));
      out.next[s][c].assign(targets.begin(), targets.end());
    }
  }
  out.next.resize(id.size());
  for (auto& row : out.next)
    if (row.empty()) row.assign(a.alphabet, {});
  out.accept.resize(id.size());
  for (const auto& [xy, s] : id) out.accept[s] = a.accept[xy.first] && b.accept[xy.second];
  return out;
}

NFA nfa_complement(const NFA& a, size_t max_states) {
  // determinize (subset construction) unless already a total DFA
  bool total_dfa = a.deterministic && a.starts.size() == 1;
  if (total_dfa)
    for (const auto& row : a.next)
      for (const auto& cell : row)
        if (cell.size() != 1) {
          total_dfa = false;
          break;
        }
  if (total_dfa) {
    NFA out = a;
    for (size_t s = 0; s < out.accept.size(); ++s) out.accept[s] = !out.accept[s];
    return out;
  }
  std::map<std::vector<int>, int> id;
  std::deque<std::vector<int>> queue;
  auto get = [&](std::vector<int> set) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    auto [it, fresh] = id.emplace(set, int(id.size()));
    if (fresh) {
      if (id.size() > max_states) throw BudgetExceeded("determinization budget exceeded");
      queue.push_back(set);
    }
    return it->second;
  };
  NFA out;
  out.alphabet = a.alphabet;
  out.deterministic = true;
  out.starts = {get(a.starts)};
  while (!queue.empty()) {
    std::vector<int> set = queue.front();
    queue.pop_front();
    int s = id.at(set);
    if (int(out.next.size()) <= s) out.next.resize(s + 1);
    out.next[s].assign(a.alphabet, {});
    for (int c = 0; c < a.alphabet; ++c) {
      std::vector<int> targets;
      for (int x : set)
        for (int t : a.next[x][c]) targets.push_back(t);
      out.next[s][c] = {get(std::move(targets))};
    }
  }
  out.next.resize(id.size());
  for (auto& row : out.next)
    if (row.empty()) row.assign(a.alphabet, {});
  out.accept.assign(id.size(), false);
  for (const auto& [set, s] : id) {
    bool acc = false;
    for (int x : set) acc = acc || a.accept[x];
    out.accept[s] = !acc;  // flipped
  }
  return out;
}

std::optional<std::vector<int>> nfa_emptiness_witness(const NFA& a) {
  std::vector<int> parent_state(a.state_count(), -1), parent_letter(a.state_count(), -1);
  std::vector<char> seen(a.state_count(), 0);
  std::deque<int> queue;
  int hit = -1;
  for (int s : a.starts)
    if (!seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
      if (a.accept[s]) hit = s;
    }
  while (hit < 0 && !queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (int c = 0; c < a.alphabet && hit < 0; ++c)
      for (int t : a.next[s][c]) {
        if (seen[t]) continue;
        seen[t] = 1;
        parent_state[t] = s;
        parent_letter[t] = c;
        if (a.accept[t]) {
          hit = t;
          break;
        }
        queue.push_back(t);
      }
  }
  if (hit < 0) return std::nullopt;
  std::vector<int> word;
  for (int s = hit; parent_state[s] >= 0; s = parent_state[s]) word.push_back(parent_letter[s]);
  std::reverse(word.begin(), word.end());
  return word;
}

// ---------------------------------------------------------------------------
// constraint languages over an explicit letter alphabet
// ---------------------------------------------------------------------------

NFA nfa_inac(int k, const std::vector<Letter>& alphabet) {
  (void)k;
  // states: 0 start, 1 + mask-index of the previous letter, last = accept sink
  std::vector<uint32_t> masks;
  for (const Letter& a : alphabet)
    if (std::find(masks.begin(), masks.end(), a.mask) == masks.end()) masks.push_back(a.mask);
  std::sort(masks.begin(), masks.end());
  auto mask_state = [&](uint32_t m) {
    return 1 + int(std::lower_bound(masks.begin(), masks.end(), m) - masks.begin());
  };
  int sink = 1 + int(masks.size());
  NFA out;
  out.alphabet = int(alphabet.size());
  out.deterministic = true;
  out.starts = {0};
  out.accept.assign(sink + 1, false);
  out.accept[sink] = true;
  out.next.assign(sink + 1, std::vector<std::vector<int>>(alphabet.size()));
  for (size_t c = 0; c < alphabet.size(); ++c) {
    out.next[0][c] = {mask_state(alphabet[c].mask)};
    out.next[sink][c] = {sink};
    for (uint32_t m : masks) {
      int s = mask_state(m);
      out.next[s][c] = {(m & alphabet[c].mask) == 0 ? sink : mask_state(alphabet[c].mask)};
    }
  }
  return out;
}

NFA nfa_incon(int k, size_t names, const std::vector<Letter>& alphabet) {
  (void)k;
  (void)names;
  // states: 0 start, 1 + previous letter index, sink accepting
  int sink = 1 + int(alphabet.size());
  NFA out;
  out.alphabet = int(alphabet.size());
  out.deterministic = true;
  out.starts = {0};
  out.accept.assign(sink + 1, false);
  out.accept[sink] = true;
  out.next.assign(sink + 1, std::vector<std::vector<int>>(alphabet.size()));
  auto inconsistent = [&](const Letter& a, const Letter& b) {
    uint32_t shared = a.mask & b.mask;
    if (shared == 0) return false;  // inaccessible, not inconsistent
    uint64_t grid = 0;
    for (int x = 1; x <= a.k; ++x)
      for (int y = 1; y <= a.k; ++y)
        if ((shared >> (x - 1) & 1) && (shared >> (y - 1) & 1))
          grid |= uint64_t(1) << ((x - 1) * a.k + (y - 1));
    for (size_t n = 0; n < a.rel.size(); ++n)
      if ((a.rel[n] & grid) != (b.rel[n] & grid)) return true;
    return false;
  };
  for (size_t c = 0; c < alphabet.size(); ++c) {
    out.next[0][c] = {1 + int(c)};
    out.next[sink][c] = {sink};
    for (size_t p = 0; p < alphabet.size(); ++p)
      out.next[1 + p][c] = {inconsistent(alphabet[p], alphabet[c]) ? sink : 1 + int(c)};
  }
  return out;
}

// two-state machine: accept once some letter satisfies `bad`
static NFA predicate_nfa(const std::vector<Letter>& alphabet,
                         const std::function<bool(const Letter&)>& bad) {
  NFA out;
  out.alphabet = int(alphabet.size());
  out.deterministic = true;
  out.starts = {0};
  out.accept = {false, true};
  out.next.assign(2, std::vector<std::vector<int>>(alphabet.size()));
  for (size_t c = 0; c < alphabet.size(); ++c) {
    out.next[0][c] = {bad(alphabet[c]) ? 1 : 0};
    out.next[1][c] = {1};
  }
  return out;
}

NFA nfa_top(int k, int name_idx, const std::vector<Letter>& alphabet) {
  (void)k;
  return predicate_nfa(alphabet,
                       [name_idx](const Letter& a) { return !letter_top_total(a, name_idx); });
}

NFA nfa_conv(int k, const std::vector<std::pair<int, int>>& var_dual_pairs,
             const std::vector<Letter>& alphabet) {
  (void)k;
  return predicate_nfa(alphabet, [&var_dual_pairs](const Letter& a) {
    for (auto [n, d] : var_dual_pairs)
      if (!letter_conv_ok(a, n, d)) return true;
    return false;
  });
}

NFA nfa_tests(int k, const std::vector<std::pair<int, int>>& test_dual_pairs,
              const std::vector<Letter>& alphabet) {
  (void)k;
  return predicate_nfa(alphabet, [&test_dual_pairs](const Letter& a) {
    for (auto [n, d] : test_dual_pairs)
      if (!letter_tests_ok(a, n, d)) return true;
    return false;
  });
}

NFA nfa_noms(int k, const std::vector<int>& nom_indices, const std::vector<Letter>& alphabet) {
  // per nominal: never pinned / pinned badly / pinned twice at distinct glued
  // vertices; the union over nominals of a (2 + k + 1 + 1)-state chase
  NFA out;
  bool first = true;
  for (int n : nom_indices) {
    // states: 0 all-empty-so-far (accepting: never pinned), 1..k open at x,
    // k+1 closed, k+2 violation sink (accepting)
    NFA one;
    one.alphabet = int(alphabet.size());
    one.deterministic = true;
    one.starts = {0};
    one.accept.assign(k + 3, false);
    one.accept[0] = true;      // no letter ever pinned the nominal
    one.accept[k + 2] = true;  // pinned twice at distinct vertices
    one.next.assign(k + 3, std::vector<std::vector<int>>(alphabet.size()));
    for (size_t c = 0; c < alphabet.size(); ++c) {
      const Letter& a = alphabet[c];
      uint64_t pin = a.rel[n];
      int pinned = -1;  // vertex 1..k when the letter pins the nominal
      bool bad_shape = !letter_nom_ok(a, n);
      if (!bad_shape && pin != 0) {
        int b = std::countr_zero(pin);
        pinned = b / a.k + 1;
      }
      one.next[k + 2][c] = {k + 2};
      if (bad_shape) {
        for (int s = 0; s <= k + 1; ++s) one.next[s][c] = {k + 2};
        continue;
      }
      one.next[0][c] = {pinned < 0 ? 0 : pinned};
      for (int x = 1; x <= k; ++x) {
        int s;
        if (!a.has_vertex(x))
          s = pinned < 0 ? k + 1 : k + 2;  // the pin left the universe
        else if (pinned < 0)
          s = x;
        else
          s = pinned == x ? x : k + 2;
        one.next[x][c] = {s};
      }
      one.next[k + 1][c] = {pinned < 0 ? k + 1 : k + 2};
    }
    out = first ? one : nfa_union(out, one);
    first = false;
  }
  if (first) {  // no nominals: empty language
    out.alphabet = int(alphabet.size());
    out.deterministic = true;
    out.starts = {0};
    out.accept = {false};
    out.next.assign(1, std::vector<std::vector<int>>(alphabet.size(), {0}));
  }
  return out;
}

}  // namespace pcor
