#include <algorithm>
#include <bit>
#include <cstring>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "pcor/automata.hpp"

namespace pcor {

bool PosBool::is_true() const {
  for (const auto& c : clauses)
    if (c.empty()) return true;
  return false;
}

// ---------------------------------------------------------------------------
// per-letter derived data, keyed by the letter's raw bytes
// ---------------------------------------------------------------------------

namespace {

std::string letter_key(const Letter& a) {
  std::string key;
  key.reserve(8 + a.rel.size() * 8);
  key.append(reinterpret_cast<const char*>(&a.k), sizeof a.k);
  key.append(reinterpret_cast<const char*>(&a.mask), sizeof a.mask);
  for (uint64_t r : a.rel) key.append(reinterpret_cast<const char*>(&r), sizeof r);
  return key;
}

struct PerLetter {
  std::vector<char> valid;         // labels inside universe-or-pad, per cl index
  std::vector<uint64_t> reach;     // m rows of ceil(m/64) words
  size_t row_words = 0;
  std::mutex delta_mu;
  std::unordered_map<int, PosBool> delta_cache;

  bool reach_bit(int i, int j) const {
    return (reach[size_t(i) * row_words + (size_t(j) >> 6)] >> (j & 63)) & 1;
  }
};

}  // namespace

struct TwoAFA::Cache {
  std::mutex mu;
  std::unordered_map<std::string, std::unique_ptr<PerLetter>> per_letter;
  std::unordered_map<LTerm, int> cl_index;
};

TwoAFA::TwoAFA(int k, Term t, const std::vector<std::string>& names)
    : k_(k), t_(t), names_(names), cache_(std::make_shared<Cache>()) {
  if (k < 1 || k > kMaxLetterK) throw std::invalid_argument("TwoAFA: k out of range");
  if (!is_kl(t)) throw std::invalid_argument("TwoAFA: term must be in the plain fragment");
  std::vector<int32_t> labels;
  for (int x = 0; x <= k; ++x) labels.push_back(x);  // k is the pad label
  cl_ = closure(t, labels);
  m_ = int(cl_.size());
  for (int i = 0; i < m_; ++i) cache_->cl_index.emplace(cl_[i], i);
  eps_anchor_.assign(m_, -1);
  for (int i = 0; i < m_; ++i)
    for (int32_t z = 0; z <= k; ++z)
      if (eps(z, cl_[i])) {
        eps_anchor_[i] = z;
        break;
      }
}

TwoAFA build_2afa(int k, Term t, const std::vector<std::string>& names) {
  return TwoAFA(k, t, names);
}

int TwoAFA::cl_index(LTerm l) const {
  auto it = cache_->cl_index.find(l);
  return it == cache_->cl_index.end() ? -1 : int(it->second);
}

bool TwoAFA::decode(int state, int* i, int* j, bool* confirmed) const {
  if (state <= 0) return false;
  int p = (state - 1) / 2;
  *confirmed = (state - 1) % 2 != 0;
  *i = p / m_;
  *j = p % m_;
  return true;
}

static PerLetter* per_letter_data(const TwoAFA& A, TwoAFA::Cache& cache, const Letter& a,
                                  const std::vector<LTerm>& cl) {
  std::string key = letter_key(a);
  {
    std::lock_guard<std::mutex> lock(cache.mu);
    auto it = cache.per_letter.find(key);
    if (it != cache.per_letter.end()) return it->second.get();
  }
  auto pl = std::make_unique<PerLetter>();
  const int m = int(cl.size());
  const int k = A.k();
  pl->row_words = (size_t(m) + 63) / 64;
  pl->valid.assign(m, 0);
  pl->reach.assign(size_t(m) * pl->row_words, 0);
  uint32_t ok_labels = a.mask | (uint32_t(1) << k);  // label x-1 per vertex x, pad = k
  for (int i = 0; i < m; ++i) {
    bool v = true;
    for (int32_t l : label_vector(cl[i]))
      if (!(ok_labels >> l & 1)) {
        v = false;
        break;
      }
    pl->valid[i] = v;
  }
  Structure s = with_isolated(letter_structure_padded(a, A.names()));
  for (int i = 0; i < m; ++i) {
    for (LTerm r : reach(s, cl[i])) {
      int j = A.cl_index(r);
      if (j >= 0) pl->reach[size_t(i) * pl->row_words + (size_t(j) >> 6)] |= uint64_t(1) << (j & 63);
    }
  }
  std::lock_guard<std::mutex> lock(cache.mu);
  auto [it, fresh] = cache.per_letter.emplace(std::move(key), std::move(pl));
  (void)fresh;  // a concurrent builder may have won; both are identical
  return it->second.get();
}

bool TwoAFA::labels_valid(int i, int j, const Letter& a) const {
  PerLetter* pl = per_letter_data(*this, *cache_, a, cl_);
  return pl->valid[i] && pl->valid[j];
}

bool TwoAFA::derives_within(int i, int j, const Letter& a) const {
  PerLetter* pl = per_letter_data(*this, *cache_, a, cl_);
  return pl->reach_bit(i, j);
}

PosBool TwoAFA::delta_left_marker(int state) const {
  if (state != 0) return PosBool::false_();
  PosBool d;
  for (int x = 0; x < k_; ++x) {
    int ix = cl_index(mk_at(x, t_));
    if (ix < 0) continue;
    for (int j = 0; j < m_; ++j)
      if (eps_anchor_[j] >= 0 && eps_anchor_[j] < k_)
        d.clauses.push_back({{pending_state(ix, j), +1}});
  }
  return d;
}

PosBool TwoAFA::delta_right_marker(int) const { return PosBool::false_(); }

PosBool TwoAFA::delta(int state, const Letter& a) const {
  PerLetter* pl = per_letter_data(*this, *cache_, a, cl_);
  {
    std::lock_guard<std::mutex> lock(pl->delta_mu);
    auto it = pl->delta_cache.find(state);
    if (it != pl->delta_cache.end()) return it->second;
  }
  PosBool d;
  int i, j;
  bool confirmed;
  if (decode(state, &i, &j, &confirmed)) {
    if (!confirmed) {
      // a pending pair confirms in place when the letter carries its labels
      if (pl->valid[i] && pl->valid[j]) d.clauses.push_back({{confirmed_state(i, j), 0}});
    } else if (pl->reach_bit(i, j)) {
      // a derivative run inside this letter settles the pair outright
      d = PosBool::true_();
    } else {
      d.clauses.push_back({{pending_state(i, j), -1}});
      d.clauses.push_back({{pending_state(i, j), +1}});
      for (int h = 0; h < m_; ++h)
        if (pl->valid[h] && h != i && h != j)
          d.clauses.push_back({{confirmed_state(i, h), 0}, {confirmed_state(h, j), 0}});
      std::vector<int32_t> lv1 = label_vector(cl_[i]), lv2 = label_vector(cl_[j]);
      for (size_t p = 0; p < lv1.size(); ++p)
        for (size_t q = 0; q < lv2.size(); ++q)
          if (lv1[p] == lv2[q] && lv1[p] != k_) {
            int ip = cl_index(relabel(cl_[i], int(p) + 1, k_));
            int jp = cl_index(relabel(cl_[j], int(q) + 1, k_));
            if (ip >= 0 && jp >= 0) d.clauses.push_back({{confirmed_state(ip, jp), 0}});
          }
    }
  }
  std::lock_guard<std::mutex> lock(pl->delta_mu);
  return pl->delta_cache.emplace(state, std::move(d)).first->second;
}

// ---------------------------------------------------------------------------
// membership: least fixpoint of the transition rules over states x positions.
// Evaluated by forward chaining on typed facts instead of scanning the full
// delta table: a confirmed pair's composition row alone has one clause per
// closure term, so materializing PosBool for all 1 + 2m^2 states is O(m^3)
// memory. The facts here are exactly the derivable (state, position) pairs of
// the clause semantics; test suites pin the equivalence against delta().
// ---------------------------------------------------------------------------

bool membership(const TwoAFA& A, const std::vector<Letter>& w) {
  const int n = int(w.size());
  // the initial state's clauses read position 1, the right endmarker when the
  // word is empty, where every formula is false
  if (n == 0) return false;
  const int m = int(A.cl().size());
  const int k = A.k();
  const size_t words = (size_t(m) + 63) / 64;

  // per interior position: confirmed facts (row- and column-major for the two
  // composition sweeps), pending facts, and label validity
  std::vector<std::vector<uint64_t>> conf_row(static_cast<size_t>(n)),
      conf_col(static_cast<size_t>(n)), pend_row(static_cast<size_t>(n));
  std::vector<std::vector<char>> valid(static_cast<size_t>(n));
  for (int p = 0; p < n; ++p) {
    conf_row[size_t(p)].assign(size_t(m) * words, 0);
    conf_col[size_t(p)].assign(size_t(m) * words, 0);
    pend_row[size_t(p)].assign(size_t(m) * words, 0);
    valid[size_t(p)].resize(size_t(m));
    for (int i = 0; i < m; ++i) valid[size_t(p)][size_t(i)] = A.labels_valid(i, i, w[size_t(p)]);
  }

  // reverse relabeling index: rev[l][target] = sources whose label l can be
  // sent to the pad to reach target (the L rule, letter-independent)
  std::vector<std::vector<std::vector<int>>> rev(
      static_cast<size_t>(k), std::vector<std::vector<int>>(static_cast<size_t>(m)));
  for (int i = 0; i < m; ++i) {
    std::vector<int32_t> lv = label_vector(A.cl()[size_t(i)]);
    for (size_t pos = 0; pos < lv.size(); ++pos) {
      int32_t l = lv[pos];
      if (l < 0 || l >= k) continue;
      int ip = A.cl_index(relabel(A.cl()[size_t(i)], int(pos) + 1, k));
      if (ip < 0) continue;
      auto& v = rev[size_t(l)][size_t(ip)];
      if (std::find(v.begin(), v.end(), i) == v.end()) v.push_back(i);
    }
  }

  struct Fact {
    int p, i, j;
    bool pend;
  };
  std::deque<Fact> work;
  auto test_set = [&](std::vector<uint64_t>& bits, int r, int c) {
    uint64_t& wd = bits[size_t(r) * words + (size_t(c) >> 6)];
    uint64_t bit = uint64_t(1) << (c & 63);
    if (wd & bit) return true;
    wd |= bit;
    return false;
  };
  auto add_conf = [&](int p, int i, int j) {
    if (test_set(conf_row[size_t(p)], i, j)) return;
    test_set(conf_col[size_t(p)], j, i);
    work.push_back({p, i, j, false});
  };
  auto add_pend = [&](int p, int i, int j) {
    if (test_set(pend_row[size_t(p)], i, j)) return;
    work.push_back({p, i, j, true});
  };

  // D rule: a derivative run within the letter settles the pair outright
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (A.derives_within(i, j, w[size_t(p)])) add_conf(p, i, j);

  while (!work.empty()) {
    Fact f = work.front();
    work.pop_front();
    const int p = f.p, x = f.i, y = f.j;
    if (f.pend) {
      // transport: a neighbouring position adopts the pair as confirmed
      if (p > 0) add_conf(p - 1, x, y);
      if (p + 1 < n) add_conf(p + 1, x, y);
      continue;
    }
    // a confirmed pair whose labels live in the letter turns pending in place
    if (valid[size_t(p)][size_t(x)] && valid[size_t(p)][size_t(y)]) add_pend(p, x, y);
    // composition through a valid middle term h distinct from both ends;
    // here h = y as the left sweep, h = x as the right sweep
    if (valid[size_t(p)][size_t(y)] && y != x) {
      const uint64_t* row = &conf_row[size_t(p)][size_t(y) * words];
      for (size_t wd = 0; wd < words; ++wd)
        for (uint64_t bits = row[wd]; bits; bits &= bits - 1) {
          int j2 = int(wd * 64) + std::countr_zero(bits);
          if (j2 != y) add_conf(p, x, j2);
        }
    }
    if (valid[size_t(p)][size_t(x)] && x != y) {
      const uint64_t* col = &conf_col[size_t(p)][size_t(x) * words];
      for (size_t wd = 0; wd < words; ++wd)
        for (uint64_t bits = col[wd]; bits; bits &= bits - 1) {
          int i2 = int(wd * 64) + std::countr_zero(bits);
          if (i2 != x) add_conf(p, i2, y);
        }
    }
    // L rule: any pair relabeling onto (x, y) at a shared real label holds too
    for (int l = 0; l < k; ++l) {
      const auto& si = rev[size_t(l)][size_t(x)];
      if (si.empty()) continue;
      const auto& sj = rev[size_t(l)][size_t(y)];
      for (int i0 : si)
        for (int j0 : sj) add_conf(p, i0, j0);
    }
  }

  // initial state: some spawned pair (@x.t, eps-accepting) pending at the
  // first letter
  for (int x = 0; x < k; ++x) {
    int ix = A.cl_index(mk_at(x, A.term()));
    if (ix < 0) continue;
    const uint64_t* row = &pend_row[0][size_t(ix) * words];
    for (int j = 0; j < m; ++j) {
      int anchor = A.eps_anchor(j);
      if (anchor >= 0 && anchor < k && ((row[size_t(j) >> 6] >> (j & 63)) & 1)) return true;
    }
  }
  return false;
}

bool membership(const TwoAFA& A, const std::vector<Structure>& w) {
  std::vector<Letter> ls;
  ls.reserve(w.size());
  for (const Structure& s : w) ls.push_back(structure_to_letter(s, A.k(), A.names()));
  return membership(A, ls);
}

}  // namespace pcor
