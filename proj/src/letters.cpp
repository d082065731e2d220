#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

#include "pcor/automata.hpp"

namespace pcor {

void Letter::set_edge(int name_idx, int x, int y, bool v) {
  uint64_t bit = uint64_t(1) << ((x - 1) * k + (y - 1));
  if (v)
    rel[name_idx] |= bit;
  else
    rel[name_idx] &= ~bit;
}

bool Letter::operator<(const Letter& o) const {
  if (k != o.k) return k < o.k;
  int pa = std::popcount(mask), pb = std::popcount(o.mask);
  if (pa != pb) return pa < pb;
  if (mask != o.mask) return mask < o.mask;
  // enumeration treats rel[0] as the least significant digit
  for (size_t n = rel.size(); n-- > 0;)
    if (rel[n] != o.rel[n]) return rel[n] < o.rel[n];
  return false;
}

uint64_t count_letters(int k, size_t names, uint64_t cap) {
  if (k < 1) return 0;
  unsigned __int128 total = 0;
  for (int u = 1; u <= k; ++u) {
    // C(k, u)
    unsigned __int128 choose = 1;
    for (int i = 0; i < u; ++i) choose = choose * (k - i) / (i + 1);
    size_t bits = names * size_t(u) * size_t(u);
    if (bits >= 64) return cap;
    total += choose * ((unsigned __int128)1 << bits);
    if (total > cap) return cap;
  }
  return uint64_t(total);
}

void for_each_letter(int k, size_t names, const std::function<void(const Letter&)>& fn) {
  if (k < 1 || k > kMaxLetterK) throw std::invalid_argument("for_each_letter: bad k");
  for (int pop = 1; pop <= k; ++pop) {
    for (uint32_t mask = 1; mask < (uint32_t(1) << k); ++mask) {
      if (std::popcount(mask) != pop) continue;
      // positions of the u*u free bits inside the k*k grid
      std::vector<int> pos;
      for (int x = 1; x <= k; ++x)
        for (int y = 1; y <= k; ++y)
          if ((mask >> (x - 1) & 1) && (mask >> (y - 1) & 1))
            pos.push_back((x - 1) * k + (y - 1));
      if (names > 0 && pos.size() >= 64)
        throw std::invalid_argument("for_each_letter: universe too large to enumerate");
      Letter a;
      a.k = k;
      a.mask = mask;
      a.rel.assign(names, 0);
      // odometer over per-name submatrices, name 0 least significant
      std::vector<uint64_t> digit(names, 0);
      const uint64_t digit_end = uint64_t(1) << pos.size();
      while (true) {
        for (size_t n = 0; n < names; ++n) {
          uint64_t bits = 0;
          for (size_t p = 0; p < pos.size(); ++p)
            if (digit[n] >> p & 1) bits |= uint64_t(1) << pos[p];
          a.rel[n] = bits;
        }
        fn(a);
        size_t n = 0;
        while (n < names && ++digit[n] == digit_end) digit[n++] = 0;
        if (n == names) break;
      }
    }
  }
}

std::vector<Letter> letters(int k, const std::vector<std::string>& names) {
  std::vector<Letter> out;
  for_each_letter(k, names.size(), [&](const Letter& a) { out.push_back(a); });
  return out;
}

Structure letter_structure(const Letter& a, const std::vector<std::string>& names) {
  Structure s;
  std::vector<int> rank(a.k + 1, -1);
  for (int x = 1; x <= a.k; ++x)
    if (a.has_vertex(x)) {
      rank[x] = s.n();
      s.universe.push_back(std::to_string(x));
    }
  int u = s.n();
  for (size_t n = 0; n < names.size(); ++n) {
    BitRel r(u);
    for (int x = 1; x <= a.k; ++x)
      for (int y = 1; y <= a.k; ++y)
        if (rank[x] >= 0 && rank[y] >= 0 && a.edge(int(n), x, y)) r.set(rank[x], rank[y]);
    s.rel[names[n]] = r;
  }
  return s;
}

Structure letter_structure_padded(const Letter& a, const std::vector<std::string>& names) {
  Structure s;
  for (int x = 1; x <= a.k; ++x) s.universe.push_back(std::to_string(x));
  for (size_t n = 0; n < names.size(); ++n) {
    BitRel r(a.k);
    for (int x = 1; x <= a.k; ++x)
      for (int y = 1; y <= a.k; ++y)
        if (a.edge(int(n), x, y)) r.set(x - 1, y - 1);
    s.rel[names[n]] = r;
  }
  return s;
}

Letter structure_to_letter(const Structure& s, int k, const std::vector<std::string>& names) {
  Letter a;
  a.k = k;
  a.rel.assign(names.size(), 0);
  std::vector<int> of_index(s.n(), 0);
  for (int i = 0; i < s.n(); ++i) {
    int x;
    try {
      size_t used = 0;
      x = std::stoi(s.universe[i], &used);
      if (used != s.universe[i].size()) throw std::invalid_argument("");
    } catch (...) {
      throw std::invalid_argument("structure_to_letter: vertex name '" + s.universe[i] +
                                  "' is not in 1.." + std::to_string(k));
    }
    if (x < 1 || x > k)
      throw std::invalid_argument("structure_to_letter: vertex " + s.universe[i] +
                                  " outside 1.." + std::to_string(k));
    a.mask |= uint32_t(1) << (x - 1);
    of_index[i] = x;
  }
  for (size_t n = 0; n < names.size(); ++n) {
    const BitRel* r = s.find(names[n]);
    if (!r) continue;
    for (auto [i, j] : r->pairs()) a.set_edge(int(n), of_index[i], of_index[j]);
  }
  return a;
}

std::vector<Structure> word_structures(const std::vector<Letter>& w,
                                       const std::vector<std::string>& names) {
  std::vector<Structure> out;
  out.reserve(w.size());
  for (const Letter& a : w) out.push_back(letter_structure(a, names));
  return out;
}

// bits of the full grid restricted to the universe, and of its diagonal
static uint64_t grid_bits(const Letter& a) {
  uint64_t g = 0;
  for (int x = 1; x <= a.k; ++x)
    for (int y = 1; y <= a.k; ++y)
      if (a.has_vertex(x) && a.has_vertex(y)) g |= uint64_t(1) << ((x - 1) * a.k + (y - 1));
  return g;
}

static uint64_t diag_bits(const Letter& a) {
  uint64_t d = 0;
  for (int x = 1; x <= a.k; ++x)
    if (a.has_vertex(x)) d |= uint64_t(1) << ((x - 1) * a.k + (x - 1));
  return d;
}

static uint64_t transpose_bits(const Letter& a, uint64_t bits) {
  uint64_t t = 0;
  for (int x = 1; x <= a.k; ++x)
    for (int y = 1; y <= a.k; ++y)
      if (bits >> ((x - 1) * a.k + (y - 1)) & 1) t |= uint64_t(1) << ((y - 1) * a.k + (x - 1));
  return t;
}

bool letter_top_total(const Letter& a, int name_idx) {
  return a.rel[name_idx] == grid_bits(a);
}

bool letter_conv_ok(const Letter& a, int name_idx, int dual_idx) {
  return a.rel[dual_idx] == transpose_bits(a, a.rel[name_idx]);
}

bool letter_tests_ok(const Letter& a, int name_idx, int dual_idx) {
  uint64_t b = a.rel[name_idx], d = a.rel[dual_idx];
  return (b & d) == 0 && (b | d) == diag_bits(a);
}

bool letter_nom_ok(const Letter& a, int name_idx) {
  uint64_t b = a.rel[name_idx];
  if (b == 0) return true;
  return std::popcount(b) == 1 && (b & diag_bits(a)) == b;
}

std::vector<LetterClass> quotient_letters(
    const std::vector<Letter>& ls,
    const std::function<uint64_t(const Letter&)>& fingerprint) {
  std::vector<LetterClass> out;
  std::unordered_map<uint64_t, size_t> seen;
  for (const Letter& a : ls) {
    uint64_t fp = fingerprint(a);
    auto it = seen.find(fp);
    if (it == seen.end()) {
      seen.emplace(fp, out.size());
      out.push_back(LetterClass{a, fp, 1});
    } else {
      ++out[it->second].count;
    }
  }
  return out;
}

}  // namespace pcor
