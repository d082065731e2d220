#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pcor/term.hpp"

namespace pcor {

// ---------------------------------------------------------------------------
// BitRel: a binary relation on {0..n-1} as a row-major bit matrix.
// ---------------------------------------------------------------------------

struct BitRel {
  int n = 0;
  std::vector<uint64_t> bits;

  BitRel() = default;
  explicit BitRel(int n_) : n(n_), bits((static_cast<size_t>(n_) * n_ + 63) / 64, 0) {}

  static BitRel identity(int n);
  static BitRel full(int n);

  bool get(int i, int j) const {
    size_t k = static_cast<size_t>(i) * n + j;
    return (bits[k >> 6] >> (k & 63)) & 1;
  }
  void set(int i, int j, bool v = true) {
    size_t k = static_cast<size_t>(i) * n + j;
    if (v)
      bits[k >> 6] |= (1ULL << (k & 63));
    else
      bits[k >> 6] &= ~(1ULL << (k & 63));
  }

  BitRel compose(const BitRel& o) const;
  BitRel transpose() const;
  BitRel star() const;  // reflexive-transitive closure
  BitRel operator|(const BitRel& o) const;
  BitRel operator&(const BitRel& o) const;
  BitRel minus(const BitRel& o) const;
  bool operator==(const BitRel& o) const { return n == o.n && bits == o.bits; }
  bool subset_of(const BitRel& o) const;
  bool empty() const;
  int count() const;
  std::vector<std::pair<int, int>> pairs() const;
};

// ---------------------------------------------------------------------------
// Structure: finite edge-labeled directed graph; also the letter type of all
// automata. Universe is a list of opaque vertex names; relations are indexed
// by symbol name in sorted order (deterministic iteration).
// ---------------------------------------------------------------------------

struct Structure {
  std::vector<std::string> universe;
  std::map<std::string, BitRel> rel;

  int n() const { return static_cast<int>(universe.size()); }
  int vertex(const std::string& name) const;  // -1 when absent
  void ensure_name(const std::string& name);
  const BitRel* find(const std::string& name) const;
  bool add_edge(const std::string& name, const std::string& from, const std::string& to);
  std::string canonical_bytes() const;  // exact-equality fingerprint
};

// structure text format used everywhere (files, counterexamples, letters):
// {"universe":["x","y"],"rel":{"a":[["x","y"]]}}
std::string structure_to_json(const Structure& s);
Structure structure_from_json(const std::string& text);
// a JSON array of structures (word files)
std::string word_to_json(const std::vector<Structure>& w);
std::vector<Structure> word_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// semantics
// ---------------------------------------------------------------------------

// the relational semantics of t on S; ~ transposes, ^- complements against
// the identity, T is the full relation; throws on names missing from S.rel
BitRel eval(const Structure& s, Term t);

// nullopt when eval(t1) is contained in eval(t2); otherwise a witness pair
std::optional<std::pair<std::string, std::string>> check_leq_on(const Structure& s,
                                                                Term t1, Term t2);

// ---------------------------------------------------------------------------
// gluing and path decompositions
// ---------------------------------------------------------------------------

// quotiented disjoint union: <i,x> ~ <i+1,x> when x lies in both universes;
// glued vertex names are "<first bag index>.<local name>", bags 1-based
Structure glue(const std::vector<Structure>& bags);

// the canonical image of bag i inside glue(bags) (vertices renamed to class
// representatives, relations mapped along)
std::vector<Structure> glue_images(const std::vector<Structure>& bags);

struct PathDecompCheck {
  bool ok = false;
  int width = -1;  // max bag size - 1 (meaningful when ok)
  std::string reason;
};

// three conditions: vertex cover, edge cover (every S-edge inside some bag,
// every bag edge an S-edge), and the interval property per vertex
PathDecompCheck is_path_decomposition(const std::vector<Structure>& bags,
                                      const Structure& s);

// ---------------------------------------------------------------------------
// model classes and enumeration
// ---------------------------------------------------------------------------

bool class_membership_conv(const Structure& s);
bool class_membership_tests(const Structure& s, const std::set<std::string>& tests);
bool class_membership_noms(const Structure& s, const std::set<std::string>& noms);

struct ClassFilter {
  bool conv = false;
  std::set<std::string> tests;
  std::set<std::string> noms;
  bool admits(const Structure& s) const;
};

// structure with universe {"1".."n"} and relations over `names` decoded from
// `mask`: bit (name_index * n * n + i * n + j) set iff edge names[k]: i -> j
Structure structure_from_mask(int n, const std::vector<std::string>& names, uint64_t mask);

// every structure with universe {1..n}, n <= maxN, deterministic order
// (universes by size, relations by mask); stops early when fn returns false
void for_each_structure(int maxN, const std::vector<std::string>& names,
                        const ClassFilter& filter,
                        const std::function<bool(const Structure&)>& fn);

std::vector<Structure> enumerate_structures(int maxN, const std::vector<std::string>& names,
                                            const ClassFilter& filter = {});

bool structure_isomorphic(const Structure& a, const Structure& b);

}  // namespace pcor
