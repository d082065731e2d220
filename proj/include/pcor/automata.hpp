#pragma once

// Word automata over structures. A decision instance t1 <= t2 is translated
// to an inclusion between word languages: words are sequences of structures
// ("letters") whose universes are subsets of {1..k}, adjacent letters glue on
// equally named vertices, and a two-way alternating automaton built from the
// derivative closure of a term accepts exactly the words whose gluing relates
// two vertices of the first letter by the term. Inclusion is then checked on
// deterministic boundary-summary machines derived from the alternating
// automata, with counterexample words glued back into concrete structures and
// re-certified against the plain relational semantics.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pcor/derive.hpp"
#include "pcor/model.hpp"
#include "pcor/term.hpp"

namespace pcor {

// ---------------------------------------------------------------------------
// Letters. A letter is a structure with universe a nonempty subset of
// {"1".."k"} and one k x k bit matrix per relation name. k <= 8 keeps every
// matrix in one word; the decision pipeline never needs more before running
// out of letter budget anyway.
// ---------------------------------------------------------------------------

constexpr int kMaxLetterK = 8;

struct Letter {
  int k = 0;
  uint32_t mask = 0;               // bit x-1 set iff vertex "x" is present
  std::vector<uint64_t> rel;       // per name: bit (x-1)*k + (y-1) iff x -> y

  bool has_vertex(int x) const { return (mask >> (x - 1)) & 1; }  // x in 1..k
  bool edge(int name_idx, int x, int y) const {
    return (rel[name_idx] >> ((x - 1) * k + (y - 1))) & 1;
  }
  void set_edge(int name_idx, int x, int y, bool v = true);
  bool operator==(const Letter& o) const {
    return k == o.k && mask == o.mask && rel == o.rel;
  }
  // total order consistent with the enumeration order
  bool operator<(const Letter& o) const;
};

// saturating count of all letters over k vertices and n names
uint64_t count_letters(int k, size_t names, uint64_t cap = UINT64_MAX);

// every letter, universes by popcount then value, relations in mask order
std::vector<Letter> letters(int k, const std::vector<std::string>& names);
void for_each_letter(int k, size_t names, const std::function<void(const Letter&)>& fn);

// the letter as a plain structure (universe restricted to mask)
Structure letter_structure(const Letter& a, const std::vector<std::string>& names);
// universe padded to {"1".."k"}: absent vertices isolated; vertex "x" has
// index x-1, so labels of derivative terms coincide with vertex indices
Structure letter_structure_padded(const Letter& a, const std::vector<std::string>& names);
// inverse of letter_structure; throws if a vertex name is not in {"1".."k"}
Letter structure_to_letter(const Structure& s, int k, const std::vector<std::string>& names);

// words as structures (gluing, files, counterexamples)
std::vector<Structure> word_structures(const std::vector<Letter>& w,
                                       const std::vector<std::string>& names);

// per-letter model-class predicates (the class languages below are unions of
// "some letter fails" plus, for nominals, global conditions)
bool letter_top_total(const Letter& a, int name_idx);
bool letter_conv_ok(const Letter& a, int name_idx, int dual_idx);
bool letter_tests_ok(const Letter& a, int name_idx, int dual_idx);
bool letter_nom_ok(const Letter& a, int name_idx);  // empty or one loop

// ---------------------------------------------------------------------------
// Letter classes: quotient of the alphabet by a fingerprint that the summary
// construction provably cannot distinguish (same universe and same lifted
// one-step derivative edges for every automaton under consideration).
// ---------------------------------------------------------------------------

struct LetterClass {
  Letter rep;              // first letter of the class in enumeration order
  uint64_t signature = 0;
  uint32_t count = 1;      // class size
};

std::vector<LetterClass> quotient_letters(
    const std::vector<Letter>& ls,
    const std::function<uint64_t(const Letter&)>& fingerprint);

// ---------------------------------------------------------------------------
// Positive boolean formulas in disjunctive normal form. A literal (q, d)
// reads state q at the neighbouring position offset d in {-1,0,+1}; an empty
// clause is true, an empty clause list is false.
// ---------------------------------------------------------------------------

struct PosBool {
  using Literal = std::pair<int, int>;  // (state, offset)
  std::vector<std::vector<Literal>> clauses;

  static PosBool false_() { return {}; }
  static PosBool true_() { return PosBool{{{}}}; }
  bool is_false() const { return clauses.empty(); }
  bool is_true() const;
};

// ---------------------------------------------------------------------------
// The two-way alternating automaton of a term. States:
//   0                      initial
//   1 + 2*(i*m + j)        pair (cl[i], cl[j]) pending   (tag ?)
//   2 + 2*(i*m + j)        pair (cl[i], cl[j]) confirmed (tag ok)
// where cl is the derivative closure of the term over labels {0..k-1} plus
// the isolated label k standing for the padding vertex. The left endmarker
// spawns pairs (@x.t, acc) with acc accepting at y; a pending pair confirms
// on a letter containing all its labels; a confirmed pair holds by a
// derivative run within the letter, by composition, by relabeling a padded
// pair, or transports to a neighbouring position as pending again.
// ---------------------------------------------------------------------------

class TwoAFA {
 public:
  TwoAFA(int k, Term t, const std::vector<std::string>& names);

  int k() const { return k_; }
  Term term() const { return t_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<LTerm>& cl() const { return cl_; }
  int cl_index(LTerm l) const;  // -1 when absent
  int state_count() const { return 1 + 2 * m_ * m_; }

  int pending_state(int i, int j) const { return 1 + 2 * (i * m_ + j); }
  int confirmed_state(int i, int j) const { return 2 + 2 * (i * m_ + j); }
  // decodes a state id; returns false for the initial state
  bool decode(int state, int* i, int* j, bool* confirmed) const;

  // transition on a letter (cached by letter content) and on the endmarkers
  PosBool delta(int state, const Letter& a) const;
  PosBool delta_left_marker(int state) const;   // the only non-false row: initial
  PosBool delta_right_marker(int state) const;  // always false

  // labels of both components lie in the letter's universe or are the pad
  bool labels_valid(int i, int j, const Letter& a) const;
  // multi-step derivative reachability cl[i] ->* cl[j] inside the letter
  bool derives_within(int i, int j, const Letter& a) const;

  int eps_anchor(int cl_idx) const { return eps_anchor_[cl_idx]; }  // -1 if none

  struct Cache;  // letter-indexed transition data, shared across copies

 private:
  int k_;
  Term t_;
  std::vector<std::string> names_;
  std::vector<LTerm> cl_;
  int m_;
  std::vector<int> eps_anchor_;
  std::shared_ptr<Cache> cache_;
};

TwoAFA build_2afa(int k, Term t, const std::vector<std::string>& names);

// word acceptance by the least fixpoint of the transition table over
// positions 0..n+1 (endmarkers at both ends); the empty word is rejected
bool membership(const TwoAFA& A, const std::vector<Letter>& w);
bool membership(const TwoAFA& A, const std::vector<Structure>& w);

// ---------------------------------------------------------------------------
// NFAs over an indexed alphabet of letter classes.
// ---------------------------------------------------------------------------

struct NFA {
  int alphabet = 0;
  std::vector<int> starts;
  std::vector<bool> accept;
  // next[state][letter] = sorted target states
  std::vector<std::vector<std::vector<int>>> next;
  bool deterministic = false;  // exactly one start, one target per cell

  int state_count() const { return static_cast<int>(accept.size()); }
  bool accepts(const std::vector<int>& word) const;
};

NFA nfa_union(const NFA& a, const NFA& b);
NFA nfa_intersect(const NFA& a, const NFA& b);
// determinizes when needed (throws BudgetExceeded past max_states), flips
NFA nfa_complement(const NFA& a, size_t max_states = size_t(1) << 18);
// shortest accepted word as letter indices; nullopt when the language is empty
std::optional<std::vector<int>> nfa_emptiness_witness(const NFA& a);

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Constraint languages: each automaton accepts exactly the words that leave
// the intended model class or break the gluing discipline, so language
// inclusion is checked against the union of the decision automaton and these.
//   inac : some adjacent pair of letters shares no vertex
//   incon: some adjacent pair disagrees on an edge between shared vertices
//   top  : some letter's c_top relation misses a pair of present vertices
//   conv : some letter where conv_a differs from the transpose of a
//   tests: some letter where b and not_b fail to partition the diagonal
//   noms : some nominal never pinned, pinned off the diagonal, pinned twice
//          at differently glued vertices, or pinned at a vertex that leaves
//          the universe between two pins
// ---------------------------------------------------------------------------

NFA nfa_inac(int k, const std::vector<Letter>& alphabet);
NFA nfa_incon(int k, size_t names, const std::vector<Letter>& alphabet);
NFA nfa_top(int k, int name_idx, const std::vector<Letter>& alphabet);
NFA nfa_conv(int k, const std::vector<std::pair<int, int>>& var_dual_pairs,
             const std::vector<Letter>& alphabet);
NFA nfa_tests(int k, const std::vector<std::pair<int, int>>& test_dual_pairs,
              const std::vector<Letter>& alphabet);
NFA nfa_noms(int k, const std::vector<int>& nom_indices,
             const std::vector<Letter>& alphabet);

// ---------------------------------------------------------------------------
// Deterministic boundary-summary machine of a two-way alternating automaton.
// A state summarizes a word prefix by everything the suffix can observe:
// which boundary facts hold outright and which follow from facts the suffix
// may still establish. Two tiers share the interface: intersection-free
// closures use plain reachability matrices; general closures use guarded
// entries whose conditions are pad-labeled boundary pairs.
// ---------------------------------------------------------------------------

class SummaryMachine {
 public:
  struct Budget {
    size_t max_states = size_t(1) << 19;
    size_t max_entries = size_t(1) << 16;  // per-state guarded entries (tier 2)
  };

  explicit SummaryMachine(const TwoAFA& A) : SummaryMachine(A, Budget{}) {}
  SummaryMachine(const TwoAFA& A, Budget budget);
  ~SummaryMachine();
  SummaryMachine(SummaryMachine&&) noexcept;

  int tier() const;  // 1: matrix summaries, 2: guarded summaries
  int initial() const;
  // deterministic successor; throws BudgetExceeded when interning would
  // exceed the state budget or a tier-2 summary overflows
  int next(int state, const Letter& a);
  bool accepting(int state) const;
  size_t interned_states() const;

  // fingerprint of the letter as this machine sees it (lifted edge sets plus
  // the universe); safe input to quotient_letters
  uint64_t letter_fingerprint(const Letter& a) const;
  // the underlying lifted node-pair set, sorted; two letters with the same
  // universe act identically on every state iff these sets are equal, and
  // pointwise-larger sets yield pointwise-larger summaries
  std::vector<std::pair<int, int>> letter_lifts(const Letter& a) const;

  // thread-safe batch: successors of one state over many letters
  std::vector<int> next_batch(int state, const std::vector<const Letter*>& as, int jobs);

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// DFA of the summary machine over an explicit class alphabet
NFA twoafa_to_nfa(const TwoAFA& A, const std::vector<LetterClass>& alphabet,
                  SummaryMachine::Budget budget = {});

// ---------------------------------------------------------------------------
// Brute-force refutation and the decision pipeline.
// ---------------------------------------------------------------------------

struct Refutation {
  Structure s;
  std::pair<std::string, std::string> pair;
};

// smallest class-compliant countermodel of t1 <= t2 with at most maxN
// vertices (exhaustive up to the mask budget, deterministic regardless of
// jobs); names = variables of both terms plus declared tests and nominals
std::optional<Refutation> refute_models(Term t1, Term t2, int maxN,
                                        const ClassFilter& filter, int jobs = 1,
                                        uint64_t mask_budget = uint64_t(1) << 24,
                                        bool* exhaustive = nullptr);

struct DecideOptions {
  Signature sig;
  std::string mode = "auto";  // auto | oracle | automata | refute
  int max_model_size = 3;
  int star_depth = 3;
  uint64_t letter_budget = uint64_t(1) << 21;
  size_t state_budget = size_t(1) << 19;
  size_t entry_budget = size_t(1) << 16;
  bool quotient = true;
  uint64_t seed = 0;  // recorded in reports; the pipeline itself is exact
  int jobs = 1;
};

struct DecideBounds {
  int max_model_size = 0;
  int star_depth = 0;
  int k = 0;
  uint64_t letters = 0;        // filtered alphabet size (0 when unused)
  uint64_t classes = 0;        // after quotienting
  uint64_t states = 0;         // product states explored
  bool models_exhaustive = false;
};

struct Verdict {
  enum Kind { Valid, Invalid, Unknown } kind = Unknown;
  std::string method;  // refutation | graph-oracle | automata | trivial
  std::string reason;  // Unknown: which budget ran out; Valid: certificate note
  std::optional<Structure> counter;                          // Invalid
  std::optional<std::pair<std::string, std::string>> pair;   // Invalid
  std::optional<std::vector<Structure>> word;                // automata Invalid
  DecideBounds bounds;
};

// decides t1 <= t2 over all binary relations restricted to the declared
// model classes; Invalid always carries a countermodel re-checked against
// the plain semantics of the original terms
Verdict decide(Term t1, Term t2, const DecideOptions& opt);

// JSON certificate (stable field order, suitable for byte-identical replay)
std::string verdict_to_json(const Verdict& v, Term t1, Term t2, const DecideOptions& opt);

}  // namespace pcor
