#pragma once

// Labeled terms and their derivatives over a fixed structure. A labeled term
// pins term positions to structure vertices; one-step derivatives consume an
// atomic run descriptor and rewrite the term, so that reachability plus the
// empty-run test recomputes the relational semantics without enumerating
// graphs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcor/graphs.hpp"
#include "pcor/model.hpp"
#include "pcor/term.hpp"

namespace pcor {

// Labels are vertex indices of the structure under consideration; the
// distinguished isolated label is simply the extra vertex appended by
// with_isolated(), so it never collides with a real vertex.

enum class LOp : uint8_t {
  LAt,     // @x.t
  LSeq,    // l ;1 t
  LInter,  // l1 /\1 l2
  LBot,    // stand-in for the bare term 0 produced by closure()
};

struct LTermNode {
  LOp op;
  int32_t label;       // LAt only
  Term term;           // LAt: body; LSeq: right-hand term
  const LTermNode* a;  // LSeq/LInter: left sub-lterm
  const LTermNode* b;  // LInter: right sub-lterm
  uint32_t width;      // number of label occurrences
  uint64_t hash;
  uint64_t id;  // creation index; gives a stable deterministic order
};

// interned: equal lterms are pointer-equal
using LTerm = const LTermNode*;

LTerm mk_at(int32_t label, Term t);
// normalizes (@z.1) ;1 t to @z.t (except t = 0, which closure() must keep
// apart); the two forms step and accept identically, and examples are stated
// in the short form
LTerm mk_seq1(LTerm a, Term t);
LTerm mk_inter1(LTerm a, LTerm b);
LTerm mk_lbot();

std::vector<int32_t> label_vector(LTerm l);
// replace the pos-th label occurrence (1-based), leaving the rest untouched
LTerm relabel(LTerm l, int pos, int32_t label);

std::string render_lterm(LTerm l);                      // labels as raw indices
std::string render_lterm(LTerm l, const Structure& s);  // labels as vertex names

// the empty-run acceptance test at label z
bool eps(int32_t z, LTerm l);

// all labeled terms one-step derivatives can ever reach, over any structure
// whose vertex set is `labels`; a superset of reach() minus the seed
std::vector<LTerm> closure(Term t, const std::vector<int32_t>& labels);
std::vector<LTerm> closure(LTerm l, const std::vector<int32_t>& labels);

struct DeriveStep {
  AtomicRun run;
  LTerm to;
};

// one-step derivatives of l over s, each tagged with the atomic run it
// consumes; labels of l must be vertices of s
std::vector<DeriveStep> step(const Structure& s, LTerm l);

// reflexive-transitive closure of step successors (memoized per structure)
std::vector<LTerm> reach(const Structure& s, LTerm l);

// s plus one fresh isolated vertex (the distinguished label, index s.n())
Structure with_isolated(const Structure& s);

// shortest derivation from start to some lterm accepting at `accept`
std::optional<std::vector<DeriveStep>> derivation_to(const Structure& s, LTerm start,
                                                     int32_t accept);

// the relation of t over s, computed via derivatives; agrees with eval(s, t)
BitRel semantics_via_derivatives(const Structure& s, Term t);

}  // namespace pcor
