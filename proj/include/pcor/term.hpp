#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcor {

// ---------------------------------------------------------------------------
// Symbols.
//
// Names are interned process-wide; a symbol is an int handle. Derived and
// reserved names have fixed spellings so freshness is a purely lexical check:
//   conv_<a>  converse dual of variable a
//   not_<b>   complement of test b
//   c_top     the relation encoding the full relation via c_top*
//   __l, __r  decision markers wrapped around the left-hand side
// ---------------------------------------------------------------------------

int sym_id(const std::string& name);
const std::string& sym_name(int id);

bool is_reserved_name(const std::string& name);   // c_top, __l, __r
bool is_derived_name(const std::string& name);    // conv_*, not_*
std::string dual_name(const std::string& name);   // a <-> conv_a
std::string complement_name(const std::string& name); // b <-> not_b

struct Signature {
  std::set<std::string> tests;     // B
  std::set<std::string> nominals;  // N

  // user-declared names must stay clear of the reserved/derived namespace
  void declare_test(const std::string& b);
  void declare_nominal(const std::string& l);
  bool is_test(const std::string& n) const { return tests.count(n) > 0; }
  bool is_nominal(const std::string& n) const { return nominals.count(n) > 0; }
};

// ---------------------------------------------------------------------------
// Terms: {variable, 1, 0, T, ;, +, &, converse ~, star *, test complement ^-}
// Hash-consed: Term is a pointer into a process-global intern table, equality
// is pointer equality. Nodes cache size, intersection width and a KL flag.
// ---------------------------------------------------------------------------

enum class Op : uint8_t { Var, One, Zero, Top, Seq, Plus, Inter, Conv, Star, TestNot };

struct TermNode;
using Term = const TermNode*;

struct TermNode {
  Op op;
  int32_t name = -1;     // Op::Var only
  Term a = nullptr;      // first child (unary ops use only this)
  Term b = nullptr;      // second child of Seq/Plus/Inter
  uint32_t size = 0;     // number of symbols
  uint32_t iw = 0;       // intersection width
  uint64_t hash = 0;
  uint32_t id = 0;       // interning sequence number (deterministic per run)
  bool kl = false;       // free of Top, Conv and TestNot
};

Term mk_var(int name_id);
Term mk_var(const std::string& name);
Term mk_one();
Term mk_zero();
Term mk_top();
Term mk_seq(Term a, Term b);
Term mk_plus(Term a, Term b);
Term mk_inter(Term a, Term b);
Term mk_conv(Term a);
Term mk_star(Term a);
Term mk_testnot(Term a);

inline uint32_t term_size(Term t) { return t->size; }
inline uint32_t intersection_width(Term t) { return t->iw; }
inline bool is_kl(Term t) { return t->kl; }

// all variable names occurring in t, sorted
std::vector<std::string> term_variables(Term t);
bool term_mentions(Term t, const std::string& name);

// t restricted to the test grammar b | 0 | 1 | p;q | p+q | p^- over sig.tests
bool is_test_term(Term t, const Signature& sig);

// deterministic rendering; parse_term(render_term(t)) == t structurally
std::string render_term(Term t);

// ---------------------------------------------------------------------------
// Parsing. Surface syntax (ASCII):
//   expr    := inter ('+' inter)*
//   inter   := seq ('&' seq)*
//   seq     := postfix ((';')? postfix)*        juxtaposition composes
//   postfix := atom ('*' | '~' | '^-')*
//   atom    := '0' | '1' | 'T' | name | '(' expr ')'
// '^-' is only legal on test subterms; reserved/derived names are rejected
// unless allow_internal is set (used when re-parsing rendered normal forms).
// ---------------------------------------------------------------------------

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(size_t pos, const std::string& msg)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
        position(pos) {}
};

Term parse_term(const std::string& text, const Signature& sig = {},
                bool allow_internal = false);

// ---------------------------------------------------------------------------
// Rewriting normal forms (each terminating, idempotent; innermost-leftmost).
// ---------------------------------------------------------------------------

// T ~> c_top*
Term normalize_top(Term t);
// pushes ~ to variables as conv_<a>; inside test complements, duals of atomic
// tests are the tests themselves (tests are sub-identity, hence symmetric)
Term normalize_converse(Term t);
// De Morgan pushdown of ^- onto atoms: b^- ~> not_b, 1^- ~> 0, 0^- ~> 1,
// (p;q)^- ~> p^- + q^-, (p+q)^- ~> p^- ; q^-
Term normalize_tests(Term t);
// tests, then converse, then top; result satisfies the KL invariant
Term to_kl(Term t);

// c_top* ; (__l ; (t ; (__r ; c_top*))); requires t KL and free of reserved
// names (throws std::invalid_argument otherwise)
Term wrap_for_decision(Term t);

}  // namespace pcor
