#include "pcor/term.hpp"

namespace pcor {

namespace {

Term map_children(Term t, Term (*f)(Term)) {
  switch (t->op) {
    case Op::Var:
    case Op::One:
    case Op::Zero:
    case Op::Top:
      return t;
    case Op::Seq: return mk_seq(f(t->a), f(t->b));
    case Op::Plus: return mk_plus(f(t->a), f(t->b));
    case Op::Inter: return mk_inter(f(t->a), f(t->b));
    case Op::Conv: return mk_conv(f(t->a));
    case Op::Star: return mk_star(f(t->a));
    case Op::TestNot: return mk_testnot(f(t->a));
  }
  return t;
}

// converse dual restricted to the test grammar: atomic tests are sub-identity,
// hence symmetric, so only the ; order flips
Term test_dual(Term t) {
  switch (t->op) {
    case Op::Var:
    case Op::One:
    case Op::Zero:
      return t;
    case Op::Seq: return mk_seq(test_dual(t->b), test_dual(t->a));
    case Op::Plus: return mk_plus(test_dual(t->a), test_dual(t->b));
    case Op::TestNot: return mk_testnot(test_dual(t->a));
    default:
      throw std::invalid_argument("converse met a malformed test subterm");
  }
}

Term conv_nf(Term t);

// normal form of t~ (converse pushed all the way down)
Term conv_dual(Term t) {
  switch (t->op) {
    case Op::Var: return mk_var(dual_name(sym_name(t->name)));
    case Op::One: return mk_one();
    case Op::Zero: return mk_zero();
    case Op::Top: return mk_top();
    case Op::Seq: return mk_seq(conv_dual(t->b), conv_dual(t->a));
    case Op::Plus: return mk_plus(conv_dual(t->a), conv_dual(t->b));
    case Op::Inter: return mk_inter(conv_dual(t->a), conv_dual(t->b));
    case Op::Star: return mk_star(conv_dual(t->a));
    case Op::Conv: return conv_nf(t->a);  // (u~)~ = u
    case Op::TestNot: return mk_testnot(test_dual(t->a));
  }
  return t;
}

Term conv_nf(Term t) {
  if (t->op == Op::Conv) return conv_dual(t->a);
  return map_children(t, conv_nf);
}

Term tests_nf(Term t);

// normal form of t^- within the test grammar (De Morgan pushdown)
Term tests_neg(Term t) {
  switch (t->op) {
    case Op::Var: return mk_var(complement_name(sym_name(t->name)));
    case Op::One: return mk_zero();
    case Op::Zero: return mk_one();
    case Op::Seq: return mk_plus(tests_neg(t->a), tests_neg(t->b));
    case Op::Plus: return mk_seq(tests_neg(t->a), tests_neg(t->b));
    case Op::TestNot: return tests_nf(t->a);  // double complement
    default:
      throw std::invalid_argument("'^-' met a non-test subterm");
  }
}

Term tests_nf(Term t) {
  if (t->op == Op::TestNot) return tests_neg(t->a);
  return map_children(t, tests_nf);
}

Term top_nf(Term t) {
  if (t->op == Op::Top) return mk_star(mk_var("c_top"));
  return map_children(t, top_nf);
}

}  // namespace

Term normalize_top(Term t) { return top_nf(t); }
Term normalize_converse(Term t) { return conv_nf(t); }
Term normalize_tests(Term t) { return tests_nf(t); }

Term to_kl(Term t) { return normalize_top(normalize_converse(normalize_tests(t))); }

Term wrap_for_decision(Term t) {
  if (!t->kl) throw std::invalid_argument("wrap_for_decision expects a KL term");
  for (const char* r : {"c_top", "__l", "__r"})
    if (term_mentions(t, r))
      throw std::invalid_argument(std::string("reserved name already occurs in term: ") + r);
  Term ctop_star = mk_star(mk_var("c_top"));
  return mk_seq(ctop_star,
                mk_seq(mk_var("__l"), mk_seq(t, mk_seq(mk_var("__r"), ctop_star))));
}

}  // namespace pcor
