#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcor/term.hpp"
#include "test_util.hpp"

using namespace pcor;

TEST_CASE("parsing basics and hash-consing") {
  Term t = parse_term("a ; (b & 1)");
  CHECK(t->op == Op::Seq);
  CHECK(t->a->op == Op::Var);
  CHECK(t->b->op == Op::Inter);
  CHECK(t->b->b->op == Op::One);

  // structural sharing: equal terms are pointer-equal
  CHECK(parse_term("a;(b&1)") == t);
  CHECK(parse_term("(a* b*)*") == mk_star(mk_seq(mk_star(mk_var("a")), mk_star(mk_var("b")))));

  // juxtaposition composes like ';'
  CHECK(parse_term("a b c") == parse_term("a;b;c"));
  CHECK(parse_term("a(b+c)") == parse_term("a;(b+c)"));

  // precedence: * binds tightest, then ;, then &, then +
  CHECK(parse_term("a+b&c;d*") ==
        mk_plus(mk_var("a"), mk_inter(mk_var("b"), mk_seq(mk_var("c"), mk_star(mk_var("d"))))));

  CHECK(parse_term("T")->op == Op::Top);
  CHECK(parse_term("a~") == mk_conv(mk_var("a")));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_term("a;"), ParseError);
  CHECK_THROWS_AS(parse_term("(a"), ParseError);
  CHECK_THROWS_AS(parse_term("a)b"), ParseError);
  CHECK_THROWS_AS(parse_term(""), ParseError);

  // '^-' is restricted to the test sub-grammar
  CHECK_THROWS_AS(parse_term("a^-"), ParseError);
  Signature sig;
  sig.declare_test("p");
  CHECK(parse_term("p^-", sig) == mk_testnot(mk_var("p")));
  CHECK_THROWS_AS(parse_term("(p;a)^-", sig), ParseError);

  // reserved and derived names are rejected at the surface
  CHECK_THROWS_AS(parse_term("c_top"), ParseError);
  CHECK_THROWS_AS(parse_term("__l"), ParseError);
  CHECK_THROWS_AS(parse_term("conv_a"), ParseError);
  CHECK_THROWS_AS(parse_term("not_b"), ParseError);
  CHECK(parse_term("c_top", {}, true) == mk_var("c_top"));

  CHECK_THROWS_AS(sig.declare_test("c_top"), std::invalid_argument);
  CHECK_THROWS_AS(sig.declare_nominal("conv_x"), std::invalid_argument);
}

TEST_CASE("size and intersection width") {
  // 4 leaves + 3 operators
  CHECK(term_size(parse_term("a&b&c&d")) == 7);
  CHECK(term_size(parse_term("1")) == 1);
  Term t = parse_term("(a;b)+c");
  CHECK(term_size(mk_star(t)) == 1 + term_size(t));

  CHECK(intersection_width(parse_term("a&b&c&d")) == 4);
  CHECK(intersection_width(parse_term("(a&b);(a&c);(a&d)")) == 2);
  CHECK(intersection_width(parse_term("a")) == 1);
  CHECK(intersection_width(mk_star(parse_term("a&b"))) == 2);
}

TEST_CASE("rendering round-trips structurally") {
  testutil::TermGen g(0xC0FFEE, {"a", "b", "c"});
  g.with_top = true;
  g.with_conv = true;
  for (int i = 0; i < 400; ++i) {
    Term t = g.gen(4);
    CAPTURE(render_term(t));
    CHECK(parse_term(render_term(t), {}, true) == t);
  }
  // spot-check associativity is preserved, not canonicalized
  Term right = mk_seq(mk_var("a"), mk_seq(mk_var("b"), mk_var("c")));
  CHECK(render_term(right) == "a;(b;c)");
  Term left = mk_seq(mk_seq(mk_var("a"), mk_var("b")), mk_var("c"));
  CHECK(render_term(left) == "a;b;c");
}

TEST_CASE("iw bounded by size") {
  testutil::TermGen g(42, {"a", "b"});
  g.with_top = true;
  g.with_conv = true;
  for (int i = 0; i < 500; ++i) {
    Term t = g.gen(5);
    CHECK(intersection_width(t) <= term_size(t));
  }
}

TEST_CASE("normalize_top") {
  CHECK(normalize_top(mk_top()) == mk_star(mk_var("c_top")));
  CHECK(render_term(normalize_top(parse_term("a;T;b"))) == "a;c_top*;b");
  Term a = parse_term("a;(b+1)*");
  CHECK(normalize_top(a) == a);
}

TEST_CASE("normalize_converse") {
  CHECK(render_term(normalize_converse(parse_term("(a;b)~"))) == "conv_b;conv_a");
  CHECK(normalize_converse(parse_term("(a~)~")) == mk_var("a"));
  CHECK(normalize_converse(parse_term("(a*)~")) == mk_star(mk_var("conv_a")));
  CHECK(render_term(normalize_converse(parse_term("(a+b&c)~"))) == "conv_a+conv_b&conv_c");
  CHECK(normalize_converse(parse_term("T~")) == mk_top());
  CHECK(normalize_converse(parse_term("1~")) == mk_one());
  // dual of a dual strips back to the base name
  CHECK(normalize_converse(mk_conv(mk_var("conv_a"))) == mk_var("a"));
}

TEST_CASE("normalize_tests") {
  Signature sig;
  sig.declare_test("p");
  sig.declare_test("q");
  CHECK(render_term(normalize_tests(parse_term("(p+q)^-", sig))) == "not_p;not_q");
  CHECK(render_term(normalize_tests(parse_term("(p;q)^-", sig))) == "not_p+not_q");
  CHECK(normalize_tests(parse_term("1^-", sig)) == mk_zero());
  CHECK(normalize_tests(parse_term("0^-", sig)) == mk_one());
  CHECK(normalize_tests(parse_term("p^-", sig)) == mk_var("not_p"));
  CHECK(normalize_tests(parse_term("(p^-)^-", sig)) == mk_var("p"));

  // program-logic encodings parse and normalize: while p do t, if p then t1 else t2
  Term w = normalize_tests(parse_term("(p;t1)*;p^-", sig));
  CHECK(render_term(w) == "(p;t1)*;not_p");
  CHECK(w->kl);
  Term ite = normalize_tests(parse_term("p;t1 + p^-;t2", sig));
  CHECK(render_term(ite) == "p;t1+not_p;t2");
}

TEST_CASE("to_kl pipeline") {
  Signature sig;
  sig.declare_test("b");
  CHECK(render_term(to_kl(parse_term("T;a~"))) == "c_top*;conv_a");
  CHECK(render_term(to_kl(parse_term("b^-;T", sig))) == "not_b;c_top*");
  Term plain = parse_term("a;(b+c)*");
  CHECK(to_kl(plain) == plain);
  // converse disposes of T~ before the top encoding rewrites T
  CHECK(render_term(to_kl(parse_term("T~;a"))) == "c_top*;a");

  testutil::TermGen g(7, {"a", "b"});
  g.with_top = true;
  g.with_conv = true;
  for (int i = 0; i < 300; ++i) {
    Term t = g.gen(4);
    Term k = to_kl(t);
    CHECK(k->kl);
    // idempotence of each rewrite
    CHECK(normalize_top(normalize_top(t)) == normalize_top(t));
    CHECK(normalize_converse(normalize_converse(t)) == normalize_converse(t));
    CHECK(to_kl(k) == k);
  }
}

TEST_CASE("wrap_for_decision") {
  Term w = wrap_for_decision(mk_var("a"));
  CHECK(render_term(w) == "c_top*;(__l;(a;(__r;c_top*)))");
  CHECK(wrap_for_decision(mk_one()) ==
        parse_term("c_top*;(__l;(1;(__r;c_top*)))", {}, true));
  CHECK_THROWS_AS(wrap_for_decision(parse_term("c_top", {}, true)), std::invalid_argument);
  CHECK_THROWS_AS(wrap_for_decision(mk_top()), std::invalid_argument);  // not KL
}
