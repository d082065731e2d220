#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcor/model.hpp"
#include "pcor/term.hpp"
#include "test_util.hpp"

using namespace pcor;

namespace {

Structure two_vertex_xy() {
  // x has an a-loop; b and c both run x -> y
  Structure s;
  s.universe = {"x", "y"};
  for (const char* n : {"a", "b", "c"}) s.ensure_name(n);
  s.add_edge("a", "x", "x");
  s.add_edge("b", "x", "y");
  s.add_edge("c", "x", "y");
  return s;
}

std::vector<Structure> chain_bags() {
  // three 2-vertex bags: a forward, b backward, consecutive bags overlapping
  auto bag = [](const std::string& u, const std::string& v) {
    Structure s;
    s.universe = {u, v};
    s.ensure_name("a");
    s.ensure_name("b");
    s.add_edge("a", u, v);
    s.add_edge("b", v, u);
    return s;
  };
  return {bag("1", "2"), bag("2", "3"), bag("3", "1")};
}

}  // namespace

TEST_CASE("eval on the intersection-with-composition example") {
  Structure s = two_vertex_xy();
  // (x,x) is a witness: a loops at x while b;c~ goes x->y->x
  BitRel r = eval(s, parse_term("a & (b;c~)"));
  CHECK(r.get(0, 0));
  CHECK(r.count() == 1);

  CHECK(eval(s, mk_one()) == BitRel::identity(2));
  CHECK(eval(s, mk_zero()).empty());
  CHECK(eval(s, mk_top()) == BitRel::full(2));

  // 3-chain under a: a* is the reflexive-transitive closure, 6 pairs
  Structure chain;
  chain.universe = {"x", "y", "z"};
  chain.ensure_name("a");
  chain.add_edge("a", "x", "y");
  chain.add_edge("a", "y", "z");
  CHECK(eval(chain, parse_term("a*")).count() == 6);

  CHECK_THROWS_AS(eval(chain, parse_term("zzz")), std::invalid_argument);

  // test complement is the identity minus the relation
  Structure st;
  st.universe = {"1", "2"};
  st.ensure_name("p");
  st.add_edge("p", "1", "1");
  Signature sig;
  sig.declare_test("p");
  BitRel nc = eval(st, parse_term("p^-", sig));
  CHECK(nc.count() == 1);
  CHECK(nc.get(1, 1));
}

TEST_CASE("check_leq_on") {
  Structure s;
  s.universe = {"u", "v"};
  s.ensure_name("a");
  s.ensure_name("b");
  s.add_edge("a", "u", "v");
  auto w = check_leq_on(s, parse_term("a"), parse_term("b"));
  REQUIRE(w.has_value());
  CHECK(w->first == "u");
  CHECK(w->second == "v");

  CHECK(!check_leq_on(s, parse_term("a;b+a"), parse_term("a;b+a")).has_value());

  // parallel a,b edges: a&b is nonempty, so not below 0
  s.add_edge("b", "u", "v");
  auto w2 = check_leq_on(s, parse_term("a&b"), mk_zero());
  REQUIRE(w2.has_value());
}

TEST_CASE("glue of the three overlapping bags is the 4-chain") {
  Structure g = glue(chain_bags());
  REQUIRE(g.n() == 4);
  CHECK(g.universe == std::vector<std::string>{"1.1", "1.2", "2.3", "3.1"});

  Structure chain4;
  chain4.universe = {"p", "q", "r", "s"};
  chain4.ensure_name("a");
  chain4.ensure_name("b");
  for (auto [u, v] : {std::pair{"p", "q"}, {"q", "r"}, {"r", "s"}}) {
    chain4.add_edge("a", u, v);
    chain4.add_edge("b", v, u);
  }
  CHECK(structure_isomorphic(g, chain4));

  // single bag glues to itself; disjoint universes glue to disjoint union
  Structure one = two_vertex_xy();
  CHECK(structure_isomorphic(glue({one}), one));
  Structure d1, d2;
  d1.universe = {"x"};
  d2.universe = {"y"};
  d1.ensure_name("a");
  d2.ensure_name("a");
  d1.add_edge("a", "x", "x");
  Structure du = glue({d1, d2});
  CHECK(du.n() == 2);
  CHECK(eval(du, parse_term("a")).count() == 1);
}

TEST_CASE("path decomposition checks") {
  auto bags = chain_bags();
  Structure g = glue(bags);
  auto imgs = glue_images(bags);
  auto pd = is_path_decomposition(imgs, g);
  CHECK(pd.ok);
  CHECK(pd.width == 1);

  Structure s = two_vertex_xy();
  auto triv = is_path_decomposition({s}, s);
  CHECK(triv.ok);
  CHECK(triv.width == s.n() - 1);

  // vertex present in bags 1 and 3 but not 2 breaks the interval property
  Structure b1, b2, b3;
  b1.universe = {"x", "y"};
  b2.universe = {"y"};
  b3.universe = {"x"};
  Structure whole;
  whole.universe = {"x", "y"};
  CHECK_FALSE(is_path_decomposition({b1, b2, b3}, whole).ok);
  CHECK(is_path_decomposition({b1, b2}, whole).ok);
}

TEST_CASE("glue admits its images as a path decomposition (random)") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(1, 4), sz(1, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Structure> bags;
    int m = len(rng);
    for (int i = 0; i < m; ++i) {
      // names drawn from a tiny pool so consecutive bags often overlap
      Structure b;
      int k = sz(rng);
      std::vector<std::string> pool = {"u", "v", "w", "t"};
      std::shuffle(pool.begin(), pool.end(), rng);
      for (int j = 0; j < k; ++j) b.universe.push_back(pool[static_cast<size_t>(j)]);
      b.ensure_name("a");
      std::bernoulli_distribution e(0.5);
      for (int x = 0; x < k; ++x)
        for (int y = 0; y < k; ++y)
          if (e(rng)) b.rel["a"].set(x, y);
      bags.push_back(std::move(b));
    }
    Structure g = glue(bags);
    auto pd = is_path_decomposition(glue_images(bags), g);
    CHECK(pd.ok);
    int maxbag = 0;
    for (const auto& b : bags) maxbag = std::max(maxbag, b.n());
    CHECK(pd.width <= maxbag - 1);
  }
}

TEST_CASE("class membership") {
  Structure s;
  s.universe = {"1", "2"};
  s.ensure_name("a");
  s.add_edge("a", "1", "2");
  s.ensure_name("conv_a");
  CHECK_FALSE(class_membership_conv(s));
  s.add_edge("conv_a", "2", "1");
  CHECK(class_membership_conv(s));

  Structure t;
  t.universe = {"1", "2"};
  t.ensure_name("b");
  t.ensure_name("not_b");
  t.add_edge("b", "1", "1");
  t.add_edge("not_b", "1", "1");  // overlap
  t.add_edge("not_b", "2", "2");
  CHECK_FALSE(class_membership_tests(t, {"b"}));
  t.rel["not_b"].set(0, 0, false);
  CHECK(class_membership_tests(t, {"b"}));
  t.rel["b"].set(0, 1, true);  // off-diagonal test
  CHECK_FALSE(class_membership_tests(t, {"b"}));

  Structure n;
  n.universe = {"x", "y"};
  n.ensure_name("l");
  n.add_edge("l", "x", "x");
  CHECK(class_membership_noms(n, {"l"}));
  n.add_edge("l", "y", "y");
  CHECK_FALSE(class_membership_noms(n, {"l"}));
}

TEST_CASE("enumeration counts and determinism") {
  CHECK(enumerate_structures(1, {"a"}).size() == 2);
  CHECK(enumerate_structures(2, {"a"}).size() == 18);

  // deterministic order: second run byte-identical
  auto first = enumerate_structures(2, {"a"});
  auto second = enumerate_structures(2, {"a"});
  REQUIRE(first.size() == second.size());
  for (size_t i = 0; i < first.size(); ++i)
    CHECK(first[i].canonical_bytes() == second[i].canonical_bytes());

  // tests filter keeps only b partitioning the diagonal
  ClassFilter f;
  f.tests = {"b"};
  auto filtered = enumerate_structures(2, {"b", "not_b"}, f);
  for (const auto& s : filtered) CHECK(class_membership_tests(s, {"b"}));
  // per universe size n: 2^n ways to split the diagonal between b and not_b
  CHECK(filtered.size() == 2 + 4);
}

TEST_CASE("eval is monotone in the relations for complement-free terms") {
  std::mt19937_64 rng(77);
  testutil::TermGen g(99, {"a", "b"});
  g.with_top = true;
  g.with_conv = true;
  std::uniform_int_distribution<int> nv(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    Structure s = testutil::gen_structure(rng, nv(rng), {"a", "b"});
    Term t = g.gen(3);
    BitRel before = eval(s, t);
    // add one random edge
    Structure s2 = s;
    std::uniform_int_distribution<int> pick(0, s.n() - 1);
    s2.rel[pick(rng) % 2 ? "a" : "b"].set(pick(rng), pick(rng));
    CHECK(before.subset_of(eval(s2, t)));
  }
}

TEST_CASE("rewrites preserve semantics on compliant structures") {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> nv(1, 3);

  SUBCASE("converse over dual-compliant structures") {
    testutil::TermGen g(5, {"a", "b"});
    g.with_conv = true;
    g.with_top = true;
    for (int trial = 0; trial < 200; ++trial) {
      Structure s = testutil::gen_structure(rng, nv(rng), {"a", "b"});
      s.rel["conv_a"] = s.rel["a"].transpose();
      s.rel["conv_b"] = s.rel["b"].transpose();
      REQUIRE(class_membership_conv(s));
      Term t = g.gen(4);
      CHECK(eval(s, t) == eval(s, normalize_converse(t)));
    }
  }

  SUBCASE("tests over partition-compliant structures") {
    Signature sig;
    sig.declare_test("p");
    sig.declare_test("q");
    std::vector<Term> terms = {
        parse_term("p^-;a", sig),
        parse_term("(p;q)^- + a;(p^-)", sig),
        parse_term("((p+q)^-)*;a", sig),
        parse_term("a;((p^-)^-);b", sig),
    };
    for (int trial = 0; trial < 200; ++trial) {
      int n = nv(rng);
      Structure s = testutil::gen_structure(rng, n, {"a", "b"});
      std::bernoulli_distribution half(0.5);
      for (const char* b : {"p", "q"}) {
        s.ensure_name(b);
        s.ensure_name(complement_name(b));
        for (int i = 0; i < n; ++i) {
          if (half(rng))
            s.rel[b].set(i, i);
          else
            s.rel[complement_name(b)].set(i, i);
        }
      }
      REQUIRE(class_membership_tests(s, {"p", "q"}));
      for (Term t : terms) CHECK(eval(s, t) == eval(s, normalize_tests(t)));
    }
  }

  SUBCASE("top over structures where c_top* is total") {
    testutil::TermGen g(6, {"a"});
    g.with_top = true;
    for (int trial = 0; trial < 200; ++trial) {
      int n = nv(rng);
      Structure s = testutil::gen_structure(rng, n, {"a"});
      s.ensure_name("c_top");
      // a directed cycle makes c_top* the full relation
      for (int i = 0; i < n; ++i) s.rel["c_top"].set(i, (i + 1) % n);
      REQUIRE(eval(s, parse_term("c_top*", {}, true)) == BitRel::full(n));
      Term t = g.gen(4);
      CHECK(eval(s, t) == eval(s, normalize_top(t)));
    }
  }
}

TEST_CASE("structure JSON round-trips") {
  Structure s = two_vertex_xy();
  Structure back = structure_from_json(structure_to_json(s));
  CHECK(back.universe == s.universe);
  CHECK(back.canonical_bytes() == s.canonical_bytes());

  auto w = chain_bags();
  auto back_w = word_from_json(word_to_json(w));
  REQUIRE(back_w.size() == w.size());
  for (size_t i = 0; i < w.size(); ++i)
    CHECK(back_w[i].canonical_bytes() == w[i].canonical_bytes());

  CHECK_THROWS(structure_from_json("{\"universe\":[]}"));
  CHECK_THROWS(structure_from_json("{\"universe\":[\"x\"],\"rel\":{\"a\":[[\"x\",\"zz\"]]}}"));
}

TEST_CASE("isomorphism") {
  Structure a, b;
  a.universe = {"1", "2", "3"};
  b.universe = {"x", "y", "z"};
  a.ensure_name("e");
  b.ensure_name("e");
  a.add_edge("e", "1", "2");
  a.add_edge("e", "2", "3");
  b.add_edge("e", "z", "x");
  b.add_edge("e", "x", "y");
  CHECK(structure_isomorphic(a, b));
  b.add_edge("e", "y", "z");
  CHECK_FALSE(structure_isomorphic(a, b));
}
