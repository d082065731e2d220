#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "pcor/derive.hpp"
#include "test_util.hpp"

using namespace pcor;

namespace {

// the two-vertex cycle: a goes 0 -> 1, b goes 1 -> 0
Structure two_cycle() {
  Structure s;
  s.universe = {"x", "y"};
  s.ensure_name("a");
  s.ensure_name("b");
  s.rel["a"].set(0, 1, true);
  s.rel["b"].set(1, 0, true);
  return s;
}

std::vector<int32_t> all_labels(const Structure& s) {
  std::vector<int32_t> out;
  for (int i = 0; i < s.n(); ++i) out.push_back(i);
  return out;
}

bool contains(const std::vector<LTerm>& v, LTerm l) {
  return std::find(v.begin(), v.end(), l) != v.end();
}

// no member may keep the shape (@z.1) ;1 t for t != 0: the constructor folds it
bool seq1_normalized(LTerm l) {
  switch (l->op) {
    case LOp::LAt:
    case LOp::LBot:
      return true;
    case LOp::LSeq:
      if (l->a->op == LOp::LAt && l->a->term->op == Op::One && l->term->op != Op::Zero)
        return false;
      return seq1_normalized(l->a);
    case LOp::LInter:
      return seq1_normalized(l->a) && seq1_normalized(l->b);
  }
  return true;
}

}  // namespace

TEST_CASE("label vectors and relabeling") {
  Term t1 = parse_term("a"), t2 = parse_term("b"), t3 = parse_term("c");
  Term u = parse_term("a;b"), v = parse_term("b");
  LTerm l = mk_seq1(
      mk_inter1(mk_at(0, t1), mk_seq1(mk_inter1(mk_at(0, t2), mk_at(1, t3)), u)), v);
  CHECK(label_vector(l) == std::vector<int32_t>{0, 0, 1});
  CHECK(l->width == 3);
  CHECK(label_vector(mk_at(4, t1)) == std::vector<int32_t>{4});
  CHECK(label_vector(mk_inter1(mk_at(0, t1), mk_at(1, t2))) == std::vector<int32_t>{0, 1});
  CHECK(label_vector(mk_lbot()).empty());

  SUBCASE("relabel touches exactly one position") {
    LTerm r = relabel(l, 2, 7);
    CHECK(label_vector(r) == std::vector<int32_t>{0, 7, 1});
    CHECK(label_vector(relabel(l, 1, 9)) == std::vector<int32_t>{9, 0, 1});
    CHECK(label_vector(relabel(l, 3, 9)) == std::vector<int32_t>{0, 0, 9});
    CHECK(relabel(relabel(l, 2, 7), 2, 0) == l);  // interning: pointer equality
    CHECK_THROWS_AS(relabel(l, 0, 1), std::out_of_range);
    CHECK_THROWS_AS(relabel(l, 4, 1), std::out_of_range);
  }

  SUBCASE("sequencing after the unit anchor folds away") {
    CHECK(mk_seq1(mk_at(0, mk_one()), u) == mk_at(0, u));
    LTerm frozen = mk_seq1(mk_at(0, mk_one()), mk_zero());
    CHECK(frozen->op == LOp::LSeq);  // the bare-0 stand-in has no anchored form
    CHECK(mk_seq1(mk_at(0, t1), u)->op == LOp::LSeq);
  }
}

TEST_CASE("the empty-run acceptance test") {
  CHECK(eps(0, mk_at(0, parse_term("1"))));
  CHECK_FALSE(eps(1, mk_at(0, parse_term("1"))));
  CHECK_FALSE(eps(0, mk_at(0, parse_term("a"))));
  CHECK(eps(0, mk_at(0, parse_term("a*"))));
  CHECK_FALSE(eps(1, mk_at(0, parse_term("a*"))));
  CHECK_FALSE(eps(0, mk_inter1(mk_at(0, parse_term("1")), mk_at(0, parse_term("1")))));
  CHECK_FALSE(eps(0, mk_lbot()));
  CHECK(eps(0, mk_at(0, parse_term("1+a"))));
  CHECK(eps(0, mk_at(0, parse_term("a*;b*"))));
  CHECK_FALSE(eps(0, mk_at(0, parse_term("a&b"))));
  CHECK(eps(2, mk_seq1(mk_at(2, parse_term("b*")), parse_term("a*"))));
  CHECK_FALSE(eps(2, mk_seq1(mk_at(2, parse_term("b*")), parse_term("a"))));
}

TEST_CASE("closure sets") {
  SUBCASE("frozen base cases") {
    auto cl = closure(parse_term("a"), {0, 1});
    std::set<LTerm> got(cl.begin(), cl.end());
    std::set<LTerm> want = {mk_at(0, parse_term("a")), mk_at(1, parse_term("a")),
                            mk_at(0, mk_one()), mk_at(1, mk_one())};
    CHECK(got == want);
    CHECK(closure(parse_term("a"), {0, 1, 2}).size() == 6);
    auto cl0 = closure(parse_term("0"), {0, 1});
    REQUIRE(cl0.size() == 1);
    CHECK(cl0[0] == mk_lbot());
  }

  SUBCASE("operator laws") {
    testutil::TermGen gen(404, {"a", "b"});
    std::vector<int32_t> labels = {0, 1, 2};
    for (int i = 0; i < 60; ++i) {
      Term t = gen.gen(3);
      auto cl = closure(t, labels);
      // extensivity for anchored members whose head is not the bare 0
      if (t->op != Op::Zero) {
        auto clat = closure(mk_at(1, t), labels);
        CHECK(contains(clat, mk_at(1, t)));
      }
      // idempotence: closing a member adds nothing
      std::set<LTerm> base(cl.begin(), cl.end());
      for (LTerm m : cl)
        for (LTerm mm : closure(m, labels)) CHECK(base.count(mm));
      // every member respects the ;1 normalization
      for (LTerm m : cl) CHECK(seq1_normalized(m));
    }
  }

  SUBCASE("size bound") {
    testutil::TermGen gen(505, {"a", "b", "c"});
    std::vector<int32_t> labels = {0, 1, 2};
    for (int i = 0; i < 500; ++i) {
      Term t = gen.gen(3);
      double bound = std::pow(2.0 * labels.size() * t->size, t->iw);
      CHECK(static_cast<double>(closure(t, labels).size()) <= bound);
    }
  }
}

TEST_CASE("one-step derivatives") {
  Structure s = two_cycle();

  SUBCASE("variables follow structure edges") {
    auto d = step(s, mk_at(0, parse_term("a")));
    REQUIRE(d.size() == 1);
    CHECK(d[0].to == mk_at(1, mk_one()));
    CHECK(d[0].run.kind == AtomicRun::Var);
    CHECK(d[0].run.label == sym_id("a"));
    CHECK(d[0].run.width == 1);
    CHECK(d[0].run.pos == 1);
    CHECK(d[0].run.src_labels == std::vector<int>{0});
    CHECK(d[0].run.tgt_label == 1);
    CHECK(step(s, mk_at(0, parse_term("b"))).empty());  // b has no edge from x
    CHECK(step(s, mk_at(0, parse_term("1"))).empty());
    CHECK(step(s, mk_at(0, parse_term("0"))).empty());
    CHECK(step(s, mk_lbot()).empty());
  }

  SUBCASE("intersections fork") {
    auto d = step(s, mk_at(0, parse_term("a&b")));
    REQUIRE(d.size() == 1);
    CHECK(d[0].run.kind == AtomicRun::Fork);
    CHECK(d[0].run.width == 1);
    CHECK(d[0].run.pos == 1);
    CHECK(d[0].run.src_labels == std::vector<int>{0});
    CHECK(d[0].to == mk_inter1(mk_at(0, parse_term("a")), mk_at(0, parse_term("b"))));
  }

  SUBCASE("parallel components pad with identity wires") {
    LTerm l = mk_inter1(mk_at(0, parse_term("a")), mk_at(1, parse_term("b")));
    auto d = step(s, l);
    REQUIRE(d.size() == 2);
    // left moves first: a at position 1, padded to width 2 with the right label
    CHECK(d[0].run.kind == AtomicRun::Var);
    CHECK(d[0].run.width == 2);
    CHECK(d[0].run.pos == 1);
    CHECK(d[0].run.src_labels == std::vector<int>{0, 1});
    CHECK(d[0].run.tgt_label == 1);
    CHECK(d[0].to == mk_inter1(mk_at(1, mk_one()), mk_at(1, parse_term("b"))));
    CHECK(d[1].run.pos == 2);
    CHECK(d[1].run.src_labels == std::vector<int>{0, 1});
    CHECK(d[1].to == mk_inter1(mk_at(0, parse_term("a")), mk_at(0, mk_one())));
  }

  SUBCASE("aligned accepting components join") {
    LTerm l = mk_inter1(mk_at(1, mk_one()), mk_at(1, parse_term("a*")));
    auto d = step(s, l);
    bool joined = false;
    for (const auto& st : d)
      if (st.run.kind == AtomicRun::Join) {
        joined = true;
        CHECK(st.run.width == 1);
        CHECK(st.run.pos == 1);
        CHECK(st.run.src_labels == std::vector<int>{1});
        CHECK(st.to == mk_at(1, mk_one()));
      }
    CHECK(joined);
    // misaligned labels never join
    for (const auto& st : step(s, mk_inter1(mk_at(0, mk_one()), mk_at(1, mk_one()))))
      CHECK(st.run.kind != AtomicRun::Join);
  }
}

TEST_CASE("reachable derivative sets") {
  Structure s = two_cycle();

  SUBCASE("reflexivity and dead ends") {
    Structure lone;
    lone.universe = {"u"};
    lone.ensure_name("a");
    auto r = reach(lone, mk_at(0, parse_term("a")));
    REQUIRE(r.size() == 1);
    CHECK(r[0] == mk_at(0, parse_term("a")));
    CHECK(contains(reach(s, mk_at(0, parse_term("a;b"))), mk_at(0, parse_term("a;b"))));
  }

  SUBCASE("the canonical two-step trace") {
    Term t = parse_term("(a;(((b;a)&1);b))&1");
    LTerm start = mk_at(0, t);
    auto r = reach(s, start);
    LTerm after_fork =
        mk_inter1(mk_at(0, parse_term("a;(((b;a)&1);b)")), mk_at(0, mk_one()));
    LTerm after_a = mk_inter1(mk_at(1, parse_term("((b;a)&1);b")), mk_at(0, mk_one()));
    CHECK(contains(r, after_fork));
    CHECK(contains(r, after_a));
    // the accepting end of the derivation is reachable too
    CHECK(contains(r, mk_at(0, mk_one())));
  }

  SUBCASE("memoized recomputation is stable") {
    LTerm start = mk_at(0, parse_term("(a;b)*"));
    auto r1 = reach(s, start);
    auto r2 = reach(s, start);
    CHECK(r1 == r2);
    CHECK(contains(r1, mk_at(0, parse_term("(a;b)*"))));
  }
}

TEST_CASE("derivative semantics agrees with direct evaluation") {
  SUBCASE("identity term") {
    std::mt19937_64 rng(61);
    Structure s = testutil::gen_structure(rng, 3, {"a"});
    CHECK(semantics_via_derivatives(s, parse_term("1")) == BitRel::identity(3));
  }

  SUBCASE("the worked example, end to end") {
    Structure s = two_cycle();
    Term t = parse_term("(a;(((b;a)&1);b))&1");
    BitRel r = semantics_via_derivatives(s, t);
    CHECK(r.get(0, 0));
    CHECK(r == eval(s, t));
  }

  SUBCASE("random agreement") {
    testutil::TermGen gen(606, {"a", "b"});
    std::mt19937_64 rng(607);
    for (int i = 0; i < 200; ++i) {
      Term t = gen.gen(3);
      int n = 1 + static_cast<int>(rng() % 3);
      Structure s = testutil::gen_structure(rng, n, {"a", "b"});
      CHECK_MESSAGE(semantics_via_derivatives(s, t) == eval(s, t), render_term(t),
                    " over n=", n);
    }
  }

  SUBCASE("invariance under vertex permutation") {
    testutil::TermGen gen(707, {"a", "b"});
    std::mt19937_64 rng(708);
    for (int i = 0; i < 40; ++i) {
      Term t = gen.gen(3);
      Structure s = testutil::gen_structure(rng, 3, {"a", "b"});
      std::vector<int> perm = {1, 2, 0};
      Structure p;
      p.universe = s.universe;
      for (const auto& [name, r] : s.rel) {
        BitRel pr(3);
        for (auto [x, y] : r.pairs()) pr.set(perm[x], perm[y], true);
        p.rel[name] = pr;
      }
      BitRel rs = semantics_via_derivatives(s, t);
      BitRel rp = semantics_via_derivatives(p, t);
      for (int x = 0; x < 3; ++x)
        for (int z = 0; z < 3; ++z) CHECK(rs.get(x, z) == rp.get(perm[x], perm[z]));
    }
  }
}

namespace {

bool mentions_zero(Term t) {
  if (t->op == Op::Zero) return true;
  if (t->a && mentions_zero(t->a)) return true;
  if (t->b && mentions_zero(t->b)) return true;
  return false;
}

}  // namespace

TEST_CASE("reachable terms stay inside the closure") {
  // the closure maps the term 0 to a bare stand-in with no anchored form, so
  // containment necessarily leaks for 0 under an intersection: the fork step
  // anchors both operands. Pin that corner, then test the law on 0-free terms.
  Structure pin = two_cycle();
  LTerm forked = mk_inter1(mk_at(0, parse_term("a")), mk_at(0, parse_term("0")));
  CHECK(contains(reach(pin, mk_at(0, parse_term("a&0"))), forked));
  auto clpin = closure(parse_term("a&0"), all_labels(pin));
  CHECK_FALSE(contains(clpin, forked));

  testutil::TermGen gen(808, {"a", "b"});
  std::mt19937_64 rng(809);
  for (int i = 0; i < 50; ++i) {
    Term t = gen.gen(3);
    while (mentions_zero(t)) t = gen.gen(3);
    Structure s = testutil::gen_structure(rng, 2, {"a", "b"});
    Structure sdot = with_isolated(s);
    LTerm start = mk_at(0, t);
    auto cl = closure(start, all_labels(sdot));
    std::set<LTerm> clset(cl.begin(), cl.end());
    auto r = reach(sdot, start);
    for (LTerm m : r) {
      if (m == start) continue;
      CHECK_MESSAGE(clset.count(m), render_term(t), ": escaped ", render_lterm(m));
    }
    // and anchors mid-derivation obey the same containment
    if (r.size() > 1) {
      LTerm mid = r[r.size() / 2];
      auto clmid = closure(mid, all_labels(sdot));
      std::set<LTerm> midset(clmid.begin(), clmid.end());
      for (LTerm m : reach(sdot, mid))
        if (m != mid) CHECK(midset.count(m));
    }
  }
}

TEST_CASE("acceptance coincides with empty runs at depth zero") {
  testutil::TermGen gen(909, {"a", "b"});
  std::mt19937_64 rng(910);
  for (int i = 0; i < 80; ++i) {
    Term t = gen.gen(3);
    Structure s = testutil::gen_structure(rng, 2, {"a", "b"});
    auto runs = run_lang(t, 0);
    for (int x = 0; x < s.n(); ++x)
      for (int z = 0; z < s.n(); ++z) {
        bool empty_run = false;
        for (const auto& g : runs)
          if (g.n == 1 && g.edges.empty() && !enumerate_sruns(s, x, z, g).empty())
            empty_run = true;
        CHECK_MESSAGE(empty_run == eps(z, mk_at(x, t)), render_term(t), " x=", x,
                      " z=", z);
      }
  }
}

TEST_CASE("derivatives simulate quotients along decomposed runs") {
  testutil::TermGen gen(111, {"a", "b"});
  std::mt19937_64 rng(112);
  int traced = 0;
  for (int i = 0; i < 40 && traced < 250; ++i) {
    Term t = gen.gen(3);
    Structure s = testutil::gen_structure(rng, 2, {"a", "b"}, 0.5);
    for (const auto& g : run_lang(t, 2)) {
      for (int x = 0; x < s.n(); ++x)
        for (int z = 0; z < s.n(); ++z) {
          for (const auto& sr : enumerate_sruns(s, x, z, g)) {
            auto atoms = decompose_atomic_srun(sr);
            std::set<LTerm> cur = {mk_at(x, t)};
            for (const auto& atom : atoms) {
              std::set<LTerm> next;
              for (LTerm l : cur)
                for (const auto& d : step(s, l))
                  if (d.run == atom) next.insert(d.to);
              cur = std::move(next);
              REQUIRE_MESSAGE(!cur.empty(), "stuck replaying ", render_term(t));
            }
            bool accepted = false;
            for (LTerm l : cur) accepted |= eps(z, l);
            CHECK_MESSAGE(accepted, render_term(t), " srun not simulated");
            if (++traced >= 250) break;
          }
          if (traced >= 250) break;
        }
      if (traced >= 250) break;
    }
  }
  CHECK(traced > 60);
}

TEST_CASE("shortest accepting derivations") {
  Structure s = two_cycle();

  SUBCASE("found and replayable") {
    Term t = parse_term("(a;(((b;a)&1);b))&1");
    auto path = derivation_to(s, mk_at(0, t), 0);
    REQUIRE(path.has_value());
    CHECK(!path->empty());
    LTerm cur = mk_at(0, t);
    for (const auto& d : *path) {
      bool legal = false;
      for (const auto& e : step(s, cur))
        if (e.run == d.run && e.to == d.to) legal = true;
      CHECK(legal);
      cur = d.to;
    }
    CHECK(eps(0, cur));
  }

  SUBCASE("absent when the pair is not in the relation") {
    CHECK_FALSE(derivation_to(s, mk_at(0, parse_term("a")), 0).has_value());
    Structure lone;
    lone.universe = {"u"};
    lone.ensure_name("a");
    CHECK_FALSE(derivation_to(lone, mk_at(0, parse_term("a")), 0).has_value());
  }

  SUBCASE("empty path when the start already accepts") {
    auto path = derivation_to(s, mk_at(1, parse_term("a*")), 1);
    REQUIRE(path.has_value());
    CHECK(path->empty());
  }
}

TEST_CASE("isolated-vertex extension") {
  std::mt19937_64 rng(314);
  Structure s = testutil::gen_structure(rng, 3, {"a", "b"});
  Structure sdot = with_isolated(s);
  CHECK(sdot.n() == 4);
  CHECK(sdot.universe[3] == "*");
  for (const auto& [name, r] : sdot.rel)
    for (auto [i, j] : r.pairs()) {
      CHECK(i < 3);
      CHECK(j < 3);
    }
  // the fresh name dodges collisions
  Structure odd;
  odd.universe = {"*", "**"};
  odd.ensure_name("a");
  CHECK(with_isolated(odd).universe[2] == "***");
  // an isolated extra vertex never changes the derived relation
  testutil::TermGen gen(315, {"a", "b"});
  for (int i = 0; i < 20; ++i) {
    Term t = gen.gen(3);
    BitRel r1 = semantics_via_derivatives(s, t);
    BitRel r2 = semantics_via_derivatives(sdot, t);
    for (int x = 0; x < 3; ++x)
      for (int z = 0; z < 3; ++z) CHECK(r1.get(x, z) == r2.get(x, z));
  }
}

TEST_CASE("labeled term rendering") {
  Structure s = two_cycle();
  LTerm l = mk_inter1(mk_at(0, parse_term("a;b")), mk_at(1, mk_one()));
  CHECK(render_lterm(l) == "@0.(a;b) &1 @1.1");
  CHECK(render_lterm(l, s) == "@x.(a;b) &1 @y.1");
  CHECK(render_lterm(mk_seq1(mk_at(0, parse_term("a")), parse_term("b*"))) ==
        "@0.a ;1 b*");
  CHECK(render_lterm(mk_lbot()) == "0");
}
