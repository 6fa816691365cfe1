#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lodex/types.hpp"

#include "catalog.hpp"

using namespace lodex;
using lodex::testing::all_words;
using lodex::testing::sentence_catalog;

TEST_CASE("level-1 and level-2 types separate short unlabelled words") {
  TypeTable tt;
  TypeId empty1 = tt.word_type(std::vector<Letter>{}, 1, 0);
  TypeId a1 = tt.word_type(std::vector<Letter>{0}, 1, 0);
  TypeId aa1 = tt.word_type(std::vector<Letter>{0, 0}, 1, 0);
  CHECK(a1 == aa1);  // one quantifier cannot count past one
  CHECK(a1 != empty1);

  TypeId a2 = tt.word_type(std::vector<Letter>{0}, 2, 0);
  TypeId aa2 = tt.word_type(std::vector<Letter>{0, 0}, 2, 0);
  TypeId aaa2 = tt.word_type(std::vector<Letter>{0, 0, 0}, 2, 0);
  TypeId aaaa2 = tt.word_type(std::vector<Letter>{0, 0, 0, 0}, 2, 0);
  CHECK(a2 != aa2);
  CHECK(aa2 != aaa2);   // "there is a middle element" has depth two
  CHECK(aaa2 == aaaa2);  // depth two stabilises at length three
}

TEST_CASE("the EF recursion and the compositional fold coincide") {
  TypeTable tt;
  for (int k = 1; k <= 2; ++k)
    for (const auto& w : all_words(1, 4))
      CHECK(tt.type_of_finite(w, k, 1) == tt.word_type(w, k, 1));
}

TEST_CASE("the empty type is a two-sided identity") {
  TypeTable tt;
  for (int k = 1; k <= 2; ++k) {
    TypeId e = tt.word_type(std::vector<Letter>{}, k, 1);
    for (const auto& w : all_words(1, 3)) {
      TypeId t = tt.word_type(w, k, 1);
      CHECK(tt.compose_sum(e, t) == t);
      CHECK(tt.compose_sum(t, e) == t);
    }
    CHECK(tt.idempotent(e));
  }
}

TEST_CASE("composition is a congruence for concatenation") {
  TypeTable tt;
  for (int k = 1; k <= 2; ++k)
    for (const auto& u : all_words(1, 3))
      for (const auto& v : all_words(1, 3)) {
        std::vector<Letter> uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        TypeId lhs = tt.word_type(uv, k, 1);
        TypeId rhs =
            tt.compose_sum(tt.word_type(u, k, 1), tt.word_type(v, k, 1));
        REQUIRE(lhs == rhs);
      }
}

TEST_CASE("composition is associative on realised types") {
  TypeTable tt;
  std::vector<TypeId> ts;
  for (const auto& w : all_words(1, 2)) ts.push_back(tt.word_type(w, 2, 1));
  for (TypeId a : ts)
    for (TypeId b : ts)
      for (TypeId c : ts)
        CHECK(tt.compose_sum(tt.compose_sum(a, b), c) ==
              tt.compose_sum(a, tt.compose_sum(b, c)));
}

TEST_CASE("downgrade commutes with realisation") {
  TypeTable tt;
  for (const auto& w : all_words(1, 3))
    CHECK(tt.downgrade(tt.word_type(w, 2, 1)) == tt.word_type(w, 1, 1));
}

TEST_CASE("reversal is an involutive anti-homomorphism") {
  TypeTable tt;
  for (int k = 1; k <= 2; ++k)
    for (const auto& u : all_words(1, 3)) {
      TypeId t = tt.word_type(u, k, 1);
      std::vector<Letter> r(u.rbegin(), u.rend());
      CHECK(tt.reverse_type(t) == tt.word_type(r, k, 1));
      CHECK(tt.reverse_type(tt.reverse_type(t)) == t);
      for (const auto& v : all_words(1, 2)) {
        TypeId s = tt.word_type(v, k, 1);
        CHECK(tt.reverse_type(tt.compose_sum(t, s)) ==
              tt.compose_sum(tt.reverse_type(s), tt.reverse_type(t)));
      }
    }
}

TEST_CASE("powers agree with iterated composition") {
  TypeTable tt;
  TypeId t = tt.word_type(std::vector<Letter>{1, 0}, 2, 1);
  TypeId acc = tt.word_type(std::vector<Letter>{}, 2, 1);
  for (int e = 0; e <= 6; ++e) {
    CHECK(tt.pow_type(t, Pos(e)) == acc);
    acc = tt.compose_sum(acc, t);
  }
  Pos huge("1000000000000000000000000000");
  CHECK(tt.compose_sum(tt.pow_type(t, huge), tt.pow_type(t, huge)) ==
        tt.pow_type(t, huge * 2));
  CHECK(tt.compose_sum(tt.pow_type(t, huge), t) == tt.pow_type(t, huge + 1));
  auto powers = tt.finite_powers(t);
  CHECK(!powers.empty());
  CHECK(powers[0] == t);
}

TEST_CASE("omega powers satisfy the absorption laws") {
  TypeTable tt;
  for (int k = 1; k <= 2; ++k)
    for (const auto& w : all_words(1, 2)) {
      if (w.empty()) continue;
      TypeId t = tt.word_type(w, k, 1);
      TypeId tw = tt.omega_power(t);
      CHECK(tt.compose_sum(t, tw) == tw);
      CHECK(tt.omega_power(tt.compose_sum(t, t)) == tw);
      for (int e = 1; e <= 3; ++e)
        CHECK(tt.omega_power(tt.pow_type(t, Pos(e))) == tw);
    }
}

TEST_CASE("omega powers decide basic order sentences") {
  TypeTable tt;
  Signature sig = Signature::with_predicates(0);
  TypeId a = tt.word_type(std::vector<Letter>{0}, 2, 0);
  TypeId aw = tt.omega_power(a);
  CHECK(implies_sentence(tt, aw, *parse("E x. A y. x <= y", sig), sig));
  CHECK_FALSE(implies_sentence(tt, aw, *parse("E x. A y. y <= x", sig), sig));
  CHECK(implies_sentence(tt, aw, *parse("A x. E y. x < y", sig), sig));
  TypeId rev = tt.reverse_type(aw);  // the negative order
  CHECK(implies_sentence(tt, rev, *parse("E x. A y. y <= x", sig), sig));
  CHECK_FALSE(implies_sentence(tt, rev, *parse("E x. A y. x <= y", sig), sig));
}

TEST_CASE("labelled omega words keep their labels apart") {
  TypeTable tt;
  Signature sig = Signature::with_predicates(1);
  // (10)^omega has unboundedly many labels; (0)^omega has none.
  TypeId ab = tt.word_type(std::vector<Letter>{1, 0}, 2, 1);
  TypeId zero = tt.word_type(std::vector<Letter>{0}, 2, 1);
  auto unbounded = parse("A x. E y. (x < y & P1(y))", sig);
  auto none = parse("~(E x. P1(x))", sig);
  CHECK(implies_sentence(tt, tt.omega_power(ab), *unbounded, sig));
  CHECK_FALSE(implies_sentence(tt, tt.omega_power(ab), *none, sig));
  CHECK(implies_sentence(tt, tt.omega_power(zero), *none, sig));
}

TEST_CASE("types decide exactly the sentences the word satisfies") {
  // Three-way agreement with the brute-force evaluator across the
  // catalog, for all words up to length 4.
  TypeTable tt;
  for (const auto& entry : sentence_catalog()) {
    Signature sig = Signature::with_predicates(entry.predicates);
    auto f = parse(entry.text, sig);
    for (const auto& w : all_words(entry.predicates, 4)) {
      TypeId t = tt.word_type(w, 2, entry.predicates);
      bool via_type = implies_sentence(tt, t, *f, sig);
      bool direct = eval_finite(*f, FiniteModel::of(w));
      if (via_type != direct) CAPTURE(entry.text);
      REQUIRE(via_type == direct);
    }
  }
}

TEST_CASE("implies_sentence validates its preconditions") {
  TypeTable tt;
  Signature sig = Signature::with_predicates(0);
  TypeId t = tt.word_type(std::vector<Letter>{0}, 1, 0);
  auto deep = parse("E x. E y. x < y", sig);
  CHECK_THROWS(implies_sentence(tt, t, *deep, sig));  // qd 2 > level 1
  Signature wide = Signature::with_predicates(1);
  CHECK_THROWS(implies_sentence(tt, t, *parse("E x. P1(x)", wide), wide));
}

TEST_CASE("interning is canonical") {
  TypeTable tt;
  TypeId a = tt.word_type(std::vector<Letter>{1, 0, 1}, 2, 1);
  TypeId b = tt.word_type(std::vector<Letter>{1, 0, 1}, 2, 1);
  CHECK(a == b);
  std::size_t before = tt.size();
  tt.word_type(std::vector<Letter>{1, 0, 1}, 2, 1);
  CHECK(tt.size() == before);
}
