#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lodex/omega.hpp"

#include "catalog.hpp"

using namespace lodex;

namespace {

SparseSet factorials() {
  SparseSet s;
  s.kind = SparseSet::Kind::Factorial;
  return s;
}

SparseSet finite_set(std::vector<Pos> ps) {
  SparseSet s;
  s.kind = SparseSet::Kind::Finite;
  s.positions = std::move(ps);
  return s;
}

const SearchBudget kBudget{};

}  // namespace

TEST_CASE("sparse sets enumerate and test membership consistently") {
  SparseSet f = factorials();
  CHECK(f.members_in(0, 30) == std::vector<Pos>{1, 2, 6, 24});
  CHECK(f.members_in(2, 7) == std::vector<Pos>{2, 6});
  CHECK(f.member(120));
  CHECK_FALSE(f.member(0));
  CHECK_FALSE(f.member(7));

  SparseSet p;
  p.kind = SparseSet::Kind::Power;
  p.base = 2;
  CHECK(p.members_in(0, 9) == std::vector<Pos>{1, 2, 4, 8});
  CHECK(p.member(1024));
  CHECK_FALSE(p.member(12));
}

TEST_CASE("segment types match letter-by-letter folding") {
  TypeTable tt;
  OmegaPresentation p = OmegaPresentation::with_sparse(factorials());
  for (int k = 1; k <= 2; ++k)
    for (int a = 0; a <= 8; ++a)
      for (int b = a; b <= 12; ++b) {
        std::vector<Letter> w;
        for (int x = a; x < b; ++x) w.push_back(p.letter_at(x));
        CHECK(segment_type(p, a, b, k, tt, kBudget) ==
              tt.word_type(w, k, 1));
      }
}

TEST_CASE("segment types handle huge blocks via period shortcuts") {
  TypeTable tt;
  OmegaPresentation p =
      OmegaPresentation::lasso(1, {0, 0, 0}, {1, 0});  // 000(10)^omega
  // Prefix length 3 plus an even number of period letters, so the huge
  // word ends exactly at a period boundary like the reference word.
  Pos big = Pos("1000000000000000000000000") + 3;
  TypeId t = segment_type(p, 0, big, 2, tt, kBudget);
  // A huge even-aligned block has the same 2-type as a moderately long
  // one, by idempotency of the period type.
  std::vector<Letter> w = {0, 0, 0};
  for (int i = 0; i < 10; ++i) {
    w.push_back(1);
    w.push_back(0);
  }
  CHECK(t == tt.word_type(w, 2, 1));
  CHECK(segment_type(p, 5, 5, 2, tt, kBudget) ==
        tt.word_type(std::vector<Letter>{}, 2, 1));
}

TEST_CASE("homogeneous sets verify their defining property post hoc") {
  TypeTable tt;
  for (const OmegaPresentation& p :
       {OmegaPresentation::plain(),
        OmegaPresentation::with_sparse(factorials())}) {
    const int K = 2;
    HomogSet h = build_uniform_homog(p, K, kBudget, tt, 6);
    REQUIRE(h.diagonal.size() == 6);
    for (std::size_t i = 0; i + 1 < h.diagonal.size(); ++i)
      CHECK(h.diagonal[i] < h.diagonal[i + 1]);
    for (int k = 0; k <= K; ++k) {
      TypeId e = h.idempotents[k];
      CHECK(tt.compose_sum(e, e) == e);
      const auto& hk = h.level_prefixes[k];
      // All pairwise segments within the tail of H_k share the type e_k.
      for (std::size_t i = k; i < hk.size(); ++i)
        for (std::size_t j = i + 1; j < hk.size(); ++j)
          CHECK(segment_type(p, hk[i], hk[j], k, tt, kBudget) == e);
      // Nesting: H_k and H_{k+1} share their first k elements.
      if (k < K)
        for (int i = 0; i < k; ++i)
          CHECK(h.level_prefixes[k][i] == h.level_prefixes[k + 1][i]);
    }
    // The diagonal tail from index k is itself k-homogeneous.
    for (int k = 0; k <= K; ++k)
      for (std::size_t i = k; i + 1 < h.diagonal.size(); ++i)
        CHECK(segment_type(p, h.diagonal[i], h.diagonal[i + 1], k, tt,
                           kBudget) == h.idempotents[k]);
  }
}

TEST_CASE("an empty budget fails fast") {
  TypeTable tt;
  SearchBudget zero{0, 1000000};
  CHECK_THROWS_AS(
      build_uniform_homog(OmegaPresentation::plain(), 1, zero, tt),
      ResourceError);
}

TEST_CASE("structure types decide basic order facts") {
  TypeTable tt;
  Signature sig = Signature::with_predicates(0);
  OmegaPresentation p = OmegaPresentation::plain();
  CHECK(decide(p, *parse("E x. A y. x <= y", sig), sig, kBudget, tt));
  CHECK_FALSE(decide(p, *parse("E x. A y. y <= x", sig), sig, kBudget, tt));
  CHECK(decide(p, *parse("A x. E y. x < y", sig), sig, kBudget, tt));
}

TEST_CASE("decisions over labelled omega-words match hand-derived truth") {
  TypeTable tt;
  Signature sig = Signature::with_predicates(1);
  OmegaPresentation fac = OmegaPresentation::with_sparse(factorials());
  // The predicate is infinite, has a least element, and misses
  // infinitely many positions.
  CHECK(decide(fac, *parse("A x. E y. (x < y & P1(y))", sig), sig, kBudget, tt));
  CHECK(decide(fac, *parse("E x. (P1(x) & A y. (P1(y) -> x <= y))", sig), sig,
               kBudget, tt));
  CHECK(decide(fac, *parse("A x. E y. (x < y & ~P1(y))", sig), sig, kBudget,
               tt));
  CHECK_FALSE(decide(fac, *parse("A x. P1(x)", sig), sig, kBudget, tt));

  OmegaPresentation up = OmegaPresentation::lasso(1, {0, 0, 0}, {1, 0});
  CHECK(decide(up, *parse("A x. E y. (x < y & P1(y))", sig), sig, kBudget, tt));
  CHECK(decide(up, *parse("A x. E y. (x < y & ~P1(y))", sig), sig, kBudget,
               tt));
  CHECK(decide(up, *parse("E x. (~P1(x) & A y. x <= y)", sig), sig, kBudget,
               tt));
}

TEST_CASE("the lasso fast path agrees with the homogeneous path") {
  TypeTable tt;
  for (int k = 1; k <= 2; ++k) {
    OmegaPresentation fast = OmegaPresentation::lasso(1, {0, 1}, {1, 0});
    // The same word, with an empty sparse overlay to force the
    // homogeneous machinery.
    OmegaPresentation slow = fast;
    slow.sparse.emplace_back(0, finite_set({}));
    CHECK(structure_type(fast, k, kBudget, tt) ==
          structure_type(slow, k, kBudget, tt));
  }
}

TEST_CASE("expansion adds an infinite predicate with a least element") {
  TypeTable tt;
  Signature sig = Signature::with_predicates(0).expanded("H");
  OmegaPresentation p = expand(OmegaPresentation::plain(), kBudget, tt);
  CHECK(p.tracks == 1);
  CHECK(decide(p, *parse("A x. E y. (x < y & H(y))", sig), sig, kBudget, tt));
  CHECK(decide(p, *parse("E x. (H(x) & A y. (H(y) -> x <= y))", sig), sig,
               kBudget, tt));
}

TEST_CASE("expansion is deterministic") {
  TypeTable t1, t2;
  OmegaPresentation a = expand(OmegaPresentation::with_sparse(factorials()),
                               kBudget, t1);
  OmegaPresentation b = expand(OmegaPresentation::with_sparse(factorials()),
                               kBudget, t2);
  auto& ba = *a.sparse.back().second.diagonal;
  auto& bb = *b.sparse.back().second.diagonal;
  for (std::size_t m = 0; m < 8; ++m)
    CHECK(ba.diagonal_element(m) == bb.diagonal_element(m));
}

TEST_CASE("expanded types agree with the generic pipeline") {
  TypeTable tt;
  OmegaPresentation p = expand(OmegaPresentation::plain(), kBudget, tt);
  for (int k = 1; k <= 2; ++k)
    CHECK(expanded_type(p, k, tt) == structure_type(p, k, kBudget, tt));
  CHECK_THROWS_AS(expanded_type(p, 3, tt), ResourceError);
  CHECK_THROWS_AS(expanded_type(OmegaPresentation::plain(), 1, tt),
                  std::invalid_argument);
}

TEST_CASE("expanded types agree with the H-elimination transform") {
  // tau', the type of a tail segment whose unique H-element is its
  // minimum, decides a sentence f iff the underlying unmarked segment
  // decides the H-free transform of f.
  TypeTable tt;
  Signature base = Signature::with_predicates(0);
  Signature sig = base.expanded("H");
  const int k = 2;
  OmegaPresentation p = expand(OmegaPresentation::plain(), kBudget, tt);
  HomogBuilder& hb = *p.sparse.back().second.diagonal;
  TypeId tau = segment_type(p, hb.diagonal_element(k + 2),
                            hb.diagonal_element(k + 3), k, tt, kBudget);
  TypeId deep = hb.level_idempotent(k + 2);
  for (const auto& entry : lodex::testing::sentence_catalog()) {
    std::string text = entry.text;
    for (std::string::size_type q; (q = text.find("P1")) != std::string::npos;)
      text.replace(q, 2, "H");
    auto f = parse(text, sig);
    auto g = transform_er(f, sig);
    CHECK(implies_sentence(tt, tau, *f, sig) ==
          implies_sentence(tt, deep, *g, base));
  }
}

TEST_CASE("indistinguishable positions pass the two-sided type check") {
  TypeTable tt;
  OmegaPresentation plain = OmegaPresentation::plain();
  CHECK(indistinguishability_check(plain, 7, 7, 2, kBudget, tt));

  OmegaPresentation fac = OmegaPresentation::with_sparse(factorials());
  // One position carries the predicate, the other does not: already the
  // prefix 1-types differ.
  CHECK_FALSE(indistinguishability_check(fac, 1, 4, 1, kBudget, tt));

  // The classic witness pair: consecutive diagonal elements of a
  // homogeneous set beyond index 2k.
  OmegaPresentation exp = expand(plain, kBudget, tt);
  HomogBuilder& hb = *exp.sparse.back().second.diagonal;
  const int k = 2;
  CHECK(indistinguishability_check(plain, hb.diagonal_element(2 * k),
                                   hb.diagonal_element(2 * k + 1), k, kBudget,
                                   tt));
}
