#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lodex/automata.hpp"
#include "lodex/formula.hpp"

#include "catalog.hpp"

using namespace lodex;
using lodex::testing::all_words;
using lodex::testing::sentence_catalog;

TEST_CASE("compiled sentences recognise the right languages") {
  Signature sig = Signature::with_predicates(1);

  Nfa some = compile(*parse("E x. P1(x)", sig), sig);
  CHECK(accepts_structure(some, {0, 1, 0}, 1));
  CHECK_FALSE(accepts_structure(some, {0, 0, 0}, 1));
  CHECK_FALSE(accepts_structure(some, {}, 1));

  Nfa every = compile(*parse("A x. P1(x)", sig), sig);
  CHECK(accepts_structure(every, {}, 1));
  CHECK(accepts_structure(every, {1, 1, 1}, 1));
  CHECK_FALSE(accepts_structure(every, {1, 0}, 1));

  // "some position is labelled and everything after it is labelled"
  Nfa tail = compile(*parse("E x. (P1(x) & A y. (x < y -> P1(y)))", sig), sig);
  CHECK(accepts_structure(tail, {0, 0, 1, 1}, 1));
  CHECK(accepts_structure(tail, {0, 1}, 1));
  CHECK_FALSE(accepts_structure(tail, {1, 0}, 1));
  CHECK_FALSE(accepts_structure(tail, {0, 0}, 1));
}

TEST_CASE("order atoms are direction-sensitive") {
  Signature sig = Signature::with_predicates(1);
  Nfa before = compile(
      *parse("E x. E y. (x < y & P1(x) & ~P1(y))", sig), sig);
  CHECK(accepts_structure(before, {1, 0}, 1));
  CHECK(accepts_structure(before, {0, 1, 0}, 1));
  CHECK_FALSE(accepts_structure(before, {0, 1}, 1));  // only the reverse order
  CHECK_FALSE(accepts_structure(before, {1}, 1));
  CHECK_FALSE(accepts_structure(before, {1, 1}, 1));
}

TEST_CASE("set quantifiers compile via projection") {
  Signature sig = Signature::with_predicates(1);
  // Splitting into labelled and unlabelled parts is always possible...
  Nfa split = compile(
      *parse("E2 X. A x. (x in X -> P1(x))", sig), sig);
  CHECK(accepts_structure(split, {}, 1));
  CHECK(accepts_structure(split, {0, 1, 0}, 1));
  // ...but a nonempty all-labelled set needs a label somewhere.
  Nfa witness = compile(
      *parse("E2 X. E x. (x in X & A y. (y in X -> P1(y)))", sig), sig);
  CHECK(accepts_structure(witness, {0, 1}, 1));
  CHECK_FALSE(accepts_structure(witness, {0, 0}, 1));
}

TEST_CASE("automaton semantics agrees with brute force on the catalog") {
  for (const auto& entry : sentence_catalog()) {
    Signature sig = Signature::with_predicates(entry.predicates);
    auto f = parse(entry.text, sig);
    Nfa a = compile(*f, sig);
    for (const auto& w : all_words(entry.predicates, 5)) {
      bool direct = eval_finite(*f, FiniteModel::of(w));
      bool automaton = accepts_structure(a, w, entry.predicates);
      if (direct != automaton) {
        CAPTURE(entry.text);
        CAPTURE(w.size());
      }
      REQUIRE(direct == automaton);
    }
  }
}

TEST_CASE("the state cap raises a resource error") {
  Signature sig = Signature::with_predicates(1);
  auto f = parse("A2 X. A2 Y. E x. (x in X | x in Y | P1(x))", sig);
  CHECK_THROWS_AS(compile(*f, sig, 3), ResourceError);
}
