#pragma once

#include "lodex/common.hpp"
#include "lodex/formula.hpp"

#include <map>
#include <set>
#include <vector>

namespace lodex {

// Nondeterministic finite automaton over track-encoded words: the low
// bits of each letter are the structure's predicate tracks, higher bits
// carry one track per variable.
struct Nfa {
  int tracks = 0;
  int states = 0;
  std::set<int> initial, accepting;
  // delta[state][letter] -> successor set
  std::vector<std::map<Letter, std::set<int>>> delta;
};

bool accepts(const Nfa& a, const std::vector<Letter>& word);

// Classical formula-to-automaton compilation on finite words
// (Buechi-Elgot-Trakhtenbrot): negation by subset construction and
// complementation, quantification by track projection. The result reads
// only the structure tracks of the signature; variable tracks are
// internal. Used as an independent oracle against the type algebra.
Nfa compile(const Formula& f, const Signature& sig, int state_cap = 100000);

// Acceptance of a plain structure word (variable tracks zeroed).
bool accepts_structure(const Nfa& a, const std::vector<Letter>& word,
                       int structure_tracks);

}  // namespace lodex
