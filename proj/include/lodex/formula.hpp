#pragma once

#include "lodex/common.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lodex {

// Unary predicate symbols P_1..P_n plus an optional expansion symbol
// (the predicate H added by the expansion constructions).
struct Signature {
  std::vector<std::string> predicate_names;
  std::optional<std::string> expansion_name;

  int tracks() const {
    return static_cast<int>(predicate_names.size()) +
           (expansion_name ? 1 : 0);
  }
  // Track index of a predicate identifier, or -1 if unknown.
  int track_of(const std::string& name) const;
  std::string name_of_track(int t) const;

  static Signature with_predicates(int n);  // P1..Pn
  Signature expanded(const std::string& name = "H") const;
};

enum class FormulaKind {
  Less,       // x < y
  Leq,        // x <= y
  Eq,         // x = y
  Pred,       // P_i(x), track index stored
  In,         // x in X
  Not,
  And,
  Or,
  Implies,
  ExistsFo,
  ForallFo,
  ExistsSo,
  ForallSo,
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable MSO formula tree. First-order variables are lowercase
// identifiers, set variables uppercase.
class Formula {
 public:
  FormulaKind kind;
  std::string var1, var2;  // atom operands or the bound variable
  int track = -1;          // Pred only
  std::vector<FormulaPtr> children;

  int quantifier_depth() const { return qd_; }

  static FormulaPtr atom(FormulaKind k, std::string a, std::string b);
  static FormulaPtr pred(int track, std::string x);
  static FormulaPtr negation(FormulaPtr f);
  static FormulaPtr binary(FormulaKind k, FormulaPtr a, FormulaPtr b);
  static FormulaPtr quantifier(FormulaKind k, std::string v, FormulaPtr f);

  std::set<std::string> free_variables() const;
  bool is_sentence() const { return free_variables().empty(); }
  bool mentions_track(int t) const;

 private:
  int qd_ = 0;
};

FormulaPtr parse(const std::string& text, const Signature& sig);
std::string to_string(const Formula& f, const Signature& sig);

int quantifier_depth(const Formula& f);

bool structurally_equal(const Formula& a, const Formula& b);
// Equality up to renaming of bound variables.
bool alpha_equal(const Formula& a, const Formula& b);

// Restricts every first-order quantifier of `f` to the interval
// [lower, upper). Either bound may be absent. Set quantifiers are left
// untouched: once all points are confined to the interval, the part of
// a set outside it is invisible. Quantifier depth is preserved.
// Throws ParseError if a bound variable of `f` collides with a bound
// name.
FormulaPtr relativize(FormulaPtr f, std::optional<std::string> lower,
                      std::optional<std::string> upper);

// The reduction of Lemma-style H-elimination: for a sentence f over an
// expanded signature, returns  E x. ((A y. x <= y) & f*)  where f*
// replaces every atom H(z) by z = x. Over a segment whose only
// H-element is its minimum, the result (H-free) is equivalent to f.
FormulaPtr transform_er(FormulaPtr f, const Signature& sig);

// A finite word together with an assignment of the free variables.
struct FiniteModel {
  std::vector<Letter> word;
  std::map<std::string, int> fo_assignment;          // variable -> position
  std::map<std::string, std::uint64_t> so_assignment;  // variable -> bit mask

  static FiniteModel of(std::vector<Letter> w) { return {std::move(w), {}, {}}; }
};

// Ground-truth brute-force MSO evaluation: set quantifiers enumerate
// all subsets of the word's positions.
bool eval_finite(const Formula& f, const FiniteModel& m);

}  // namespace lodex
