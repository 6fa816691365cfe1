#pragma once

#include "lodex/common.hpp"
#include "lodex/formula.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lodex {

// Canonical identifier of a k-type in a TypeTable registry.
using TypeId = std::int32_t;

// Sort of a marked parameter carried by a type: a point (first-order
// extension) or a set (second-order extension). Inside a summand of an
// ordered sum a point parameter may be absent; sets restrict freely.
enum class ParamKind : std::uint8_t { Point, Set };

// Alphabet-and-parameter context of a type: number of predicate tracks
// plus the ordered list of marked parameters.
struct TypeContext {
  int tracks = 0;
  std::vector<ParamKind> params;

  auto operator<=>(const TypeContext&) const = default;
  int point_count() const;
  int set_count() const;
};

// Truth assignment to all atomic formulas over the marked parameters:
// presence of each point, order among present points, and membership of
// present points in predicate tracks and marked sets. Stored as a
// canonical byte vector whose layout is determined by the context.
class AtomicFacts {
 public:
  AtomicFacts() = default;
  explicit AtomicFacts(const TypeContext& ctx);

  // Point parameters are addressed by their index among the point
  // params (0-based, in context order).
  bool present(int i) const { return data_[i] != 0; }
  void set_present(int i, bool v) { data_[i] = v ? 1 : 0; }

  // 0 = not applicable (an absent endpoint), 1 = '<', 2 = '=', 3 = '>'.
  std::uint8_t order(int i, int j) const;
  void set_order(int i, int j, std::uint8_t rel);

  // Membership column c: tracks first, then marked sets in param order.
  bool member(int i, int c) const;
  void set_member(int i, int c, bool v);

  const std::vector<std::uint8_t>& bytes() const { return data_; }

 private:
  int points_ = 0, columns_ = 0;
  std::vector<std::uint8_t> data_;
};

struct TypeRecord {
  int level = 0;
  int ctx = 0;  // interned context id
  AtomicFacts facts;
  std::vector<TypeId> point_children;  // sorted, unique
  std::vector<TypeId> set_children;    // sorted, unique
};

struct TypeTableConfig {
  int k_max = 3;          // formula quantifier-depth cap for direct use
  int level_cap = 6;      // hard cap on type levels in the registry
  int ef_length_cap = 8;  // word length cap for the EF recursion
  std::int64_t ef_step_cap = 4000000;
  std::size_t registry_cap = 2000000;
};

// A concrete marked parameter for the EF recursion on finite words.
struct ConcreteParam {
  ParamKind kind;
  int pos = 0;               // Point
  std::uint64_t mask = 0;    // Set, bit per position
};

// Append-only registry of canonical k-type objects with memoised
// algebraic operations. Identical structures always receive the same
// identifier. Concurrent reads are safe; insertions follow a
// single-writer contract.
class TypeTable {
 public:
  explicit TypeTable(TypeTableConfig cfg = {}) : cfg_(cfg) {}

  const TypeTableConfig& config() const { return cfg_; }

  int context_id(const TypeContext& ctx);
  const TypeContext& context(int id) const { return contexts_[id]; }

  TypeId intern(int level, int ctx, const AtomicFacts& facts,
                std::vector<TypeId> point_children,
                std::vector<TypeId> set_children);
  const TypeRecord& record(TypeId id) const { return records_[id]; }
  std::size_t size() const { return records_.size(); }

  // The unique type of the empty word at this level and context.
  TypeId empty_type(int level, int ctx);

  // EF recursion on a finite word: enumerate all point and set
  // extensions, recurse one level down, collect children and facts.
  TypeId type_of_finite(std::span<const Letter> word, int k, int tracks,
                        const std::vector<ConcreteParam>& params = {});

  TypeId letter_type(Letter a, int k, int tracks);
  // Fast path: fold single-letter types through compose_sum.
  TypeId word_type(std::span<const Letter> word, int k, int tracks);
  TypeId word_type(const std::vector<Letter>& word, int k, int tracks);

  // k-type of the ordered sum of two structures of the given types.
  TypeId compose_sum(TypeId a, TypeId b);
  // k-type of an omega-indexed sum of structures all of type t.
  TypeId omega_power(TypeId t);
  // k-type of the reversed ordering.
  TypeId reverse_type(TypeId t);
  // The (level-1)-type determined by a level-k identifier.
  TypeId downgrade(TypeId t);

  // t composed with itself e times (e >= 0).
  TypeId pow_type(TypeId t, const Pos& e);
  // All distinct values t, t+t, t+t+t, ...
  std::vector<TypeId> finite_powers(TypeId t);
  bool idempotent(TypeId t) { return compose_sum(t, t) == t; }

  // Inserts an absent point parameter at position `at` of the context.
  TypeId insert_absent_point(TypeId t, int at);

 private:
  TypeId ef_type(std::span<const Letter> word, int k, int tracks,
                 std::vector<ConcreteParam>& params);
  AtomicFacts concrete_facts(std::span<const Letter> word, int tracks,
                             const std::vector<ConcreteParam>& params,
                             int ctx);

  TypeTableConfig cfg_;
  std::vector<TypeContext> contexts_;
  std::map<TypeContext, int> context_ids_;
  std::vector<TypeRecord> records_;
  std::unordered_map<std::string, TypeId> index_;
  std::map<std::pair<TypeId, TypeId>, TypeId> compose_memo_;
  std::map<TypeId, TypeId> omega_memo_, reverse_memo_, downgrade_memo_;
  std::map<std::pair<TypeId, int>, TypeId> lift_memo_;
  std::map<std::pair<int, int>, TypeId> empty_memo_;
  std::map<std::tuple<Letter, int, int>, TypeId> letter_memo_;
};

// True iff every structure of type t satisfies the sentence f.
// Requires qd(f) <= level(t) and a parameter-free context whose track
// count matches the signature.
bool implies_sentence(TypeTable& tt, TypeId t, const Formula& f,
                      const Signature& sig);

}  // namespace lodex
