#pragma once

#include "lodex/common.hpp"
#include "lodex/formula.hpp"
#include "lodex/types.hpp"

#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace lodex {

class HomogBuilder;

// An enumerable sparse subset of the naturals, attached to one
// predicate track of an omega-word.
struct SparseSet {
  enum class Kind { Factorial, Power, Finite, Diagonal };
  Kind kind = Kind::Finite;
  long long base = 0;                         // Power
  std::vector<Pos> positions;                 // Finite (sorted)
  std::shared_ptr<HomogBuilder> diagonal;     // Diagonal

  bool member(const Pos& x) const;
  // Members of [lo, hi), sorted. Finite for every bounded interval.
  std::vector<Pos> members_in(const Pos& lo, const Pos& hi) const;
  // Least member >= x, if any.
  std::optional<Pos> next_geq(const Pos& x) const;
};

// Effectively presented omega-word over 2^tracks letters: an
// ultimately periodic background stream with sparse one-track
// overlays. A lasso u.v^omega is the special case with no overlays.
struct OmegaPresentation {
  int tracks = 0;
  std::vector<Letter> bg_prefix;
  std::vector<Letter> bg_period{0};
  std::vector<std::pair<int, SparseSet>> sparse;  // track -> set

  bool lasso_form() const { return sparse.empty(); }
  Letter background_at(const Pos& x) const;
  Letter letter_at(const Pos& x) const;

  static OmegaPresentation plain();  // (N, <), no predicates
  static OmegaPresentation lasso(int tracks, std::vector<Letter> u,
                                 std::vector<Letter> v);
  // Single sparse predicate on track 0 over an all-zero background.
  static OmegaPresentation with_sparse(SparseSet s);
};

// k-type of the finite segment [a, b) of the presented word.
TypeId segment_type(const OmegaPresentation& p, const Pos& a, const Pos& b,
                    int k, TypeTable& tt, const SearchBudget& budget);

// Incremental construction of a uniformly homogeneous set: nested
// level sets H_0 >= H_1 >= ... >= H_K, each obtained from its
// predecessor by a greedy search for a recurring idempotent segment
// type, preserving the predecessor's first elements. The diagonal
// h_m = m-th element of H_min(m, K) is the published set H. All state
// extends deterministically on demand.
class HomogBuilder {
 public:
  HomogBuilder(OmegaPresentation base, int levels, SearchBudget budget,
               TypeTable& tt);

  int levels() const { return K_; }
  const OmegaPresentation& base() const { return base_; }
  TypeTable& table() { return *tt_; }
  const SearchBudget& budget() const { return budget_; }

  // e_k, the idempotent segment type of level k.
  TypeId level_idempotent(int k);
  // idx-th element of H_k, extending the chain as needed.
  const Pos& level_element(int k, std::size_t idx);
  std::size_t level_size(int k) const { return levels_[k].elems.size(); }

  const Pos& diagonal_element(std::size_t m);
  bool diagonal_member(const Pos& x);
  std::vector<Pos> diagonal_in(const Pos& lo, const Pos& hi);

  // T^k of the tail [a, infinity) of the base word, k <= levels().
  TypeId tail_type(const Pos& a, int k);

 private:
  struct Level {
    bool ready = false;
    TypeId e = -1;
    std::vector<Pos> elems;
    std::size_t preserved = 0;     // shared prefix with the parent
    std::size_t parent_cursor = 0; // parent index of the last element
  };

  Pos parent_at(int k, std::size_t idx);
  TypeId seg(const Pos& a, const Pos& b, int k);
  void init_level(int k);
  void extend_level(int k);
  // Least m > from with the segment [from, m) of type e: incremental
  // fold with cycle detection, so uniform stretches between sparse
  // events are crossed in O(period) regardless of their length.
  std::optional<Pos> next_match(const Pos& from, TypeId e, int k,
                                std::int64_t max_scans);

  OmegaPresentation base_;
  int K_;
  SearchBudget budget_;
  TypeTable* tt_;
  std::vector<Level> levels_;
  std::map<std::tuple<Pos, Pos, int>, TypeId> seg_memo_;
};

// Snapshot of a built homogeneous set, for inspection and testing.
struct HomogSet {
  std::vector<Pos> diagonal;                     // h_0 < h_1 < ...
  std::vector<TypeId> idempotents;               // e_0 .. e_K
  std::vector<std::vector<Pos>> level_prefixes;  // H_0 .. H_K prefixes
};

HomogSet build_uniform_homog(const OmegaPresentation& p, int K,
                             const SearchBudget& budget, TypeTable& tt,
                             std::size_t want = 8);

TypeId structure_type(const OmegaPresentation& p, int k,
                      const SearchBudget& budget, TypeTable& tt);

bool decide(const OmegaPresentation& p, const Formula& f,
            const Signature& sig, const SearchBudget& budget, TypeTable& tt);

// The expansion of p by one further predicate track holding the
// diagonal of a uniformly homogeneous set. The result is an ordinary
// presentation whose new track is backed by a resumable builder.
OmegaPresentation expand(const OmegaPresentation& p,
                         const SearchBudget& budget, TypeTable& tt);

// Number of homogeneity levels an expansion carries (the new track
// supports k-type queries up to this minus two).
inline constexpr int kExpansionLevels = 4;

// T^k of an expanded presentation via the split at h_{k+2}: the type
// of the finite initial segment plus an omega-power of the constant
// segment type tau'. Requires k + 2 <= kExpansionLevels.
TypeId expanded_type(const OmegaPresentation& expanded, int k, TypeTable& tt);

// True iff positions a and b have equal prefix and tail k-types, in
// which case no formula phi(x) of quantifier depth < k separates them.
bool indistinguishability_check(const OmegaPresentation& p, const Pos& a,
                                const Pos& b, int k,
                                const SearchBudget& budget, TypeTable& tt);

}  // namespace lodex
