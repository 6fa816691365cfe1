#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lodex {

// Positions of labelled orderings. Homogeneous chains over sparse
// predicates (factorials in particular) reach positions far beyond
// 2^63, so positions are arbitrary-precision.
using Pos = boost::multiprecision::cpp_int;

// Letters are bit vectors over the predicate tracks, at most 31 tracks.
using Letter = std::uint32_t;

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// A bounded search ran out of budget. `where` names the failing search
// (e.g. the chain level that could not be extended).
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// The requested operation is not defined for this presentation kind.
struct UnsupportedError : std::runtime_error {
  explicit UnsupportedError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Horizon caps that make every semi-decidable search total-with-error.
// `horizon` bounds the number of candidate positions examined by a
// search, `step_cap` bounds elementary steps inside one call.
struct SearchBudget {
  std::int64_t horizon = 20000;
  std::int64_t step_cap = 2000000;
};

}  // namespace lodex
