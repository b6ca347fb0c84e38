#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "basilica/automaton.hpp"
#include "basilica/word.hpp"

namespace basilica {

// Letterwise substitution a -> b^2, b -> a (inverses a^-1 -> b^-2,
// b^-1 -> a^-1), freely reduced afterwards.
Word sigma_sub(const Word& w);

// sigma^n applied to the commutator [a, a^b] with [x, y] = x^-1 y^-1 x y.
Word relator(int n);

struct RelationCheck {
  int n = 0;
  std::size_t free_length = 0;
  bool trivial = false;
  std::int64_t millis = 0;
};

struct RelationReport {
  std::vector<RelationCheck> relators;      // sigma^n [a, a^b] for n <= N
  std::vector<RelationCheck> eliminated;    // [a, a^{b^{2m+1}}] for m <= 2
  bool all_pass = false;
  std::string to_json() const;
};

// Verifies that relator(n) is trivial in G for all n <= N and spot-checks the
// odd-conjugate commutators the presentation eliminates.
RelationReport verify_relations(int N = 6);

}  // namespace basilica
