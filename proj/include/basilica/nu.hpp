#pragma once

#include <optional>
#include <vector>

#include "basilica/automaton.hpp"
#include "basilica/element_index.hpp"
#include "basilica/word.hpp"

namespace basilica {

enum class NuMode { exact, upper_bound };

struct NuValue {
  int value;
  NuMode mode;
};

// Shared state for nu computations over one group definition: the Cayley-ball
// enumerator backing exact word norms, plus per-mode memo tables. Binary
// (d = 2) definitions only.
class NuContext {
 public:
  explicit NuContext(const AutomatonGroupDef& def, int norm_radius_cap = 20);

  const AutomatonGroupDef& def() const { return def_; }
  BallEnumerator& ball() { return ball_; }
  int norm_radius_cap() const { return norm_radius_cap_; }

  std::unordered_map<Word, int, WordHash>& memo(NuMode mode) {
    return mode == NuMode::exact ? memo_exact_ : memo_upper_;
  }

 private:
  const AutomatonGroupDef& def_;
  BallEnumerator ball_;
  int norm_radius_cap_;
  std::unordered_map<Word, int, WordHash> memo_exact_;
  std::unordered_map<Word, int, WordHash> memo_upper_;
};

// nu(g) = min(base(g), 1 + nu(g_0) + nu(g_1)), evaluated as the limit of
// value iteration over the section-reachable closure of g (the mutual
// recursion a <-> b makes plain recursion circular). Base is the exact word
// norm in exact mode and the representative length in upper_bound mode, so
// the upper_bound value dominates the exact one.
//
// Exact mode returns nullopt when some reachable word norm exceeds the
// radius cap; callers retry in upper_bound mode.
std::optional<NuValue> nu(const Word& g, NuContext& ctx,
                          NuMode mode = NuMode::exact);

inline int nu_upper(const Word& g, NuContext& ctx) {
  return nu(g, ctx, NuMode::upper_bound)->value;
}

// Finite binary subtree containing the root: every vertex has 0 or 2
// children. Stored as the sorted list of leaves. The edge count is
// #leaves - 1, which is what the nu_S formula charges per split (one unit
// per internal vertex, matching the +1 in the recursive definition).
struct BinarySubtree {
  std::vector<Vertex> leaves;
  int edges() const { return static_cast<int>(leaves.size()) - 1; }
};

// All binary subtrees with at most max_edges edges (deterministic order).
std::vector<BinarySubtree> enumerate_subtrees(int max_edges);

// nu_S(g) = E + sum over leaves of |g[v]| with exact word norms; nullopt if
// a leaf norm exceeds the cap.
std::optional<int> nu_subtree(const Word& g, const BinarySubtree& S,
                              NuContext& ctx);

// Elements of the Basilica group with nu <= n, one canonical representative
// per element, ordered by (length, letters). Enumerates assembled portraits
// (subtree shape, internal root permutations, leaf words) and lifts each to
// a group word; Basilica preset only.
std::vector<Word> nu_ball(NuContext& ctx, int n);

// Word in the Basilica group with first-level decomposition (g0, g1) and
// optional root swap; nullopt when no such element exists. Membership of
// (g0, g1) in the image of the level-1 stabilizer is equivalent to equal
// a-exponent sums (the relators are commutator-like, so exponent sums are
// well-defined on the group, and the stabilizer image is generated by
// (1,b), (a,a), (b,1)).
std::optional<Word> lift_pair(const Word& g0, const Word& g1, bool swap_part);

}  // namespace basilica
