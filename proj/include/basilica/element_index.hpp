#pragma once

#include <cstdint>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

#include "basilica/automaton.hpp"
#include "basilica/word.hpp"

namespace basilica {

// Optional shared memo for triviality decisions, bounded with LRU eviction.
class TrivialityCache {
 public:
  explicit TrivialityCache(std::size_t capacity = 1 << 20)
      : capacity_(capacity) {}

  std::optional<bool> lookup(const Word& w);
  void store(const Word& w, bool value);
  std::size_t size() const { return map_.size(); }

 private:
  std::size_t capacity_;
  std::list<Word> order_;
  std::unordered_map<Word, std::pair<bool, std::list<Word>::iterator>, WordHash>
      map_;
};

// True iff w represents the identity: breadth-first closure of {w} under
// sections, true iff every reachable word has trivial root permutation.
// Terminates because reachable reduced words have length <= |w|.
bool is_trivial(const Word& w, const AutomatonGroupDef& def,
                TrivialityCache* cache = nullptr);

bool equal(const Word& g, const Word& h, const AutomatonGroupDef& def,
           TrivialityCache* cache = nullptr);

// Exact interning of group elements. Words are keyed first by their reduced
// letters, then by a depth-k action signature, with same-signature candidates
// separated by the exact triviality test, so identification is never merely
// hash-based.
class ElementIndex {
 public:
  explicit ElementIndex(const AutomatonGroupDef& def, int sig_depth = 8);

  int intern(const Word& w);
  const Word& representative(int id) const { return reps_[id]; }
  int size() const { return static_cast<int>(reps_.size()); }
  const AutomatonGroupDef& def() const { return def_; }
  TrivialityCache& cache() { return cache_; }

  std::uint64_t signature(const Word& w);

 private:
  std::uint64_t signature_rec(const Word& w, int depth);

  const AutomatonGroupDef& def_;
  int sig_depth_;
  TrivialityCache cache_;
  std::unordered_map<Word, int, WordHash> word_to_id_;
  std::vector<Word> reps_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
  std::vector<std::unordered_map<Word, std::uint64_t, WordHash>> sig_memo_;
};

// Breadth-first enumeration of the Cayley ball, merging words that are equal
// in the group. Canonical representative of each element is the first word
// found in BFS order under the letter ordering g0 < g0^-1 < g1 < g1^-1 < ...
class BallEnumerator {
 public:
  explicit BallEnumerator(const AutomatonGroupDef& def,
                          std::size_t node_budget = 5'000'000);

  // Extends enumeration out to the given radius; returns false if the node
  // budget was exhausted first.
  bool extend_to(int radius);

  int radius_done() const { return radius_done_; }
  // Ids of elements first reached at exactly radius r.
  const std::vector<int>& sphere(int r) const { return spheres_[r]; }
  // All elements with norm <= r, in BFS order.
  std::vector<int> ball_ids(int r) const;
  std::vector<Word> ball(int r) const;

  std::optional<int> norm_of_id(int id) const;
  ElementIndex& index() { return index_; }

  // Shortest-word length of g; nullopt if it exceeds the radius cap or the
  // enumeration budget (callers fall back to the representative length).
  std::optional<int> word_norm(const Word& g, int radius_cap = 20);

 private:
  ElementIndex index_;
  std::size_t node_budget_;
  std::size_t nodes_used_ = 0;
  int radius_done_ = -1;
  std::vector<std::vector<int>> spheres_;
  std::vector<int> norm_by_id_;
  bool budget_exhausted_ = false;
};

}  // namespace basilica
