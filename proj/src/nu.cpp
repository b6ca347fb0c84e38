#include "basilica/nu.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <unordered_set>
#include <array>
#include <set>
#include <cmath>

namespace basilica {

NuContext::NuContext(const AutomatonGroupDef& def, int norm_radius_cap)
    : def_(def), ball_(def), norm_radius_cap_(norm_radius_cap) {
  if (def.arity() != 2)
    throw std::invalid_argument("nu is defined for binary trees only");
}

std::optional<NuValue> nu(const Word& g, NuContext& ctx, NuMode mode) {
  auto& memo = ctx.memo(mode);
  if (auto it = memo.find(g); it != memo.end())
    return NuValue{it->second, mode};

  // Collect the section-reachable closure of g, stopping at memoized words.
  std::vector<Word> order;
  std::unordered_map<Word, int, WordHash> pos;
  std::vector<std::array<int, 2>> children;
  std::vector<int> base;
  std::vector<Word> stack{g};
  pos.emplace(g, 0);
  order.push_back(g);
  children.push_back({-1, -1});
  while (!stack.empty()) {
    Word w = std::move(stack.back());
    stack.pop_back();
    int idx = pos.at(w);
    WreathDecomp d = decompose(w, ctx.def());
    for (int c = 0; c < 2; ++c) {
      const Word& s = d.sections[c];
      auto it = pos.find(s);
      if (it == pos.end()) {
        int nidx = static_cast<int>(order.size());
        pos.emplace(s, nidx);
        order.push_back(s);
        children.push_back({-1, -1});
        children[idx][c] = nidx;
        if (memo.find(s) == memo.end() && !s.empty()) stack.push_back(s);
      } else {
        children[idx][c] = it->second;
      }
    }
  }

  base.resize(order.size());
  std::vector<int> value(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Word& w = order[i];
    if (auto it = memo.find(w); it != memo.end()) {
      base[i] = it->second;  // already converged; acts as a fixed constant
      value[i] = it->second;
      children[i] = {-1, -1};
      continue;
    }
    if (mode == NuMode::upper_bound) {
      base[i] = static_cast<int>(w.size());
    } else {
      auto norm = ctx.ball().word_norm(w, ctx.norm_radius_cap());
      if (!norm) return std::nullopt;
      base[i] = *norm;
    }
    value[i] = base[i];
  }

  // Value iteration to the stable point; cycles among equal-length words
  // (e.g. a <-> b) make one-pass recursion impossible.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (children[i][0] < 0) continue;
      int v = std::min(base[i], 1 + value[children[i][0]] +
                                    value[children[i][1]]);
      if (v < value[i]) {
        value[i] = v;
        changed = true;
      }
    }
  }

  for (std::size_t i = 0; i < order.size(); ++i)
    memo.emplace(order[i], value[i]);
  return NuValue{value[pos.at(g)], mode};
}

namespace {

void subtrees_rec(int max_edges, std::vector<std::vector<Vertex>>& out) {
  // Seed with the root-only tree, then repeatedly split each leaf of each
  // known tree; dedupe by the leaf list.
  out.push_back({Vertex{}});
  std::set<std::vector<Vertex>> seen(out.begin(), out.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto tree = out[i];
    if (static_cast<int>(tree.size()) - 1 >= max_edges) continue;
    for (std::size_t l = 0; l < tree.size(); ++l) {
      std::vector<Vertex> next;
      for (std::size_t j = 0; j < tree.size(); ++j) {
        if (j == l) {
          Vertex c0 = tree[j], c1 = tree[j];
          c0.push_back(0);
          c1.push_back(1);
          next.push_back(c0);
          next.push_back(c1);
        } else {
          next.push_back(tree[j]);
        }
      }
      std::sort(next.begin(), next.end());
      if (seen.insert(next).second) out.push_back(next);
    }
  }
}

}  // namespace

std::vector<BinarySubtree> enumerate_subtrees(int max_edges) {
  std::vector<std::vector<Vertex>> leaf_lists;
  subtrees_rec(max_edges, leaf_lists);
  std::sort(leaf_lists.begin(), leaf_lists.end());
  std::vector<BinarySubtree> out;
  for (auto& leaves : leaf_lists) out.push_back(BinarySubtree{leaves});
  return out;
}

std::optional<int> nu_subtree(const Word& g, const BinarySubtree& S,
                              NuContext& ctx) {
  int total = S.edges();
  for (const Vertex& leaf : S.leaves) {
    Word sec = section_at(g, leaf, ctx.def());
    auto norm = ctx.ball().word_norm(sec, ctx.norm_radius_cap());
    if (!norm) return std::nullopt;
    total += *norm;
  }
  return total;
}

namespace {

constexpr Letter kA = 1, kB = 2;

void push_power(Word& w, Letter l, int n) {
  Letter x = n >= 0 ? l : inverse_letter(l);
  for (int i = 0; i < std::abs(n); ++i) w.push(x);
}

// (u, 1) for u with zero a-exponent: each b-letter with a-prefix p lifts to
// b^{2p+1} a^s b^{-(2p+1)}.
Word lift_left(const Word& u) {
  Word out;
  int p = 0;
  for (Letter l : u.letters()) {
    if (gen_index(l) == 0) {
      p += is_positive(l) ? 1 : -1;
    } else {
      push_power(out, kB, 2 * p + 1);
      out.push(is_positive(l) ? kA : inverse_letter(kA));
      push_power(out, kB, -(2 * p + 1));
    }
  }
  return out;
}

// (1, v) for v with zero a-exponent: b^{2p} a^s b^{-2p} per b-letter.
Word lift_right(const Word& v) {
  Word out;
  int p = 0;
  for (Letter l : v.letters()) {
    if (gen_index(l) == 0) {
      p += is_positive(l) ? 1 : -1;
    } else {
      push_power(out, kB, 2 * p);
      out.push(is_positive(l) ? kA : inverse_letter(kA));
      push_power(out, kB, -2 * p);
    }
  }
  return out;
}

}  // namespace

std::optional<Word> lift_pair(const Word& g0, const Word& g1,
                              bool swap_part) {
  if (swap_part) {
    Word g1a = g1;
    g1a.push(inverse_letter(kA));
    auto base = lift_pair(g0, g1a, false);
    if (!base) return std::nullopt;
    base->push(kB);
    return base;
  }
  int k = g0.exponent_sum(0);
  if (g1.exponent_sum(0) != k) return std::nullopt;
  Word ak_inv;
  push_power(ak_inv, kA, -k);
  Word u = ak_inv * g0;
  Word v = ak_inv * g1;
  Word out;
  push_power(out, kB, 2 * k);
  out.append(lift_left(u));
  out.append(lift_right(v));
  return out;
}

std::vector<Word> nu_ball(NuContext& ctx, int n) {
  if (!ctx.def().same_table(AutomatonGroupDef::basilica()))
    throw std::invalid_argument("nu_ball supports the Basilica preset only");

  // Elements with nu <= n are exactly those assembled from a binary subtree
  // with E edges, internal root swaps, and leaf words of total length
  // n - E. Work with minimal witness cost per element and close under the
  // pairing step; every pairing raises cost by 1 so at most n rounds.
  ElementIndex index(ctx.def());
  std::unordered_map<int, int> cost;       // element id -> min witness cost
  std::vector<std::pair<int, Word>> reps;  // id -> canonical word

  auto add = [&](const Word& w, int c) -> bool {
    int id = index.intern(w);
    auto it = cost.find(id);
    if (it != cost.end() && it->second <= c) return false;
    if (it == cost.end()) {
      cost.emplace(id, c);
      reps.emplace_back(id, index.representative(id));
    } else {
      it->second = c;
    }
    return true;
  };

  // Leaf case: free words, cost = length.
  std::vector<Word> frontier{Word{}};
  add(Word{}, 0);
  for (int len = 1; len <= n; ++len) {
    std::vector<Word> next;
    for (const Word& w : frontier) {
      for (int g = 0; g < 2; ++g) {
        for (bool pos : {true, false}) {
          Word x = w;
          Letter l = make_letter(g, pos);
          if (!w.empty() && w.letters().back() == inverse_letter(l)) continue;
          x.push(l);
          add(x, len);
          next.push_back(std::move(x));
        }
      }
    }
    frontier = std::move(next);
  }

  bool grew = true;
  while (grew) {
    grew = false;
    auto snapshot = reps;  // iterate over a stable copy
    for (const auto& [id0, w0] : snapshot) {
      int c0 = cost.at(id0);
      for (const auto& [id1, w1] : snapshot) {
        int c1 = cost.at(id1);
        if (c0 + c1 + 1 > n) continue;
        for (bool eps : {false, true}) {
          auto lifted = lift_pair(w0, w1, eps);
          if (!lifted) continue;
          if (add(*lifted, c0 + c1 + 1)) grew = true;
        }
      }
    }
  }

  std::vector<Word> out;
  out.reserve(reps.size());
  for (const auto& [id, w] : reps) out.push_back(w);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace basilica
