#include "basilica/element_index.hpp"

#include <deque>
#include <unordered_set>

namespace basilica {

std::optional<bool> TrivialityCache::lookup(const Word& w) {
  auto it = map_.find(w);
  if (it == map_.end()) return std::nullopt;
  order_.splice(order_.begin(), order_, it->second.second);
  return it->second.first;
}

void TrivialityCache::store(const Word& w, bool value) {
  auto it = map_.find(w);
  if (it != map_.end()) {
    it->second.first = value;
    order_.splice(order_.begin(), order_, it->second.second);
    return;
  }
  if (map_.size() >= capacity_) {
    map_.erase(order_.back());
    order_.pop_back();
  }
  order_.push_front(w);
  map_.emplace(w, std::make_pair(value, order_.begin()));
}

bool is_trivial(const Word& w, const AutomatonGroupDef& def,
                TrivialityCache* cache) {
  if (w.empty()) return true;
  if (cache) {
    if (auto hit = cache->lookup(w)) return *hit;
  }
  std::unordered_set<Word, WordHash> seen;
  std::deque<Word> queue;
  seen.insert(w);
  queue.push_back(w);
  bool trivial = true;
  while (!queue.empty()) {
    Word u = std::move(queue.front());
    queue.pop_front();
    WreathDecomp d = decompose(u, def);
    if (!d.perm.is_identity()) {
      trivial = false;
      if (cache) cache->store(u, false);
      break;
    }
    for (Word& s : d.sections) {
      if (s.empty()) continue;
      if (cache) {
        if (auto hit = cache->lookup(s)) {
          if (!*hit) {
            trivial = false;
            break;
          }
          continue;
        }
      }
      if (seen.insert(s).second) queue.push_back(std::move(s));
    }
    if (!trivial) break;
  }
  if (cache) {
    if (trivial) {
      // Every reachable word acts trivially on all levels.
      for (const Word& u : seen) cache->store(u, true);
    } else {
      cache->store(w, false);
    }
  }
  return trivial;
}

bool equal(const Word& g, const Word& h, const AutomatonGroupDef& def,
           TrivialityCache* cache) {
  return is_trivial(g * h.inverse(), def, cache);
}

ElementIndex::ElementIndex(const AutomatonGroupDef& def, int sig_depth)
    : def_(def), sig_depth_(sig_depth), sig_memo_(sig_depth + 1) {}

namespace {
inline std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdull;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ull;
  x ^= x >> 33;
  return x;
}
}  // namespace

std::uint64_t ElementIndex::signature_rec(const Word& w, int depth) {
  if (depth == 0) return 0x9e3779b97f4a7c15ull;
  auto& memo = sig_memo_[depth];
  if (auto it = memo.find(w); it != memo.end()) return it->second;
  WreathDecomp d = decompose(w, def_);
  std::uint64_t h = 0xabcdef0123456789ull;
  for (int i = 0; i < def_.arity(); ++i)
    h = mix(h ^ static_cast<std::uint64_t>(d.perm(i)));
  for (int i = 0; i < def_.arity(); ++i)
    h = mix(h ^ signature_rec(d.sections[i], depth - 1));
  memo.emplace(w, h);
  return h;
}

std::uint64_t ElementIndex::signature(const Word& w) {
  return signature_rec(w, sig_depth_);
}

int ElementIndex::intern(const Word& w) {
  if (auto it = word_to_id_.find(w); it != word_to_id_.end())
    return it->second;
  std::uint64_t sig = signature(w);
  auto& bucket = buckets_[sig];
  for (int id : bucket) {
    if (equal(w, reps_[id], def_, &cache_)) {
      word_to_id_.emplace(w, id);
      return id;
    }
  }
  int id = static_cast<int>(reps_.size());
  reps_.push_back(w);
  bucket.push_back(id);
  word_to_id_.emplace(w, id);
  return id;
}

BallEnumerator::BallEnumerator(const AutomatonGroupDef& def,
                               std::size_t node_budget)
    : index_(def), node_budget_(node_budget) {
  int id = index_.intern(Word{});
  norm_by_id_.assign(1, 0);
  (void)id;
  spheres_.push_back({0});
  radius_done_ = 0;
}

bool BallEnumerator::extend_to(int radius) {
  while (radius_done_ < radius) {
    if (budget_exhausted_) return false;
    const auto& frontier = spheres_[radius_done_];
    std::vector<int> next;
    for (int id : frontier) {
      const Word rep = index_.representative(id);
      for (int g = 0; g < index_.def().num_generators(); ++g) {
        for (bool positive : {true, false}) {
          if (++nodes_used_ > node_budget_) {
            budget_exhausted_ = true;
            return false;
          }
          Word w = rep;
          w.push(make_letter(g, positive));
          int nid = index_.intern(w);
          if (nid >= static_cast<int>(norm_by_id_.size()))
            norm_by_id_.resize(nid + 1, -1);
          if (norm_by_id_[nid] < 0) {
            norm_by_id_[nid] = radius_done_ + 1;
            next.push_back(nid);
          }
        }
      }
    }
    spheres_.push_back(std::move(next));
    ++radius_done_;
  }
  return true;
}

std::vector<int> BallEnumerator::ball_ids(int r) const {
  std::vector<int> out;
  for (int k = 0; k <= r && k <= radius_done_; ++k)
    out.insert(out.end(), spheres_[k].begin(), spheres_[k].end());
  return out;
}

std::vector<Word> BallEnumerator::ball(int r) const {
  std::vector<Word> out;
  for (int id : ball_ids(r)) out.push_back(index_.representative(id));
  return out;
}

std::optional<int> BallEnumerator::norm_of_id(int id) const {
  if (id < static_cast<int>(norm_by_id_.size()) && norm_by_id_[id] >= 0)
    return norm_by_id_[id];
  return std::nullopt;
}

std::optional<int> BallEnumerator::word_norm(const Word& g, int radius_cap) {
  int id = index_.intern(g);
  while (true) {
    if (id < static_cast<int>(norm_by_id_.size()) && norm_by_id_[id] >= 0)
      return norm_by_id_[id];
    // The representative length bounds the norm, so never search past it.
    int limit = std::min<int>(radius_cap, static_cast<int>(g.size()));
    if (radius_done_ >= limit) return std::nullopt;
    if (!extend_to(radius_done_ + 1)) return std::nullopt;
  }
}

}  // namespace basilica
