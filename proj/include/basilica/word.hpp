#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace basilica {

// Signed generator letter: +(i+1) is generator i, -(i+1) its inverse, 0 is
// reserved for "identity section" in automaton tables and never appears
// inside a Word.
using Letter = std::int8_t;

inline int gen_index(Letter l) { return std::abs(static_cast<int>(l)) - 1; }
inline bool is_positive(Letter l) { return l > 0; }
inline Letter inverse_letter(Letter l) { return static_cast<Letter>(-l); }
inline Letter make_letter(int gen, bool positive) {
  return static_cast<Letter>(positive ? gen + 1 : -(gen + 1));
}

// Freely reduced word over signed generators. The reduction invariant is
// maintained on every mutation; the empty word is the identity.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> reduced) : ls_(std::move(reduced)) {}

  static Word reduce(std::span<const Letter> raw) {
    Word w;
    w.ls_.reserve(raw.size());
    for (Letter l : raw) w.push(l);
    return w;
  }

  // Append with free cancellation at the joint.
  void push(Letter l) {
    if (!ls_.empty() && ls_.back() == inverse_letter(l)) {
      ls_.pop_back();
    } else {
      ls_.push_back(l);
    }
  }

  void append(const Word& other) {
    for (Letter l : other.ls_) push(l);
  }

  Word inverse() const {
    Word w;
    w.ls_.reserve(ls_.size());
    for (auto it = ls_.rbegin(); it != ls_.rend(); ++it)
      w.ls_.push_back(inverse_letter(*it));
    return w;
  }

  bool empty() const { return ls_.empty(); }
  std::size_t size() const { return ls_.size(); }
  Letter operator[](std::size_t i) const { return ls_[i]; }
  const std::vector<Letter>& letters() const { return ls_; }

  bool operator==(const Word& o) const { return ls_ == o.ls_; }
  bool operator!=(const Word& o) const { return !(*this == o); }
  bool operator<(const Word& o) const {
    if (ls_.size() != o.ls_.size()) return ls_.size() < o.ls_.size();
    return ls_ < o.ls_;
  }

  // Net exponent of one generator; invariant under relations whose letters
  // cancel in the abelianization.
  int exponent_sum(int gen) const {
    int s = 0;
    for (Letter l : ls_)
      if (gen_index(l) == gen) s += is_positive(l) ? 1 : -1;
    return s;
  }

 private:
  std::vector<Letter> ls_;
};

inline Word operator*(const Word& a, const Word& b) {
  Word w = a;
  w.append(b);
  return w;
}

inline Word word_of(std::initializer_list<Letter> raw) {
  return Word::reduce(std::span<const Letter>(raw.begin(), raw.size()));
}

// Commutator [x,y] = x^-1 y^-1 x y.
inline Word commutator(const Word& x, const Word& y) {
  return x.inverse() * y.inverse() * x * y;
}

inline Word conjugate(const Word& x, const Word& y) {  // x^y = y^-1 x y
  return y.inverse() * x * y;
}

struct WordHash {
  std::size_t operator()(const Word& w) const {
    // FNV-1a over the letter bytes.
    std::uint64_t h = 1469598103934665603ull;
    for (Letter l : w.letters()) {
      h ^= static_cast<std::uint8_t>(l);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace basilica
