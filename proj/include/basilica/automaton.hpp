#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "basilica/word.hpp"

namespace basilica {

// Permutation of {0..d-1}, stored as the image array.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::uint8_t> images);
  static Permutation identity(int d);

  int degree() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[i]; }
  bool is_identity() const;
  Permutation inverse() const;
  // Composition as right actions: (p * q)(i) = q(p(i)).
  Permutation then(const Permutation& q) const;

  bool operator==(const Permutation& o) const { return images_ == o.images_; }

 private:
  std::vector<std::uint8_t> images_;
};

// Vertex of the d-ary rooted tree: a path of child indices, root = empty.
using Vertex = std::vector<std::uint8_t>;

constexpr int kDefaultDepthCap = 64;

// Automaton group definition: each generator carries a root permutation and
// d sections, each a signed generator symbol or identity (Letter 0).
//
// The composition convention is the right action v^{gh} = (v^g)^h with
// section law (gh)[v] = g[v] * h[v^g]; a generator g = (g_0,...,g_{d-1})pi
// sends i.v to pi(i).v^{g_i}.
class AutomatonGroupDef {
 public:
  AutomatonGroupDef(int arity, std::vector<std::string> names,
                    std::vector<Permutation> perms,
                    std::vector<std::vector<Letter>> sections);

  int arity() const { return arity_; }
  int num_generators() const { return static_cast<int>(names_.size()); }
  const std::string& name(int gen) const { return names_[gen]; }
  const Permutation& perm(int gen) const { return perms_[gen]; }
  // Section of generator `gen` at child j (0 = identity).
  Letter section(int gen, int j) const { return sections_[gen][j]; }

  std::optional<int> generator_named(const std::string& name) const;

  // Wreath data of a signed letter.
  const Permutation& letter_perm(Letter l) const {
    return is_positive(l) ? perms_[gen_index(l)] : inv_perms_[gen_index(l)];
  }
  // Section of a signed letter at child j: for g^-1 this is
  // (g[pi_g^-1(j)])^-1, derived mechanically from the convention.
  Letter letter_section(Letter l, int j) const {
    int g = gen_index(l);
    if (is_positive(l)) return sections_[g][j];
    Letter s = sections_[g][inv_perms_[g](j)];
    return s == 0 ? Letter{0} : inverse_letter(s);
  }

  bool same_table(const AutomatonGroupDef& o) const;

  // a = (1,b), b = (1,a)e on the binary tree.
  static AutomatonGroupDef basilica();
  // Single generator a = (1,a)e (binary odometer).
  static AutomatonGroupDef odometer();
  // a_i = (1,a_{i+1}) for i<k, a_k = (1,a_1)e; k = 2 is the Basilica
  // definition up to renaming.
  static AutomatonGroupDef k_example(int k);

  static AutomatonGroupDef preset(const std::string& name);

  // One generator per line: "name: perm=[...]; sections=[...]", identity
  // section written "1", inverse symbols written "name^-1".
  static AutomatonGroupDef parse(const std::string& text);
  std::string format() const;

  std::string format_word(const Word& w) const;
  Word parse_word(const std::string& text) const;

 private:
  int arity_;
  std::vector<std::string> names_;
  std::vector<Permutation> perms_;
  std::vector<Permutation> inv_perms_;
  std::vector<std::vector<Letter>> sections_;
};

// First-level wreath decomposition of a word.
struct WreathDecomp {
  std::vector<Word> sections;
  Permutation perm;
};

WreathDecomp decompose(const Word& w, const AutomatonGroupDef& def);
Permutation root_perm(const Word& w, const AutomatonGroupDef& def);
std::vector<Word> sections(const Word& w, const AutomatonGroupDef& def);

Vertex act(const Word& w, const Vertex& v, const AutomatonGroupDef& def);
Word section_at(const Word& w, const Vertex& v, const AutomatonGroupDef& def);

}  // namespace basilica
