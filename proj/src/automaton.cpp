#include "basilica/automaton.hpp"

#include <algorithm>
#include <sstream>

namespace basilica {

Permutation::Permutation(std::vector<std::uint8_t> images)
    : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (auto i : images_) {
    if (i >= images_.size() || seen[i])
      throw std::invalid_argument("permutation images must be a bijection");
    seen[i] = true;
  }
}

Permutation Permutation::identity(int d) {
  std::vector<std::uint8_t> im(d);
  for (int i = 0; i < d; ++i) im[i] = static_cast<std::uint8_t>(i);
  return Permutation(std::move(im));
}

bool Permutation::is_identity() const {
  for (int i = 0; i < degree(); ++i)
    if (images_[i] != i) return false;
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<std::uint8_t> im(images_.size());
  for (int i = 0; i < degree(); ++i)
    im[images_[i]] = static_cast<std::uint8_t>(i);
  return Permutation(std::move(im));
}

Permutation Permutation::then(const Permutation& q) const {
  std::vector<std::uint8_t> im(images_.size());
  for (int i = 0; i < degree(); ++i)
    im[i] = static_cast<std::uint8_t>(q(images_[i]));
  return Permutation(std::move(im));
}

AutomatonGroupDef::AutomatonGroupDef(int arity, std::vector<std::string> names,
                                     std::vector<Permutation> perms,
                                     std::vector<std::vector<Letter>> sections)
    : arity_(arity),
      names_(std::move(names)),
      perms_(std::move(perms)),
      sections_(std::move(sections)) {
  if (arity_ < 2) throw std::invalid_argument("arity must be >= 2");
  if (names_.size() != perms_.size() || names_.size() != sections_.size())
    throw std::invalid_argument("generator table size mismatch");
  for (std::size_t g = 0; g < names_.size(); ++g) {
    if (perms_[g].degree() != arity_)
      throw std::invalid_argument("permutation degree != arity for generator " +
                                  names_[g]);
    if (sections_[g].size() != static_cast<std::size_t>(arity_))
      throw std::invalid_argument("section count != arity for generator " +
                                  names_[g]);
    for (Letter s : sections_[g]) {
      if (s != 0 && gen_index(s) >= static_cast<int>(names_.size()))
        throw std::invalid_argument("section references unknown generator");
    }
    inv_perms_.push_back(perms_[g].inverse());
  }
}

std::optional<int> AutomatonGroupDef::generator_named(
    const std::string& name) const {
  for (std::size_t g = 0; g < names_.size(); ++g)
    if (names_[g] == name) return static_cast<int>(g);
  return std::nullopt;
}

bool AutomatonGroupDef::same_table(const AutomatonGroupDef& o) const {
  if (arity_ != o.arity_ || names_.size() != o.names_.size()) return false;
  for (std::size_t g = 0; g < names_.size(); ++g) {
    if (!(perms_[g] == o.perms_[g]) || sections_[g] != o.sections_[g])
      return false;
  }
  return true;
}

AutomatonGroupDef AutomatonGroupDef::basilica() {
  Permutation id = Permutation::identity(2);
  Permutation swap(std::vector<std::uint8_t>{1, 0});
  return AutomatonGroupDef(
      2, {"a", "b"}, {id, swap},
      {{Letter{0}, make_letter(1, true)}, {Letter{0}, make_letter(0, true)}});
}

AutomatonGroupDef AutomatonGroupDef::odometer() { return k_example(1); }

AutomatonGroupDef AutomatonGroupDef::k_example(int k) {
  if (k < 1) throw std::invalid_argument("k_example requires k >= 1");
  Permutation id = Permutation::identity(2);
  Permutation swap(std::vector<std::uint8_t>{1, 0});
  std::vector<std::string> names;
  std::vector<Permutation> perms;
  std::vector<std::vector<Letter>> secs;
  for (int i = 0; i < k; ++i) {
    names.push_back("a" + std::to_string(i + 1));
    bool last = (i == k - 1);
    perms.push_back(last ? swap : id);
    int target = last ? 0 : i + 1;
    secs.push_back({Letter{0}, make_letter(target, true)});
  }
  return AutomatonGroupDef(2, std::move(names), std::move(perms),
                           std::move(secs));
}

AutomatonGroupDef AutomatonGroupDef::preset(const std::string& name) {
  if (name == "basilica") return basilica();
  if (name == "odometer") return odometer();
  throw std::invalid_argument("unknown preset: " + name);
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

std::string extract_bracketed(const std::string& line, const std::string& key) {
  auto k = line.find(key + "=[");
  if (k == std::string::npos)
    throw std::invalid_argument("missing '" + key + "=[...]' in: " + line);
  auto open = line.find('[', k);
  auto close = line.find(']', open);
  if (close == std::string::npos)
    throw std::invalid_argument("unterminated list in: " + line);
  return line.substr(open + 1, close - open - 1);
}

}  // namespace

AutomatonGroupDef AutomatonGroupDef::parse(const std::string& text) {
  std::vector<std::string> names;
  std::vector<std::string> perm_lists, section_lists;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("expected 'name: ...' in: " + line);
    names.push_back(trim(line.substr(0, colon)));
    perm_lists.push_back(extract_bracketed(line, "perm"));
    section_lists.push_back(extract_bracketed(line, "sections"));
  }
  if (names.empty()) throw std::invalid_argument("empty group definition");

  auto find_gen = [&](const std::string& n) -> int {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == n) return static_cast<int>(i);
    throw std::invalid_argument("section references unknown generator: " + n);
  };

  int arity = -1;
  std::vector<Permutation> perms;
  std::vector<std::vector<Letter>> secs;
  for (std::size_t g = 0; g < names.size(); ++g) {
    std::vector<std::uint8_t> images;
    for (const auto& tok : split_list(perm_lists[g]))
      images.push_back(static_cast<std::uint8_t>(std::stoi(tok)));
    if (arity < 0) arity = static_cast<int>(images.size());
    perms.emplace_back(std::move(images));

    std::vector<Letter> row;
    for (const auto& tok : split_list(section_lists[g])) {
      if (tok == "1") {
        row.push_back(0);
      } else if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
        row.push_back(make_letter(find_gen(tok.substr(0, tok.size() - 3)),
                                  false));
      } else {
        row.push_back(make_letter(find_gen(tok), true));
      }
    }
    secs.push_back(std::move(row));
  }
  return AutomatonGroupDef(arity, std::move(names), std::move(perms),
                           std::move(secs));
}

std::string AutomatonGroupDef::format() const {
  std::ostringstream out;
  for (int g = 0; g < num_generators(); ++g) {
    out << names_[g] << ": perm=[";
    for (int i = 0; i < arity_; ++i)
      out << (i ? "," : "") << perms_[g](i);
    out << "]; sections=[";
    for (int i = 0; i < arity_; ++i) {
      out << (i ? "," : "");
      Letter s = sections_[g][i];
      if (s == 0)
        out << "1";
      else
        out << names_[gen_index(s)] << (is_positive(s) ? "" : "^-1");
    }
    out << "]\n";
  }
  return out.str();
}

std::string AutomatonGroupDef::format_word(const Word& w) const {
  if (w.empty()) return "1";
  std::string out;
  for (Letter l : w.letters()) {
    if (!out.empty()) out += ' ';
    out += names_[gen_index(l)];
    if (!is_positive(l)) out += "^-1";
  }
  return out;
}

Word AutomatonGroupDef::parse_word(const std::string& text) const {
  Word w;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == "1") continue;
    bool positive = true;
    if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
      positive = false;
      tok = tok.substr(0, tok.size() - 3);
    }
    auto g = generator_named(tok);
    if (!g) throw std::invalid_argument("unknown generator: " + tok);
    w.push(make_letter(*g, positive));
  }
  return w;
}

WreathDecomp decompose(const Word& w, const AutomatonGroupDef& def) {
  int d = def.arity();
  WreathDecomp out;
  out.sections.resize(d);
  out.perm = Permutation::identity(d);
  for (Letter l : w.letters()) {
    // (w*l)[i] = w[i] * l[pi_w(i)], pi_{w*l} = pi_w then pi_l.
    for (int i = 0; i < d; ++i) {
      Letter s = def.letter_section(l, out.perm(i));
      if (s != 0) out.sections[i].push(s);
    }
    out.perm = out.perm.then(def.letter_perm(l));
  }
  return out;
}

Permutation root_perm(const Word& w, const AutomatonGroupDef& def) {
  Permutation p = Permutation::identity(def.arity());
  for (Letter l : w.letters()) p = p.then(def.letter_perm(l));
  return p;
}

std::vector<Word> sections(const Word& w, const AutomatonGroupDef& def) {
  return decompose(w, def).sections;
}

Vertex act(const Word& w, const Vertex& v, const AutomatonGroupDef& def) {
  if (v.size() > kDefaultDepthCap)
    throw std::invalid_argument("vertex exceeds depth cap");
  Vertex out = v;
  for (Letter l : w.letters()) {
    // Apply one letter down the path; sections of generators are single
    // symbols, so this is a walk carrying a current symbol.
    Letter cur = l;
    for (std::size_t k = 0; k < out.size() && cur != 0; ++k) {
      int child = out[k];
      Letter next = def.letter_section(cur, child);
      out[k] = static_cast<std::uint8_t>(def.letter_perm(cur)(child));
      cur = next;
    }
  }
  return out;
}

Word section_at(const Word& w, const Vertex& v, const AutomatonGroupDef& def) {
  Word cur = w;
  for (std::uint8_t child : v) cur = decompose(cur, def).sections[child];
  return cur;
}

}  // namespace basilica
