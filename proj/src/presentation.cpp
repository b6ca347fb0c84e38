#include "basilica/presentation.hpp"

#include <chrono>

#include <json.hpp>

#include "basilica/element_index.hpp"

namespace basilica {

namespace {

constexpr Letter kA = 1, kB = 2;

Word power(Letter l, int n) {
  Word w;
  for (int i = 0; i < n; ++i) w.push(l);
  return w;
}

}  // namespace

Word sigma_sub(const Word& w) {
  Word out;
  for (Letter l : w.letters()) {
    if (gen_index(l) == 0) {
      Letter img = is_positive(l) ? kB : inverse_letter(kB);
      out.push(img);
      out.push(img);
    } else {
      out.push(is_positive(l) ? kA : inverse_letter(kA));
    }
  }
  return out;
}

Word relator(int n) {
  Word w = commutator(power(kA, 1), conjugate(power(kA, 1), power(kB, 1)));
  for (int i = 0; i < n; ++i) w = sigma_sub(w);
  return w;
}

namespace {

RelationCheck check_word(int n, const Word& w, const AutomatonGroupDef& def,
                         TrivialityCache& cache) {
  RelationCheck c;
  c.n = n;
  c.free_length = w.size();
  auto start = std::chrono::steady_clock::now();
  c.trivial = is_trivial(w, def, &cache);
  c.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - start)
                 .count();
  return c;
}

}  // namespace

RelationReport verify_relations(int N) {
  AutomatonGroupDef def = AutomatonGroupDef::basilica();
  TrivialityCache cache;
  RelationReport report;
  report.all_pass = true;
  for (int n = 0; n <= N; ++n) {
    report.relators.push_back(check_word(n, relator(n), def, cache));
    if (!report.relators.back().trivial) report.all_pass = false;
  }
  for (int m = 0; m <= 2; ++m) {
    Word w = commutator(power(kA, 1),
                        conjugate(power(kA, 1), power(kB, 2 * m + 1)));
    report.eliminated.push_back(check_word(m, w, def, cache));
    if (!report.eliminated.back().trivial) report.all_pass = false;
  }
  return report;
}

std::string RelationReport::to_json() const {
  nlohmann::ordered_json j;
  auto dump = [](const std::vector<RelationCheck>& checks) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : checks)
      arr.push_back({{"n", c.n},
                     {"free_length", c.free_length},
                     {"trivial", c.trivial},
                     {"millis", c.millis}});
    return arr;
  };
  j["relators"] = dump(relators);
  j["eliminated"] = dump(eliminated);
  j["all_pass"] = all_pass;
  return j.dump(2);
}

}  // namespace basilica
