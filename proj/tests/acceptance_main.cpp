// Acceptance gate: one line per criterion, exit 0 iff all pass.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "basilica/acceptance.hpp"

int main(int argc, char** argv) {
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) {
      workers = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::string list = argv[++i];
      for (std::size_t pos = 0; pos < list.size();) {
        std::size_t comma = list.find(',', pos);
        if (comma == std::string::npos) comma = list.size();
        ids.push_back(std::atoi(list.substr(pos, comma - pos).c_str()));
        pos = comma + 1;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--workers N] [--only 1,2,...]\n",
                   argv[0]);
      return 1;
    }
  }

  auto results = basilica::run_acceptance(workers, ids);
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("[%s] criterion %d: %s (%lld ms)%s%s\n",
                r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                static_cast<long long>(r.millis), r.detail.empty() ? "" : " - ",
                r.detail.c_str());
    all_pass &= r.pass;
  }
  std::printf("%s: %zu criteria\n", all_pass ? "ALL PASS" : "FAILURES",
              results.size());
  return all_pass ? 0 : 1;
}
