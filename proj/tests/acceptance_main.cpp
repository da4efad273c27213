#include <cstdio>
#include <string>
#include <vector>

#include "gapspec/acceptance.hpp"
#include "gapspec/errors.hpp"

// Runs the named acceptance suites (all when none are given), one line each.
int main(int argc, char** argv) {
  using namespace gapspec;
  std::vector<std::string> names(argv + 1, argv + argc);
  if (names.empty()) names = acceptance::suite_names();
  bool ok = true;
  for (const auto& n : names) {
    try {
      auto o = acceptance::run(n);
      std::printf("%s\n", acceptance::format_line(o).c_str());
      std::fflush(stdout);
      ok = ok && o.pass;
    } catch (const ConfigError& e) {
      std::fprintf(stderr, "%s\n", e.what());
      return 2;
    }
  }
  return ok ? 0 : 1;
}
