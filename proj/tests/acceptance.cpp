#include <cstdio>
#include <cstdlib>

#include "gk/acceptance.hpp"

int main(int argc, char** argv) {
  gk::SuiteOptions o;
  if (const char* s = std::getenv("GK_SEED")) o.seed = std::strtoull(s, nullptr, 10);
  for (int i = 1; i < argc; ++i) o.filter.emplace_back(argv[i]);
  bool ok = true;
  gk::run_suite(o, [&](const gk::CriterionResult& r) {
    std::printf("%s\n", gk::format_result(r).c_str());
    std::fflush(stdout);
    ok = ok && r.pass;
  });
  return ok ? 0 : 1;
}
