#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "emden/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace emden::acceptance;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      ids.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (ids.empty()) {
    ids = criterion_ids();
  }
  bool ok = true;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id);
    std::cout << format_result(r) << std::endl;
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}
