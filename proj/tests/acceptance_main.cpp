#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>

#include "spectra/acceptance.hpp"

int main(int argc, char** argv) {
  spectra::acceptance::SuiteOptions opts;
  if (const char* jobs = std::getenv("SPECTRA_JOBS")) opts.jobs = std::max(1, std::atoi(jobs));
  for (int i = 1; i < argc; ++i) opts.only.push_back(std::stoi(argv[i]));
  const auto results = spectra::acceptance::run_suite(opts, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (results.size() - failed) << " of " << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
