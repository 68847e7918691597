#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyson/verification.hpp"

namespace dyson {

/// One (configuration, functional, horizon) verification case.
struct TheoremCase {
  std::string name;
  std::vector<double> xi_points;
  FunctionalSpec F;
  double T;
};

/// The shipped 12-case suite for the weighted-CBM identity.
std::vector<TheoremCase> shipped_theorem1_suite();

struct SuiteResult {
  std::string suite;
  std::vector<NamedReport> reports;
  bool pass = false;
  std::string json;  // serialized report collection (worker-count free)
};

struct SuiteParams {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 0xD75054;
  int workers = 0;
  std::string build_id = "dev";
};

// Each runner applies the single fresh-seed retry policy: a case that fails
// its 3-sigma comparison is rerun once with seed+1 before being reported.
SuiteResult run_theorem1_suite(const SuiteParams& params);
SuiteResult run_martingale_suite(const SuiteParams& params);
SuiteResult run_corollary2_suite(const SuiteParams& params);
SuiteResult run_moment_suite(const SuiteParams& params);
SuiteResult run_collision_suite(const SuiteParams& params);

}  // namespace dyson
