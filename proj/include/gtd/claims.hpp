#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gtd {

struct ClaimResult {
  std::string id;
  bool pass = false;
  std::map<std::string, double> witnesses;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  long long millis = 0;
};

struct ClaimSpec {
  std::string id;
  std::string title;
  std::function<ClaimResult(std::uint64_t seed)> run;
};

// Registry of every verifiable claim, in a fixed order. Identifiers are
// stable and addressable from the CLI.
const std::vector<ClaimSpec>& all_claims();
const ClaimSpec* find_claim(const std::string& id);

// Runs one claim, filling id, timing and seed.
ClaimResult run_claim(const ClaimSpec& spec, std::uint64_t seed);

}  // namespace gtd
