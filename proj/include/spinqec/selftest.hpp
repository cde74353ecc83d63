#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace spinqec {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SelftestOptions {
  std::uint64_t seed = 0xC0FFEE;
  std::string out_dir = "out";
  int threads = 1;
};

/// Runs the full acceptance suite, printing one pass/fail line per criterion
/// to `progress` as results land. Returns every result.
std::vector<CriterionResult> run_acceptance(const SelftestOptions& opts,
                                            std::ostream* progress = nullptr);

}  // namespace spinqec
