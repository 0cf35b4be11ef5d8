#pragma once

// Invariant suite behind `homeo verify`: sampled property checks over every
// module, reported as count / max violation / tolerance per check.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace homeo {

struct CheckResult {
  std::string module;
  std::string name;
  std::size_t count = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  const CheckResult* find(const std::string& name) const;
};

VerifyReport run_verify(std::uint64_t seed);

void write_report(std::ostream& out, const VerifyReport& report);

}  // namespace homeo
