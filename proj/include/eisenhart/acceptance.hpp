#pragma once

#include <iosfwd>

namespace eisenhart {

struct AcceptanceResult {
  int passed = 0;
  int failed = 0;
};

// Runs the full acceptance battery, one PASS/FAIL line per criterion.
// Every criterion is checked against a closed-form or independently
// integrated oracle; nothing here trusts the module under test alone.
AcceptanceResult run_acceptance(std::ostream& out);

}  // namespace eisenhart
