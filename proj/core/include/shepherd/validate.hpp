#pragma once

#include <iosfwd>

namespace shepherd {

/// Runs the module invariant suites, printing `PASS name` / `FAIL name: why`
/// per check. Returns the number of failed checks.
int run_validation(std::ostream& out);

}  // namespace shepherd
