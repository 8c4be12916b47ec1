#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace polyvem::acceptance {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// The verification checks behind `polyvem verify-paper` and the acceptance
/// test suite: closed forms, projection algebra, patch tests, duality,
/// aspect-ratio behavior of the stabilization/load variants, 3D linear
/// exactness on corner-point grids, 2D convergence, Kelvin algebra and the
/// GRDECL parser fixtures.
std::vector<CheckResult> run_all(int threads = 1);

/// Runs everything, prints one pass/fail line per check, returns the number
/// of failures.
int run_and_report(std::ostream& os, int threads = 1);

} // namespace polyvem::acceptance
