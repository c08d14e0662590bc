#pragma once
// Self-contained verification suites: independent brute-force oracles and
// closed forms cross-check the fast implementations.  Used by the CLI
// `verify` subcommand and by the test harness.

#include <string>
#include <vector>

namespace twistrad {

struct VerifyOptions {
    // Reduced grids, completes in a few seconds.
    bool quick = false;
    // Test-harness hook: scales the implementation-side C_adag coefficient
    // inside the p-weight cross-check (1.0 = faithful).  An injected
    // deviation, e.g. a sign flip, must make the suite fail; this proves the
    // suite is sensitive to that class of defect.
    double cadag_factor = 1.0;
};

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double max_error = 0.0;
    double tolerance = 0.0;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const;
};

VerifyReport run_verification(const VerifyOptions& options = {});

// Frozen (theta, b0) closure grid for the quadrature-vs-closed-form check at
// L = 30: every point keeps |sin X| > 0.17 for every grid b0, so strict
// relative comparison is well conditioned (no interference nodes).
const std::vector<double>& closure_thetas(); // 20 values
const std::vector<double>& closure_b0s();    // 5 values

} // namespace twistrad
