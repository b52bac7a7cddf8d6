#pragma once

// Invariant suites behind `fracquench verify`: each check returns a
// pass/fail with the worst margin (allowed minus observed; positive
// means pass with room to spare).

#include "fracquench/quench.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fq {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::string detail;
};

struct VerifyOptions {
    // Gamma used for the analytic reference values in the bound checks;
    // injectable so the harness itself can be fault-tested.
    std::function<double(double)> gamma;
    unsigned seed = 12345;
    bool quick = false; // reduced sample counts for smoke runs
};

/// suite is one of "special_fn", "operators", "solver", "quench_analysis".
std::vector<CheckResult> verify_suite(const std::string& suite,
                                      const VerifyOptions& options = {});

std::vector<CheckResult> verify_all(const VerifyOptions& options = {});

bool all_pass(const std::vector<CheckResult>& results);

/// Fixed-width table: suite, check, status, margin.
std::string format_check_table(const std::vector<CheckResult>& results);

} // namespace fq
