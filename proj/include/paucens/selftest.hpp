#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace paucens::selftest {

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    std::vector<std::string> messages;  // first few failure details

    bool passed() const { return failures == 0; }
};

/// Random small instances checked against a direct pair-counting oracle;
/// exact equality required. Instances include score ties on purpose.
SuiteResult run_metric_oracle(std::uint64_t seed);

/// Optimized most-violated-constraint search vs exhaustive enumeration.
SuiteResult run_constraint_oracle(std::uint64_t seed);

/// Integral-image patch covariance vs a naive two-pass computation.
SuiteResult run_covariance_oracle(std::uint64_t seed);

/// Training-loop invariants on toy data: monotone objective, coefficient
/// reconstruction from the duals, and termination soundness probes.
SuiteResult run_convergence_invariants(std::uint64_t seed);

std::vector<SuiteResult> run_all(std::uint64_t seed);

}  // namespace paucens::selftest
