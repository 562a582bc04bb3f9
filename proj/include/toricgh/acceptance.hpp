#pragma once

// The acceptance suite: eleven property checks with analytically derived targets, shared by the
// acceptance test binary and `toricgh reproduce`.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace toricgh {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 0;
    std::vector<int> only;  // empty: all criteria
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "[PASS] 3 title: detail" / "[FAIL] ...".
std::string format_result(const CriterionResult& r);

}  // namespace toricgh
