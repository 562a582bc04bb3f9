#include "toricgh/acceptance.hpp"

#include <iostream>

int main() {
    bool all = true;
    toricgh::run_acceptance({}, [&](const toricgh::CriterionResult& r) {
        std::cout << toricgh::format_result(r) << "  (" << r.seconds << " s)" << std::endl;
        all = all && r.passed;
    });
    return all ? 0 : 1;
}
