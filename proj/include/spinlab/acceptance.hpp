#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spinlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the acceptance criteria in `suite` ("all" or one criterion name)
/// and prints one pass/fail line per criterion to `out`. `inject_fault`
/// deliberately perturbs the named criterion's expectation, for testing the
/// harness itself. Throws DomainError for an unknown suite name.
std::vector<CriterionResult> run_acceptance(const std::string& suite,
                                            const std::string& inject_fault, std::ostream& out);

std::vector<std::string> acceptance_suite_names();

}  // namespace spinlab
