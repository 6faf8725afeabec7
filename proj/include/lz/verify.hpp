#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lz {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double time_limit = 0.0;  // 0 when unbounded
    std::vector<std::pair<std::string, double>> metrics;
    std::string note;
};

std::vector<int> all_criteria();
std::string criterion_name(int id);
// Runs one acceptance criterion; exceptions are caught and reported as failures.
CriterionResult run_criterion(int id);
// "PASS  3 torus-robin-cross-route  gap=1.2e-11  (4.1 s)"
std::string summary_line(const CriterionResult& r);

}  // namespace lz
