#include <cstdio>

#include "lz/verify.hpp"

int main() {
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    int failures = 0;
    for (int id : lz::all_criteria()) {
        lz::CriterionResult r = lz::run_criterion(id);
        std::printf("%s\n", lz::summary_line(r).c_str());
        if (!r.pass) ++failures;
    }
    std::printf("%d of %zu criteria failed\n", failures, lz::all_criteria().size());
    return failures == 0 ? 0 : 1;
}
