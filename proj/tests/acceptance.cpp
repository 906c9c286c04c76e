// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <cstdio>

#include "spinpointer/verify.hpp"

int main() {
    const auto results = spinpointer::run_verification(4);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %s: %s — %s\n", r.pass ? "PASS" : "FAIL",
                    r.id.c_str(), r.name.c_str(), r.detail.c_str());
        all = all && r.pass;
    }
    std::printf("%s\n", all ? "acceptance: all criteria passed"
                            : "acceptance: FAILURES present");
    return all ? 0 : 1;
}
