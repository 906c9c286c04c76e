#pragma once

#include <string>
#include <vector>

namespace spinpointer {

struct CheckResult {
    std::string id;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Full verification battery over the reference setup (632.8 nm, sigma 27 um,
/// n 1.515, incidence 30 deg). Shared by `spinpointer verify` and the
/// acceptance test binary.
std::vector<CheckResult> run_verification(unsigned threads = 4);

}  // namespace spinpointer
