#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qest {

struct CheckResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct VerifyOptions {
    std::string suite_filter;  // substring match on check names, empty = all
    bool inject_fault = false;  // corrupt one tolerance; must make verification fail
};

std::vector<CheckResult> run_verification(const VerifyOptions& opt);

}  // namespace qest
