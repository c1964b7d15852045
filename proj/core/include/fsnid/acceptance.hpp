#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fsnid {

struct CheckResult {
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    bool passed = false;
    double seconds = 0.0;
};

// Known suite names, in execution order for "all".
std::vector<std::string> acceptance_suites();

// Writes a synthetic CSV in the 41-feature NSL-KDD layout: standard column
// names, numeric encodings, classes normal/dos/probe/r2l with class-dependent
// signal in a handful of columns and noise elsewhere.
void write_nslkdd_sample(const std::string& path, size_t rows, uint64_t seed);

// Runs one named suite; every check's tolerances are fixed in code.
// `progress` receives one line per finished check when non-null.
SuiteResult run_acceptance(const std::string& suite,
                           const std::function<void(const CheckResult&)>& progress = nullptr);

std::string suite_result_to_json(const SuiteResult& result, int indent = 2);

}  // namespace fsnid
