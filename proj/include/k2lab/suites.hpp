#pragma once

#include <string>
#include <vector>

#include "k2lab/report.hpp"

namespace k2lab::suites {

struct SuiteOptions {
    std::uint64_t seed = 0;
    int threads = 1;
    double budget = 1.0;  // 1.0 = acceptance scale; smaller shrinks the sweeps
};

/// Named verification suites; throws UnknownSuite for anything else.
report::ExperimentReport run_suite(const std::string& name, const SuiteOptions& opt = {});
const std::vector<std::string>& suite_names();

report::ExperimentReport suite_explicit(const SuiteOptions& opt);   // criterion 1
report::ExperimentReport suite_crt(const SuiteOptions& opt);        // criterion 2
report::ExperimentReport suite_weil(const SuiteOptions& opt);       // criterion 3
report::ExperimentReport suite_parseval(const SuiteOptions& opt);   // criterion 4
report::ExperimentReport suite_corr_prime(const SuiteOptions& opt); // criterion 5
report::ExperimentReport suite_corr_pp(const SuiteOptions& opt);    // criteria 6-7
report::ExperimentReport suite_combo(const SuiteOptions& opt);      // criterion 8
report::ExperimentReport suite_vdc(const SuiteOptions& opt);        // criteria 9-10
report::ExperimentReport suite_sqfree(const SuiteOptions& opt);     // criterion 11
report::ExperimentReport suite_density(const SuiteOptions& opt);    // criterion 12

}  // namespace k2lab::suites
