#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace k2lab::report {

using Json = nlohmann::ordered_json;

struct Check {
    std::string name;
    bool pass;
    double lhs;
    double rhs;
    double tolerance;
};

// ---------------------------------------------------------------------------
// ExperimentReport: structured results of one command or suite. Rows are
// expected pre-sorted by their primary key; emission preserves order, so a
// fixed seed gives byte-identical output.
// ---------------------------------------------------------------------------
struct ExperimentReport {
    std::string command;
    Json params = Json::object();
    std::vector<Json> rows;
    std::vector<Check> checks;
    Json fitted_constants = Json::object();
    long long runtime_ms = 0;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    void check(const std::string& name, bool pass, double lhs, double rhs, double tolerance) {
        checks.push_back({name, pass, lhs, rhs, tolerance});
    }
    void check_close(const std::string& name, double lhs, double rhs, double tolerance) {
        checks.push_back({name, std::abs(lhs - rhs) <= tolerance, lhs, rhs, tolerance});
    }
    void check_le(const std::string& name, double lhs, double rhs) {
        checks.push_back({name, lhs <= rhs, lhs, rhs, 0.0});
    }

    std::string to_json(bool with_runtime = true) const;
    std::string to_csv() const;  // flattened rows, RFC 4180 quoting
};

/// Stopwatch helper for runtime_ms.
long long now_ms();

}  // namespace k2lab::report
