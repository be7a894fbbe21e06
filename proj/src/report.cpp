#include "k2lab/report.hpp"

#include <chrono>

namespace k2lab::report {

long long now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string ExperimentReport::to_json(bool with_runtime) const {
    Json doc;
    doc["schema"] = 1;
    doc["command"] = command;
    doc["params"] = params;
    doc["rows"] = Json::array();
    for (const auto& r : rows) doc["rows"].push_back(r);
    doc["checks"] = Json::array();
    for (const auto& c : checks) {
        Json jc;
        jc["name"] = c.name;
        jc["pass"] = c.pass;
        jc["lhs"] = c.lhs;
        jc["rhs"] = c.rhs;
        jc["tolerance"] = c.tolerance;
        doc["checks"].push_back(jc);
    }
    doc["fitted_constants"] = fitted_constants;
    if (with_runtime) doc["runtime_ms"] = runtime_ms;
    return doc.dump(2) + "\n";
}

namespace {

std::string csv_quote(const std::string& s) {
    bool needs = s.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string scalar_to_string(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace

std::string ExperimentReport::to_csv() const {
    // Column order: first appearance across rows.
    std::vector<std::string> cols;
    for (const auto& r : rows)
        for (auto it = r.begin(); it != r.end(); ++it) {
            if (std::find(cols.begin(), cols.end(), it.key()) == cols.end())
                cols.push_back(it.key());
        }
    std::string out;
    for (size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ",";
        out += csv_quote(cols[i]);
    }
    out += "\r\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < cols.size(); ++i) {
            if (i) out += ",";
            if (r.contains(cols[i])) out += csv_quote(scalar_to_string(r.at(cols[i])));
        }
        out += "\r\n";
    }
    return out;
}

}  // namespace k2lab::report
