#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "k2lab/report.hpp"
#include "k2lab/errors.hpp"
#include "k2lab/suites.hpp"

using namespace k2lab;
using report::ExperimentReport;
using report::Json;

TEST_CASE("report JSON shape and check conjunction") {
    ExperimentReport rep;
    rep.command = "demo";
    rep.params["q"] = 25;
    Json row;
    row["k"] = 1;
    row["value"] = 0.5;
    rep.rows.push_back(row);
    rep.check("alpha", true, 1.0, 1.0, 0.0);
    CHECK(rep.all_pass());
    rep.check("beta", false, 2.0, 1.0, 0.0);
    CHECK(!rep.all_pass());

    auto doc = Json::parse(rep.to_json());
    CHECK(doc["schema"] == 1);
    CHECK(doc["command"] == "demo");
    CHECK(doc["checks"].size() == 2);
    // Every check carries both compared values.
    for (auto& c : doc["checks"]) {
        CHECK(c.contains("lhs"));
        CHECK(c.contains("rhs"));
        CHECK(c.contains("tolerance"));
    }
}

TEST_CASE("CSV flattening and RFC 4180 quoting") {
    ExperimentReport rep;
    Json r1;
    r1["name"] = "plain";
    r1["v"] = 1;
    Json r2;
    r2["name"] = "quote\"and,comma";
    r2["v"] = 2;
    r2["extra"] = true;
    rep.rows = {r1, r2};
    auto csv = rep.to_csv();
    CHECK(csv.find("name,v,extra\r\n") == 0);
    CHECK(csv.find("\"quote\"\"and,comma\"") != std::string::npos);
}

TEST_CASE("suite dispatch") {
    CHECK_THROWS_AS(suites::run_suite("nope"), k2lab::UnknownSuite);
    CHECK(suites::suite_names().size() == 10);
}

TEST_CASE("reports are byte-identical for identical inputs") {
    suites::SuiteOptions opt;
    opt.seed = 42;
    opt.budget = 0.05;
    opt.threads = 2;
    auto a = suites::suite_crt(opt);
    auto b = suites::suite_crt(opt);
    a.runtime_ms = 0;
    b.runtime_ms = 0;
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_csv() == b.to_csv());

    // Thread count must not change the content either.
    suites::SuiteOptions opt1 = opt;
    opt1.threads = 1;
    auto c = suites::suite_parseval(opt);
    auto d = suites::suite_parseval(opt1);
    c.runtime_ms = 0;
    d.runtime_ms = 0;
    CHECK(c.to_json() == d.to_json());
}

TEST_CASE("small-budget suites pass") {
    suites::SuiteOptions opt;
    opt.budget = 0.05;
    opt.threads = 2;
    for (const auto& name : {"crt", "parseval", "combo", "vdc"}) {
        auto rep = suites::run_suite(name, opt);
        CHECK(rep.all_pass());
    }
}
