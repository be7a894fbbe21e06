// k2lab: experiment runner for quadratic Kloosterman-type sums, their
// correlations, van der Corput budgets and squarefree-progression sweeps.
//
// Reports are emitted as JSON (default) or CSV. Exit codes: 0 all checks
// pass, 1 a check failed, 2 usage error, 3 budget exceeded.

#include <CLI11.hpp>
#include <functional>
#include <thread>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "k2lab/corrpp.hpp"
#include "k2lab/sqfree.hpp"
#include "k2lab/suites.hpp"
#include "k2lab/vdc.hpp"

using namespace k2lab;
using corrprime::ShiftMultiset;
using expsum::Engine;
using modarith::i64;
using modarith::u64;
using report::ExperimentReport;
using report::Json;

namespace {

struct GlobalOpts {
    std::string format = "json";
    std::string out;
    std::string config;
    std::string engine = "auto";
    u64 seed = 0;
    int threads = 0;  // 0 = hardware concurrency
    double budget = 1.0;
    bool timing = false;
};

Engine pick_engine(const std::string& name, u64 order) {
    if (name == "float") return Engine::Float;
    if (name == "exact") return Engine::Exact;
    return order <= expsum::exact_order_cap() ? Engine::Exact : Engine::Float;
}

std::vector<i64> parse_list(const std::string& csv) {
    std::vector<i64> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoll(cur));
            cur.clear();
        } else if (!isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stoll(cur));
    return out;
}

int emit(const ExperimentReport& rep, const GlobalOpts& g) {
    std::string text = g.format == "csv" ? rep.to_csv() : rep.to_json(true);
    if (!g.out.empty()) {
        std::ofstream f(g.out, std::ios::binary);
        f << text;
    } else {
        std::fputs(text.c_str(), stdout);
    }
    return rep.all_pass() ? 0 : 1;
}

void put_value(Json& row, const std::string& key, std::complex<double> v) {
    row[key + "_re"] = v.real();
    row[key + "_im"] = v.imag();
    row[key + "_abs"] = std::abs(v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact and floating laboratory for quadratic Kloosterman-type sums"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", g.out, "write the report to a file instead of stdout");
    app.add_option("--config", g.config, "JSON config supplying defaults for global flags");
    app.add_option("--engine", g.engine, "float, exact or auto")
        ->check(CLI::IsMember({"float", "exact", "auto"}));
    app.add_option("--seed", g.seed, "seed for randomized sweeps");
    app.add_option("--threads", g.threads, "parallelism degree (0 = logical cores)");
    app.add_option("--budget", g.budget, "suite budget scale (1.0 = full)");
    app.add_flag("--timing", g.timing, "include real runtime_ms in the report");

    // k2 {eval|verify}
    auto* k2 = app.add_subcommand("k2", "complete K2 sums");
    auto* k2_eval_cmd = k2->add_subcommand("eval", "evaluate K2(A,B;Q) and check against direct");
    u64 arg_a = 1, arg_b = 0, arg_q = 5;
    k2_eval_cmd->add_option("--a", arg_a, "first argument (unit mod Q)")->required();
    k2_eval_cmd->add_option("--b", arg_b, "second argument")->required();
    k2_eval_cmd->add_option("--q", arg_q, "modulus")->required();
    auto* k2_verify_cmd = k2->add_subcommand("verify", "explicit-vs-direct verification sweep");

    // corr {prime|pp}
    auto* corr = app.add_subcommand("corr", "correlation sums");
    auto* corr_prime_cmd = corr->add_subcommand("prime", "prime-modulus correlation");
    corr_prime_cmd->set_help_flag("--help", "print help");
    u64 cp_p = 5, cp_a = 1, cp_psi = 0;
    std::string cp_h = "0", cp_hc;
    corr_prime_cmd->add_option("--p", cp_p, "prime modulus")->required();
    corr_prime_cmd->add_option("--a", cp_a, "unit A");
    corr_prime_cmd->add_option("--h", cp_h, "comma-separated shifts h");
    corr_prime_cmd->add_option("--hc", cp_hc, "comma-separated conjugated shifts h'");
    corr_prime_cmd->add_option("--psi", cp_psi, "character frequency t");

    auto* corr_pp_cmd = corr->add_subcommand("pp", "prime-power correlation");
    corr_pp_cmd->set_help_flag("--help", "print help");
    u64 pp_p = 5, pp_a = 1, pp_c = 0;
    int pp_n = 2;
    std::string pp_h = "0", pp_hc;
    corr_pp_cmd->add_option("--p", pp_p, "prime")->required();
    corr_pp_cmd->add_option("--n", pp_n, "exponent (>= 2)")->required();
    corr_pp_cmd->add_option("--a", pp_a, "unit a");
    corr_pp_cmd->add_option("--c", pp_c, "frequency c");
    corr_pp_cmd->add_option("--h", pp_h, "comma-separated shifts h");
    corr_pp_cmd->add_option("--hc", pp_hc, "comma-separated conjugated shifts h'");

    // vdc {run|budget|plan}
    auto* vdc_cmd = app.add_subcommand("vdc", "van der Corput pipeline");
    auto* vdc_run = vdc_cmd->add_subcommand("run", "decompose an incomplete sum");
    std::string run_parts = "35,3";
    u64 run_b = 2, run_m = 1;
    i64 run_jlo = 0, run_jhi = 5;
    u64 run_k = 6;
    vdc_run->add_option("--parts", run_parts, "Q0,Q1,...,QL");
    vdc_run->add_option("--K", run_k, "completion length");
    vdc_run->add_option("--b", run_b, "unit b");
    vdc_run->add_option("--M", run_m, "frequency M");
    vdc_run->add_option("--jlo", run_jlo, "interval start");
    vdc_run->add_option("--jhi", run_jhi, "interval end");

    auto* vdc_budget = vdc_cmd->add_subcommand("budget", "correlation bound budget");
    u64 bud_q0 = 35, bud_k = 35;
    std::string bud_parts = "2,3", bud_variant = "squarefree";
    double bud_dp = 0;
    vdc_budget->add_option("--q0", bud_q0, "Q0");
    vdc_budget->add_option("--parts", bud_parts, "Q1,...,QL");
    vdc_budget->add_option("--K", bud_k, "completion length");
    vdc_budget->add_option("--variant", bud_variant, "squarefree or general")
        ->check(CLI::IsMember({"squarefree", "general"}));
    vdc_budget->add_option("--delta-prime", bud_dp, "delta' (default 2^{-2^L})");

    int plan_L = 5;
    double plan_delta = 1e-5, plan_lambda = 1e-4, plan_eta = 1e-6;
    auto add_plan_opts = [&](CLI::App* cmd) {
        cmd->add_option("--L", plan_L, "depth L >= 2");
        cmd->add_option("--delta", plan_delta, "delta");
        cmd->add_option("--lambda", plan_lambda, "lambda");
        cmd->add_option("--eta", plan_eta, "eta (smoothness exponent)");
    };
    auto* vdc_plan = vdc_cmd->add_subcommand("plan", "exponent budget table");
    add_plan_opts(vdc_plan);
    auto* plan_cmd = app.add_subcommand("plan", "parameter planning");
    auto* plan_exp = plan_cmd->add_subcommand("exponents", "exponent budget table");
    add_plan_opts(plan_exp);

    // sqfree {delta|max|density|theorem}
    auto* sq = app.add_subcommand("sqfree", "squarefree progression experiments");
    auto* sq_delta = sq->add_subcommand("delta", "error functional at one class");
    u64 sd_x = 1000000, sd_q = 2310, sd_a = 1;
    sq_delta->add_option("--x", sd_x, "limit X");
    sq_delta->add_option("--q", sd_q, "modulus");
    sq_delta->add_option("--a", sd_a, "residue class");
    auto* sq_max = sq->add_subcommand("max", "maximal error over coprime classes");
    sq_max->add_option("--x", sd_x, "limit X");
    sq_max->add_option("--q", sd_q, "modulus");
    auto* sq_dens = sq->add_subcommand("density", "squarefree smooth density");
    u64 dn_y_cap = 1000000, dn_smooth = 50;
    sq_dens->add_option("--Y", dn_y_cap, "limit Y");
    sq_dens->add_option("--y", dn_smooth, "smoothness bound");
    auto* sq_thm = sq->add_subcommand("theorem", "error trend across an X ladder");
    std::string thm_qlist = "2310,30030,510510", thm_ladder;
    u64 thm_x = 10000000;
    sq_thm->add_option("--x", thm_x, "largest X (ladder = X/100, X/10, X)");
    sq_thm->add_option("--q-list", thm_qlist, "comma-separated moduli");
    sq_thm->add_option("--ladder", thm_ladder, "explicit comma-separated X ladder");

    // suite <name>
    auto* suite_cmd = app.add_subcommand("suite", "named verification suite");
    std::string suite_name;
    suite_cmd->add_option("name", suite_name, "suite name")->required();

    // Global flags may appear after subcommand names.
    std::function<void(CLI::App*)> allow_fallthrough = [&](CLI::App* cmd) {
        cmd->fallthrough(true);
        for (auto* sub : cmd->get_subcommands({})) allow_fallthrough(sub);
    };
    for (auto* sub : app.get_subcommands({})) allow_fallthrough(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    // Config file: defaults for the global flags; explicit flags win.
    if (!g.config.empty()) {
        std::ifstream f(g.config);
        if (!f) {
            std::fprintf(stderr, "cannot open config %s\n", g.config.c_str());
            return 2;
        }
        Json conf = Json::parse(f, nullptr, false);
        if (conf.is_discarded()) {
            std::fprintf(stderr, "config is not valid JSON\n");
            return 2;
        }
        auto take = [&](const char* key, auto& slot, const char* flag) {
            if (conf.contains(key) && app.count(flag) == 0) conf.at(key).get_to(slot);
        };
        take("format", g.format, "--format");
        take("engine", g.engine, "--engine");
        take("seed", g.seed, "--seed");
        take("threads", g.threads, "--threads");
        take("budget", g.budget, "--budget");
        take("out", g.out, "--out");
    }
    if (g.threads <= 0) g.threads = static_cast<int>(std::thread::hardware_concurrency());
    if (g.threads <= 0) g.threads = 1;

    long long t0 = report::now_ms();
    ExperimentReport rep;
    auto finish = [&](ExperimentReport& r) {
        r.runtime_ms = g.timing ? report::now_ms() - t0 : 0;
        return emit(r, g);
    };

    try {
        if (*k2_eval_cmd) {
            Engine engine = pick_engine(g.engine, arg_q);
            auto v = expsum::k2_eval(arg_a, arg_b, arg_q, engine);
            auto d = expsum::k2_direct(arg_a, arg_b, arg_q, engine);
            rep.command = "k2 eval";
            rep.params = {{"a", arg_a}, {"b", arg_b}, {"q", arg_q},
                          {"engine", engine == Engine::Exact ? "exact" : "float"}};
            Json row;
            row["q"] = arg_q;
            put_value(row, "value", v.approx);
            rep.rows.push_back(row);
            bool same = v.agrees(d, 1e-9);
            rep.check("matches direct summation", same, std::abs(v.approx - d.approx), 0, 1e-9);
            return finish(rep);
        }
        if (*k2_verify_cmd) {
            suites::SuiteOptions so{g.seed, g.threads, g.budget};
            rep = suites::suite_explicit(so);
            return finish(rep);
        }
        if (*corr_prime_cmd) {
            ShiftMultiset s(parse_list(cp_h), parse_list(cp_hc), cp_p);
            Engine engine = pick_engine(g.engine, cp_p);
            auto v = corrprime::corr_sum_prime(cp_a, cp_psi, s, cp_p, engine);
            auto cls = corrprime::classify_prime(cp_psi, s);
            double ratio = corrprime::corr_ratio_prime(cp_a, cp_psi, s, cp_p);
            rep.command = "corr prime";
            rep.params = {{"p", cp_p}, {"a", cp_a}, {"psi", cp_psi}, {"h", cp_h}, {"hc", cp_hc}};
            Json row;
            row["p"] = cp_p;
            row["class"] =
                cls == corrprime::PrimeClass::Degenerate ? "degenerate" : "nondegenerate";
            put_value(row, "value", v.approx);
            row["ratio"] = ratio;
            rep.rows.push_back(row);
            double nm = static_cast<double>(s.total());
            rep.check_le("ratio within scaled bound", ratio, 5.0 * nm * std::pow(3.0, nm));
            if (engine == Engine::Exact)
                rep.check("exact embedding consistent", v.embedding_consistent(), 0, 0, 1e-9);
            return finish(rep);
        }
        if (*corr_pp_cmd) {
            u64 pn = 1;
            for (int i = 0; i < pp_n; ++i) pn *= pp_p;
            ShiftMultiset s(parse_list(pp_h), parse_list(pp_hc), pn);
            Engine engine = pick_engine(g.engine, pn);
            auto v = corrpp::corr_sum_pp(pp_a, pp_c, s, pp_p, pp_n, engine);
            auto rec = corrpp::corr_sum_pp_reconstructed(pp_a, pp_c, s, pp_p, pp_n, engine);
            auto cls = corrpp::classify_pp(pp_p, pp_n, pp_c, s);
            rep.command = "corr pp";
            rep.params = {{"p", pp_p}, {"n", pp_n}, {"a", pp_a}, {"c", pp_c},
                          {"h", pp_h},  {"hc", pp_hc}};
            Json row;
            row["p^n"] = pn;
            const char* names[] = {"case-i", "case-ii", "case-iii", "nondegenerate"};
            row["class"] = names[static_cast<int>(cls.cls)];
            row["bound_exponent"] = cls.bound_exponent;
            row["separation_holds"] = cls.separation_holds;
            put_value(row, "value", v.approx);
            rep.rows.push_back(row);
            bool same = engine == Engine::Exact
                            ? (*v.exact == *rec.exact)
                            : std::abs(v.approx - rec.approx) <=
                                  1e-6 * (1 + std::abs(v.approx));
            rep.check("decomposition identity", same, std::abs(v.approx - rec.approx), 0, 1e-6);
            return finish(rep);
        }
        if (*vdc_run) {
            auto parts_list = parse_list(run_parts);
            vdc::FactorizationPlan plan;
            u64 qv = 1;
            for (i64 part : parts_list) {
                plan.parts.push_back(static_cast<u64>(part));
                qv *= static_cast<u64>(part);
            }
            plan.Q = modarith::factorize(qv);
            plan.K = run_k;
            auto r = vdc::vdc_decompose(plan, run_b, run_m, {run_jlo, run_jhi});
            rep.command = "vdc run";
            rep.params = {{"parts", run_parts}, {"K", run_k}, {"b", run_b}, {"M", run_m}};
            for (size_t i = 0; i < r.terms.size() && i < 64; ++i) {
                Json row;
                row["h"] = r.terms[i].h;
                row["abs_T"] = r.terms[i].abs_value;
                rep.rows.push_back(row);
            }
            rep.fitted_constants["lhs"] = r.lhs;
            rep.fitted_constants["rhs"] = r.rhs;
            rep.fitted_constants["h_sum"] = r.h_sum;
            rep.fitted_constants["fitted_constant"] = r.fitted_constant;
            return finish(rep);
        }
        if (*vdc_budget) {
            std::vector<u64> parts;
            for (i64 part : parse_list(bud_parts)) parts.push_back(static_cast<u64>(part));
            auto variant = bud_variant == "squarefree" ? vdc::BudgetVariant::Squarefree
                                                       : vdc::BudgetVariant::General;
            auto r = vdc::correlation_budget(modarith::factorize(bud_q0), parts, bud_k, variant,
                                             bud_dp, false);
            rep.command = "vdc budget";
            rep.params = {{"q0", bud_q0}, {"parts", bud_parts}, {"K", bud_k},
                          {"variant", bud_variant}};
            Json row;
            row["value"] = r.value;
            row["delta_prime"] = r.delta_prime;
            row["hypotheses_ok"] = r.hypotheses_ok;
            row["violations"] = r.violations;
            rep.rows.push_back(row);
            rep.check("hypotheses hold", r.hypotheses_ok, r.hypotheses_ok ? 1 : 0, 1, 0);
            return finish(rep);
        }
        if (*vdc_plan || *plan_exp) {
            auto r = vdc::exponent_budget(plan_L, plan_delta, plan_lambda, plan_eta);
            rep.command = "plan exponents";
            rep.params = {{"L", plan_L}, {"delta", plan_delta}, {"lambda", plan_lambda},
                          {"eta", plan_eta}};
            for (auto& w : r.windows) {
                Json row;
                row["part"] = w.part;
                row["lo"] = w.lo;
                row["hi"] = w.hi;
                rep.rows.push_back(row);
            }
            rep.fitted_constants["gamma"] = r.gamma;
            rep.fitted_constants["sigma"] = r.sigma;
            rep.fitted_constants["gamma_max"] =
                std::to_string(r.gamma_max_num) + "/" + std::to_string(r.gamma_max_den);
            rep.fitted_constants["feasible"] = r.feasible;
            rep.check_close("window sum = 1/2 + sigma", r.window_sum, 0.5 + r.sigma, 1e-12);
            return finish(rep);
        }
        if (*sq_delta) {
            auto d = sqfree::delta(sd_x, sd_q, sd_a);
            rep.command = "sqfree delta";
            rep.params = {{"x", sd_x}, {"q", sd_q}, {"a", sd_a}};
            Json row;
            row["count_class"] = d.count_class;
            row["count_cond"] = d.count_cond;
            row["phi"] = d.phi;
            row["delta"] = d.value();
            row["numerator"] = d.numerator();
            row["denominator"] = d.phi;
            rep.rows.push_back(row);
            return finish(rep);
        }
        if (*sq_max) {
            auto m = sqfree::max_delta(sd_x, sd_q);
            rep.command = "sqfree max";
            rep.params = {{"x", sd_x}, {"q", sd_q}};
            Json row;
            row["a_star"] = m.a_star;
            row["max_abs_delta"] = m.value;
            row["normalized"] = m.value * static_cast<double>(sd_q) / static_cast<double>(sd_x);
            rep.rows.push_back(row);
            return finish(rep);
        }
        if (*sq_dens) {
            auto d = sqfree::density_experiment(dn_y_cap, dn_smooth);
            rep.command = "sqfree density";
            rep.params = {{"Y", dn_y_cap}, {"y", dn_smooth}};
            Json row;
            row["count"] = d.count;
            row["u"] = d.u;
            row["prediction"] = d.prediction;
            row["rel_deviation"] = d.rel_deviation;
            rep.rows.push_back(row);
            return finish(rep);
        }
        if (*sq_thm) {
            std::vector<u64> ladder;
            if (!thm_ladder.empty()) {
                for (i64 x : parse_list(thm_ladder)) ladder.push_back(static_cast<u64>(x));
            } else {
                ladder = {thm_x / 100, thm_x / 10, thm_x};
            }
            std::vector<u64> qs;
            for (i64 q : parse_list(thm_qlist)) qs.push_back(static_cast<u64>(q));
            auto r = sqfree::main_theorem_experiment(ladder, qs, 0, g.threads);
            rep.command = "sqfree theorem";
            rep.params = {{"ladder", ladder}, {"q_list", qs}, {"y_reference", r.y_reference}};
            for (auto& row : r.rows) {
                Json jr;
                jr["q"] = row.q;
                jr["X"] = row.X;
                jr["smooth"] = row.smooth;
                jr["squarefree"] = row.squarefree;
                jr["a_star"] = row.a_star;
                jr["max_abs_delta"] = row.max_abs_delta;
                jr["normalized"] = row.normalized;
                rep.rows.push_back(jr);
            }
            for (u64 q : qs) {
                rep.fitted_constants["exponent_q" + std::to_string(q)] = r.fitted_exponent[q];
                if (r.rows.front().X > q && sqfree::is_smooth(q, r.y_reference) &&
                    modarith::factorize(q).is_squarefree()) {
                    rep.check("normalized decreasing q=" + std::to_string(q),
                              r.normalized_decreasing[q], r.normalized_decreasing[q] ? 1 : 0, 1,
                              0);
                }
            }
            return finish(rep);
        }
        if (*suite_cmd) {
            suites::SuiteOptions so{g.seed, g.threads, g.budget};
            rep = suites::run_suite(suite_name, so);
            if (!g.timing) rep.runtime_ms = 0;
            return emit(rep, g);
        }
    } catch (const BudgetExceeded& e) {
        std::fprintf(stderr, "budget error: %s\n", e.what());
        return 3;
    } catch (const UnknownSuite& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::fprintf(stderr, "no subcommand selected\n");
    return 2;
}
