#include "k2lab/vdc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace k2lab::vdc {

using expsum::ComplexAccumulator;
using expsum::Cyclotomic;
using modarith::addmod;
using modarith::mod_inv;
using modarith::mulmod;
using modarith::reduce_signed;

namespace {

u64 pow_u64(u64 p, int k) {
    u64 r = 1;
    while (k--) r *= p;
    return r;
}

u64 checked_mul(u64 a, u64 b) {
    unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
    if (r > UINT64_MAX) throw OutOfRange("part exceeds 64 bits");
    return static_cast<u64>(r);
}

}  // namespace

u64 smooth_divisor(const FactoredModulus& q, double v, u64 y) {
    if (q.value < 2) throw OutOfRange("q must be at least 2");
    if (v <= 0 || v >= 1) throw OutOfRange("v must lie in (0,1)");
    for (auto& [p, e] : q.factors)
        if (p > y) throw NotSmooth();
    double qv = std::pow(static_cast<double>(q.value), v);
    u64 prefix = 1;
    for (auto& [p, e] : q.factors) {
        for (int i = 0; i < e; ++i) {
            if (static_cast<double>(prefix) * static_cast<double>(p) <= qv)
                prefix = checked_mul(prefix, p);
            else
                return checked_mul(prefix, p);
        }
    }
    // Unreachable for v < 1: the full product q exceeds q^v.
    return prefix;
}

std::vector<u64> smooth_factorization_factors(const std::vector<std::pair<u64, int>>& factors,
                                              const std::vector<double>& u, double log_X, u64 y) {
    size_t k = u.size();
    if (k < 4) throw OutOfRange("need at least 4 parts");
    double total = 0;
    for (double x : u) total += x;
    if (std::abs(total - 1.0) > 1e-9) throw OutOfRange("exponents must sum to 1");

    double eta = std::log(static_cast<double>(y)) / log_X;
    int v2 = 0, v3 = 0;
    std::vector<u64> atoms;  // prime powers p^nu, excluding p = 2, 3
    for (auto& [p, e] : factors) {
        u64 pe = pow_u64(p, e);
        if (pe > y) throw NotUltrasmooth();
        if (p == 2) v2 = e;
        else if (p == 3) v3 = e;
        else atoms.push_back(pe);
    }
    std::sort(atoms.begin(), atoms.end());

    std::vector<u64> parts(k, 1);
    size_t pos = 0;
    for (size_t j = 0; j + 1 < k; ++j) {
        double target = u[j] * log_X;
        double acc = 0;
        while (acc <= target) {
            if (pos == atoms.size()) throw WindowInfeasible();
            acc += std::log(static_cast<double>(atoms[pos]));
            parts[j] = checked_mul(parts[j], atoms[pos]);
            ++pos;
        }
    }
    if (pos == atoms.size()) throw WindowInfeasible("no atoms left for the last part");
    for (; pos < atoms.size(); ++pos) parts[k - 1] = checked_mul(parts[k - 1], atoms[pos]);
    parts[0] = checked_mul(parts[0], pow_u64(2, v2) * pow_u64(3, v3));

    // Window checks.
    auto Xp = [&](double e) { return std::exp(e * log_X); };
    double fold = std::pow(2.0, v2) * std::pow(3.0, v3);
    const double slack = 1 + 1e-12;
    auto in_window = [&](double val, double lo, double hi) {
        return val > lo / slack && val <= hi * slack;
    };
    if (!in_window(static_cast<double>(parts[0]), Xp(u[0]), Xp(u[0] + eta) * fold))
        throw WindowInfeasible("part 1 misses its window");
    for (size_t j = 1; j + 1 < k; ++j)
        if (!in_window(static_cast<double>(parts[j]), Xp(u[j]), Xp(u[j] + eta)))
            throw WindowInfeasible("middle part misses its window");
    double lo_k = Xp(u[k - 1] - (k - 1) * eta) / fold;
    if (!in_window(static_cast<double>(parts[k - 1]), lo_k, 2 * Xp(u[k - 1])))
        throw WindowInfeasible("last part misses its window");
    if (parts[k - 1] % 2 == 0 || parts[k - 1] % 3 == 0)
        throw WindowInfeasible("last part shares a factor with 6");
    return parts;
}

std::vector<u64> smooth_factorization(const FactoredModulus& q, const std::vector<double>& u,
                                      double X, u64 y) {
    return smooth_factorization_factors(q.factors, u, std::log(X), y);
}

CompleteT complete_T(u64 A, u64 B, u64 C, const ShiftMultiset& shifts, const FactoredModulus& Q,
                     Engine engine) {
    u64 q = Q.value;
    if (shifts.total() == 0) throw EmptyCorrelation();
    A %= q;
    B %= q;
    if (q > 1 && (std::gcd(A, q) != 1 || std::gcd(B, q) != 1)) throw NotAUnit();
    auto sh = shifts.modulus() == q ? shifts : shifts.reduced(q);

    CompleteT out;
    u64 c_eff = mulmod(C % q, B, q);
    if (q == 1) {
        out.full = expsum::root_of_unity(0, 1, engine);
        return out;
    }
    {
        auto tab = expsum::K2Table(A, Q, expsum::K2Table::Build::Multiplicative);
        auto roots = expsum::root_table(q);
        ComplexAccumulator acc;
        for (u64 b = 0; b < q; ++b) {
            std::complex<double> prod = (*roots)[mulmod(c_eff, b, q)];
            for (i64 h : sh.h()) prod *= tab[(b + reduce_signed(h, q)) % q];
            for (i64 h : sh.hprime()) prod *= std::conj(tab[(b + reduce_signed(h, q)) % q]);
            acc.add(prod);
        }
        out.full = SumValue(acc.value());
        if (engine == Engine::Exact) {
            auto exact = corrprime::corr_sum_collapsed(A, c_eff, sh, q, Engine::Exact);
            out.full.exact = std::move(exact.exact);
        }
    }
    for (auto& [p, nu] : Q.factors) {
        u64 m = pow_u64(p, nu);
        u64 c = mod_inv((q / m) % m, m);
        CompleteTFactor f;
        f.modulus = m;
        f.A = mulmod(mulmod(mulmod(c, c, m), c, m), A % m, m);
        f.B = mulmod(c, B % m, m);
        auto shm = sh.reduced(m);
        u64 c_eff_m = mulmod(C % m, f.B, m);
        auto tab = expsum::K2Table(f.A, modarith::factorize(m), expsum::K2Table::Build::Multiplicative);
        auto roots = expsum::root_table(m);
        ComplexAccumulator acc;
        for (u64 b = 0; b < m; ++b) {
            std::complex<double> prod = (*roots)[mulmod(c_eff_m, b, m)];
            for (i64 h : shm.h()) prod *= tab[(b + reduce_signed(h, m)) % m];
            for (i64 h : shm.hprime()) prod *= std::conj(tab[(b + reduce_signed(h, m)) % m]);
            acc.add(prod);
        }
        f.value = SumValue(acc.value());
        if (engine == Engine::Exact) {
            auto exact = corrprime::corr_sum_collapsed(f.A, c_eff_m, shm, m, Engine::Exact);
            f.value.exact = std::move(exact.exact);
        }
        out.factors.push_back(std::move(f));
    }
    return out;
}

SumValue incomplete_T(u64 b, u64 M, Interval J, const ShiftMultiset& shifts,
                      const FactoredModulus& Q, Engine engine) {
    u64 q = Q.value;
    if (shifts.total() == 0) throw EmptyCorrelation();
    b %= q;
    if (q > 1 && std::gcd(b, q) != 1) throw NotAUnit();
    auto sh = shifts.modulus() == q ? shifts : shifts.reduced(q);

    expsum::K2Table tab(b, Q, expsum::K2Table::Build::Multiplicative);
    auto roots = expsum::root_table(q);
    bool exact = engine == Engine::Exact;
    if (exact && q > expsum::exact_order_cap()) throw ExactEngineOverflow();
    ComplexAccumulator acc;
    // Exact route: accumulate e_Q(-Mk) K2(...) with K2 from its exact
    // evaluation; used only at small moduli.
    Cyclotomic cyc(exact ? q : 1);
    for (i64 k = J.lo; k <= J.hi; ++k) {
        u64 kq = reduce_signed(k, q);
        std::complex<double> prod = (*roots)[mulmod((q - M % q) % q, kq, q)];
        for (i64 h : sh.h()) prod *= tab[(kq + reduce_signed(h, q)) % q];
        for (i64 h : sh.hprime()) prod *= std::conj(tab[(kq + reduce_signed(h, q)) % q]);
        acc.add(prod);
        if (exact) {
            SumValue term = expsum::root_of_unity(-static_cast<i64>(M % q) * static_cast<i64>(kq),
                                                  q, Engine::Exact);
            for (i64 h : sh.h())
                term = term * expsum::k2_eval(b, (kq + reduce_signed(h, q)) % q, q, Engine::Exact);
            for (i64 h : sh.hprime())
                term = term *
                       expsum::k2_eval(b, (kq + reduce_signed(h, q)) % q, q, Engine::Exact).conj();
            cyc += *term.exact;
        }
    }
    SumValue out(acc.value());
    if (exact) out.exact = std::move(cyc);
    return out;
}

SumValue incomplete_quadratic_sum(u64 k, u64 a, u64 qtilde, u64 V1, u64 V0, Engine engine) {
    if (qtilde < 1 || V0 < 1) throw OutOfRange("qtilde and V0 must be positive");
    u64 len = V1 / V0;
    bool exact = engine == Engine::Exact;
    if (exact && qtilde > expsum::exact_order_cap()) throw ExactEngineOverflow();
    auto roots = expsum::root_table(qtilde);
    ComplexAccumulator acc;
    Cyclotomic cyc(exact ? qtilde : 1);
    u64 ka = mulmod(k % qtilde, a % qtilde, qtilde);
    for (u64 d = V1 + 1; d <= V1 + len; ++d) {
        if (std::gcd(d, qtilde) != 1) continue;
        u64 di = mod_inv(d % qtilde, qtilde);
        u64 e = mulmod(ka, mulmod(di, di, qtilde), qtilde);
        acc.add((*roots)[e]);
        if (exact) cyc.add_root(e);
    }
    SumValue out(acc.value());
    if (exact) out.exact = std::move(cyc);
    return out;
}

double kappa(u64 m, u64 ka, u64 qprime, u64 K, u64 V1) {
    if (m < 1 || K < 1) throw OutOfRange("m and K must be positive");
    auto tab = corrprime::k2_table_cached(ka % qprime, qprime);
    auto roots = expsum::root_table(qprime);
    ComplexAccumulator acc;
    double best = 0;
    for (u64 R = 1; R <= K; ++R) {
        u64 r = K * (m - 1) + R;
        u64 e = mulmod((qprime - V1 % qprime) % qprime, r % qprime, qprime);
        acc.add((*roots)[e] * (*tab)[r % qprime]);
        best = std::max(best, std::abs(acc.value()));
    }
    return best;
}

void FactorizationPlan::validate() const {
    if (parts.size() < 2) throw PlanInvalid("need Q_0 and at least one Q_j");
    u64 prod = 1;
    for (u64 part : parts) {
        if (part < 2) throw PlanInvalid("parts must be at least 2");
        prod = checked_mul(prod, part);
    }
    if (prod != Q.value) throw PlanInvalid("parts do not multiply to Q");
    for (size_t i = 0; i < parts.size(); ++i)
        for (size_t j = i + 1; j < parts.size(); ++j)
            if (std::gcd(parts[i], parts[j]) != 1) throw PlanInvalid("parts are not coprime");
    if (!windows.empty()) {
        if (windows.size() != parts.size()) throw PlanInvalid("one window per part expected");
        for (size_t i = 0; i < parts.size(); ++i) {
            double v = static_cast<double>(parts[i]);
            if (v <= windows[i].first || v > windows[i].second)
                throw PlanInvalid("part outside its window");
        }
    }
    for (size_t j = 1; j < parts.size(); ++j)
        if (K < parts[j]) throw PlanInvalid("K must be at least every Q_j, j >= 1");
}

VdcReport vdc_decompose(const FactorizationPlan& plan, u64 b, u64 M, Interval J,
                        u64 tuple_budget) {
    plan.validate();
    if (J.length() == 0 || J.length() > plan.K) throw PlanInvalid("interval J must satisfy 0 < |J| <= K");
    u64 q = plan.Q.value;
    if (std::gcd(b % q, q) != 1) throw NotAUnit();
    int L = plan.L();
    u64 Q0 = plan.parts[0];

    VdcReport rep;
    ShiftMultiset plain({0}, {}, q);
    rep.lhs = std::abs(incomplete_T(b % q, M, J, plain, plan.Q, Engine::Float).approx);

    // Tuple ranges and budget.
    std::vector<u64> range(L);
    double tuples = 1;
    for (int j = 0; j < L; ++j) {
        range[j] = plan.K / plan.parts[j + 1];
        tuples *= 2.0 * static_cast<double>(range[j]);
    }
    if (tuples > static_cast<double>(tuple_budget)) throw BudgetExceeded();

    auto q0fact = modarith::factorize(Q0);
    u64 b0 = b % Q0;
    rep.h_sum = 0;
    std::vector<i64> h(L, 0);
    std::function<void(int)> rec = [&](int j) {
        if (j == L) {
            // Shifts H_I = sum_{i in I} Q_i h_i, split by parity of |I|.
            std::vector<i64> plus, minus;
            for (u64 mask = 0; mask < (1ULL << L); ++mask) {
                i64 H = 0;
                int bits = 0;
                for (int i = 0; i < L; ++i)
                    if (mask >> i & 1) {
                        H += static_cast<i64>(plan.parts[i + 1]) * h[i];
                        ++bits;
                    }
                (bits % 2 == 0 ? plus : minus).push_back(H);
            }
            ShiftMultiset sh(plus, minus, Q0);
            double val =
                std::abs(incomplete_T(b0, 0, J, sh, q0fact, Engine::Float).approx);
            rep.h_sum += val;
            rep.terms.push_back({h, val});
            return;
        }
        for (i64 v = -static_cast<i64>(range[j]); v <= static_cast<i64>(range[j]); ++v) {
            if (v == 0) continue;
            h[j] = v;
            rec(j + 1);
        }
    };
    if (L > 0 && *std::min_element(range.begin(), range.end()) > 0) rec(0);

    double K = static_cast<double>(plan.K);
    double inner = 0;
    for (int j = 1; j <= L; ++j)
        inner += std::pow(static_cast<double>(plan.parts[L - j + 1]) / K,
                          std::ldexp(1.0, L - j));
    inner += static_cast<double>(q) /
             (std::pow(K, L + 1) * std::pow(static_cast<double>(Q0), std::ldexp(1.0, L - 1) + 1)) *
             rep.h_sum;
    rep.rhs = std::sqrt(static_cast<double>(q)) * K * std::pow(inner, std::ldexp(1.0, -L));
    rep.fitted_constant = rep.rhs > 0 ? rep.lhs / rep.rhs : 0;
    return rep;
}

BudgetResult correlation_budget(const FactoredModulus& Q0, const std::vector<u64>& rest_parts,
                                u64 K, BudgetVariant variant, double delta_prime, bool strict) {
    int L = static_cast<int>(rest_parts.size());
    if (L < 1) throw OutOfRange("need at least one part besides Q0");
    BudgetResult out;
    out.hypotheses_ok = true;
    out.delta_prime = delta_prime > 0 ? delta_prime : std::ldexp(1.0, -(1 << L));

    auto flag = [&](const std::string& msg) {
        out.hypotheses_ok = false;
        out.violations.push_back(msg);
    };
    std::vector<u64> all{Q0.value};
    all.insert(all.end(), rest_parts.begin(), rest_parts.end());
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j)
            if (std::gcd(all[i], all[j]) != 1) flag("parts are not pairwise coprime");
    if (variant == BudgetVariant::Squarefree) {
        if (!Q0.is_squarefree()) flag("Q0 is not squarefree");
        for (u64 part : rest_parts)
            if (!modarith::factorize(part).is_squarefree()) flag("a part is not squarefree");
    } else {
        if (Q0.value % 2 == 0 || Q0.value % 3 == 0) flag("(Q0, 6) != 1");
        for (u64 part : rest_parts)
            if (static_cast<double>(K) / static_cast<double>(part) <=
                std::pow(static_cast<double>(Q0.value), 2 * out.delta_prime))
                flag("K/Q_j <= Q0^{2 delta'}");
    }
    if (!out.hypotheses_ok && strict) {
        std::string msg;
        for (auto& v : out.violations) msg += v + "; ";
        throw HypothesisViolated(msg);
    }

    double q = static_cast<double>(Q0.value);
    for (u64 part : rest_parts) q *= static_cast<double>(part);
    double kl = std::pow(static_cast<double>(K), L);
    double q0 = static_cast<double>(Q0.value);
    if (variant == BudgetVariant::Squarefree) {
        out.value = kl / q * std::pow(q0, std::ldexp(1.0, L - 1) + 1.5) *
                    (static_cast<double>(K) / q0 + 1.0);
    } else {
        out.value = kl / q * std::pow(q0, std::ldexp(1.0, L - 1) + 2.0 - out.delta_prime);
    }
    return out;
}

u64 h_tuple_bad_count(u64 d, const std::vector<u64>& Qparts, u64 K, double c, u64 tuple_budget) {
    if (c <= 0 || c >= 1) throw OutOfRange("c must lie in (0,1)");
    if (d == 1) return 0;  // no prime condition to violate
    int L = static_cast<int>(Qparts.size());
    auto dfact = modarith::factorize(d);

    std::vector<u64> range(L);
    double tuples = 1;
    for (int j = 0; j < L; ++j) {
        range[j] = K / Qparts[j];
        tuples *= 2.0 * static_cast<double>(range[j]);
        if (range[j] == 0) return 0;
    }
    if (tuples > static_cast<double>(tuple_budget)) throw BudgetExceeded();

    u64 count = 0;
    std::vector<i64> h(L, 0);
    std::vector<i64> H(1ULL << L, 0);
    std::function<void(int)> rec = [&](int j) {
        if (j == L) {
            for (u64 mask = 1; mask < (1ULL << L); ++mask) {
                int low = __builtin_ctzll(mask);
                H[mask] = H[mask & (mask - 1)] + static_cast<i64>(Qparts[low]) * h[low];
            }
            bool bad = true;
            for (auto& [p, nu] : dfact.factors) {
                bool found = false;
                double cap = c * nu;
                for (size_t i = 0; i < H.size() && !found; ++i)
                    for (size_t jj = i + 1; jj < H.size() && !found; ++jj) {
                        i64 diff = H[i] - H[jj];
                        if (diff == 0) continue;
                        int val = modarith::valuation(static_cast<u64>(std::llabs(diff)), p);
                        if (static_cast<double>(val) > cap) found = true;
                    }
                if (!found) {
                    bad = false;
                    break;
                }
            }
            if (bad) ++count;
            return;
        }
        for (i64 v = -static_cast<i64>(range[j]); v <= static_cast<i64>(range[j]); ++v) {
            if (v == 0) continue;
            h[j] = v;
            rec(j + 1);
        }
    };
    rec(0);
    return count;
}

ExponentPlan exponent_budget(int L, double delta, double lambda, double eta) {
    if (L < 2) throw OutOfRange("L must be at least 2");
    ExponentPlan out;
    out.gamma = 2 * delta + lambda;
    double twoL2 = std::ldexp(1.0, L + 2);
    out.sigma = 1.0 / L + 2.0 * (twoL2 + L) * out.gamma / L;

    double q0lo = out.sigma - (std::ldexp(1.0, L + 1) + 2) * out.gamma;
    out.windows.push_back({"q0", q0lo, q0lo + L * eta});
    out.window_sum = q0lo;
    for (int i = 1; i <= L; ++i) {
        int j = L - i + 1;
        double hi = out.sigma / 2 - (std::ldexp(1.0, j) + 1) * out.gamma;
        out.windows.push_back({"q" + std::to_string(i), hi - eta, hi});
        out.window_sum += hi;
    }

    i64 num = L - 4;
    i64 den = 4 * (static_cast<i64>(std::ldexp(1.0, L + 3)) + L);
    i64 g = std::gcd(std::max<i64>(num, 1), den);
    if (num > 0) {
        num /= g;
        den /= g;
    }
    out.gamma_max_num = num;
    out.gamma_max_den = den;
    out.feasible = num > 0 && out.gamma > 0 &&
                   out.gamma <= static_cast<double>(num) / static_cast<double>(den) + 1e-15;
    return out;
}

}  // namespace k2lab::vdc
