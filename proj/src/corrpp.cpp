#include "k2lab/corrpp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace k2lab::corrpp {

using expsum::ComplexAccumulator;
using modarith::addmod;
using modarith::mod_inv;
using modarith::mulmod;
using modarith::submod;

namespace {

u64 pow_u64(u64 p, int k) {
    u64 r = 1;
    while (k--) r *= p;
    return r;
}

void check_pp_args(u64 p, int n) {
    if (p <= 3 || !modarith::is_prime(p)) throw SmallPrime();
    if (n < 2) throw BadExponent("prime-power correlation needs n >= 2");
}

}  // namespace

std::shared_ptr<const StationaryData> StationaryData::get(u64 p, int n) {
    static std::map<std::pair<u64, int>, std::shared_ptr<const StationaryData>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (cache.size() > 64) cache.clear();

    auto d = std::make_shared<StationaryData>();
    d->p = p;
    d->n = n;
    d->pn = pow_u64(p, n);
    d->dp = (p % 3 == 1) ? 3 : 1;
    d->u0 = d->dp == 3 ? modarith::hensel_cube_root(1, *modarith::primitive_cube_root(p, 1), p, n)
                       : 1;
    d->s_table.assign(d->pn, 0);
    std::vector<u64> base(p, 0);
    for (u64 x = 1; x < p; ++x) {
        u64 c = mulmod(mulmod(x, x, p), x, p);
        if (base[c] == 0) base[c] = x;  // smallest root per cube class
    }
    for (u64 k = 1; k < d->pn; ++k) {
        if (k % p == 0) continue;
        u64 b = base[k % p];
        if (b == 0) continue;
        d->s_table[k] = modarith::hensel_cube_root(k, b, p, n);
    }
    cache.emplace(key, d);
    return d;
}

u64 StationaryData::s(u64 k) const {
    u64 v = s_table[k % pn];
    if (v == 0) throw OutsideDiamond();
    return v;
}

EpsContext::EpsContext(u64 p, int n, const ShiftMultiset& shifts)
    : shifts_({}, {}, 1), data_() {
    check_pp_args(p, n);
    if (shifts.total() == 0) throw EmptyCorrelation();
    data_ = StationaryData::get(p, n);
    shifts_ = shifts.reduced(data_->pn);
}

namespace {

// Visit all dp^{N+M} exponent tuples; f receives the eps vector each realizes.
template <typename F>
void for_each_tuple(const EpsContext& ctx, F&& f) {
    const auto& sh = ctx.shifts();
    const auto& supp = ctx.support();
    size_t slots = sh.total();
    int dp = ctx.dp();
    u64 pn = ctx.pn();
    u64 u0 = ctx.u0();
    u64 upow[3] = {1, u0, mulmod(u0, u0, pn)};

    std::vector<size_t> tau_index(slots);
    std::vector<int> sign(slots);
    {
        size_t s = 0;
        auto index_of = [&](i64 h) {
            u64 tau = modarith::reduce_signed(h, pn);
            return static_cast<size_t>(std::lower_bound(supp.begin(), supp.end(), tau) -
                                       supp.begin());
        };
        for (i64 h : sh.h()) {
            tau_index[s] = index_of(h);
            sign[s++] = +1;
        }
        for (i64 h : sh.hprime()) {
            tau_index[s] = index_of(h);
            sign[s++] = -1;
        }
    }

    std::vector<int> j(slots, 0);
    std::vector<u64> values(supp.size(), 0);
    while (true) {
        std::fill(values.begin(), values.end(), 0);
        for (size_t s = 0; s < slots; ++s) {
            u64& v = values[tau_index[s]];
            v = sign[s] > 0 ? addmod(v, upow[j[s]], pn) : submod(v, upow[j[s]], pn);
        }
        f(values);
        size_t s = 0;
        while (s < slots && ++j[s] == dp) j[s++] = 0;
        if (s == slots) break;
    }
}

}  // namespace

u64 phi_eps(const EpsVector& eps) {
    u64 count = 0;
    for_each_tuple(*eps.ctx, [&](const std::vector<u64>& values) {
        if (values == eps.values) ++count;
    });
    return count;
}

std::vector<std::pair<EpsVector, u64>> eps_spectrum(const EpsContextPtr& ctx) {
    std::map<std::vector<u64>, u64> counts;
    for_each_tuple(*ctx, [&](const std::vector<u64>& values) { ++counts[values]; });
    std::vector<std::pair<EpsVector, u64>> out;
    out.reserve(counts.size());
    for (auto& [values, cnt] : counts) out.push_back({EpsVector{ctx, values}, cnt});
    return out;
}

bool diamond_test(u64 d, u64 a, const std::vector<u64>& T, u64 p) {
    if (p <= 3 || !modarith::is_prime(p)) throw SmallPrime();
    a %= p;
    if (a == 0) throw NotAUnit();
    u64 fourasq = mulmod(4, mulmod(a, a, p), p);
    for (u64 tau : T) {
        u64 arg = mulmod(fourasq, addmod(d % p, tau % p, p), p);
        if (arg == 0) return false;
        if (p % 3 == 1 && modarith::powmod(arg, (p - 1) / 3, p) != 1) return false;
    }
    return true;
}

u64 f_t_eps(u64 b, const EpsVector& eps, u64 a, u64 c) {
    const auto& ctx = *eps.ctx;
    u64 pn = ctx.pn();
    a %= pn;
    if (a % ctx.p() == 0) throw NotAUnit();
    b %= pn;
    u64 inv2a = mod_inv(mulmod(2, a, pn), pn);
    u64 threea = mulmod(3, a, pn);
    const auto& supp = ctx.support();
    u64 phase = mulmod(b, c % pn, pn);
    for (size_t i = 0; i < supp.size(); ++i) {
        u64 arg = mulmod(inv2a, addmod(b, supp[i], pn), pn);
        u64 s = ctx.data().s(arg);  // OutsideDiamond when undefined
        if (eps.values[i] == 0) continue;
        phase = addmod(phase, mulmod(eps.values[i], mulmod(threea, mulmod(s, s, pn), pn), pn), pn);
    }
    return phase;
}

namespace {

SumValue corr_sum_pp_literal(u64 a, u64 c, const ShiftMultiset& sh, u64 p, int n, u64 d_class,
                             bool restrict_class, Engine engine) {
    u64 pn = pow_u64(p, n);
    auto tab = corrprime::k2_table_cached(a, pn);
    auto roots = expsum::root_table(pn);
    ComplexAccumulator acc;
    u64 b0 = restrict_class ? d_class % p : 0;
    u64 step = restrict_class ? p : 1;
    for (u64 b = b0; b < pn; b += step) {
        std::complex<double> prod = (*roots)[mulmod(c, b, pn)];
        for (i64 h : sh.h()) prod *= (*tab)[(b + modarith::reduce_signed(h, pn)) % pn];
        for (i64 h : sh.hprime())
            prod *= std::conj((*tab)[(b + modarith::reduce_signed(h, pn)) % pn]);
        acc.add(prod);
    }
    SumValue out(acc.value());
    if (engine == Engine::Exact) {
        auto exact = restrict_class
                         ? corrprime::corr_sum_collapsed(a, c, sh, pn, Engine::Exact, d_class, p)
                         : corrprime::corr_sum_collapsed(a, c, sh, pn, Engine::Exact);
        out.exact = std::move(exact.exact);
    }
    return out;
}

}  // namespace

SumValue corr_sum_pp(u64 a, u64 c, const ShiftMultiset& shifts, u64 p, int n, Engine engine) {
    check_pp_args(p, n);
    if (shifts.total() == 0) throw EmptyCorrelation();
    u64 pn = pow_u64(p, n);
    a %= pn;
    if (a % p == 0) throw NotAUnit();
    auto sh = shifts.modulus() == pn ? shifts : shifts.reduced(pn);
    return corr_sum_pp_literal(a, c % pn, sh, p, n, 0, false, engine);
}

SumValue corr_sum_pp_partial(u64 a, u64 c, const ShiftMultiset& shifts, u64 p, int n, u64 d,
                             Engine engine) {
    check_pp_args(p, n);
    if (shifts.total() == 0) throw EmptyCorrelation();
    u64 pn = pow_u64(p, n);
    a %= pn;
    if (a % p == 0) throw NotAUnit();
    auto sh = shifts.modulus() == pn ? shifts : shifts.reduced(pn);
    return corr_sum_pp_literal(a, c % pn, sh, p, n, d, true, engine);
}

namespace {

// Raw pieces of the decomposition, before the p^{(N+M)n/2} scale and the
// unimodular prefactor. The exact part is tracked unconditionally (orders
// here are small).
struct RawPiece {
    std::complex<double> approx;
    Cyclotomic exact;
};

RawPiece eps_zero_raw(const EpsContext& ctx, u64 a, u64 c, u64 phi0) {
    u64 p = ctx.p(), pn = ctx.pn();
    auto roots = expsum::root_table(pn);
    ComplexAccumulator acc;
    Cyclotomic cyc(pn);
    if (phi0 > 0) {
        auto Tred = ctx.shifts().reduced(p).support();
        for (u64 d = 0; d < p; ++d) {
            if (!diamond_test(d, a, Tred, p)) continue;
            for (u64 b = d; b < pn; b += p) {
                u64 e = mulmod(c, b, pn);
                acc.add((*roots)[e]);
                cyc.add_root(e);
            }
        }
    }
    return {acc.value() * static_cast<double>(phi0), cyc.scaled(static_cast<i64>(phi0))};
}

RawPiece stationary_raw(const EpsVector& eps, u64 a, u64 c) {
    const auto& ctx = *eps.ctx;
    u64 p = ctx.p(), pn = ctx.pn();
    const auto& supp = ctx.support();
    u64 inv2a = mod_inv(mulmod(2, a, pn), pn);
    u64 threea = mulmod(3, a, pn);
    auto roots = expsum::root_table(pn);

    std::vector<char> diamond(p);
    auto Tred = ctx.shifts().reduced(p).support();
    for (u64 d = 0; d < p; ++d) diamond[d] = diamond_test(d, a, Tred, p) ? 1 : 0;

    ComplexAccumulator acc;
    Cyclotomic cyc(pn);
    for (u64 b = 0; b < pn; ++b) {
        if (!diamond[b % p]) continue;
        u64 phase = mulmod(b, c, pn);
        for (size_t i = 0; i < supp.size(); ++i) {
            if (eps.values[i] == 0) continue;
            u64 arg = mulmod(inv2a, addmod(b, supp[i], pn), pn);
            u64 s = ctx.data().s(arg);
            phase =
                addmod(phase, mulmod(eps.values[i], mulmod(threea, mulmod(s, s, pn), pn), pn), pn);
        }
        acc.add((*roots)[phase]);
        cyc.add_root(phase);
    }
    return {acc.value(), std::move(cyc)};
}

u64 phi_of_zero(const EpsContext& ctx) {
    u64 phi0 = 0;
    for_each_tuple(ctx, [&](const std::vector<u64>& values) {
        bool zero = true;
        for (u64 v : values) zero &= (v == 0);
        if (zero) ++phi0;
    });
    return phi0;
}

}  // namespace

SumValue eps_zero_term(u64 a, u64 c, const ShiftMultiset& shifts, u64 p, int n, Engine engine) {
    auto ctx = EpsContext(p, n, shifts);
    u64 pn = ctx.pn();
    a %= pn;
    if (a % p == 0) throw NotAUnit();
    u64 phi0 = phi_of_zero(ctx);
    auto raw = eps_zero_raw(ctx, a, c % pn, phi0);
    size_t NM = shifts.total();
    double scale = std::pow(static_cast<double>(p), static_cast<double>(NM) * n / 2.0);
    SumValue out(raw.approx * scale);
    if (engine == Engine::Exact) {
        if ((NM * static_cast<size_t>(n)) % 2 != 0)
            throw ExactEngineOverflow("p^{(N+M)n/2} is irrational; no exact form at odd (N+M)n");
        if (pn > expsum::exact_order_cap()) throw ExactEngineOverflow();
        out.exact = raw.exact.scaled(static_cast<i64>(pow_u64(p, static_cast<int>(NM) * n / 2)));
    }
    return out;
}

SumValue diamond_exp_sum(u64 C, u64 a, const std::vector<u64>& Tred, u64 p, Engine engine) {
    if (p <= 3 || !modarith::is_prime(p)) throw SmallPrime();
    auto roots = expsum::root_table(p);
    ComplexAccumulator acc;
    bool exact = engine == Engine::Exact;
    Cyclotomic cyc(exact ? p : 1);
    for (u64 d = 0; d < p; ++d) {
        if (!diamond_test(d, a, Tred, p)) continue;
        u64 e = mulmod(d, C % p, p);
        acc.add((*roots)[e]);
        if (exact) cyc.add_root(e);
    }
    SumValue out(acc.value());
    if (exact) out.exact = std::move(cyc);
    return out;
}

SumValue stationary_sum_diamond(const EpsVector& eps, u64 a, u64 c, Engine engine) {
    if (eps.is_zero()) throw ZeroEps();
    u64 pn = eps.ctx->pn();
    a %= pn;
    if (a % eps.ctx->p() == 0) throw NotAUnit();
    auto raw = stationary_raw(eps, a, c % pn);
    SumValue out(raw.approx);
    if (engine == Engine::Exact) {
        if (pn > expsum::exact_order_cap()) throw ExactEngineOverflow();
        out.exact = std::move(raw.exact);
    }
    return out;
}

SumValue corr_sum_pp_reconstructed(u64 a, u64 c, const ShiftMultiset& shifts, u64 p, int n,
                                   Engine engine) {
    auto ctx = std::make_shared<const EpsContext>(p, n, shifts);
    u64 pn = ctx->pn();
    a %= pn;
    if (a % p == 0) throw NotAUnit();
    c %= pn;
    size_t N = shifts.N(), M = shifts.M();
    size_t NM = N + M;

    ComplexAccumulator facc;
    Cyclotomic cyc(pn);
    u64 phi0 = 0;
    for (auto& [eps, phi] : eps_spectrum(ctx)) {
        if (eps.is_zero()) {
            phi0 = phi;
            continue;
        }
        auto raw = stationary_raw(eps, a, c);
        facc.add(raw.approx * static_cast<double>(phi));
        cyc += raw.exact.scaled(static_cast<i64>(phi));
    }
    auto zero_raw = eps_zero_raw(*ctx, a, c, phi0);
    facc.add(zero_raw.approx);
    cyc += zero_raw.exact;

    // Prefactor (3a/p^n)^{N+M} eps_{p,n}^{N-M} together with the p^{(N+M)n/2}
    // scale. For odd n the factor sqrt(p) eps_{p,n} is the quadratic Gauss
    // sum mod p, which keeps the exact value inside Z[zeta_{p^n}].
    int jac = modarith::jacobi(static_cast<i64>(mulmod(3, a, pn)), pn);
    int jac_pow = (NM % 2 == 0) ? 1 : jac;
    int diff = static_cast<int>(N) - static_cast<int>(M);
    double scale = std::pow(static_cast<double>(p), static_cast<double>(NM) * n / 2.0);
    std::complex<double> epsc{1.0, 0.0};
    if (n % 2 != 0) {
        std::complex<double> e1 =
            (p % 4 == 1) ? std::complex<double>{1, 0} : std::complex<double>{0, 1};
        int k = ((diff % 4) + 4) % 4;
        epsc = std::pow(e1, k);
    }
    SumValue out(facc.value() * scale * static_cast<double>(jac_pow) * epsc);

    if (engine == Engine::Exact) {
        if (pn > expsum::exact_order_cap()) throw ExactEngineOverflow();
        int e0 = static_cast<int>(NM) * n / 2;
        int delta = static_cast<int>((NM * static_cast<size_t>(n)) % 2);
        int sign = 1;
        if (n % 2 != 0 && p % 4 == 3) {
            // eps^2 = -1; count the paired eps factors left after stripping
            // one into the Gauss sum when (N+M)n is odd.
            int pairs = delta == 0 ? diff / 2 : (diff - (diff > 0 ? 1 : -1)) / 2;
            if (std::abs(pairs) % 2 == 1) sign = -1;
        }
        Cyclotomic scaled = cyc.scaled(static_cast<i64>(pow_u64(p, e0)) * jac_pow * sign);
        if (delta == 1) {
            auto g = expsum::gauss_exact_at_order(p, n);
            scaled = scaled * (diff > 0 ? g : g.conj());
        }
        out.exact = std::move(scaled);
    }
    return out;
}

u64 ricroy_count(u64 w, int j, const std::vector<u64>& epsred, const std::vector<u64>& Tred,
                 u64 a, u64 p) {
    if (p <= 3 || !modarith::is_prime(p)) throw SmallPrime();
    if (j != 1 && j != 2) throw OutOfRange("j must be 1 or 2");
    if (epsred.size() != Tred.size()) throw OutOfRange("eps and support sizes differ");
    bool nonzero = false;
    for (u64 e : epsred) nonzero |= (e % p != 0);
    if (!nonzero) throw ZeroEps();
    a %= p;
    if (a == 0) throw NotAUnit();

    auto data = StationaryData::get(p, 1);
    u64 inv2a = mod_inv(mulmod(2, a, p), p);
    i64 raw_exp = 2 - 3 * static_cast<i64>(j);  // -1 or -4
    u64 expo = modarith::reduce_signed(raw_exp, p - 1);
    u64 count = 0;
    for (u64 d = 0; d < p; ++d) {
        if (!diamond_test(d, a, Tred, p)) continue;
        u64 sum = 0;
        for (size_t i = 0; i < Tred.size(); ++i) {
            u64 arg = mulmod(inv2a, addmod(d, Tred[i] % p, p), p);
            u64 s = data->s(arg);
            sum = addmod(sum, mulmod(epsred[i] % p, modarith::powmod(s, expo, p), p), p);
        }
        if (sum == w % p) ++count;
    }
    return count;
}

u64 vinogradov_J(u64 s, u64 k, u64 P) {
    if (s < 1 || k < 1 || P < 1) throw OutOfRange("s, k, P must be >= 1");
    double bits = 2.0 * static_cast<double>(s) * std::log2(static_cast<double>(P));
    if (bits > 40.0) throw BudgetExceeded("(2s) log2 P exceeds 40");
    if (static_cast<double>(k) * std::log2(static_cast<double>(P)) > 62.0)
        throw BudgetExceeded("P^k exceeds the 64-bit power-sum range");

    std::map<std::vector<u64>, u64> counts;
    std::vector<u64> x(s, 1);
    std::vector<u64> sums(k);
    while (true) {
        std::fill(sums.begin(), sums.end(), 0);
        for (u64 v : x) {
            u64 pw = 1;
            for (u64 jj = 0; jj < k; ++jj) {
                pw *= v;
                sums[jj] += pw;
            }
        }
        ++counts[sums];
        size_t i = 0;
        while (i < s && ++x[i] > P) x[i++] = 1;
        if (i == s) break;
    }
    u64 total = 0;
    for (auto& [key, cnt] : counts) total += cnt * cnt;
    return total;
}

PPClassification classify_pp(u64 p, int n, u64 c, const ShiftMultiset& shifts) {
    check_pp_args(p, n);
    u64 pn = pow_u64(p, n);
    auto sh = shifts.modulus() == pn ? shifts : shifts.reduced(pn);
    if (sh.total() == 0) throw EmptyCorrelation();
    c %= pn;
    size_t NM = sh.total();
    const auto& T = sh.support();

    PPClassification out{};
    double nm3 = 20.0 * static_cast<double>(NM) * NM * NM;
    out.rho = (static_cast<double>(p) <= 3.0 * static_cast<double>(T.size()) / 2.0 - 1.0 ? 1 : 0) +
              std::ceil(std::log(nm3) / std::log(static_cast<double>(p)));
    double big = std::pow(static_cast<double>(NM), 3.0) * std::pow(2.0, static_cast<double>(NM));
    out.large_n_regime = static_cast<double>(n) > big;

    out.separation_holds = true;
    if (T.size() >= 2) {
        double cap = 2.0 / (static_cast<double>(T.size()) * static_cast<double>(T.size())) *
                     (std::floor(std::ldexp(static_cast<double>(n), -static_cast<int>(T.size()))) -
                      out.rho);
        for (size_t i = 0; i < T.size(); ++i)
            for (size_t j = i + 1; j < T.size(); ++j) {
                u64 diffv = submod(T[i], T[j], pn);
                int val = diffv == 0 ? n : modarith::valuation(diffv, p);
                if (static_cast<double>(val) > cap) out.separation_holds = false;
            }
    }

    double base = static_cast<double>(NM + 2) * n / 2.0;
    bool mod3_ok = sh.mu_nu_equal_mod3();
    if (p % 3 == 2 && c == 0 && sh.mu_nu_equal()) {
        out.cls = PPClass::CaseI;
        out.bound_exponent = base;
    } else if (p % 3 == 1 && c == 0 && mod3_ok) {
        out.cls = PPClass::CaseII;
        out.bound_exponent = base;
    } else if (p % 3 == 1 && c != 0 && c % pow_u64(p, n - 1) == 0 && mod3_ok) {
        out.cls = PPClass::CaseIII;
        out.bound_exponent = base - 0.5;
    } else {
        out.cls = PPClass::Nondegenerate;
        if (out.large_n_regime)
            out.bound_exponent =
                base - (static_cast<double>(n) * std::ldexp(1.0, -static_cast<int>(NM)) - 1.0);
        else
            out.bound_exponent = base - 1.0 / (static_cast<double>(n) * n * (n - 1.0) * (n - 1.0));
    }
    return out;
}

}  // namespace k2lab::corrpp
