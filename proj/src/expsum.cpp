#include "k2lab/expsum.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace k2lab::expsum {

using modarith::mod_inv;
using modarith::mulmod;
using modarith::reduce_signed;
using modarith::u128;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

u64 pow_u64(u64 p, int k) {
    u64 r = 1;
    while (k--) r *= p;
    return r;
}

std::complex<double> eps_pn(u64 p, int n) {
    if (n % 2 == 0) return {1.0, 0.0};
    // i^((p-1)^2/4): 1 for p = 1 (mod 4), i for p = 3 (mod 4).
    return (p % 4 == 1) ? std::complex<double>{1.0, 0.0} : std::complex<double>{0.0, 1.0};
}

bool exact_requested(Engine engine, u64 order) {
    if (engine != Engine::Exact) return false;
    if (order > exact_order_cap()) throw ExactEngineOverflow();
    return true;
}

}  // namespace

std::shared_ptr<const std::vector<std::complex<double>>> root_table(u64 Q) {
    static std::map<u64, std::shared_ptr<const std::vector<std::complex<double>>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(Q);
    if (it != cache.end()) return it->second;
    auto tab = std::make_shared<std::vector<std::complex<double>>>(Q);
    for (u64 k = 0; k < Q; ++k) {
        double t = kTau * static_cast<double>(k) / static_cast<double>(Q);
        (*tab)[k] = {std::cos(t), std::sin(t)};
    }
    cache.emplace(Q, tab);
    return tab;
}

SumValue root_of_unity(i64 x, u64 Q, Engine engine) {
    if (Q == 0) throw OutOfRange("order must be positive");
    u64 e = reduce_signed(x, Q);
    double t = kTau * static_cast<double>(e) / static_cast<double>(Q);
    SumValue v(std::complex<double>{std::cos(t), std::sin(t)});
    if (exact_requested(engine, Q)) v.exact = Cyclotomic::root(Q, e);
    return v;
}

Cyclotomic gauss_exact_at_order(u64 p, int n) {
    u64 pn = pow_u64(p, n);
    u64 scale = pn / p;
    Cyclotomic g(pn);
    for (u64 z = 0; z < p; ++z) g.add_root(mulmod(z, z, p) * scale);
    return g;
}

SumValue gauss_quadratic(u64 p, Engine engine) {
    if (p < 3 || !modarith::is_prime(p)) throw OutOfRange("p must be an odd prime");
    auto roots = root_table(p);
    ComplexAccumulator acc;
    for (u64 x = 0; x < p; ++x) acc.add((*roots)[mulmod(x, x, p)]);
    SumValue v(acc.value());
    if (exact_requested(engine, p)) v.exact = gauss_exact_at_order(p, 1);
    return v;
}

SumValue k2_direct(u64 A, u64 B, u64 Q, Engine engine) {
    if (Q == 0) throw OutOfRange("modulus must be positive");
    if (Q == 1) {
        SumValue v(std::complex<double>{1.0, 0.0});
        if (exact_requested(engine, 1)) v.exact = Cyclotomic::integer(1, 1);
        return v;
    }
    A %= Q;
    B %= Q;
    if (std::gcd(A, Q) != 1) throw NotAUnit();
    bool exact = exact_requested(engine, Q);
    auto roots = root_table(Q);
    ComplexAccumulator acc;
    Cyclotomic c(exact ? Q : 1);
    for (u64 x = 1; x < Q; ++x) {
        if (std::gcd(x, Q) != 1) continue;
        u64 xi = mod_inv(x, Q);
        u64 e = modarith::addmod(mulmod(A, mulmod(xi, xi, Q), Q), mulmod(B, x, Q), Q);
        acc.add((*roots)[e]);
        if (exact) c.add_root(e);
    }
    SumValue v(acc.value());
    if (exact) v.exact = std::move(c);
    return v;
}

SumValue k2_explicit(u64 a, u64 b, u64 p, int n, Engine engine) {
    if (p <= 3 || !modarith::is_prime(p)) throw SmallPrime();
    if (n < 2) throw BadExponent("stationary-phase formula needs n >= 2");
    u64 pn = pow_u64(p, n);
    a %= pn;
    b %= pn;
    if (a % p == 0) throw NotAUnit();
    bool exact = exact_requested(engine, pn);

    // No unit critical point when p | b.
    if (b % p == 0) return SumValue::zero(exact ? Engine::Exact : Engine::Float, pn);

    u64 target = mulmod(mod_inv(mulmod(2, a, pn), pn), b, pn);  // (2a)^-1 b mod p^n
    std::vector<u64> lifts;
    if (p % 3 == 2) {
        u64 phi = pn / p * (p - 1);
        lifts.push_back(modarith::powmod(target, mod_inv(3 % phi, phi), pn));
    } else {
        auto base_roots = modarith::cube_roots(target % p, p, 1);
        if (base_roots.empty()) return SumValue::zero(exact ? Engine::Exact : Engine::Float, pn);
        u64 y0 = modarith::hensel_cube_root(target, *base_roots.begin(), p, n);
        u64 u0 = modarith::hensel_cube_root(1, *modarith::primitive_cube_root(p, 1), p, n);
        lifts = {y0, mulmod(y0, u0, pn), mulmod(y0, mulmod(u0, u0, pn), pn)};
    }

    int jac = modarith::jacobi(static_cast<i64>(mulmod(3, a, pn)), pn);
    u64 threea = mulmod(3, a, pn);
    std::vector<u64> exps;
    exps.reserve(lifts.size());
    for (u64 y : lifts) exps.push_back(mulmod(threea, mulmod(y, y, pn), pn));

    auto roots = root_table(pn);
    std::complex<double> s = 0;
    for (u64 e : exps) s += (*roots)[e];
    double scale = std::pow(static_cast<double>(p), n / 2.0);
    SumValue v(static_cast<double>(jac) * scale * eps_pn(p, n) * s);

    if (exact) {
        Cyclotomic crit(pn);
        for (u64 e : exps) crit.add_root(e);
        if (n % 2 == 0) {
            v.exact = crit.scaled(jac * static_cast<i64>(pow_u64(p, n / 2)));
        } else {
            // p^{1/2} eps_{p,n} is the quadratic Gauss sum mod p, kept exact.
            v.exact = (gauss_exact_at_order(p, n) * crit)
                          .scaled(jac * static_cast<i64>(pow_u64(p, (n - 1) / 2)));
        }
    }
    return v;
}

namespace {

SumValue k2_prime_power(u64 A, u64 B, u64 p, int nu, Engine engine) {
    if (p > 3 && nu >= 2) return k2_explicit(A, B, p, nu, engine);
    return k2_direct(A, B, pow_u64(p, nu), engine);
}

}  // namespace

SumValue k2_eval(u64 A, u64 B, const FactoredModulus& Q, Engine engine) {
    u64 q = Q.value;
    if (q == 1) return k2_direct(A, B, 1, engine);
    A %= q;
    B %= q;
    if (std::gcd(A, q) != 1) throw NotAUnit();
    if (engine == Engine::Exact && q > exact_order_cap()) throw ExactEngineOverflow();
    SumValue out;
    bool first = true;
    for (auto& [p, nu] : Q.factors) {
        u64 m = pow_u64(p, nu);
        u64 cof = q / m;
        u64 c = cof == 1 ? 1 : mod_inv(cof % m, m);
        SumValue f = k2_prime_power(mulmod(c, A, m), mulmod(c, B % m, m), p, nu, engine);
        if (f.exact && f.exact->order() != q) f.exact = f.exact->lifted(q);
        out = first ? f : out * f;
        first = false;
    }
    return out;
}

SumValue k2_eval(u64 A, u64 B, u64 Q, Engine engine) {
    return k2_eval(A, B, modarith::factorize(Q), engine);
}

CrtSplit k2_crt_split(u64 A, u64 B, u64 m1, u64 m2, Engine engine) {
    if (std::gcd(m1, m2) != 1) throw NotCoprime();
    u64 Q = m1 * m2;
    if (std::gcd(A % Q, Q) != 1) throw NotAUnit();
    u64 r2 = m1 == 1 ? 0 : mod_inv(m2 % m1, m1);  // r2 = m2^{-1} mod m1
    u64 r1 = m2 == 1 ? 0 : mod_inv(m1 % m2, m2);  // r1 = m1^{-1} mod m2
    CrtSplit out;
    out.factor1 = k2_eval(mulmod(r2, A % m1, m1), mulmod(r2, B % m1, m1), m1, engine);
    out.factor2 = k2_eval(mulmod(r1, A % m2, m2), mulmod(r1, B % m2, m2), m2, engine);
    out.full = k2_eval(A % Q, B % Q, Q, engine);
    if (out.factor1.exact) out.factor1.exact = out.factor1.exact->lifted(Q);
    if (out.factor2.exact) out.factor2.exact = out.factor2.exact->lifted(Q);
    return out;
}

K2Table::K2Table(u64 A, const FactoredModulus& Q, Build mode) : q_(Q.value) {
    A %= q_;
    if (q_ == 1) {
        vals_.assign(1, {1.0, 0.0});
        return;
    }
    if (std::gcd(A, q_) != 1) throw NotAUnit();
    vals_.assign(q_, {0.0, 0.0});

    auto direct_fill = [](std::vector<std::complex<double>>& vals, u64 A0, u64 q) {
        auto roots = root_table(q);
        for (u64 x = 1; x < q; ++x) {
            if (std::gcd(x, q) != 1) continue;
            u64 xi = mod_inv(x, q);
            u64 idx = mulmod(A0, mulmod(xi, xi, q), q);
            for (u64 b = 0; b < q; ++b) {
                vals[b] += (*roots)[idx];
                idx += x;
                if (idx >= q) idx -= q;
            }
        }
    };

    if (mode == Build::Direct || Q.factors.size() == 1u) {
        if (mode == Build::Multiplicative && Q.factors[0].first > 3 && Q.factors[0].second >= 2) {
            auto& [p, nu] = Q.factors[0];
            for (u64 b = 0; b < q_; ++b) vals_[b] = k2_explicit(A, b, p, nu, Engine::Float).approx;
        } else {
            direct_fill(vals_, A, q_);
        }
        return;
    }

    // Multiplicative assembly from prime-power tables.
    for (auto& v : vals_) v = {1.0, 0.0};
    for (auto& [p, nu] : Q.factors) {
        u64 m = pow_u64(p, nu);
        u64 cof = q_ / m;
        u64 c = mod_inv(cof % m, m);
        std::vector<std::complex<double>> tab(m);
        if (p > 3 && nu >= 2) {
            u64 Am = mulmod(c, A % m, m);
            for (u64 y = 0; y < m; ++y) tab[y] = k2_explicit(Am, mulmod(c, y, m), p, nu, Engine::Float).approx;
        } else {
            std::vector<std::complex<double>> base(m, {0.0, 0.0});
            direct_fill(base, mulmod(c, A % m, m), m);
            for (u64 y = 0; y < m; ++y) tab[y] = base[mulmod(c, y, m)];
        }
        for (u64 b = 0; b < q_; ++b) vals_[b] *= tab[b % m];
    }
}

}  // namespace k2lab::expsum
