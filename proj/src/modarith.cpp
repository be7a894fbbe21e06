#include "k2lab/modarith.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

namespace k2lab::modarith {

namespace {

bool miller_rabin(u64 n, u64 a) {
    if (a % n == 0) return true;
    u64 d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < r; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

u64 pollard_rho(u64 n) {
    if ((n & 1) == 0) return 2;
    // Brent's cycle variant with batched gcds.
    for (u64 c = 1;; ++c) {
        u64 x = 2, y = 2, d = 1;
        u64 ys = y, q = 1;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return addmod(mulmod(v, v, n), c, n); };
        while (d == 1) {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            for (u64 k = 0; k < r && d == 1; k += m) {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                d = gcd_u64(q, n);
            }
            r <<= 1;
        }
        if (d == n) {
            d = 1;
            do {
                ys = f(ys);
                d = gcd_u64(x > ys ? x - ys : ys - x, n);
            } while (d == 1);
        }
        if (d != n) return d;
    }
}

void factor_rec(u64 n, std::map<u64, int>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    u64 d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    // Deterministic witness set for n < 2^64.
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (!miller_rabin(n, a)) return false;
    }
    return true;
}

u64 mod_inv(u64 x, u64 Q) {
    if (Q == 1) return 0;
    x %= Q;
    i64 old_r = static_cast<i64>(Q), r = static_cast<i64>(x);
    i64 old_t = 0, t = 1;
    while (r) {
        i64 q = old_r / r;
        old_r -= q * r;
        std::swap(old_r, r);
        old_t -= q * t;
        std::swap(old_t, t);
    }
    if (old_r != 1) throw NotAUnit();
    return reduce_signed(old_t, Q);
}

int jacobi(i64 a, u64 n) {
    if (n == 0 || n % 2 == 0) throw EvenModulus();
    u64 x = reduce_signed(a, n);
    u64 y = n;
    int j = 1;
    while (x != 0) {
        while ((x & 1) == 0) {
            x >>= 1;
            u64 m8 = y & 7;
            if (m8 == 3 || m8 == 5) j = -j;
        }
        std::swap(x, y);
        if ((x & 3) == 3 && (y & 3) == 3) j = -j;
        x %= y;
    }
    return y == 1 ? j : 0;
}

FactoredModulus factorize(u64 n) {
    std::map<u64, int> m;
    factor_rec(n, m);
    FactoredModulus out;
    out.value = n;
    out.factors.assign(m.begin(), m.end());
    return out;
}

u64 euler_phi(const FactoredModulus& q) {
    u64 r = 1;
    for (auto& [p, e] : q.factors) {
        r *= p - 1;
        for (int i = 1; i < e; ++i) r *= p;
    }
    return r;
}

std::vector<u64> divisors(const FactoredModulus& q) {
    std::vector<u64> out{1};
    for (auto& [p, e] : q.factors) {
        size_t base = out.size();
        u64 pw = 1;
        for (int i = 1; i <= e; ++i) {
            pw *= p;
            for (size_t j = 0; j < base; ++j) out.push_back(out[j] * pw);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

u64 pow_u64(u64 p, int k) {
    u64 r = 1;
    while (k--) r *= p;
    return r;
}

// Smallest cube root of c mod p for every unit cube c, 0 elsewhere.
// Cached per prime.
const std::vector<u64>& cube_root_table(u64 p) {
    static std::map<u64, std::vector<u64>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    std::vector<u64> tab(p, 0);
    for (u64 x = 1; x < p; ++x) {
        u64 c = mulmod(mulmod(x, x, p), x, p);
        if (tab[c] == 0) tab[c] = x;  // ascending x, first hit is smallest
    }
    return cache.emplace(p, std::move(tab)).first->second;
}

}  // namespace

u64 hensel_cube_root(u64 r, u64 root0, u64 p, int m) {
    // Lift digit by digit: y <- y + t*p^k with 3y^2 t = (r - y^3)/p^k (mod p).
    u64 pk = p;
    u64 y = root0 % p;
    u64 pm = pow_u64(p, m);
    for (int k = 1; k < m; ++k) {
        u64 pk1 = pk * p;
        u64 y3 = mulmod(mulmod(y, y, pk1), y, pk1);
        u64 diff = submod(r % pk1, y3, pk1);
        u64 t = mulmod(diff / pk, mod_inv(mulmod(3 % p, mulmod(y, y, p), p), p), p);
        y = (y + u128(t) * pk % pk1) % pk1;
        pk = pk1;
    }
    return y % pm;
}

std::set<u64> cube_roots(u64 r, u64 p, int m) {
    if (p <= 3) throw SmallPrime();
    if (m < 1) throw BadExponent("cube_roots requires m >= 1");
    u64 pm = pow_u64(p, m);
    r %= pm;
    if (r % p == 0) throw NonUnitTarget();
    std::set<u64> out;
    if (p % 3 == 2) {
        // Cubing is a bijection on units mod p^k; invert the exponent.
        u64 phi = pm / p * (p - 1);
        u64 e = mod_inv(3 % phi, phi);
        out.insert(powmod(r, e, pm));
        return out;
    }
    const auto& tab = cube_root_table(p);
    u64 base = tab[r % p];
    if (base == 0) return out;  // not a cube mod p
    u64 y = hensel_cube_root(r, base, p, m);
    u64 u0 = hensel_cube_root(1, *primitive_cube_root(p, 1), p, m);
    out.insert(y);
    out.insert(mulmod(y, u0, pm));
    out.insert(mulmod(y, mulmod(u0, u0, pm), pm));
    return out;
}

std::optional<u64> primitive_cube_root(u64 p, int m) {
    if (p <= 3) throw SmallPrime();
    if (p % 3 == 2) return std::nullopt;
    static std::map<u64, u64> base_cache;
    static std::mutex mu;
    u64 u;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = base_cache.find(p);
        if (it != base_cache.end()) {
            u = it->second;
        } else {
            u = 0;
            for (u64 x = 2; x < p; ++x) {
                if (mulmod(mulmod(x, x, p), x, p) == 1) {
                    u = x;
                    break;
                }
            }
            base_cache[p] = u;
        }
    }
    if (m == 1) return u;
    // The three cube roots of 1 mod p^m are 1 and the lifts of u, u^2.
    u64 a = hensel_cube_root(1, u, p, m);
    u64 b = hensel_cube_root(1, mulmod(u, u, p), p, m);
    return std::min(a, b);
}

int binom23_valuation(u64 j, u64 p) {
    if (p <= 3) throw SmallPrime();
    if (j == 0) return 0;
    int num = 0;
    for (u64 l = 1; l + 1 <= j; ++l) {
        u64 f = 3 * l - 2;
        while (f % p == 0) {
            f /= p;
            ++num;
        }
    }
    int den = 0;  // Legendre
    for (u64 q = p; q <= j; q *= p) {
        den += static_cast<int>(j / q);
        if (q > j / p) break;
    }
    return num - den;
}

int u0_comb_valuation(i64 a1, i64 a2, i64 a3, u64 p, int m) {
    auto u0 = primitive_cube_root(p, m);
    if (!u0) throw NoPrimitiveRoot();
    u64 pm = pow_u64(p, m);
    u64 u = *u0;
    u64 v = addmod(reduce_signed(a1, pm),
                   addmod(mulmod(reduce_signed(a2, pm), u, pm),
                          mulmod(reduce_signed(a3, pm), mulmod(u, u, pm), pm), pm),
                   pm);
    if (v == 0) return m;
    int val = 0;
    while (v % p == 0) {
        v /= p;
        ++val;
    }
    return std::min(val, m);
}

BranchTable::BranchTable(u64 p, int m, int lift_precision)
    : p_(p), m_(m), n_(lift_precision) {
    if (p <= 3) throw SmallPrime();
    if (m < 1 || lift_precision < m) throw BadExponent("BranchTable needs 1 <= m <= lift_precision");
    pk_.resize(n_ + 1);
    pk_[0] = 1;
    for (int k = 1; k <= n_; ++k) pk_[k] = pk_[k - 1] * p;
    if (p % 3 == 1) {
        u64 u_base = *primitive_cube_root(p, 1);
        u0_base_ = hensel_cube_root(1, u_base, p, m);
        u0_lift_ = hensel_cube_root(1, u_base, p, n_);
    }
    root_mod_p_ = cube_root_table(p);
    memo_.resize(n_ + 1);
}

u64 BranchTable::u0() const {
    if (!u0_base_) throw NoPrimitiveRoot();
    return *u0_base_;
}

u64 BranchTable::u0_lifted() const {
    if (!u0_lift_) throw NoPrimitiveRoot();
    return *u0_lift_;
}

bool BranchTable::is_cube_class(u64 r) const {
    u64 c = r % p_;
    return c != 0 && root_mod_p_[c] != 0;
}

u64 BranchTable::base_root(u64 c) const {
    c %= p_;
    if (c == 0 || root_mod_p_[c] == 0) throw OutsideDiamond();
    return root_mod_p_[c];
}

u64 BranchTable::s(u64 r, int k) const {
    if (k < 1 || k > n_) throw BadExponent("branch precision out of range");
    r %= pk_[k];
    auto& memo = memo_[k];
    auto it = memo.find(r);
    if (it != memo.end()) return it->second;
    u64 y = hensel_cube_root(r, base_root(r), p_, k);
    memo.emplace(r, y);
    return y;
}

}  // namespace k2lab::modarith
