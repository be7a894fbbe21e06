#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "k2lab/errors.hpp"

namespace k2lab::modarith {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i64 = std::int64_t;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

inline u64 addmod(u64 a, u64 b, u64 m) {
    a %= m;
    b %= m;
    u64 s = a + b;
    if (s < a || s >= m) s -= m;
    return s;
}

inline u64 submod(u64 a, u64 b, u64 m) {
    a %= m;
    b %= m;
    return a >= b ? a - b : a + (m - b);
}

inline u64 powmod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

inline u64 gcd_u64(u64 a, u64 b) {
    while (b) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Reduce a (possibly negative) integer into [0, m).
inline u64 reduce_signed(i64 x, u64 m) {
    i64 r = x % static_cast<i64>(m);
    if (r < 0) r += static_cast<i64>(m);
    return static_cast<u64>(r);
}

// p-adic valuation of a machine integer, with x != 0.
inline int valuation(u64 x, u64 p) {
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

bool is_prime(u64 n);

/// Modular inverse of x mod Q. Throws NotAUnit when gcd(x, Q) > 1.
u64 mod_inv(u64 x, u64 Q);

/// Jacobi symbol (a/n) for odd n >= 1. Throws EvenModulus.
int jacobi(i64 a, u64 n);

// ---------------------------------------------------------------------------
// FactoredModulus: a modulus together with its certified factorization.
// ---------------------------------------------------------------------------
struct FactoredModulus {
    u64 value = 1;
    std::vector<std::pair<u64, int>> factors;  // (prime, exponent), primes ascending

    bool is_squarefree() const {
        for (auto& [p, e] : factors)
            if (e > 1) return false;
        return true;
    }
    int omega() const { return static_cast<int>(factors.size()); }
    u64 radical() const {
        u64 r = 1;
        for (auto& [p, e] : factors) r *= p;
        return r;
    }
    int nu(u64 p) const {
        for (auto& [q, e] : factors)
            if (q == p) return e;
        return 0;
    }
};

/// Full factorization of n, 1 <= n <= 2^63 - 1 (n = 1 gives an empty list).
FactoredModulus factorize(u64 n);

u64 euler_phi(const FactoredModulus& q);
inline u64 euler_phi(u64 n) { return euler_phi(factorize(n)); }

/// All divisors of q, ascending.
std::vector<u64> divisors(const FactoredModulus& q);

// ---------------------------------------------------------------------------
// Cube roots modulo prime powers (p > 3 throughout).
// ---------------------------------------------------------------------------

/// Solution set of y^3 = r (mod p^m) over units, p > 3, gcd(r, p) = 1.
/// Cardinality is 0, 1 or 3; it is 1 whenever p = 2 (mod 3).
/// Throws NonUnitTarget when p | r.
std::set<u64> cube_roots(u64 r, u64 p, int m);

/// Smallest primitive cube root of unity mod p^m, or absent when p = 2 (mod 3).
std::optional<u64> primitive_cube_root(u64 p, int m);

/// The unique cube root of r mod p^m that reduces to root0 mod p
/// (root0^3 = r mod p, p > 3, gcd(r, p) = 1).
u64 hensel_cube_root(u64 r, u64 root0, u64 p, int m);

/// nu_p of the rational binomial coefficient binom(2/3, j), p > 3, j >= 0.
/// Computed as nu_p(prod_{1<=l<=j-1}(3l-2)) - nu_p(j!), both terms exact.
int binom23_valuation(u64 j, u64 p);

/// min(m, nu_p(a1 + a2*u0 + a3*u0^2)) with u0 = primitive_cube_root(p, m).
/// Throws NoPrimitiveRoot when p = 2 (mod 3).
int u0_comb_valuation(i64 a1, i64 a2, i64 a3, u64 p, int m);

// ---------------------------------------------------------------------------
// BranchTable: the fixed cube-root branch s(.) and the chosen primitive
// cube root u0 for one prime power p^m, Hensel-lifted to precision p^n.
//
// Branch convention: s(r) lifts the numerically smallest cube root of
// (r mod p); this forces s(1) = 1 and makes every evaluation deterministic.
// u0 is the lift of the smallest primitive cube root mod p.
// ---------------------------------------------------------------------------
class BranchTable {
  public:
    /// p > 3, 1 <= m <= lift_precision.
    BranchTable(u64 p, int m, int lift_precision);

    u64 p() const { return p_; }
    int m() const { return m_; }
    int lift_precision() const { return n_; }

    bool has_u0() const { return u0_base_.has_value(); }
    /// u0 at base precision p^m. Throws NoPrimitiveRoot if p = 2 (mod 3).
    u64 u0() const;
    /// u0 at full precision p^n.
    u64 u0_lifted() const;
    /// 1 for p = 2 (mod 3), 3 for p = 1 (mod 3).
    int cube_root_count() const { return has_u0() ? 3 : 1; }

    /// True iff r mod p is the cube of a unit.
    bool is_cube_class(u64 r) const;

    /// Branch value s(r) at precision p^k (m <= k <= lift_precision is not
    /// required; any 1 <= k <= lift_precision works). r must reduce to a unit
    /// cube mod p; throws OutsideDiamond otherwise.
    u64 s(u64 r, int k) const;
    u64 s(u64 r) const { return s(r, m_); }
    u64 s_lifted(u64 r) const { return s(r, n_); }

    /// Smallest cube root of c mod p (c a unit cube), from the cached table.
    u64 base_root(u64 c) const;

  private:
    u64 p_;
    int m_, n_;
    std::vector<u64> pk_;                 // pk_[k] = p^k, k <= n_
    std::optional<u64> u0_base_, u0_lift_;
    std::vector<u64> root_mod_p_;         // smallest cube root per residue mod p, 0 = none
    mutable std::vector<std::map<u64, u64>> memo_;  // per precision k
};

}  // namespace k2lab::modarith
