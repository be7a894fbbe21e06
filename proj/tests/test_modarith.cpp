#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "k2lab/modarith.hpp"
#include "k2lab/rng.hpp"

using namespace k2lab;
using namespace k2lab::modarith;

namespace {

// Independent oracle: brute-force inverse.
std::optional<u64> inv_brute(u64 x, u64 Q) {
    for (u64 y = 0; y < Q; ++y)
        if (mulmod(x % Q, y, Q) == 1 % Q) return y;
    return std::nullopt;
}

// Independent oracle: brute-force cube roots over units mod p^m.
std::set<u64> cube_roots_brute(u64 r, u64 p, int m) {
    u64 pm = 1;
    for (int i = 0; i < m; ++i) pm *= p;
    std::set<u64> out;
    for (u64 y = 1; y < pm; ++y) {
        if (y % p == 0) continue;
        if (mulmod(mulmod(y, y, pm), y, pm) == r % pm) out.insert(y);
    }
    return out;
}

// Exact rational binom(2/3, j) as (num, den) in lowest terms, via __int128.
std::pair<__int128, __int128> binom23_exact(int j) {
    __int128 num = 1, den = 1;
    for (int l = 0; l < j; ++l) {
        num *= 2 - 3 * l;           // (2/3 - l) = (2 - 3l)/3
        den *= 3 * (l + 1);         // times 1/(l+1)
    }
    return {num, den};
}

int val128(__int128 x, u64 p) {
    if (x < 0) x = -x;
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

}  // namespace

TEST_CASE("factorize basics") {
    auto f = factorize(25);
    REQUIRE(f.factors.size() == 1);
    CHECK(f.factors[0] == std::pair<u64, int>{5, 2});

    auto g = factorize(30030);
    std::vector<std::pair<u64, int>> want{{2, 1}, {3, 1}, {5, 1}, {7, 1}, {11, 1}, {13, 1}};
    CHECK(g.factors == want);

    CHECK(factorize(1).factors.empty());
    CHECK(factorize(1).value == 1);
}

TEST_CASE("factorize reconstructs value and certifies primes") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        u64 n = rng.in(1, 1'000'000'000ULL);
        auto f = factorize(n);
        u64 prod = 1;
        u64 last = 0;
        for (auto& [p, e] : f.factors) {
            CHECK(p > last);
            last = p;
            CHECK(is_prime(p));
            for (int k = 0; k < e; ++k) prod *= p;
        }
        CHECK(prod == n);
    }
    // A 63-bit semiprime exercises the rho path.
    u64 a = 2147483647ULL, b = 2305843009ULL;
    auto f = factorize(a * b);
    REQUIRE(f.factors.size() == 2);
    CHECK(f.factors[0].first == a);
}

TEST_CASE("mod_inv") {
    CHECK(mod_inv(3, 5) == 2);
    CHECK(mod_inv(2, 25) == 13);
    CHECK_THROWS_AS(mod_inv(5, 25), NotAUnit);

    Rng rng(42);
    for (int i = 0; i < 300; ++i) {
        u64 Q = rng.in(2, 400);
        u64 x = rng.in(0, Q - 1);
        auto want = inv_brute(x, Q);
        if (std::gcd(x, Q) == 1) {
            u64 got = mod_inv(x, Q);
            CHECK(got == *want);
            CHECK(mulmod(x, got, Q) == 1 % Q);
        } else {
            CHECK_THROWS_AS(mod_inv(x, Q), NotAUnit);
        }
    }
}

TEST_CASE("jacobi against residue-table oracles") {
    CHECK(jacobi(3, 25) == 1);
    // QR table mod 5: squares are {1,4}.
    CHECK(jacobi(2, 5) == -1);
    for (i64 a = 0; a < 5; ++a) {
        bool qr = (a == 1 || a == 4);
        CHECK(jacobi(a, 5) == (a == 0 ? 0 : (qr ? 1 : -1)));
    }
    // Euler criterion oracle: (3/7) = 3^3 mod 7 = 6 = -1, so (3/343) = (-1)^3.
    CHECK(powmod(3, 3, 7) == 6);
    CHECK(jacobi(3, 343) == -1);

    CHECK_THROWS_AS(jacobi(1, 4), EvenModulus);
}

TEST_CASE("jacobi multiplicativity and squares") {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        u64 n = 2 * rng.in(1, 700) + 1;
        i64 a = static_cast<i64>(rng.in(0, 2000)) - 1000;
        i64 b = static_cast<i64>(rng.in(0, 2000)) - 1000;
        CHECK(jacobi(a * b, n) == jacobi(a, n) * jacobi(b, n));
        u64 m = 2 * rng.in(1, 700) + 1;
        CHECK(jacobi(a, n * m) == jacobi(a, n) * jacobi(a, m));
        if (std::gcd(reduce_signed(a, n), n) == 1) CHECK(jacobi(a * a, n) == 1);
    }
}

TEST_CASE("cube_roots examples") {
    CHECK(cube_roots(1, 7, 1) == std::set<u64>{1, 2, 4});
    CHECK(cube_roots(13, 5, 2) == std::set<u64>{17});
    CHECK(mulmod(mulmod(17, 17, 25), 17, 25) == 13);
    CHECK(cube_roots(2, 7, 1).empty());
    CHECK_THROWS_AS(cube_roots(7, 7, 1), NonUnitTarget);
}

TEST_CASE("cube_roots against brute force") {
    for (u64 p : {5ULL, 7ULL, 11ULL, 13ULL}) {
        for (int m = 1; m <= 3; ++m) {
            u64 pm = 1;
            for (int i = 0; i < m; ++i) pm *= p;
            if (pm > 2200) continue;
            for (u64 r = 1; r < pm; ++r) {
                if (r % p == 0) continue;
                auto got = cube_roots(r, p, m);
                CHECK(got == cube_roots_brute(r, p, m));
                if (p % 3 == 2) CHECK(got.size() == 1);
                else CHECK((got.empty() || got.size() == 3));
            }
        }
    }
}

TEST_CASE("cube root lifting consistency") {
    // Roots mod p^{m+1} reduce to roots mod p^m; each root mod p^m has a
    // unique lift.
    for (u64 p : {5ULL, 7ULL, 13ULL}) {
        for (int m = 1; m <= 3; ++m) {
            u64 pm = 1;
            for (int i = 0; i < m; ++i) pm *= p;
            u64 pm1 = pm * p;
            for (u64 r = 1; r < std::min<u64>(pm1, 300); ++r) {
                if (r % p == 0) continue;
                auto lo = cube_roots(r % pm, p, m);
                auto hi = cube_roots(r, p, m + 1);
                for (u64 y : hi) CHECK(lo.count(y % pm) == 1);
                for (u64 y : lo) {
                    int lifts = 0;
                    for (u64 z : hi)
                        if (z % pm == y) ++lifts;
                    if (!lo.empty()) CHECK(lifts == (hi.empty() ? 0 : 1));
                }
                CHECK((hi.empty() == lo.empty()));
            }
        }
    }
}

TEST_CASE("primitive_cube_root") {
    CHECK(primitive_cube_root(7, 1) == 2);
    CHECK(!primitive_cube_root(5, 3).has_value());
    CHECK(primitive_cube_root(7, 2) == 18);
    CHECK(powmod(18, 3, 49) == 1);

    // Oracle: brute force smallest nontrivial cube root of 1 mod p^m.
    for (u64 p : {7ULL, 13ULL, 19ULL}) {
        for (int m = 1; m <= 2; ++m) {
            u64 pm = 1;
            for (int i = 0; i < m; ++i) pm *= p;
            u64 smallest = 0;
            for (u64 x = 2; x < pm; ++x) {
                if (mulmod(mulmod(x, x, pm), x, pm) == 1) {
                    smallest = x;
                    break;
                }
            }
            CHECK(primitive_cube_root(p, m) == smallest);
        }
    }
}

TEST_CASE("binom23_valuation") {
    CHECK(binom23_valuation(1, 5) == 0);
    CHECK(binom23_valuation(4, 7) == 1);   // binom(2/3,4) = -7/243
    CHECK(binom23_valuation(2, 7) == 0);   // -1/9
    CHECK(binom23_valuation(0, 11) == 0);

    auto [n4, d4] = binom23_exact(4);
    CHECK(val128(n4, 7) - val128(d4, 7) == 1);

    for (u64 p : {5ULL, 7ULL, 11ULL, 13ULL, 19ULL}) {
        for (int j = 0; j <= 20; ++j) {
            auto [num, den] = binom23_exact(j);
            CHECK(binom23_valuation(j, p) == val128(num, p) - val128(den, p));
        }
    }
}

TEST_CASE("binom23_valuation relaxed threshold") {
    // The tight indicator 1_{p <= 3k/2-1} fails at (j,p) = (4,7): the factor
    // 3*3-2 = 7 appears although 7 > 3*4/2-1. The relaxed indicator
    // 1_{p <= 3k-2} captures the first p = 3l-2 hit, and holds until p^2
    // divides a single factor: at p = 7 that is 3*17-2 = 49, so the maximal
    // valuation reaches 2 from j = 18 on. Both facts are pinned here.
    CHECK(binom23_valuation(4, 7) == 1);
    CHECK(binom23_valuation(18, 7) == 2);
    for (u64 p : {5ULL, 7ULL, 11ULL, 13ULL, 31ULL, 61ULL, 97ULL}) {
        u64 second_hit = (p * p + 2) / 3 + 1;  // first j with a p^2 factor
        for (u64 k = 1; k <= 25 && k < second_hit; ++k) {
            int maxval = 0;
            for (u64 j = 0; j <= k; ++j) maxval = std::max(maxval, binom23_valuation(j, p));
            CHECK(maxval <= (p <= 3 * k - 2 ? 1 : 0));
        }
    }
}

TEST_CASE("binom23_valuation numerator term dominates") {
    for (u64 p : {5ULL, 7ULL, 13ULL}) {
        for (u64 j = 0; j <= 25; ++j) {
            int num = 0;
            for (u64 l = 1; l + 1 <= j; ++l) {
                u64 f = 3 * l - 2;
                while (f % p == 0) {
                    f /= p;
                    ++num;
                }
            }
            CHECK(binom23_valuation(j, p) <= num);
        }
    }
}

TEST_CASE("u0_comb_valuation") {
    CHECK(u0_comb_valuation(1, 1, 1, 7, 2) == 2);  // 1 + u0 + u0^2 = 0
    CHECK(u0_comb_valuation(1, 0, 0, 7, 2) == 0);
    CHECK(u0_comb_valuation(2, 1, 0, 7, 1) == 0);  // u0 = 2, value 4 mod 7
    CHECK_THROWS_AS(u0_comb_valuation(1, 2, 3, 5, 2), NoPrimitiveRoot);
}

TEST_CASE("valuation separation bound (exhaustive small grid)") {
    for (u64 p : {7ULL, 13ULL}) {
        for (int m = 1; m <= 6; ++m) {
            double pm_half = std::pow(static_cast<double>(p), m / 2.0);
            for (int D = 1; D <= 3; ++D) {
                if (pm_half <= 20.0 * D * D * D) continue;
                int bound = static_cast<int>(
                    std::ceil(std::log(20.0 * D * D * D) / std::log(static_cast<double>(p))));
                for (int a1 = -D; a1 <= D; ++a1)
                    for (int a2 = -D; a2 <= D; ++a2)
                        for (int a3 = -D; a3 <= D; ++a3) {
                            if (a1 == a2 && a2 == a3) continue;
                            CHECK(u0_comb_valuation(a1, a2, a3, p, m) <= bound);
                        }
            }
        }
    }
}

TEST_CASE("BranchTable") {
    BranchTable bt(7, 2, 4);
    CHECK(bt.has_u0());
    // The table's branch lifts the smallest primitive root mod p (here 2).
    CHECK(bt.u0() % 7 == 2);
    CHECK(powmod(bt.u0(), 3, 49) == 1);
    CHECK(powmod(bt.u0_lifted(), 3, 2401) == 1);
    CHECK(bt.u0_lifted() % 49 == bt.u0());
    CHECK(bt.s(1, 2) == 1);

    // s(r)^3 = r at every precision; lifted values reduce to base values.
    for (u64 r = 1; r < 49; ++r) {
        if (!bt.is_cube_class(r)) continue;
        u64 s2 = bt.s(r, 2);
        CHECK(powmod(s2, 3, 49) == r);
        for (u64 t = 0; t < 4; ++t) {
            u64 rlift = r + 49 * t * 7;  // some lifts of r to mod 7^4
            u64 s4 = bt.s_lifted(rlift % 2401);
            CHECK(powmod(s4, 3, 2401) == rlift % 2401);
            CHECK(s4 % 7 == s2 % 7);
        }
    }

    BranchTable bt5(5, 1, 3);
    CHECK(!bt5.has_u0());
    CHECK(bt5.cube_root_count() == 1);
    for (u64 r = 1; r < 5; ++r) CHECK(bt5.is_cube_class(r));
    CHECK_THROWS_AS(bt5.s(5, 1), OutsideDiamond);
}
