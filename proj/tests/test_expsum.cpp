#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "k2lab/expsum.hpp"
#include "k2lab/rng.hpp"

using namespace k2lab;
using namespace k2lab::expsum;
using modarith::mulmod;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::complex<double> e_of(u64 x, u64 Q) {
    return std::polar(1.0, kTau * static_cast<double>(x % Q) / static_cast<double>(Q));
}

}  // namespace

TEST_CASE("gauss_quadratic closed forms") {
    auto g5 = gauss_quadratic(5, Engine::Exact);
    CHECK(std::abs(g5.approx - std::sqrt(5.0)) < 1e-12);
    CHECK(g5.embedding_consistent());
    auto g3 = gauss_quadratic(3, Engine::Float);
    CHECK(std::abs(g3.approx - std::complex<double>{0, std::sqrt(3.0)}) < 1e-12);
    auto g7 = gauss_quadratic(7, Engine::Exact);
    CHECK(std::abs(g7.approx - std::complex<double>{0, std::sqrt(7.0)}) < 1e-12);
}

TEST_CASE("k2_direct examples") {
    CHECK(std::abs(k2_direct(1, 0, 2, Engine::Float).approx - std::complex<double>{-1, 0}) < 1e-12);
    CHECK(std::abs(k2_direct(1, 0, 5, Engine::Float).approx - (std::sqrt(5.0) - 1)) < 1e-12);
    auto v = k2_direct(1, 1, 25, Engine::Exact);
    CHECK(std::abs(v.approx - 5.0 * e_of(17, 25)) < 1e-9);
    CHECK(v.embedding_consistent());
    CHECK_THROWS_AS(k2_direct(5, 1, 25, Engine::Float), NotAUnit);
}

TEST_CASE("k2_explicit examples") {
    auto v = k2_explicit(1, 1, 5, 2, Engine::Exact);
    CHECK(std::abs(v.approx - 5.0 * e_of(17, 25)) < 1e-12);
    CHECK((*v.exact == *k2_direct(1, 1, 25, Engine::Exact).exact));

    auto z = k2_explicit(1, 1, 7, 2, Engine::Exact);
    CHECK(std::abs(z.approx) < 1e-12);
    CHECK(z.exact->is_zero());

    CHECK_THROWS_AS(k2_explicit(1, 1, 5, 1, Engine::Float), BadExponent);
    CHECK_THROWS_AS(k2_explicit(1, 1, 3, 2, Engine::Float), SmallPrime);
}

TEST_CASE("explicit equals direct, small exact grid") {
    for (u64 p : {5ULL, 7ULL}) {
        for (int n = 2; n <= 3; ++n) {
            u64 pn = 1;
            for (int i = 0; i < n; ++i) pn *= p;
            for (u64 a = 1; a < pn; a += (p == 5 ? 3 : 5)) {
                if (a % p == 0) continue;
                for (u64 b = 0; b < pn; b += 2) {
                    auto ve = k2_explicit(a, b, p, n, Engine::Exact);
                    auto vd = k2_direct(a, b, pn, Engine::Exact);
                    CHECK((*ve.exact == *vd.exact));
                    CHECK(ve.embedding_consistent());
                }
            }
        }
    }
}

TEST_CASE("explicit equals direct, sampled at fifth powers") {
    // 5^5 and 7^5 sit inside the exact cap; sample (a, b) pairs there.
    Rng rng(97);
    for (u64 p : {5ULL, 7ULL}) {
        u64 pn = p * p * p * p * p;
        for (int rep = 0; rep < 25; ++rep) {
            u64 a;
            do a = 1 + rng.below(pn - 1);
            while (a % p == 0);
            u64 b = rng.below(pn);
            auto ve = k2_explicit(a, b, p, 5, Engine::Exact);
            auto vd = k2_direct(a, b, pn, Engine::Exact);
            CHECK((*ve.exact == *vd.exact));
        }
    }
    // A composite with a high prime-power factor through the CRT route.
    for (int rep = 0; rep < 10; ++rep) {
        u64 Q = 6 * 625;  // 2 * 3 * 5^4
        u64 A;
        do A = 1 + rng.below(Q - 1);
        while (std::gcd(A, Q) != 1);
        u64 B = rng.below(Q);
        CHECK(k2_eval(A, B, Q, Engine::Exact).agrees(k2_direct(A, B, Q, Engine::Exact)));
    }
}

TEST_CASE("dilation symmetry K2(A, gB) = K2(g^2 A, B)") {
    Rng rng(23);
    for (int rep = 0; rep < 60; ++rep) {
        u64 Q = 2 + rng.below(200);
        u64 A, g;
        do A = 1 + rng.below(Q - 1);
        while (std::gcd(A, Q) != 1);
        do g = 1 + rng.below(Q - 1);
        while (std::gcd(g, Q) != 1);
        u64 B = rng.below(Q);
        auto lhs = k2_direct(A, mulmod(g, B, Q), Q, Engine::Exact);
        auto rhs = k2_direct(mulmod(mulmod(g, g, Q), A, Q), B, Q, Engine::Exact);
        CHECK((*lhs.exact == *rhs.exact));
    }
}

TEST_CASE("conjugation flips both arguments") {
    Rng rng(29);
    for (int rep = 0; rep < 40; ++rep) {
        u64 Q = 2 + rng.below(150);
        u64 A;
        do A = 1 + rng.below(Q - 1);
        while (std::gcd(A, Q) != 1);
        u64 B = rng.below(Q);
        auto lhs = k2_direct(A, B, Q, Engine::Exact).conj();
        auto rhs = k2_direct(Q - A, (Q - B) % Q, Q, Engine::Exact);
        CHECK((*lhs.exact == *rhs.exact));
    }
}

TEST_CASE("k2_crt_split examples and random instances") {
    auto s = k2_crt_split(1, 1, 3, 5, Engine::Exact);
    CHECK((*(s.factor1 * s.factor2).exact == *s.full.exact));
    // Factors are K2(-1,-1;3) and K2(2,2;5) for the Bezout pair of (3,5).
    CHECK(s.factor1.agrees(k2_direct(2, 2, 3, Engine::Exact).scaled(1), 1e-9));
    CHECK(s.factor2.agrees(k2_direct(2, 2, 5, Engine::Exact), 1e-9));

    auto t = k2_crt_split(1, 0, 1, 30, Engine::Exact);
    CHECK(std::abs(t.factor1.approx - 1.0) < 1e-12);
    CHECK((*(t.factor1 * t.factor2).exact == *t.full.exact));

    auto u = k2_crt_split(1, 1, 4, 9, Engine::Exact);
    CHECK((*(u.factor1 * u.factor2).exact == *u.full.exact));

    CHECK_THROWS_AS(k2_crt_split(1, 1, 6, 9, Engine::Float), NotCoprime);

    Rng rng(31);
    for (int rep = 0; rep < 30; ++rep) {
        u64 m1 = 2 + rng.below(40);
        u64 m2 = 2 + rng.below(40);
        if (std::gcd(m1, m2) != 1) continue;
        u64 Q = m1 * m2;
        u64 A;
        do A = 1 + rng.below(Q - 1);
        while (std::gcd(A, Q) != 1);
        u64 B = rng.below(Q);
        auto w = k2_crt_split(A, B, m1, m2, Engine::Exact);
        CHECK((*(w.factor1 * w.factor2).exact == *w.full.exact));
    }
}

TEST_CASE("k2_eval matches k2_direct") {
    Rng rng(37);
    CHECK(k2_eval(1, 1, 15, Engine::Float).agrees(k2_direct(1, 1, 15, Engine::Float)));
    CHECK(k2_eval(1, 1, 25, Engine::Exact).agrees(k2_direct(1, 1, 25, Engine::Exact)));
    CHECK(k2_eval(1, 0, 50, Engine::Exact).agrees(k2_direct(1, 0, 50, Engine::Exact)));
    for (int rep = 0; rep < 50; ++rep) {
        u64 Q = 2 + rng.below(800);
        u64 A;
        do A = 1 + rng.below(Q - 1);
        while (std::gcd(A, Q) != 1);
        u64 B = rng.below(Q);
        CHECK(k2_eval(A, B, Q, Engine::Exact).agrees(k2_direct(A, B, Q, Engine::Exact)));
    }
}

TEST_CASE("Parseval and Fourier inversion") {
    Rng rng(41);
    for (u64 Q : {12ULL, 25ULL, 49ULL, 90ULL, 101ULL}) {
        u64 A;
        do A = 1 + rng.below(Q - 1);
        while (std::gcd(A, Q) != 1);
        K2Table tab(A, Q, K2Table::Build::Direct);
        double parseval = 0;
        for (u64 b = 0; b < Q; ++b) parseval += std::norm(tab[b]);
        double want = static_cast<double>(Q) * static_cast<double>(modarith::euler_phi(Q));
        CHECK(std::abs(parseval - want) < 1e-9 * want);

        // Sum over b of e_Q(cb) K2(a,b;Q) = Q e_Q(a cbar^2) for units c.
        for (int rep = 0; rep < 4; ++rep) {
            u64 c;
            do c = 1 + rng.below(Q - 1);
            while (std::gcd(c, Q) != 1);
            std::complex<double> s = 0;
            for (u64 b = 0; b < Q; ++b) s += e_of(mulmod(c, b, Q), Q) * tab[b];
            u64 ci = modarith::mod_inv(c, Q);
            auto want2 = static_cast<double>(Q) * e_of(mulmod(A, mulmod(ci, ci, Q), Q), Q);
            CHECK(std::abs(s - want2) < 1e-6 * Q);
        }
        // Non-unit nonzero c with gcd pattern: the sum vanishes.
        if (Q % 5 == 0) {
            std::complex<double> s = 0;
            for (u64 b = 0; b < Q; ++b) s += e_of(mulmod(5, b, Q), Q) * tab[b];
            CHECK(std::abs(s) < 1e-6 * Q);
        }
    }
}

TEST_CASE("pointwise bounds") {
    for (u64 p : {5ULL, 7ULL, 11ULL, 13ULL, 17ULL}) {
        K2Table tab(1, p, K2Table::Build::Direct);
        for (u64 b = 0; b < p; ++b) CHECK(std::abs(tab[b]) <= 3 * std::sqrt(static_cast<double>(p)) + 1e-9);
    }
    for (u64 p : {5ULL, 7ULL}) {
        for (int n = 2; n <= 3; ++n) {
            u64 pn = 1;
            for (int i = 0; i < n; ++i) pn *= p;
            for (u64 b = 0; b < pn; ++b) {
                auto v = k2_explicit(1, b, p, n, Engine::Float);
                CHECK(std::abs(v.approx) <= 3 * std::pow(static_cast<double>(p), n / 2.0) + 1e-9);
            }
        }
    }
}

TEST_CASE("K2Table multiplicative equals direct") {
    Rng rng(43);
    for (int rep = 0; rep < 12; ++rep) {
        u64 Q = 2 + rng.below(600);
        u64 A;
        do A = 1 + rng.below(Q - 1);
        while (std::gcd(A, Q) != 1);
        K2Table direct(A, Q, K2Table::Build::Direct);
        K2Table mult(A, Q, K2Table::Build::Multiplicative);
        for (u64 b = 0; b < Q; ++b) CHECK(std::abs(direct[b] - mult[b]) < 1e-7 * (1 + std::abs(direct[b])));
    }
}
