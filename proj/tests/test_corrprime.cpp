#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "k2lab/corrprime.hpp"
#include "k2lab/rng.hpp"

using namespace k2lab;
using namespace k2lab::corrprime;
using modarith::u64;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::complex<double> e_of(u64 x, u64 Q) {
    return std::polar(1.0, kTau * static_cast<double>(x % Q) / static_cast<double>(Q));
}

}  // namespace

TEST_CASE("ShiftMultiset bookkeeping") {
    ShiftMultiset s({0, 3, 3}, {1}, 7);
    CHECK(s.N() == 3);
    CHECK(s.M() == 1);
    CHECK(s.support() == std::vector<u64>{0, 1, 3});
    CHECK(s.mu(3) == 2);
    CHECK(s.nu(1) == 1);
    CHECK(s.nu(3) == 0);
    int mu_total = 0, nu_total = 0;
    for (u64 tau : s.support()) {
        mu_total += s.mu(tau);
        nu_total += s.nu(tau);
    }
    CHECK(mu_total == 3);
    CHECK(nu_total == 1);

    // Reduction mod 3 merges 0 and 3.
    auto r = s.reduced(3);
    CHECK(r.support() == std::vector<u64>{0, 1});
    CHECK(r.mu(0) == 3);
}

TEST_CASE("classify_prime") {
    ShiftMultiset deg({0, 0, 0}, {}, 5);
    CHECK(classify_prime(1, deg) == PrimeClass::Nondegenerate);
    CHECK(classify_prime(0, deg) == PrimeClass::Degenerate);  // 3 | (3 - 0)
    ShiftMultiset nd({0, 0}, {0}, 5);
    CHECK(classify_prime(0, nd) == PrimeClass::Nondegenerate);  // mu - nu = 1
    ShiftMultiset empty({}, {}, 5);
    CHECK_THROWS_AS(classify_prime(0, empty), EmptyCorrelation);
}

TEST_CASE("corr_sum_prime examples") {
    ShiftMultiset pair({0}, {0}, 5);
    auto v = corr_sum_prime(1, 0, pair, 5, Engine::Exact);
    CHECK(std::abs(v.approx - 20.0) < 1e-9);
    CHECK(v.embedding_consistent());

    ShiftMultiset single({0}, {}, 5);
    auto z = corr_sum_prime(1, 0, single, 5, Engine::Exact);
    CHECK(std::abs(z.approx) < 1e-9);
    CHECK(z.exact->is_zero());

    auto w = corr_sum_prime(1, 1, single, 5, Engine::Exact);
    CHECK(std::abs(w.approx - 5.0 * e_of(1, 5)) < 1e-9);

    CHECK_THROWS_AS(corr_sum_prime(0, 0, pair, 5, Engine::Float), NotAUnit);
}

TEST_CASE("corr_ratio_prime examples") {
    ShiftMultiset pair({0}, {0}, 5);
    CHECK(std::abs(corr_ratio_prime(1, 0, pair, 5) - 4.0 / 5.0) < 1e-12);
    ShiftMultiset single({0}, {}, 5);
    CHECK(std::abs(corr_ratio_prime(1, 0, single, 5)) < 1e-12);
    CHECK(std::abs(corr_ratio_prime(1, 1, single, 5) - 1.0) < 1e-12);
}

TEST_CASE("degenerate witness is p(p-1) exactly") {
    for (u64 p : {5ULL, 7ULL, 11ULL, 13ULL, 29ULL}) {
        for (u64 A = 1; A < std::min<u64>(p, 4); ++A) {
            ShiftMultiset pair({2}, {2}, p);
            auto v = corr_sum_prime(A, 0, pair, p, Engine::Float);
            double want = static_cast<double>(p) * (p - 1);
            CHECK(std::abs(v.approx - want) < 1e-9 * want);
        }
    }
}

TEST_CASE("realness and positivity for matched shifts") {
    Rng rng(51);
    const std::vector<u64> primes{5, 7, 11, 13, 17, 19};
    for (int rep = 0; rep < 25; ++rep) {
        u64 p = primes[rng.below(primes.size())];
        u64 A = 1 + rng.below(p - 1);
        std::vector<modarith::i64> h{static_cast<modarith::i64>(rng.below(p)),
                                     static_cast<modarith::i64>(rng.below(p))};
        ShiftMultiset s(h, h, p);
        auto v = corr_sum_prime(A, 0, s, p, Engine::Float);
        CHECK(std::abs(v.approx.imag()) < 1e-8 * (1 + std::abs(v.approx)));
        CHECK(v.approx.real() > -1e-8);
    }
}

TEST_CASE("conjugation symmetry") {
    Rng rng(53);
    const std::vector<u64> primes{5, 7, 11, 13};
    for (int rep = 0; rep < 25; ++rep) {
        u64 p = primes[rng.below(primes.size())];
        u64 A = 1 + rng.below(p - 1);
        u64 t = rng.below(p);
        std::vector<modarith::i64> h{static_cast<modarith::i64>(rng.below(p))};
        std::vector<modarith::i64> hp{static_cast<modarith::i64>(rng.below(p)),
                                      static_cast<modarith::i64>(rng.below(p))};
        auto v = corr_sum_prime(A, t, ShiftMultiset(h, hp, p), p, Engine::Float);
        auto w = corr_sum_prime(A, (p - t) % p, ShiftMultiset(hp, h, p), p, Engine::Float);
        CHECK(std::abs(std::conj(v.approx) - w.approx) < 1e-8 * (1 + std::abs(v.approx)));
    }
}

TEST_CASE("shift translation invariance at t = 0") {
    Rng rng(59);
    const std::vector<u64> primes{5, 7, 11, 13};
    for (int rep = 0; rep < 20; ++rep) {
        u64 p = primes[rng.below(primes.size())];
        u64 A = 1 + rng.below(p - 1);
        modarith::i64 shift = static_cast<modarith::i64>(rng.below(p));
        std::vector<modarith::i64> h{0, static_cast<modarith::i64>(rng.below(p))};
        std::vector<modarith::i64> hp{static_cast<modarith::i64>(rng.below(p))};
        std::vector<modarith::i64> h2 = h, hp2 = hp;
        for (auto& x : h2) x += shift;
        for (auto& x : hp2) x += shift;
        auto v = corr_sum_prime(A, 0, ShiftMultiset(h, hp, p), p, Engine::Float);
        auto w = corr_sum_prime(A, 0, ShiftMultiset(h2, hp2, p), p, Engine::Float);
        CHECK(std::abs(v.approx - w.approx) < 1e-8 * (1 + std::abs(v.approx)));
    }
}

TEST_CASE("collapsed exact route agrees with the literal table route") {
    Rng rng(61);
    const std::vector<u64> primes{5, 7, 11, 13, 17};
    for (int rep = 0; rep < 15; ++rep) {
        u64 p = primes[rng.below(primes.size())];
        u64 A = 1 + rng.below(p - 1);
        u64 t = rng.below(p);
        std::vector<modarith::i64> h, hp;
        int N = 1 + static_cast<int>(rng.below(2));
        int M = static_cast<int>(rng.below(2));
        for (int i = 0; i < N; ++i) h.push_back(static_cast<modarith::i64>(rng.below(p)));
        for (int i = 0; i < M; ++i) hp.push_back(static_cast<modarith::i64>(rng.below(p)));
        ShiftMultiset s(h, hp, p);
        auto v = corr_sum_prime(A, t, s, p, Engine::Exact);
        // embedding_consistent compares the exact collapsed sum against the
        // literal per-B product sum.
        CHECK(v.embedding_consistent());
    }
}

TEST_CASE("nondegenerate ratios respect the scaled bound on a sample") {
    Rng rng(67);
    double worst = 0;
    for (u64 p : {11ULL, 31ULL, 61ULL, 101ULL}) {
        for (int rep = 0; rep < 25; ++rep) {
            u64 A = 1 + rng.below(p - 1);
            u64 t = rng.below(p);
            std::vector<modarith::i64> h{static_cast<modarith::i64>(rng.below(p)),
                                         static_cast<modarith::i64>(rng.below(p))};
            std::vector<modarith::i64> hp{static_cast<modarith::i64>(rng.below(p))};
            ShiftMultiset s(h, hp, p);
            if (classify_prime(t, s) == PrimeClass::Degenerate) continue;
            double nm = 3;
            double cap = nm * std::pow(3.0, nm);  // (N+M) 3^{N+M}
            double ratio = corr_ratio_prime(A, t, s, p);
            worst = std::max(worst, ratio / cap);
            CHECK(ratio <= cap * 5.0);
        }
    }
    CHECK(worst > 0);
}
