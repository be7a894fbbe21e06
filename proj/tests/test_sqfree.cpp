#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "k2lab/sqfree.hpp"

using namespace k2lab;
using namespace k2lab::sqfree;
using modarith::u64;

namespace {

// Independent Mobius function by trial division.
int mobius(u64 n) {
    int m = 1;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            m = -m;
        }
    }
    if (n > 1) m = -m;
    return m;
}

// mu^2(n) via the convolution identity sum_{d^2 | n} mu(d).
int mu2_convolution(u64 n) {
    int s = 0;
    for (u64 d = 1; d * d <= n; ++d)
        if (n % (d * d) == 0) s += mobius(d);
    return s;
}

// Marching oracle for rho: trapezoid discretization of u rho(u) = int_{u-1}^u rho,
// Richardson-extrapolated in the step.
double rho_march_once(double target, int grid) {
    double h = 1.0 / grid;
    int n = static_cast<int>(std::lround(target * grid));
    std::vector<double> rho(n + 1);
    for (int i = 0; i <= std::min(n, grid); ++i) rho[i] = 1.0;
    for (int i = grid + 1; i <= n; ++i) {
        double u = i * h;
        double s = 0.5 * rho[i - grid];
        for (int j = i - grid + 1; j <= i - 1; ++j) s += rho[j];
        rho[i] = h * s / (u - h / 2);
    }
    return rho[n];
}

double rho_oracle(double target) {
    double a = rho_march_once(target, 2048);
    double b = rho_march_once(target, 4096);
    return (4 * b - a) / 3;
}

}  // namespace

TEST_CASE("squarefree_sieve") {
    auto tab = squarefree_sieve(10);
    CHECK(tab.count() == 7);  // {1,2,3,5,6,7,10}
    CHECK(squarefree_sieve(1).count() == 1);

    auto big = squarefree_sieve(10000);
    for (u64 n = 1; n <= 10000; ++n)
        CHECK(static_cast<int>(big.squarefree(n)) == mu2_convolution(n));

    // Threaded marking agrees with serial.
    auto serial = squarefree_sieve(3'000'000, 1);
    auto parallel = squarefree_sieve(3'000'000, 2);
    CHECK(serial.count() == parallel.count());
    for (u64 n : {1ULL, 999'983ULL, 2'097'152ULL, 2'097'153ULL, 2'999'999ULL})
        CHECK(serial.squarefree(n) == parallel.squarefree(n));

    CHECK_THROWS_AS(squarefree_sieve(2'000'000'000ULL), BudgetExceeded);
}

TEST_CASE("delta") {
    auto tab = squarefree_sieve(2000);
    auto d = delta(tab, 20, 3, 1);
    CHECK(d.count_class == 5);
    CHECK(d.count_cond == 10);
    CHECK(d.phi == 2);
    CHECK(d.value() == doctest::Approx(0.0));
    CHECK(d.numerator() == 0);

    CHECK(delta(tab, 1234, 1, 0).value() == doctest::Approx(0.0));

    // Non-coprime class: the main term averages over (n, q) = (a, q).
    auto nc = delta(tab, 20, 4, 2);
    CHECK(nc.count_class == 4);  // 2, 6, 10, 14
    CHECK(nc.count_cond == 4);
    CHECK(nc.phi == 1);
    CHECK(nc.value() == doctest::Approx(0.0));

    // Sum over coprime classes vanishes exactly.
    for (u64 q : {12ULL, 30ULL, 101ULL}) {
        modarith::i64 total = 0;
        for (u64 a = 1; a <= q; ++a) {
            if (std::gcd(a, q) != 1) continue;
            total += delta(tab, 2000, q, a % q).numerator();
        }
        CHECK(total == 0);
    }
}

TEST_CASE("max_delta") {
    auto tab = squarefree_sieve(1000);
    auto m3 = max_delta(tab, 20, 3);
    CHECK(m3.value == doctest::Approx(0.0));

    auto edge = max_delta(tab, 100, 101);  // q > X
    CHECK(edge.value < 1.0);
    CHECK(edge.value > 0.0);

    // Against a per-class delta scan.
    for (u64 q : {12ULL, 35ULL}) {
        double best = -1;
        for (u64 a = 1; a <= q; ++a) {
            if (std::gcd(a, q) != 1) continue;
            best = std::max(best, std::abs(delta(tab, 1000, q, a % q).value()));
        }
        CHECK(max_delta(tab, 1000, q).value == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("smoothness predicates") {
    CHECK(is_smooth(30030, 13));
    CHECK(!is_smooth(30030, 11));
    CHECK(!is_ultrasmooth(8, 5));
    CHECK(is_ultrasmooth(12, 5));
    CHECK(is_smooth(1, 2));
    CHECK(is_ultrasmooth(1, 2));
}

TEST_CASE("dickman_rho closed forms") {
    CHECK(dickman_rho(0.5) == doctest::Approx(1.0));
    CHECK(dickman_rho(1.0) == doctest::Approx(1.0));
    CHECK(std::abs(dickman_rho(2.0) - (1 - std::log(2.0))) < 1e-10);
    // rho(u) = 1 - log u on [1, 2].
    for (double u = 1.0; u <= 2.0; u += 0.01)
        CHECK(std::abs(dickman_rho(u) - (1 - std::log(u))) < 1e-10);
    CHECK_THROWS_AS(dickman_rho(-0.1), OutOfRange);
    CHECK_THROWS_AS(dickman_rho(20.5), OutOfRange);
}

TEST_CASE("dickman_rho against an independent marching scheme") {
    CHECK(std::abs(rho_oracle(2.0) - (1 - std::log(2.0))) < 1e-8);  // validates the oracle
    for (double u : {2.5, 3.0, 4.0, 5.0, 6.5}) {
        double want = rho_oracle(u);
        CHECK(std::abs(dickman_rho(u) - want) < 1e-8 * (1 + std::abs(want) / want));
    }
    // rho(3) close to the expected magnitude.
    CHECK(dickman_rho(3.0) == doctest::Approx(0.0486084).epsilon(1e-5));
}

TEST_CASE("dickman_rho is continuous, positive, nonincreasing; residual small") {
    double prev = 1.0;
    for (double u = 0.05; u <= 20.0; u += 0.05) {
        double v = dickman_rho(u);
        CHECK(v > 0);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
    // Continuity across the interval joints.
    for (int k = 1; k <= 19; ++k) {
        double lo = dickman_rho(k - 1e-9);
        double hi = dickman_rho(k + 1e-9);
        CHECK(std::abs(lo - hi) < 1e-8);
    }
    // Delay-equation residual |u rho'(u) + rho(u-1)| via central differences.
    for (double u = 1.1; u <= 10.0; u += 0.37) {
        double h = 1e-6;
        double der = (dickman_rho(u + h) - dickman_rho(u - h)) / (2 * h);
        CHECK(std::abs(u * der + dickman_rho(u - 1)) < 1e-6);
    }
}

TEST_CASE("density_experiment") {
    // y >= Y: the count is the squarefree count and rho(u <= 1) = 1.
    auto rep = density_experiment(1000, 1000);
    CHECK(rep.count == squarefree_sieve(1000).count());
    CHECK(rep.prediction == doctest::Approx(6.0 / (M_PI * M_PI) * 1000));
    CHECK(rep.rel_deviation < 0.01);

    auto tiny = density_experiment(100, 2);
    CHECK(tiny.count == 2);  // {1, 2}

    // The exact count: squarefree 50-smooth integers are exactly the subset
    // products of the 15 primes below 50.
    auto mid = density_experiment(1'000'000, 50);
    CHECK(mid.count == 3946);
    CHECK(mid.rel_deviation == doctest::Approx(std::abs(3946.0 - mid.prediction) / mid.prediction));
    // The prediction's relative error at this scale sits at the
    // O(1/sqrt(log Y)) level, far above zero but small against Y itself.
    CHECK(std::abs(static_cast<double>(mid.count) - mid.prediction) / mid.Y < 0.01);
}

TEST_CASE("main_theorem_experiment") {
    auto rep = main_theorem_experiment({2000, 20000}, {4, 12, 30});
    CHECK(rep.rows.size() == 6);
    for (size_t i = 1; i < rep.rows.size(); ++i) {
        bool sorted = rep.rows[i - 1].q < rep.rows[i].q ||
                      (rep.rows[i - 1].q == rep.rows[i].q && rep.rows[i - 1].X < rep.rows[i].X);
        CHECK(sorted);
    }
    for (auto& row : rep.rows) {
        CHECK(row.normalized ==
              doctest::Approx(row.max_abs_delta * row.q / static_cast<double>(row.X)));
        if (row.q == 4) CHECK(!row.squarefree);
        if (row.q == 30) CHECK(row.squarefree);
    }
    CHECK(rep.fitted_exponent.count(30) == 1);
}
