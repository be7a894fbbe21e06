#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "k2lab/cyclotomic.hpp"
#include "k2lab/expsum.hpp"
#include "k2lab/rng.hpp"
#include "k2lab/sumvalue.hpp"

using namespace k2lab;
using namespace k2lab::expsum;

namespace {

Cyclotomic random_element(Rng& rng, u64 order, int terms) {
    Cyclotomic z(order);
    for (int i = 0; i < terms; ++i)
        z.add_root(rng.below(order), static_cast<i64>(rng.in(0, 8)) - 4);
    return z;
}

}  // namespace

TEST_CASE("cyclotomic field degrees") {
    CHECK(CyclotomicField::get(1)->degree() == 1);
    CHECK(CyclotomicField::get(5)->degree() == 4);
    CHECK(CyclotomicField::get(12)->degree() == 4);
    CHECK(CyclotomicField::get(25)->degree() == 20);
    CHECK(CyclotomicField::get(105)->degree() == 48);
    // Phi_105 famously has a coefficient -2.
    auto& phi = CyclotomicField::get(105)->phi_coeffs();
    bool has_minus2 = false;
    for (i64 c : phi) has_minus2 |= (c == -2);
    CHECK(has_minus2);
}

TEST_CASE("vanishing sums of roots of unity") {
    for (u64 Q : {5ULL, 7ULL, 12ULL, 25ULL, 30ULL, 49ULL}) {
        Cyclotomic all(Q);
        for (u64 k = 0; k < Q; ++k) all.add_root(k);
        CHECK(all.is_zero());
        // A proper subgroup sum also vanishes: sum over multiples of Q/p.
        for (u64 p : {5ULL, 7ULL}) {
            if (Q % p != 0) continue;
            Cyclotomic sub(Q);
            for (u64 k = 0; k < p; ++k) sub.add_root(k * (Q / p));
            CHECK(sub.is_zero());
        }
    }
}

TEST_CASE("ring operations agree with complex embedding") {
    Rng rng(11);
    for (u64 Q : {8ULL, 15ULL, 49ULL, 60ULL}) {
        for (int rep = 0; rep < 20; ++rep) {
            auto a = random_element(rng, Q, 6);
            auto b = random_element(rng, Q, 6);
            auto ea = a.embed(), eb = b.embed();
            CHECK(std::abs((a + b).embed() - (ea + eb)) < 1e-9 * (1 + std::abs(ea + eb)));
            CHECK(std::abs((a * b).embed() - (ea * eb)) < 1e-9 * (1 + std::abs(ea * eb)));
            CHECK(std::abs(a.conj().embed() - std::conj(ea)) < 1e-9 * (1 + std::abs(ea)));
        }
    }
}

TEST_CASE("multiplication is associative and canonical form decides equality") {
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        u64 Q = 2 + rng.below(60);
        auto a = random_element(rng, Q, 4);
        auto b = random_element(rng, Q, 4);
        auto c = random_element(rng, Q, 4);
        CHECK(((a * b) * c) == (a * (b * c)));
        CHECK((a * (b + c)) == (a * b + a * c));
        // Canonical vectors of equal values coincide (not just equality mod Phi).
        auto lhs = ((a * b) * c).canonical();
        auto rhs = (a * (b * c)).canonical();
        CHECK(lhs == rhs);
    }
}

TEST_CASE("lifting preserves values") {
    Rng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        u64 Q = 2 + rng.below(40);
        u64 k = 1 + rng.below(4);
        auto a = random_element(rng, Q, 5);
        auto lifted = a.lifted(Q * k);
        CHECK(std::abs(a.embed() - lifted.embed()) < 1e-9 * (1 + std::abs(a.embed())));
        CHECK((lifted - a).is_zero());
    }
}

TEST_CASE("SumValue consistency and cap") {
    auto v = root_of_unity(12, 25, Engine::Exact);
    CHECK(v.has_exact());
    CHECK(v.embedding_consistent());
    CHECK(std::abs(v.approx - std::polar(1.0, 2 * 3.14159265358979323846 * 12 / 25)) < 1e-12);

    auto w = root_of_unity(25, 25, Engine::Exact);
    CHECK(std::abs(w.approx - 1.0) < 1e-12);
    CHECK((*w.exact == Cyclotomic::integer(25, 1)));

    set_exact_order_cap(100);
    CHECK_THROWS_AS(root_of_unity(1, 101, Engine::Exact), ExactEngineOverflow);
    set_exact_order_cap(20000);
    CHECK_NOTHROW(root_of_unity(1, 101, Engine::Exact));

    // Additivity: e(x)e(y) = e(x+y).
    Rng rng(17);
    for (int rep = 0; rep < 30; ++rep) {
        u64 Q = 2 + rng.below(50);
        i64 x = static_cast<i64>(rng.below(1000)) - 500;
        i64 y = static_cast<i64>(rng.below(1000)) - 500;
        auto prod = root_of_unity(x, Q, Engine::Exact) * root_of_unity(y, Q, Engine::Exact);
        CHECK(prod.agrees(root_of_unity(x + y, Q, Engine::Exact)));
    }
}
