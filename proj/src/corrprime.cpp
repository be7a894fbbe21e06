#include "k2lab/corrprime.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>

namespace k2lab::corrprime {

using expsum::ComplexAccumulator;
using expsum::Cyclotomic;
using modarith::mod_inv;
using modarith::mulmod;
using modarith::reduce_signed;

ShiftMultiset::ShiftMultiset(std::vector<i64> h, std::vector<i64> hprime, u64 modulus)
    : h_(std::move(h)), hprime_(std::move(hprime)), modulus_(modulus) {
    if (modulus_ == 0) throw OutOfRange("shift modulus must be positive");
    for (i64 x : h_) ++mu_[reduce_signed(x, modulus_)];
    for (i64 x : hprime_) ++nu_[reduce_signed(x, modulus_)];
    for (auto& [tau, cnt] : mu_) support_.push_back(tau);
    for (auto& [tau, cnt] : nu_)
        if (!mu_.count(tau)) support_.push_back(tau);
    std::sort(support_.begin(), support_.end());
}

int ShiftMultiset::mu(u64 tau) const {
    auto it = mu_.find(tau % modulus_);
    return it == mu_.end() ? 0 : it->second;
}

int ShiftMultiset::nu(u64 tau) const {
    auto it = nu_.find(tau % modulus_);
    return it == nu_.end() ? 0 : it->second;
}

bool ShiftMultiset::mu_nu_equal() const {
    for (u64 tau : support_)
        if (mu(tau) != nu(tau)) return false;
    return true;
}

bool ShiftMultiset::mu_nu_equal_mod3() const {
    for (u64 tau : support_)
        if ((mu(tau) - nu(tau)) % 3 != 0) return false;
    return true;
}

PrimeClass classify_prime(u64 psi_index, const ShiftMultiset& shifts) {
    if (shifts.total() == 0) throw EmptyCorrelation();
    u64 p = shifts.modulus();
    if (psi_index % p != 0) return PrimeClass::Nondegenerate;
    return shifts.mu_nu_equal_mod3() ? PrimeClass::Degenerate : PrimeClass::Nondegenerate;
}

std::shared_ptr<const K2Table> k2_table_cached(u64 A, u64 q) {
    static std::map<std::pair<u64, u64>, std::shared_ptr<const K2Table>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(A % q, q);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (cache.size() > 512) cache.clear();
    auto tab = std::make_shared<K2Table>(A % q, q, K2Table::Build::Direct);
    cache.emplace(key, tab);
    return tab;
}

SumValue corr_sum_collapsed(u64 a, u64 c, const ShiftMultiset& shifts, u64 Q, Engine engine,
                            u64 d, u64 r, u64 budget) {
    size_t N = shifts.N(), M = shifts.M();
    if (N + M == 0) throw EmptyCorrelation();
    if (r == 0 || Q % r != 0) throw OutOfRange("congruence modulus must divide Q");
    a %= Q;
    c %= Q;
    if (std::gcd(a, Q) != 1) throw NotAUnit();

    std::vector<u64> units;
    if (Q == 1) {
        units.push_back(0);
    } else {
        for (u64 x = 1; x < Q; ++x)
            if (std::gcd(x, Q) == 1) units.push_back(x);
    }

    double work = static_cast<double>(r);
    for (size_t i = 0; i + 1 < N + M; ++i) work *= static_cast<double>(units.size());
    if (work > static_cast<double>(budget)) throw BudgetExceeded();

    // Slot layout: N plus-signed variables carrying the shifts h, then M
    // minus-signed carrying h'. Summing b first forces
    // sigma := sum(x) - sum(y) + c = 0 (mod Q/r), each surviving tuple
    // contributing (Q/r) e_Q(d sigma) times its own phase.
    std::vector<u64> shift_of;
    std::vector<int> sign_of;
    for (i64 h : shifts.h()) {
        shift_of.push_back(reduce_signed(h, Q));
        sign_of.push_back(+1);
    }
    for (i64 h : shifts.hprime()) {
        shift_of.push_back(reduce_signed(h, Q));
        sign_of.push_back(-1);
    }
    size_t slots = N + M;
    u64 Qr = Q / r;

    bool exact = engine == Engine::Exact;
    if (exact && Q > expsum::exact_order_cap()) throw ExactEngineOverflow();
    auto roots = expsum::root_table(Q);
    ComplexAccumulator acc;
    Cyclotomic cyc(exact ? Q : 1);

    std::vector<u64> inv_of(Q, 0);
    std::vector<u64> axinv2(units.size());
    for (size_t i = 0; i < units.size(); ++i) {
        u64 x = units[i];
        u64 xi = Q == 1 ? 0 : mod_inv(x, Q);
        inv_of[x] = xi;
        axinv2[i] = mulmod(a, mulmod(xi, xi, Q), Q);
    }

    std::function<void(size_t, u64, u64)> rec = [&](size_t slot, u64 sigma, u64 phase) {
        if (slot + 1 == slots) {
            u64 rhs = modarith::submod(0, modarith::addmod(sigma % Qr, c % Qr, Qr), Qr);
            u64 x0 = sign_of[slot] > 0 ? rhs : modarith::submod(0, rhs, Qr);
            for (u64 k = 0; k < r; ++k) {
                u64 x = x0 + k * Qr;
                if (Q == 1) x = 0;
                else if (x == 0 || std::gcd(x, Q) != 1) continue;
                u64 xi = inv_of[x];
                u64 term = mulmod(a, mulmod(xi, xi, Q), Q);
                u64 hterm = mulmod(shift_of[slot], x, Q);
                u64 ph;
                u64 sg;
                if (sign_of[slot] > 0) {
                    ph = modarith::addmod(phase, modarith::addmod(term, hterm, Q), Q);
                    sg = modarith::addmod(sigma, x, Q);
                } else {
                    ph = modarith::submod(phase, modarith::addmod(term, hterm, Q), Q);
                    sg = modarith::submod(sigma, x, Q);
                }
                u64 full_sigma = modarith::addmod(sg, c, Q);
                u64 e = modarith::addmod(ph, mulmod(d % Q, full_sigma, Q), Q);
                acc.add((*roots)[e]);
                if (exact) cyc.add_root(e);
                if (Q == 1) break;
            }
            return;
        }
        for (size_t i = 0; i < units.size(); ++i) {
            u64 x = units[i];
            u64 term = modarith::addmod(axinv2[i], mulmod(shift_of[slot], x, Q), Q);
            if (sign_of[slot] > 0)
                rec(slot + 1, modarith::addmod(sigma, x, Q), modarith::addmod(phase, term, Q));
            else
                rec(slot + 1, modarith::submod(sigma, x, Q), modarith::submod(phase, term, Q));
        }
    };
    rec(0, 0, 0);

    SumValue out(acc.value() * static_cast<double>(Qr));
    if (exact) out.exact = cyc.scaled(static_cast<i64>(Qr));
    return out;
}

SumValue corr_sum_prime(u64 A, u64 psi_index, const ShiftMultiset& shifts, u64 p, Engine engine) {
    if (p <= 3 || !modarith::is_prime(p)) throw SmallPrime();
    if (shifts.total() == 0) throw EmptyCorrelation();
    A %= p;
    if (A == 0) throw NotAUnit();
    u64 t = psi_index % p;

    auto sh = shifts.modulus() == p ? shifts : shifts.reduced(p);
    auto tab = k2_table_cached(A, p);
    auto roots = expsum::root_table(p);
    ComplexAccumulator acc;
    for (u64 B = 0; B < p; ++B) {
        std::complex<double> prod = (*roots)[mulmod(t, B, p)];
        for (i64 h : sh.h()) prod *= (*tab)[(B + reduce_signed(h, p)) % p];
        for (i64 h : sh.hprime()) prod *= std::conj((*tab)[(B + reduce_signed(h, p)) % p]);
        acc.add(prod);
    }
    SumValue out(acc.value());
    if (engine == Engine::Exact) {
        auto exact = corr_sum_collapsed(A, t, sh, p, Engine::Exact);
        out.exact = std::move(exact.exact);
    }
    return out;
}

double corr_ratio_prime(u64 A, u64 psi_index, const ShiftMultiset& shifts, u64 p) {
    auto sh = shifts.modulus() == p ? shifts : shifts.reduced(p);
    auto v = corr_sum_prime(A, psi_index, sh, p, Engine::Float);
    double nm = static_cast<double>(sh.total());
    double expo = classify_prime(psi_index % p, sh) == PrimeClass::Degenerate ? nm / 2 + 1
                                                                              : (nm + 1) / 2;
    return std::abs(v.approx) / std::pow(static_cast<double>(p), expo);
}

}  // namespace k2lab::corrprime
