#include "k2lab/sqfree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <thread>

#include "k2lab/errors.hpp"

namespace k2lab::sqfree {

namespace {

constexpr u64 kSegment = 1ULL << 20;
constexpr u64 kSieveBudget = 1'000'000'000ULL;

std::vector<u64> primes_up_to(u64 n) {
    std::vector<bool> comp(n + 1, false);
    std::vector<u64> out;
    for (u64 i = 2; i <= n; ++i) {
        if (!comp[i]) {
            out.push_back(i);
            for (u64 j = i * i; j <= n; j += i) comp[j] = true;
        }
    }
    return out;
}

}  // namespace

u64 SieveTable::count() const {
    u64 total = 0;
    for (u64 word : bits_) total += static_cast<u64>(__builtin_popcountll(word));
    return total;
}

SieveTable squarefree_sieve(u64 X, int threads) {
    if (X < 1 || X > kSieveBudget) throw BudgetExceeded("sieve limit outside [1, 1e9]");
    SieveTable tab;
    tab.limit_ = X;
    tab.bits_.assign((X >> 6) + 1, ~0ULL);
    tab.bits_[0] &= ~1ULL;  // n = 0 unused
    if ((X & 63) != 63) tab.bits_.back() &= (2ULL << (X & 63)) - 1;
    u64 root = static_cast<u64>(std::sqrt(static_cast<double>(X)));
    while ((root + 1) * (root + 1) <= X) ++root;
    while (root * root > X) --root;
    auto primes = primes_up_to(root);

    u64 segments = (X + kSegment) / kSegment;  // segment s covers [s*2^20, (s+1)*2^20)
    auto work = [&](u64 seg_begin, u64 seg_end) {
        for (u64 s = seg_begin; s < seg_end; ++s) {
            u64 lo = s * kSegment;
            u64 hi_ex = std::min(X + 1, lo + kSegment);
            for (u64 p : primes) {
                u64 p2 = p * p;
                if (p2 >= hi_ex) break;
                u64 first = std::max(p2, (lo + p2 - 1) / p2 * p2);
                for (u64 m = first; m < hi_ex; m += p2)
                    tab.bits_[m >> 6] &= ~(1ULL << (m & 63));
            }
        }
    };
    int nthreads = std::max(1, threads);
    if (nthreads == 1 || segments < 2) {
        work(0, segments);
    } else {
        // kSegment is a multiple of 64, so segments own disjoint bitmap words.
        std::vector<std::thread> pool;
        u64 chunk = (segments + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            u64 b = std::min<u64>(segments, t * chunk);
            u64 e = std::min<u64>(segments, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return tab;
}

DeltaValue delta(const SieveTable& tab, u64 X, u64 q, u64 a) {
    if (q < 1 || X > tab.limit()) throw OutOfRange("delta: bad arguments");
    a %= q;
    u64 g = std::gcd(a == 0 ? q : a, q);
    DeltaValue out{};
    out.phi = modarith::euler_phi(q / g);
    for (u64 n = 1; n <= X; ++n) {
        if (!tab.squarefree(n)) continue;
        if (n % q == a) ++out.count_class;
        if (std::gcd(n, q) == g) ++out.count_cond;
    }
    return out;
}

DeltaValue delta(u64 X, u64 q, u64 a) { return delta(squarefree_sieve(X), X, q, a); }

MaxDelta max_delta(const SieveTable& tab, u64 X, u64 q) {
    if (q < 1 || X > tab.limit()) throw OutOfRange("max_delta: bad arguments");
    std::vector<u64> counts(q, 0);
    for (u64 n = 1; n <= X; ++n)
        if (tab.squarefree(n)) ++counts[n % q];
    u64 coprime_total = 0;
    u64 phi = 0;
    for (u64 a = 0; a < q; ++a) {
        if (q > 1 && std::gcd(a == 0 ? q : a, q) != 1) continue;
        coprime_total += counts[a];
        ++phi;
    }
    MaxDelta best{};
    best.value = -1;
    double main = static_cast<double>(coprime_total) / static_cast<double>(phi);
    for (u64 a = 0; a < q; ++a) {
        if (q > 1 && std::gcd(a == 0 ? q : a, q) != 1) continue;
        double d = std::abs(static_cast<double>(counts[a]) - main);
        if (d > best.value + 1e-12) {
            best.value = d;
            best.a_star = a;
            best.detail = DeltaValue{counts[a], coprime_total, phi};
        }
    }
    return best;
}

MaxDelta max_delta(u64 X, u64 q) { return max_delta(squarefree_sieve(X), X, q); }

bool is_smooth(u64 q, u64 y) {
    for (auto& [p, e] : modarith::factorize(q).factors)
        if (p > y) return false;
    return true;
}

bool is_ultrasmooth(u64 q, u64 y) {
    for (auto& [p, e] : modarith::factorize(q).factors) {
        u64 pe = 1;
        for (int i = 0; i < e; ++i) pe *= p;
        if (pe > y) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Dickman rho by Chebyshev collocation.
//
// From (u rho(u))' = rho(u) - rho(u-1) one gets u rho(u) = int_{u-1}^{u} rho,
// so on [k, k+1] the function solves a Volterra equation whose data is the
// previous piece. Each piece is a degree-(M-1) Chebyshev interpolant; the
// fixed-point iteration contracts with ratio <= 1/(k+1).
// ---------------------------------------------------------------------------
namespace {

constexpr int kCheb = 48;
constexpr int kMaxU = 20;

struct ChebPiece {
    double a, b;                  // interval
    std::array<double, kCheb> c;  // Chebyshev coefficients

    double eval(double x) const {
        double t = (2 * x - a - b) / (b - a);
        double b1 = 0, b2 = 0;
        for (int i = kCheb - 1; i >= 1; --i) {
            double tmp = 2 * t * b1 - b2 + c[i];
            b2 = b1;
            b1 = tmp;
        }
        return t * b1 - b2 + c[0];
    }

    // Antiderivative with F(a) = 0 (the degree-kCheb tail is dropped; the
    // coefficients decay far below the accuracy target).
    ChebPiece antiderivative() const {
        ChebPiece F{a, b, {}};
        double scale = (b - a) / 2;
        std::array<double, kCheb + 2> cc{};
        for (int i = 0; i < kCheb; ++i) cc[i] = c[i];
        std::array<double, kCheb> b_{};
        b_[1] = scale * (2.0 * cc[0] - cc[2]) / 2.0;
        for (int n = 2; n < kCheb; ++n)
            b_[n] = scale * (cc[n - 1] - cc[n + 1]) / (2.0 * n);
        double at_a = 0;
        for (int n = 1; n < kCheb; ++n) at_a += (n % 2 ? -b_[n] : b_[n]);
        b_[0] = -at_a;
        F.c = b_;
        return F;
    }
};

struct DickmanTable {
    std::vector<ChebPiece> pieces;  // pieces[k] covers [k, k+1]

    DickmanTable() {
        std::array<double, kCheb> theta;
        for (int j = 0; j < kCheb; ++j) theta[j] = M_PI * j / (kCheb - 1);

        auto fit = [&](double a, double b, const std::array<double, kCheb>& vals) {
            ChebPiece p{a, b, {}};
            for (int n = 0; n < kCheb; ++n) {
                double s = 0.5 * (vals[0] * std::cos(0.0) +
                                  vals[kCheb - 1] * std::cos(n * theta[kCheb - 1]));
                for (int j = 1; j < kCheb - 1; ++j) s += vals[j] * std::cos(n * theta[j]);
                p.c[n] = 2.0 * s / (kCheb - 1);
            }
            p.c[0] /= 2;
            p.c[kCheb - 1] /= 2;
            return p;
        };

        // rho = 1 on [0, 1].
        {
            std::array<double, kCheb> ones;
            ones.fill(1.0);
            pieces.push_back(fit(0, 1, ones));
        }
        for (int k = 1; k < kMaxU; ++k) {
            double a = k, b = k + 1;
            const ChebPiece& prev = pieces.back();
            ChebPiece Gprev = prev.antiderivative();  // from k-1
            double G_at_k = Gprev.eval(k);            // integral of prev over [k-1, k]
            std::array<double, kCheb> x, vals;
            for (int j = 0; j < kCheb; ++j) {
                x[j] = (a + b) / 2 + (b - a) / 2 * std::cos(theta[j]);
                vals[j] = prev.eval(a);  // start from continuity value rho(k)
            }
            for (int it = 0; it < 200; ++it) {
                ChebPiece cur = fit(a, b, vals);
                ChebPiece C = cur.antiderivative();  // from k
                double change = 0;
                for (int j = 0; j < kCheb; ++j) {
                    // u rho(u) = [G_prev(k) - G_prev(u-1)] + int_k^u rho.
                    double fresh = (G_at_k - Gprev.eval(x[j] - 1) + C.eval(x[j])) / x[j];
                    change = std::max(change, std::abs(fresh - vals[j]));
                    vals[j] = fresh;
                }
                if (change < 1e-17) break;
            }
            pieces.push_back(fit(a, b, vals));
        }
    }
};

}  // namespace

double dickman_rho(double u) {
    if (u < 0 || u > kMaxU || !std::isfinite(u)) throw OutOfRange("dickman_rho domain is [0,20]");
    static const DickmanTable table;
    if (u <= 1) return 1.0;
    int k = std::min(kMaxU - 1, static_cast<int>(u));
    return table.pieces[k].eval(u);
}

DensityReport density_experiment(u64 Y, u64 y) {
    if (Y < 1 || Y > 100'000'000ULL) throw BudgetExceeded("density budget is Y <= 1e8");
    if (y < 2) throw OutOfRange("smoothness bound must be at least 2");
    u64 root = static_cast<u64>(std::sqrt(static_cast<double>(Y)));
    while ((root + 1) * (root + 1) <= Y) ++root;
    auto primes = primes_up_to(root);

    u64 count = 0;
    std::vector<u64> value(kSegment);
    std::vector<char> good(kSegment);
    for (u64 lo = 1; lo <= Y; lo += kSegment) {
        u64 hi = std::min(Y, lo + kSegment - 1);
        u64 len = hi - lo + 1;
        for (u64 i = 0; i < len; ++i) {
            value[i] = lo + i;
            good[i] = 1;
        }
        for (u64 p : primes) {
            if (p > hi) break;
            u64 first = ((lo + p - 1) / p) * p;
            for (u64 m = first; m <= hi; m += p) {
                u64 i = m - lo;
                int e = 0;
                while (value[i] % p == 0) {
                    value[i] /= p;
                    ++e;
                }
                if (e >= 2 || p > y) good[i] = 0;  // not squarefree / not smooth
            }
        }
        for (u64 i = 0; i < len; ++i) {
            if (!good[i]) continue;
            // Remaining cofactor is 1 or a prime above sqrt(Y).
            if (value[i] > y) continue;
            ++count;
        }
    }

    DensityReport rep;
    rep.Y = Y;
    rep.y = y;
    rep.count = count;
    rep.u = std::log(static_cast<double>(Y)) / std::log(static_cast<double>(y));
    rep.prediction = 6.0 / (M_PI * M_PI) * dickman_rho(rep.u) * static_cast<double>(Y);
    rep.rel_deviation = std::abs(static_cast<double>(count) - rep.prediction) / rep.prediction;
    return rep;
}

TheoremReport main_theorem_experiment(const std::vector<u64>& x_ladder,
                                      const std::vector<u64>& q_list, u64 y_reference,
                                      int threads) {
    if (x_ladder.empty() || q_list.empty()) throw OutOfRange("empty experiment");
    std::vector<u64> ladder = x_ladder;
    std::sort(ladder.begin(), ladder.end());
    u64 xmax = ladder.back();
    TheoremReport rep;
    rep.y_reference = y_reference ? y_reference
                                  : static_cast<u64>(std::pow(static_cast<double>(xmax), 0.25));
    auto tab = squarefree_sieve(xmax, threads);

    for (u64 q : q_list) {
        std::vector<double> logx, logd, normalized;
        for (u64 X : ladder) {
            auto md = max_delta(tab, X, q);
            TheoremRow row;
            row.X = X;
            row.q = q;
            row.smooth = is_smooth(q, rep.y_reference);
            row.squarefree = modarith::factorize(q).is_squarefree();
            row.a_star = md.a_star;
            row.max_abs_delta = md.value;
            row.normalized = md.value * static_cast<double>(q) / static_cast<double>(X);
            rep.rows.push_back(row);
            normalized.push_back(row.normalized);
            if (md.value > 0) {
                logx.push_back(std::log(static_cast<double>(X)));
                logd.push_back(std::log(md.value));
            }
        }
        bool dec = true;
        for (size_t i = 1; i < normalized.size(); ++i) dec &= normalized[i] < normalized[i - 1];
        rep.normalized_decreasing[q] = dec;
        // OLS slope of log max|Delta| against log X.
        double slope = 0;
        if (logx.size() >= 2) {
            double mx = 0, my = 0;
            for (size_t i = 0; i < logx.size(); ++i) {
                mx += logx[i];
                my += logd[i];
            }
            mx /= logx.size();
            my /= logx.size();
            double num = 0, den = 0;
            for (size_t i = 0; i < logx.size(); ++i) {
                num += (logx[i] - mx) * (logd[i] - my);
                den += (logx[i] - mx) * (logx[i] - mx);
            }
            slope = den > 0 ? num / den : 0;
        }
        rep.fitted_exponent[q] = slope;
    }
    std::sort(rep.rows.begin(), rep.rows.end(), [](const TheoremRow& a, const TheoremRow& b) {
        return a.q != b.q ? a.q < b.q : a.X < b.X;
    });
    return rep;
}

}  // namespace k2lab::sqfree
