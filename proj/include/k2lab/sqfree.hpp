#pragma once

#include <map>
#include <vector>

#include "k2lab/modarith.hpp"

namespace k2lab::sqfree {

using modarith::i64;
using modarith::u64;

// ---------------------------------------------------------------------------
// SieveTable: bitmap of mu^2(n) for n <= limit.
// ---------------------------------------------------------------------------
class SieveTable {
  public:
    SieveTable() = default;
    u64 limit() const { return limit_; }
    bool squarefree(u64 n) const { return (bits_[n >> 6] >> (n & 63)) & 1; }
    u64 count() const;  // number of squarefree n in [1, limit]

  private:
    friend SieveTable squarefree_sieve(u64, int);
    u64 limit_ = 0;
    std::vector<u64> bits_;
};

/// Exact mu^2 bitmap up to X (X <= 10^9), marked in 2^20-sized segments,
/// optionally in parallel. Throws BudgetExceeded above the memory budget.
SieveTable squarefree_sieve(u64 X, int threads = 1);

// ---------------------------------------------------------------------------
// The equidistribution error functional.
// ---------------------------------------------------------------------------
struct DeltaValue {
    u64 count_class;  // squarefree n <= X, n = a (mod q)
    u64 count_cond;   // squarefree n <= X, (n, q) = (a, q)
    u64 phi;          // phi(q / (a,q))
    double value() const {
        return static_cast<double>(count_class) -
               static_cast<double>(count_cond) / static_cast<double>(phi);
    }
    // Exact numerator of Delta over the denominator phi.
    i64 numerator() const {
        return static_cast<i64>(count_class * phi) - static_cast<i64>(count_cond);
    }
};

DeltaValue delta(const SieveTable& tab, u64 X, u64 q, u64 a);
DeltaValue delta(u64 X, u64 q, u64 a);

struct MaxDelta {
    u64 a_star;
    double value;  // |Delta| at the maximizing coprime class
    DeltaValue detail;
};

/// Maximum of |Delta| over coprime classes a mod q (ties: smallest a).
MaxDelta max_delta(const SieveTable& tab, u64 X, u64 q);
MaxDelta max_delta(u64 X, u64 q);

bool is_smooth(u64 q, u64 y);
bool is_ultrasmooth(u64 q, u64 y);

/// Dickman's function on [0, 20], absolute error well below 1e-8, via the
/// delay equation u rho'(u) = -rho(u-1) integrated one unit interval at a
/// time (Chebyshev collocation of the equivalent Volterra form).
double dickman_rho(double u);

// ---------------------------------------------------------------------------
// Experiments.
// ---------------------------------------------------------------------------
struct DensityReport {
    u64 Y, y;
    u64 count;          // squarefree y-smooth q <= Y
    double u;           // log Y / log y
    double prediction;  // (6/pi^2) rho(u) Y
    double rel_deviation;
};

DensityReport density_experiment(u64 Y, u64 y);

struct TheoremRow {
    u64 X, q;
    bool smooth;      // P^+(q) <= y_reference
    bool squarefree;
    u64 a_star;
    double max_abs_delta;
    double normalized;  // max|Delta| q / X
};

struct TheoremReport {
    std::vector<TheoremRow> rows;                // sorted by (q, X)
    std::map<u64, double> fitted_exponent;       // OLS slope of log max|Delta| in log X
    std::map<u64, bool> normalized_decreasing;   // strictly decreasing along the ladder
    u64 y_reference;
};

/// For each modulus, max_delta across the X ladder, the normalized statistic
/// max|Delta| q / X, and its trend. y_reference defaults to X_max^{1/4}.
TheoremReport main_theorem_experiment(const std::vector<u64>& x_ladder,
                                      const std::vector<u64>& q_list, u64 y_reference = 0,
                                      int threads = 1);

}  // namespace k2lab::sqfree
