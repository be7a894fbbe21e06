#pragma once

#include <string>

#include "k2lab/corrprime.hpp"

namespace k2lab::vdc {

using corrprime::ShiftMultiset;
using expsum::Engine;
using expsum::SumValue;
using modarith::FactoredModulus;
using modarith::i64;
using modarith::u64;

struct Interval {
    i64 lo = 0, hi = -1;  // inclusive; empty when hi < lo
    u64 length() const { return hi < lo ? 0 : static_cast<u64>(hi - lo + 1); }
};

// ---------------------------------------------------------------------------
// Smooth-modulus factorization helpers.
// ---------------------------------------------------------------------------

/// Divisor q' of q with q^v < q' <= y q^v, for y-smooth q >= 2, built by the
/// ascending greedy prefix over the prime factors taken with multiplicity.
u64 smooth_divisor(const FactoredModulus& q, double v, u64 y);

/// Mutually coprime parts q_1 ... q_k with (q_k, 6) = 1 from the ascending
/// greedy over prime-power atoms, 2- and 3-powers folded into part 1.
/// Windows (with eta = log y / log X):
///   q_1 in (X^{u_1}, X^{u_1+eta} 2^{v2} 3^{v3}],
///   q_j in (X^{u_j}, X^{u_j+eta}] for 2 <= j <= k-1,
///   q_k in (X^{u_k-(k-1) eta} 2^{-v2} 3^{-v3}, 2 X^{u_k}].
/// Throws WindowInfeasible when the greedy runs out of atoms or a window
/// fails, NotUltrasmooth when some p^v || q exceeds y.
std::vector<u64> smooth_factorization(const FactoredModulus& q, const std::vector<double>& u,
                                      double X, u64 y);

/// Same, for moduli too large for u64: the modulus is its factor list and X
/// enters through log X. Individual parts must still fit in u64.
std::vector<u64> smooth_factorization_factors(const std::vector<std::pair<u64, int>>& factors,
                                              const std::vector<double>& u, double log_X, u64 y);

// ---------------------------------------------------------------------------
// Complete correlation sums T and their prime-power factorization.
// ---------------------------------------------------------------------------

struct CompleteTFactor {
    u64 modulus;  // p^nu
    u64 A, B;     // transported residues
    SumValue value;
};

struct CompleteT {
    SumValue full;
    std::vector<CompleteTFactor> factors;  // product equals full exactly
};

/// T(A,B,C,h,h';Q) = sum_b e_Q(C B b) prod_i K2(A,b+h_i;Q) prod_j conj K2(A,b+h'_j;Q),
/// together with its prime-power factors T(c^3 A, c B, C; p^nu), c = (Q/p^nu)^{-1}.
CompleteT complete_T(u64 A, u64 B, u64 C, const ShiftMultiset& shifts, const FactoredModulus& Q,
                     Engine engine);

/// Incomplete correlation sum over an integer interval:
/// sum_{k in J} e_Q(-M k) prod_i K2(b, k+h_i; Q) prod_j conj K2(b, k+h'_j; Q).
SumValue incomplete_T(u64 b, u64 M, Interval J, const ShiftMultiset& shifts,
                      const FactoredModulus& Q, Engine engine);

/// S_{q,a}(k; V1) = sum over d in (V1, V1 + V1/V0], (d,q)=1 of e_q(k a dbar^2).
SumValue incomplete_quadratic_sum(u64 k, u64 a, u64 qtilde, u64 V1, u64 V0,
                                  Engine engine = Engine::Float);

/// kappa(m; ka, q') = max_{1<=R<=K} |sum_{r=K(m-1)+1}^{K(m-1)+R} e_{q'}(-r V1) K2(ka, r; q')|.
double kappa(u64 m, u64 ka, u64 qprime, u64 K, u64 V1);

// ---------------------------------------------------------------------------
// The q-van der Corput decomposition (both sides of the inequality).
// ---------------------------------------------------------------------------

struct FactorizationPlan {
    FactoredModulus Q;        // full modulus, = product of parts
    std::vector<u64> parts;   // Q_0, Q_1, ..., Q_L
    std::vector<std::pair<double, double>> windows;  // optional per-part size bounds
    u64 K = 0;                // completion length
    int L() const { return static_cast<int>(parts.size()) - 1; }
    void validate() const;    // throws PlanInvalid
};

struct VdcTerm {
    std::vector<i64> h;  // h_1..h_L, 1 <= |h_j| <= K/Q_j
    double abs_value;    // |T(h)|
};

struct VdcReport {
    double lhs;              // |T(b, M)| over the full modulus
    double h_sum;            // sum over h of |T(h)|
    double rhs;              // right side of the inequality, constant set to 1
    double fitted_constant;  // lhs / rhs
    std::vector<VdcTerm> terms;
};

/// Enumerates every tuple h with 1 <= |h_j| <= K/Q_j, evaluates
/// T(h) = sum_{k in J} prod_{I subset {1..L}} C^{|I|} K2(b, k + sum_{i in I} Q_i h_i; Q_0)
/// and reports both sides of the van der Corput inequality. The transported
/// unit and per-tuple interval are taken as b mod Q_0 and J itself.
VdcReport vdc_decompose(const FactorizationPlan& plan, u64 b, u64 M, Interval J,
                        u64 tuple_budget = 1'000'000ULL);

// ---------------------------------------------------------------------------
// Bound budgets and the exponent plan.
// ---------------------------------------------------------------------------

enum class BudgetVariant { Squarefree, General };

struct BudgetResult {
    double value;
    double delta_prime;
    bool hypotheses_ok;
    std::vector<std::string> violations;
};

/// Right side of the h-sum bound with the implied constant set to 1:
///   squarefree: (K^L / Q) Q0^{2^{L-1}+3/2} (K/Q0 + 1)
///   general:    (K^L / Q) Q0^{2^{L-1}+2-delta'}
/// delta_prime <= 0 selects the default 2^{-2^L}. Throws HypothesisViolated
/// in strict mode when the variant's hypotheses fail.
BudgetResult correlation_budget(const FactoredModulus& Q0, const std::vector<u64>& rest_parts,
                                u64 K, BudgetVariant variant, double delta_prime = 0,
                                bool strict = true);

/// Exact count of tuples h, 1 <= |h_j| <= K/Q_j, such that for every
/// p^nu || d some pair H_I != H_J has |H_I - H_J|_p < p^{-c nu}.
u64 h_tuple_bad_count(u64 d, const std::vector<u64>& Qparts, u64 K, double c,
                      u64 tuple_budget = 1'000'000ULL);

struct ExponentPlan {
    double gamma;
    double sigma;
    struct Window {
        std::string part;
        double lo, hi;  // exponents of X
    };
    std::vector<Window> windows;  // q~_0, q~_1, ..., q~_L
    double window_sum;            // nominal exponent total; equals 1/2 + sigma
    i64 gamma_max_num, gamma_max_den;  // (L-4)/(4 (2^{L+3}+L)), reduced
    bool feasible;
};

/// gamma = 2 delta + lambda, sigma = 1/L + 2 (2^{L+2}+L) gamma / L, the window
/// exponent table, and the feasibility bound gamma <= (L/4-1)/(2^{L+3}+L).
ExponentPlan exponent_budget(int L, double delta, double lambda, double eta);

}  // namespace k2lab::vdc
