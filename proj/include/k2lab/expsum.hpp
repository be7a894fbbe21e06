#pragma once

#include <memory>

#include "k2lab/modarith.hpp"
#include "k2lab/sumvalue.hpp"

namespace k2lab::expsum {

using modarith::FactoredModulus;

/// e_Q(x) = e(x/Q). Throws ExactEngineOverflow for exact orders above the cap.
SumValue root_of_unity(i64 x, u64 Q, Engine engine);

/// Quadratic Gauss sum: sum over x mod p of e_p(x^2), p an odd prime.
/// Equals sqrt(p) for p = 1 (mod 4) and i*sqrt(p) for p = 3 (mod 4).
SumValue gauss_quadratic(u64 p, Engine engine);

/// The Gauss sum mod p as an exact element of Z[zeta_{p^n}].
Cyclotomic gauss_exact_at_order(u64 p, int n);

/// K2(A, B; Q) = sum over units x mod Q of e_Q(A*xbar^2 + B*x),
/// by direct summation (the ground-truth route).
SumValue k2_direct(u64 A, u64 B, u64 Q, Engine engine);

/// Stationary-phase evaluation of K2(a, b; p^n) for p > 3, n >= 2:
///   (3a/p^n) * eps_{p,n} * p^{n/2} * sum over critical points y of e_{p^n}(3a y^2),
/// where the critical points solve y^3 = (2a)^{-1} b over units mod p^{floor(n/2)}
/// and are Hensel-lifted to the unique cube root mod p^n before evaluating the
/// phase. eps_{p,n} = 1 for even n and i^{(p-1)^2/4} for odd n.
SumValue k2_explicit(u64 a, u64 b, u64 p, int n, Engine engine);

struct CrtSplit {
    SumValue factor1;  // K2(r2*A, r2*B; m1)
    SumValue factor2;  // K2(r1*A, r1*B; m2)
    SumValue full;     // K2(A, B; m1*m2)
};

/// Chinese-remainder factorization with Bezout coefficients m1*r1 + m2*r2 = 1.
/// The product of the two factors equals the full sum exactly.
CrtSplit k2_crt_split(u64 A, u64 B, u64 m1, u64 m2, Engine engine);

/// K2 via the prime-power factorization: explicit formula for p^v with p > 3,
/// v >= 2, direct summation otherwise. Agrees with k2_direct everywhere.
SumValue k2_eval(u64 A, u64 B, const FactoredModulus& Q, Engine engine);
SumValue k2_eval(u64 A, u64 B, u64 Q, Engine engine);

// ---------------------------------------------------------------------------
// K2Table: K2(A, b; Q) for every b mod Q, floating engine.
// Direct builds sum each value from the definition; Multiplicative assembles
// values from prime-power tables through the CRT factorization (and is the
// one to use in wide sweeps). Tables are immutable once built.
// ---------------------------------------------------------------------------
class K2Table {
  public:
    enum class Build { Direct, Multiplicative };

    K2Table(u64 A, const FactoredModulus& Q, Build mode);
    K2Table(u64 A, u64 Q, Build mode) : K2Table(A, modarith::factorize(Q), mode) {}

    u64 modulus() const { return q_; }
    std::complex<double> operator[](u64 b) const { return vals_[b % q_]; }
    const std::vector<std::complex<double>>& values() const { return vals_; }

  private:
    u64 q_;
    std::vector<std::complex<double>> vals_;
};

/// Shared complex root table e_Q(k), k = 0..Q-1.
std::shared_ptr<const std::vector<std::complex<double>>> root_table(u64 Q);

}  // namespace k2lab::expsum
