#pragma once

#include <map>
#include <memory>
#include <vector>

#include "k2lab/expsum.hpp"

namespace k2lab::corrprime {

using expsum::Engine;
using expsum::K2Table;
using expsum::SumValue;
using modarith::i64;
using modarith::u64;

// ---------------------------------------------------------------------------
// ShiftMultiset: the pair (h, h') with derived support T and multiplicities
// mu(tau), nu(tau), everything reduced mod the context modulus.
// ---------------------------------------------------------------------------
class ShiftMultiset {
  public:
    ShiftMultiset(std::vector<i64> h, std::vector<i64> hprime, u64 modulus);

    u64 modulus() const { return modulus_; }
    size_t N() const { return h_.size(); }
    size_t M() const { return hprime_.size(); }
    size_t total() const { return N() + M(); }
    const std::vector<i64>& h() const { return h_; }
    const std::vector<i64>& hprime() const { return hprime_; }

    /// Distinct shift residues, ascending.
    const std::vector<u64>& support() const { return support_; }
    int mu(u64 tau) const;
    int nu(u64 tau) const;

    /// Same shifts reduced mod a new modulus.
    ShiftMultiset reduced(u64 new_modulus) const { return {h_, hprime_, new_modulus}; }

    bool mu_nu_equal() const;         // mu(tau) == nu(tau) for all tau
    bool mu_nu_equal_mod3() const;    // 3 | (mu(tau) - nu(tau)) for all tau

  private:
    std::vector<i64> h_, hprime_;
    u64 modulus_;
    std::vector<u64> support_;
    std::map<u64, int> mu_, nu_;
};

enum class PrimeClass { Degenerate, Nondegenerate };

/// Degenerate iff the character is trivial (t = 0 mod p) and
/// mu(tau) = nu(tau) (mod 3) for every tau in the support.
PrimeClass classify_prime(u64 psi_index, const ShiftMultiset& shifts);

/// sum over B mod p of e_p(t B) prod_i K2(A, B+h_i; p) prod_j conj K2(A, B+h'_j; p).
/// Floating route sums products from a cached K2 table; the exact engine
/// evaluates the collapsed unit-tuple form.
SumValue corr_sum_prime(u64 A, u64 psi_index, const ShiftMultiset& shifts, u64 p, Engine engine);

/// |corr_sum_prime| normalized by p^{(N+M+1)/2} (nondegenerate) or
/// p^{(N+M)/2+1} (degenerate).
double corr_ratio_prime(u64 A, u64 psi_index, const ShiftMultiset& shifts, u64 p);

/// Cached K2(A, .; q) floating table (direct build), keyed by (A, q).
std::shared_ptr<const K2Table> k2_table_cached(u64 A, u64 q);

// ---------------------------------------------------------------------------
// Collapsed evaluator, shared with the prime-power module: the sum over b of
// e_Q(c b) prod K2 prod conj K2 with b restricted to d mod r, computed by
// summing the defining unit tuples after the orthogonality collapse of b.
// Enumerates phi(Q)^{N+M-1} * r tuples; throws BudgetExceeded above budget.
// ---------------------------------------------------------------------------
SumValue corr_sum_collapsed(u64 a, u64 c, const ShiftMultiset& shifts, u64 Q, Engine engine,
                            u64 d = 0, u64 r = 1, u64 budget = 80'000'000ULL);

}  // namespace k2lab::corrprime
