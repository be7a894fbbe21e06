#pragma once

#include <memory>

#include "k2lab/corrprime.hpp"

namespace k2lab::corrpp {

using corrprime::ShiftMultiset;
using expsum::Cyclotomic;
using expsum::Engine;
using expsum::SumValue;
using modarith::i64;
using modarith::u64;

// ---------------------------------------------------------------------------
// StationaryData: per-(p, n) tables for the stationary-phase machinery.
// The branch s is the lift of the smallest cube root mod p, tabulated at full
// precision p^n; u0 is the lifted smallest primitive cube root (1 when
// p = 2 mod 3). Immutable and shared.
// ---------------------------------------------------------------------------
struct StationaryData {
    u64 p;
    int n;
    u64 pn;
    int dp;                   // number of cube roots of unity: 1 or 3
    u64 u0;                   // primitive cube root mod p^n (1 if dp == 1)
    std::vector<u64> s_table; // s(k) mod p^n for unit-cube k, 0 elsewhere

    static std::shared_ptr<const StationaryData> get(u64 p, int n);

    bool cube_class(u64 k) const { return s_table[k % pn] != 0; }
    u64 s(u64 k) const;  // throws OutsideDiamond when undefined
};

// ---------------------------------------------------------------------------
// EpsVector: one frequency vector eps = (eps_tau) of the decomposition,
// tied to its (p, n, shifts, branch) context.
// ---------------------------------------------------------------------------
class EpsContext;
using EpsContextPtr = std::shared_ptr<const EpsContext>;

class EpsContext {
  public:
    EpsContext(u64 p, int n, const ShiftMultiset& shifts);

    u64 p() const { return data_->p; }
    int n() const { return data_->n; }
    u64 pn() const { return data_->pn; }
    int dp() const { return data_->dp; }
    u64 u0() const { return data_->u0; }
    const ShiftMultiset& shifts() const { return shifts_; }
    const std::vector<u64>& support() const { return shifts_.support(); }
    const StationaryData& data() const { return *data_; }

  private:
    ShiftMultiset shifts_;  // reduced mod p^n
    std::shared_ptr<const StationaryData> data_;
};

struct EpsVector {
    EpsContextPtr ctx;
    std::vector<u64> values;  // eps_tau mod p^n, aligned with ctx->support()

    bool is_zero() const {
        for (u64 v : values)
            if (v != 0) return false;
        return true;
    }
};

/// Exact count of index tuples (j, j') realizing eps.
u64 phi_eps(const EpsVector& eps);

/// All eps with phi(eps) > 0, with their counts, in lexicographic order of
/// the value vectors. The total of the counts is dp^{N+M}.
std::vector<std::pair<EpsVector, u64>> eps_spectrum(const EpsContextPtr& ctx);

/// f_{T,eps}(b) = b c + 3 a sum_tau eps_tau s((2a)^{-1}(b+tau))^2 mod p^n.
/// Throws OutsideDiamond when some (2a)^{-1}(b+tau) is not a unit cube.
u64 f_t_eps(u64 b, const EpsVector& eps, u64 a, u64 c);

/// True iff 4 a^2 (d + tau) is a unit cube mod p for every tau in T.
bool diamond_test(u64 d, u64 a, const std::vector<u64>& T, u64 p);

/// S_{p^n}(h, h'; c, a): ground truth by direct double summation.
/// The floating engine multiplies directly-summed K2 values per b; the exact
/// engine evaluates the same sum with the b-summation collapsed by
/// orthogonality. The stationary-phase route is never used here.
SumValue corr_sum_pp(u64 a, u64 c, const ShiftMultiset& shifts, u64 p, int n, Engine engine);

/// Partial sum of corr_sum_pp over b = d (mod p) only.
SumValue corr_sum_pp_partial(u64 a, u64 c, const ShiftMultiset& shifts, u64 p, int n, u64 d,
                             Engine engine);

/// The eps = 0 contribution phi(0) p^{(N+M)n/2} sum_{d diamond} sum_{b=d(p)} e_{p^n}(cb).
/// Exactly 0 unless p^{n-1} | c and 3 | (mu - nu) everywhere. The exact part
/// is present when (N+M) n is even (otherwise the p^{(N+M)n/2} scale leaves
/// the cyclotomic ring).
SumValue eps_zero_term(u64 a, u64 c, const ShiftMultiset& shifts, u64 p, int n,
                       Engine engine = Engine::Float);

/// Sum over diamond-admissible d of e_p(dC).
SumValue diamond_exp_sum(u64 C, u64 a, const std::vector<u64>& Tred, u64 p,
                         Engine engine = Engine::Float);

/// Sum over diamond d of sum_{b = d (p)} e_{p^n}(f_{T,eps}(b)); eps != 0.
SumValue stationary_sum_diamond(const EpsVector& eps, u64 a, u64 c, Engine engine = Engine::Float);

/// Stationary-phase reconstruction of S_{p^n}: the unimodular prefactor times
/// (eps-zero raw sum + sum over eps != 0 of phi(eps) stationary sums), all
/// scaled by p^{(N+M)n/2}. This is the object under test against corr_sum_pp.
SumValue corr_sum_pp_reconstructed(u64 a, u64 c, const ShiftMultiset& shifts, u64 p, int n,
                                   Engine engine);

/// Count of diamond d with sum_tau eps_tau s((2a)^{-1}(d+tau))^{2-3j} = w mod p.
u64 ricroy_count(u64 w, int j, const std::vector<u64>& epsred, const std::vector<u64>& Tred,
                 u64 a, u64 p);

/// Exact count of solutions of the degree-k Vinogradov system with 2s
/// variables in [1, P]. Enumeration budget: (2s) log2 P <= 40.
u64 vinogradov_J(u64 s, u64 k, u64 P);

// ---------------------------------------------------------------------------
// Classification of S_{p^n} configurations.
// ---------------------------------------------------------------------------
enum class PPClass { CaseI, CaseII, CaseIII, Nondegenerate };

struct PPClassification {
    PPClass cls;
    double bound_exponent;      // E with |S| <= C p^E asserted (trivial E for I/II)
    bool large_n_regime;        // n > (N+M)^3 2^{N+M}
    bool separation_holds;      // p-adic separation hypothesis (large-n regime)
    double rho;                 // 1_{p <= 3|T|/2-1} + ceil(log(20(N+M)^3)/log p)
};

PPClassification classify_pp(u64 p, int n, u64 c, const ShiftMultiset& shifts);

}  // namespace k2lab::corrpp
