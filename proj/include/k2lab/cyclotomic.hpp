#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "k2lab/errors.hpp"

namespace k2lab::expsum {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// ---------------------------------------------------------------------------
// CyclotomicField: per-order data for exact arithmetic in Z[zeta_Q].
//
// Elements are accumulated in the group ring Z[x]/(x^Q - 1) (one integer per
// exponent) and reduced against the Q-th cyclotomic polynomial only when a
// canonical form is needed. Phi_Q is monic with integer coefficients, so the
// Euclidean remainder stays in integers.
// ---------------------------------------------------------------------------
class CyclotomicField {
  public:
    static std::shared_ptr<const CyclotomicField> get(u64 order);

    u64 order() const { return order_; }
    u64 degree() const { return degree_; }  // phi(order)
    const std::vector<i64>& phi_coeffs() const { return phi_; }

    /// Canonical power-basis form (length phi(Q)) of a group-ring vector.
    std::vector<i64> reduce(std::vector<i64> v) const;

    std::complex<double> root(u64 exponent) const { return roots_[exponent % order_]; }
    std::complex<double> embed(const std::vector<i64>& group_vec) const;

  private:
    explicit CyclotomicField(u64 order);

    u64 order_;
    u64 degree_;
    std::vector<i64> phi_;                    // Phi_Q, ascending powers, size degree_+1
    std::vector<std::uint32_t> phi_support_;  // indices of nonzero coefficients below degree_
    std::vector<std::complex<double>> roots_; // e(k/Q)
};

// ---------------------------------------------------------------------------
// Cyclotomic: exact element of Z[zeta_Q].
// ---------------------------------------------------------------------------
class Cyclotomic {
  public:
    Cyclotomic() : order_(1), c_(1, 0) {}
    explicit Cyclotomic(u64 order) : order_(order), c_(order, 0) {}

    static Cyclotomic root(u64 order, u64 exponent) {
        Cyclotomic z(order);
        z.c_[exponent % order] = 1;
        return z;
    }
    static Cyclotomic integer(u64 order, i64 n) {
        Cyclotomic z(order);
        z.c_[0] = n;
        return z;
    }

    u64 order() const { return order_; }
    const std::vector<i64>& coeffs() const { return c_; }

    void add_root(u64 exponent, i64 coeff = 1) { c_[exponent % order_] += coeff; }

    Cyclotomic& operator+=(const Cyclotomic& o);
    Cyclotomic& operator-=(const Cyclotomic& o);
    Cyclotomic operator+(const Cyclotomic& o) const {
        Cyclotomic r = *this;
        r += o;
        return r;
    }
    Cyclotomic operator-(const Cyclotomic& o) const {
        Cyclotomic r = *this;
        r -= o;
        return r;
    }
    /// Cyclic convolution; operands of different orders are lifted to the lcm.
    Cyclotomic operator*(const Cyclotomic& o) const;

    Cyclotomic conj() const;            // zeta -> zeta^{-1}
    Cyclotomic scaled(i64 k) const;
    Cyclotomic lifted(u64 new_order) const;  // requires order() | new_order

    bool is_zero() const;
    bool operator==(const Cyclotomic& o) const;

    /// Canonical reduced coefficient vector (length phi(order)).
    std::vector<i64> canonical() const;

    std::complex<double> embed() const;
    size_t support_size() const;

  private:
    u64 order_;
    std::vector<i64> c_;  // exponent-indexed, length order_
};

}  // namespace k2lab::expsum
