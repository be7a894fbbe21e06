#pragma once

#include <complex>
#include <optional>

#include "k2lab/cyclotomic.hpp"

namespace k2lab::expsum {

enum class Engine { Float, Exact };

/// Order cap for the exact cyclotomic engine. Requests above the cap throw
/// ExactEngineOverflow; the floating engine has no cap.
u64 exact_order_cap();
void set_exact_order_cap(u64 cap);

// ---------------------------------------------------------------------------
// SumValue: value of an exponential sum, carried as a double-precision
// complex approximation and, for small orders, an exact cyclotomic integer.
// ---------------------------------------------------------------------------
struct SumValue {
    std::complex<double> approx{0.0, 0.0};
    std::optional<Cyclotomic> exact;

    SumValue() = default;
    explicit SumValue(std::complex<double> a) : approx(a) {}
    SumValue(std::complex<double> a, Cyclotomic e) : approx(a), exact(std::move(e)) {}

    static SumValue zero(Engine engine, u64 order) {
        SumValue v;
        if (engine == Engine::Exact) v.exact = Cyclotomic(order);
        return v;
    }

    bool has_exact() const { return exact.has_value(); }
    u64 order() const { return exact ? exact->order() : 0; }

    SumValue operator+(const SumValue& o) const;
    SumValue operator-(const SumValue& o) const;
    SumValue operator*(const SumValue& o) const;
    SumValue conj() const;
    SumValue scaled(i64 k) const;

    double abs() const { return std::abs(approx); }

    /// Exact equality when both carry exact parts, else floating closeness.
    bool agrees(const SumValue& o, double tol = 1e-9) const;

    /// |embed(exact) - approx| <= tol * (1 + |approx|), vacuous without exact.
    bool embedding_consistent(double tol = 1e-9) const;
};

/// Compensated (Neumaier) accumulator for long complex sums; summation order
/// is the call order, so results are reproducible.
class ComplexAccumulator {
  public:
    void add(std::complex<double> x) {
        add_part(re_, re_c_, x.real());
        add_part(im_, im_c_, x.imag());
    }
    std::complex<double> value() const { return {re_ + re_c_, im_ + im_c_}; }

  private:
    static void add_part(double& s, double& c, double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double re_ = 0, re_c_ = 0, im_ = 0, im_c_ = 0;
};

}  // namespace k2lab::expsum
