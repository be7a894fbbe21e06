#include "k2lab/sumvalue.hpp"

#include <atomic>

namespace k2lab::expsum {

namespace {
std::atomic<u64> g_exact_cap{20000};
}

u64 exact_order_cap() { return g_exact_cap.load(); }
void set_exact_order_cap(u64 cap) { g_exact_cap.store(cap); }

SumValue SumValue::operator+(const SumValue& o) const {
    SumValue r(approx + o.approx);
    if (exact && o.exact) r.exact = *exact + *o.exact;
    return r;
}

SumValue SumValue::operator-(const SumValue& o) const {
    SumValue r(approx - o.approx);
    if (exact && o.exact) r.exact = *exact - *o.exact;
    return r;
}

SumValue SumValue::operator*(const SumValue& o) const {
    SumValue r(approx * o.approx);
    if (exact && o.exact) r.exact = *exact * *o.exact;
    return r;
}

SumValue SumValue::conj() const {
    SumValue r(std::conj(approx));
    if (exact) r.exact = exact->conj();
    return r;
}

SumValue SumValue::scaled(i64 k) const {
    SumValue r(approx * static_cast<double>(k));
    if (exact) r.exact = exact->scaled(k);
    return r;
}

bool SumValue::agrees(const SumValue& o, double tol) const {
    if (exact && o.exact) return *exact == *o.exact;
    return std::abs(approx - o.approx) <= tol * (1 + std::abs(approx));
}

bool SumValue::embedding_consistent(double tol) const {
    if (!exact) return true;
    return std::abs(exact->embed() - approx) <= tol * (1 + std::abs(approx));
}

}  // namespace k2lab::expsum
