#include "k2lab/cyclotomic.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace k2lab::expsum {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// Exact division of integer polynomials, q = a / b with b monic;
// the remainder must vanish.
std::vector<i64> exact_divide(std::vector<i64> a, const std::vector<i64>& b) {
    size_t db = b.size() - 1;
    std::vector<i64> q(a.size() - db, 0);
    for (size_t k = q.size(); k-- > 0;) {
        i64 c = a[k + db];
        q[k] = c;
        if (c != 0)
            for (size_t j = 0; j <= db; ++j) a[k + j] -= c * b[j];
    }
    return q;
}

// Cyclotomic polynomial Phi_n, ascending coefficients.
// Phi_1 = x - 1; Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d.
std::vector<i64> cyclotomic_poly(u64 n) {
    static std::map<u64, std::vector<i64>> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    std::vector<i64> result;
    if (n == 1) {
        result = {-1, 1};
    } else {
        std::vector<i64> num(n + 1, 0);
        num[0] = -1;
        num[n] = 1;
        // Divisors of n, ascending, excluding n itself.
        for (u64 d = 1; d < n; ++d) {
            if (n % d == 0) num = exact_divide(std::move(num), cyclotomic_poly(d));
        }
        result = std::move(num);
    }
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(n, result);
    return result;
}

}  // namespace

CyclotomicField::CyclotomicField(u64 order) : order_(order) {
    phi_ = cyclotomic_poly(order);
    degree_ = phi_.size() - 1;
    for (std::uint32_t i = 0; i < degree_; ++i)
        if (phi_[i] != 0) phi_support_.push_back(i);
    roots_.resize(order_);
    for (u64 k = 0; k < order_; ++k) {
        double t = kTau * static_cast<double>(k) / static_cast<double>(order_);
        roots_[k] = {std::cos(t), std::sin(t)};
    }
}

std::shared_ptr<const CyclotomicField> CyclotomicField::get(u64 order) {
    static std::map<u64, std::shared_ptr<const CyclotomicField>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    auto field = std::shared_ptr<const CyclotomicField>(new CyclotomicField(order));
    cache.emplace(order, field);
    return field;
}

std::vector<i64> CyclotomicField::reduce(std::vector<i64> v) const {
    v.resize(std::max<size_t>(v.size(), degree_), 0);
    for (size_t i = v.size(); i-- > degree_;) {
        i64 c = v[i];
        if (c == 0) continue;
        v[i] = 0;
        size_t base = i - degree_;
        for (std::uint32_t j : phi_support_) v[base + j] -= c * phi_[j];
    }
    v.resize(degree_);
    return v;
}

std::complex<double> CyclotomicField::embed(const std::vector<i64>& group_vec) const {
    std::complex<double> s = 0;
    for (u64 k = 0; k < group_vec.size(); ++k)
        if (group_vec[k] != 0) s += static_cast<double>(group_vec[k]) * roots_[k % order_];
    return s;
}

Cyclotomic& Cyclotomic::operator+=(const Cyclotomic& o) {
    if (o.order_ != order_) {
        if (order_ % o.order_ == 0) return *this += o.lifted(order_);
        u64 l = std::lcm(order_, o.order_);
        *this = lifted(l);
        return *this += o.lifted(l);
    }
    for (u64 i = 0; i < order_; ++i) c_[i] += o.c_[i];
    return *this;
}

Cyclotomic& Cyclotomic::operator-=(const Cyclotomic& o) {
    *this += o.scaled(-1);
    return *this;
}

Cyclotomic Cyclotomic::operator*(const Cyclotomic& o) const {
    if (o.order_ != order_) {
        u64 l = std::lcm(order_, o.order_);
        return lifted(l) * o.lifted(l);
    }
    std::vector<u64> sa, sb;
    for (u64 i = 0; i < order_; ++i)
        if (c_[i] != 0) sa.push_back(i);
    for (u64 j = 0; j < order_; ++j)
        if (o.c_[j] != 0) sb.push_back(j);
    Cyclotomic r(order_);
    std::vector<__int128> acc(order_, 0);
    for (u64 i : sa)
        for (u64 j : sb) {
            u64 k = i + j;
            if (k >= order_) k -= order_;
            acc[k] += static_cast<__int128>(c_[i]) * o.c_[j];
        }
    for (u64 k = 0; k < order_; ++k) {
        if (acc[k] > INT64_MAX || acc[k] < INT64_MIN)
            throw ExactEngineOverflow("coefficient overflow in product");
        r.c_[k] = static_cast<i64>(acc[k]);
    }
    return r;
}

Cyclotomic Cyclotomic::conj() const {
    Cyclotomic r(order_);
    r.c_[0] = c_[0];
    for (u64 i = 1; i < order_; ++i) r.c_[order_ - i] = c_[i];
    return r;
}

Cyclotomic Cyclotomic::scaled(i64 k) const {
    Cyclotomic r = *this;
    for (auto& x : r.c_) x *= k;
    return r;
}

Cyclotomic Cyclotomic::lifted(u64 new_order) const {
    if (new_order == order_) return *this;
    if (new_order % order_ != 0) throw Error("lift target must be a multiple of the order");
    u64 stride = new_order / order_;
    Cyclotomic r(new_order);
    for (u64 i = 0; i < order_; ++i) r.c_[i * stride] = c_[i];
    return r;
}

bool Cyclotomic::is_zero() const {
    auto field = CyclotomicField::get(order_);
    auto red = field->reduce(c_);
    for (i64 x : red)
        if (x != 0) return false;
    return true;
}

bool Cyclotomic::operator==(const Cyclotomic& o) const { return (*this - o).is_zero(); }

std::vector<i64> Cyclotomic::canonical() const { return CyclotomicField::get(order_)->reduce(c_); }

std::complex<double> Cyclotomic::embed() const { return CyclotomicField::get(order_)->embed(c_); }

size_t Cyclotomic::support_size() const {
    size_t n = 0;
    for (i64 x : c_)
        if (x != 0) ++n;
    return n;
}

}  // namespace k2lab::expsum
