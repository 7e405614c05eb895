#pragma once

#include "gradcode/errors.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace gradcode {

/// Element of GF(p^k) as a little-endian coefficient vector over GF(p),
/// length k, all coefficients in [0, p).
struct FieldElement {
    std::vector<int> coeffs;

    bool operator==(const FieldElement&) const = default;
};

namespace detail {

// Polynomials over GF(p), little-endian, no trailing zeros enforced by trim().
inline void poly_trim(std::vector<int>& poly) {
    while (!poly.empty() && poly.back() == 0) poly.pop_back();
}

inline std::vector<int> poly_mod(std::vector<int> num, const std::vector<int>& den, int p) {
    poly_trim(num);
    const int deg_den = static_cast<int>(den.size()) - 1;
    while (static_cast<int>(num.size()) - 1 >= deg_den) {
        const int shift = static_cast<int>(num.size()) - 1 - deg_den;
        // den is monic, so the quotient digit is just the leading coefficient
        const int coef = num.back();
        for (int i = 0; i <= deg_den; ++i) {
            int& slot = num[shift + i];
            slot = ((slot - coef * den[i]) % p + p * p) % p;
        }
        poly_trim(num);
    }
    return num;
}

inline bool poly_is_zero(const std::vector<int>& poly) {
    return std::all_of(poly.begin(), poly.end(), [](int c) { return c == 0; });
}

// Trial division by every monic polynomial of degree 1..deg/2.
inline bool poly_irreducible(const std::vector<int>& poly, int p) {
    const int deg = static_cast<int>(poly.size()) - 1;
    if (deg == 1) return true;
    for (int d = 1; 2 * d <= deg; ++d) {
        long long count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (long long idx = 0; idx < count; ++idx) {
            std::vector<int> divisor(d + 1, 0);
            long long rest = idx;
            for (int i = 0; i < d; ++i) {
                divisor[i] = static_cast<int>(rest % p);
                rest /= p;
            }
            divisor[d] = 1;
            if (poly_is_zero(poly_mod(poly, divisor, p))) return false;
        }
    }
    return true;
}

}  // namespace detail

/// GF(q) for a prime power q <= 2^16. The modulus is the lexicographically
/// smallest irreducible monic polynomial of the right degree (little-endian
/// coefficient order), so every construction downstream is reproducible.
/// Elements are addressed either as coefficient vectors (FieldElement) or by
/// their integer index (base-p digits); the index form is table-backed.
class Field {
public:
    explicit Field(int order) : q_(order) {
        if (order < 2 || order > (1 << 16)) throw NotPrimePower("field order must be a prime power in [2, 2^16]: " + std::to_string(order));
        int n = order;
        for (int f = 2; f * f <= n; ++f) {
            if (n % f == 0) {
                p_ = f;
                while (n % f == 0) { n /= f; ++k_; }
                if (n != 1) throw NotPrimePower(std::to_string(order) + " has two distinct prime factors");
                break;
            }
        }
        if (p_ == 0) { p_ = n; k_ = 1; }
        choose_modulus();
        build_tables();
    }

    int characteristic() const { return p_; }
    int degree() const { return k_; }
    int order() const { return q_; }
    const std::vector<int>& modulus() const { return modulus_; }

    FieldElement element(int index) const {
        check_index(index);
        FieldElement e;
        e.coeffs.resize(k_);
        for (int i = 0; i < k_; ++i) { e.coeffs[i] = index % p_; index /= p_; }
        return e;
    }

    int index(const FieldElement& e) const {
        int idx = 0;
        for (int i = k_ - 1; i >= 0; --i) idx = idx * p_ + e.coeffs[i];
        return idx;
    }

    FieldElement zero() const { return element(0); }
    FieldElement one() const { return element(1); }

    // Index-based arithmetic (the fast path used by the geometry builders).
    // Orders above the table threshold fall back to on-the-fly polynomial
    // arithmetic; inverses there go through a^(q-2).
    int add_idx(int a, int b) const { return tabled_ ? add_table_[a * q_ + b] : raw_add(a, b); }
    int mul_idx(int a, int b) const { return tabled_ ? mul_table_[a * q_ + b] : raw_mul(a, b); }
    int neg_idx(int a) const { return tabled_ ? neg_table_[a] : raw_neg(a); }
    int inv_idx(int a) const {
        if (a == 0) throw DivideByZero("inverse of zero");
        return tabled_ ? inv_table_[a] : pow_idx(a, q_ - 2);
    }

    FieldElement add(const FieldElement& a, const FieldElement& b) const {
        return element(add_idx(index(a), index(b)));
    }
    FieldElement mul(const FieldElement& a, const FieldElement& b) const {
        return element(mul_idx(index(a), index(b)));
    }
    FieldElement neg(const FieldElement& a) const { return element(neg_idx(index(a))); }
    FieldElement inv(const FieldElement& a) const { return element(inv_idx(index(a))); }

private:
    void check_index(int index) const {
        if (index < 0 || index >= q_) throw IndexOutOfRange("field element index out of range");
    }

    void choose_modulus() {
        for (int idx = 0;; ++idx) {
            std::vector<int> candidate(k_ + 1, 0);
            int rest = idx;
            for (int i = 0; i < k_; ++i) { candidate[i] = rest % p_; rest /= p_; }
            candidate[k_] = 1;
            if (detail::poly_irreducible(candidate, p_)) { modulus_ = candidate; return; }
        }
    }

    int raw_add(int a, int b) const {
        int out = 0, scale = 1;
        for (int i = 0; i < k_; ++i) {
            out += ((a % p_ + b % p_) % p_) * scale;
            a /= p_; b /= p_; scale *= p_;
        }
        return out;
    }

    int raw_mul(int a, int b) const {
        std::vector<int> pa(k_), pb(k_);
        for (int i = 0; i < k_; ++i) { pa[i] = a % p_; a /= p_; }
        for (int i = 0; i < k_; ++i) { pb[i] = b % p_; b /= p_; }
        std::vector<int> prod(2 * k_ - 1, 0);
        for (int i = 0; i < k_; ++i) {
            if (pa[i] == 0) continue;
            for (int j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + pa[i] * pb[j]) % p_;
        }
        prod = detail::poly_mod(std::move(prod), modulus_, p_);
        int out = 0;
        for (int i = static_cast<int>(prod.size()) - 1; i >= 0; --i) out = out * p_ + prod[i];
        return out;
    }

    int raw_neg(int a) const {
        int out = 0, scale = 1;
        for (int i = 0; i < k_; ++i) {
            out += ((p_ - a % p_) % p_) * scale;
            a /= p_; scale *= p_;
        }
        return out;
    }

    int pow_idx(int base, int exponent) const {
        int result = 1;
        while (exponent > 0) {
            if (exponent & 1) result = raw_mul(result, base);
            base = raw_mul(base, base);
            exponent >>= 1;
        }
        return result;
    }

    void build_tables() {
        tabled_ = q_ <= 1024;
        if (!tabled_) return;
        add_table_.resize(static_cast<std::size_t>(q_) * q_);
        mul_table_.resize(static_cast<std::size_t>(q_) * q_);
        neg_table_.resize(q_);
        inv_table_.assign(q_, 0);
        for (int a = 0; a < q_; ++a) {
            for (int b = 0; b < q_; ++b) {
                add_table_[a * q_ + b] = raw_add(a, b);
                mul_table_[a * q_ + b] = raw_mul(a, b);
            }
        }
        for (int a = 0; a < q_; ++a) {
            for (int b = 0; b < q_; ++b) {
                if (add_table_[a * q_ + b] == 0) neg_table_[a] = b;
                if (a != 0 && mul_table_[a * q_ + b] == 1) inv_table_[a] = b;
            }
        }
    }

    int p_ = 0;
    int k_ = 0;
    int q_ = 0;
    bool tabled_ = false;
    std::vector<int> modulus_;
    std::vector<int> add_table_, mul_table_;
    std::vector<int> neg_table_, inv_table_;
};

/// Scales a nonzero vector so its first nonzero coordinate is 1; vectors in
/// the same one-dimensional subspace normalize to the same representative.
inline std::vector<FieldElement> projective_normalize(const Field& field, std::vector<FieldElement> vec) {
    int lead = -1;
    for (std::size_t i = 0; i < vec.size(); ++i) {
        if (field.index(vec[i]) != 0) { lead = static_cast<int>(i); break; }
    }
    if (lead < 0) throw ZeroVector("cannot normalize the zero vector");
    const int scale = field.inv_idx(field.index(vec[lead]));
    for (auto& coord : vec) coord = field.element(field.mul_idx(scale, field.index(coord)));
    return vec;
}

}  // namespace gradcode
