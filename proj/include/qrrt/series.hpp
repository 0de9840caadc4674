#pragma once

// Exact truncated bivariate Laurent series in (a, q) over arbitrary-precision
// integers, plus q-Pochhammer products and theta sums.

#include <gmpxx.h>

#include <compare>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qrrt/errors.hpp"

namespace qrrt {

using Int = mpz_class;

/// Exponent with denominator 2, value = numerator / 2.  Exponents such as
/// (3/2)n^2 - (1/2)n are assembled from these; a term may only enter a
/// series once its total exponent is integral.
struct HalfExponent {
    long long numerator = 0;

    static HalfExponent of(long long whole) { return {2 * whole}; }
    static HalfExponent halves(long long num) { return {num}; }

    bool is_integral() const { return numerator % 2 == 0; }

    long long to_int() const {
        if (!is_integral())
            throw NonIntegerExponentError("half-exponent " + std::to_string(numerator) +
                                          "/2 is not an integer");
        return numerator / 2;
    }

    HalfExponent operator+(HalfExponent o) const { return {numerator + o.numerator}; }
    HalfExponent operator-(HalfExponent o) const { return {numerator - o.numerator}; }
    HalfExponent operator*(long long s) const { return {numerator * s}; }
    HalfExponent operator-() const { return {-numerator}; }
    bool operator==(const HalfExponent&) const = default;
};

struct TermKey {
    int a_exp = 0;
    int q_exp = 0;
    auto operator<=>(const TermKey&) const = default;
};

/// Location and the two disagreeing coefficients of the first point where two
/// series differ (ordered by q exponent, then a exponent).
struct Divergence {
    int a_exp = 0;
    int q_exp = 0;
    Int lhs;
    Int rhs;
};

class TruncatedSeries {
public:
    explicit TruncatedSeries(int q_order, std::optional<int> a_order = std::nullopt)
        : q_order_(q_order), a_order_(a_order) {}

    static TruncatedSeries monomial(Int coeff, int a_exp, int q_exp, int q_order,
                                    std::optional<int> a_order = std::nullopt) {
        TruncatedSeries s(q_order, a_order);
        s.add_term(a_exp, q_exp, coeff);
        return s;
    }

    static TruncatedSeries one(int q_order, std::optional<int> a_order = std::nullopt) {
        return monomial(1, 0, 0, q_order, a_order);
    }

    int q_order() const { return q_order_; }
    std::optional<int> a_order() const { return a_order_; }
    const std::map<TermKey, Int>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }

    /// True when every stored exponent is nonnegative (an ordinary power
    /// series rather than a Laurent one).
    bool is_power_series() const {
        for (const auto& [k, c] : terms_)
            if (k.a_exp < 0 || k.q_exp < 0) return false;
        return true;
    }

    Int coeff(int a_exp, int q_exp) const {
        auto it = terms_.find({a_exp, q_exp});
        return it == terms_.end() ? Int(0) : it->second;
    }

    /// Coefficient of q^n for a univariate (a-free) series.
    Int q_coeff(int q_exp) const { return coeff(0, q_exp); }

    /// Accumulates a term, honoring the truncation bounds and dropping zeros.
    void add_term(int a_exp, int q_exp, const Int& c) {
        if (c == 0 || q_exp > q_order_) return;
        if (a_order_ && a_exp > *a_order_) return;
        auto [it, inserted] = terms_.try_emplace({a_exp, q_exp}, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    TruncatedSeries truncated(int q_order, std::optional<int> a_order = std::nullopt) const {
        TruncatedSeries r(std::min(q_order, q_order_), min_a_order(a_order, a_order_));
        for (const auto& [k, c] : terms_) r.add_term(k.a_exp, k.q_exp, c);
        return r;
    }

    TruncatedSeries operator-() const {
        TruncatedSeries r(q_order_, a_order_);
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
        return r;
    }

    friend TruncatedSeries operator+(const TruncatedSeries& x, const TruncatedSeries& y) {
        TruncatedSeries r(std::min(x.q_order_, y.q_order_), min_a_order(x.a_order_, y.a_order_));
        for (const auto& [k, c] : x.terms_) r.add_term(k.a_exp, k.q_exp, c);
        for (const auto& [k, c] : y.terms_) r.add_term(k.a_exp, k.q_exp, c);
        return r;
    }

    friend TruncatedSeries operator-(const TruncatedSeries& x, const TruncatedSeries& y) {
        return x + (-y);
    }

    friend TruncatedSeries operator*(const TruncatedSeries& x, const TruncatedSeries& y) {
        TruncatedSeries r(std::min(x.q_order_, y.q_order_), min_a_order(x.a_order_, y.a_order_));
        // Iterate the smaller operand on the outside; mpz accumulation
        // dominates, so the order only matters for cache behavior.
        const TruncatedSeries& s = x.terms_.size() <= y.terms_.size() ? x : y;
        const TruncatedSeries& t = x.terms_.size() <= y.terms_.size() ? y : x;
        Int prod;
        for (const auto& [ks, cs] : s.terms_) {
            for (const auto& [kt, ct] : t.terms_) {
                int qe = ks.q_exp + kt.q_exp;
                if (qe > r.q_order_) continue;
                int ae = ks.a_exp + kt.a_exp;
                if (r.a_order_ && ae > *r.a_order_) continue;
                prod = cs * ct;
                auto [it, inserted] = r.terms_.try_emplace({ae, qe}, prod);
                if (!inserted) it->second += prod;
            }
        }
        std::erase_if(r.terms_, [](const auto& kv) { return kv.second == 0; });
        return r;
    }

    TruncatedSeries& operator+=(const TruncatedSeries& y) { return *this = *this + y; }
    TruncatedSeries& operator-=(const TruncatedSeries& y) { return *this = *this - y; }
    TruncatedSeries& operator*=(const TruncatedSeries& y) { return *this = *this * y; }

    /// q-adic inverse.  Requires the (0,0) term to be +-1 and every other
    /// term to have q_exp >= 1.
    TruncatedSeries invert() const {
        Int c0 = coeff(0, 0);
        if (c0 != 1 && c0 != -1)
            throw NotInvertibleError("constant term is not +-1");
        for (const auto& [k, c] : terms_)
            if (!(k.a_exp == 0 && k.q_exp == 0) && k.q_exp < 1)
                throw NotInvertibleError("non-constant term with q_exp < 1");

        // Slice by q degree; coefficients are polynomials in a.
        using APoly = std::map<int, Int>;
        std::vector<APoly> s(q_order_ + 1), b(q_order_ + 1);
        for (const auto& [k, c] : terms_)
            if (k.q_exp >= 1) s[k.q_exp][k.a_exp] = c;
        b[0][0] = c0;  // 1/c0 == c0 for c0 = +-1
        for (int n = 1; n <= q_order_; ++n) {
            APoly acc;
            for (int k = 1; k <= n; ++k) {
                if (s[k].empty() || b[n - k].empty()) continue;
                for (const auto& [ae1, c1] : s[k])
                    for (const auto& [ae2, c2] : b[n - k]) {
                        int ae = ae1 + ae2;
                        if (a_order_ && ae > *a_order_) continue;
                        acc[ae] += c1 * c2;
                    }
            }
            for (auto& [ae, c] : acc) {
                c *= -c0;
                if (c != 0) b[n][ae] = c;
            }
        }
        TruncatedSeries r(q_order_, a_order_);
        for (int n = 0; n <= q_order_; ++n)
            for (const auto& [ae, c] : b[n])
                if (c != 0) r.terms_.emplace(TermKey{ae, n}, c);
        return r;
    }

    /// a -> a q^{a_shift}, q -> q^{q_scale}; the result keeps this series'
    /// q_order, so callers must build inputs at ceil(order/q_scale) precision.
    TruncatedSeries substitute(int a_shift, int q_scale) const {
        TruncatedSeries r(q_order_, a_order_);
        for (const auto& [k, c] : terms_)
            r.add_term(k.a_exp, q_scale * k.q_exp + a_shift * k.a_exp, c);
        return r;
    }

    /// a = 0: keeps the a-free part.  Laurent input with a_exp < 0 is an error.
    TruncatedSeries eval_at_zero() const {
        TruncatedSeries r(q_order_);
        for (const auto& [k, c] : terms_) {
            if (k.a_exp < 0)
                throw NegativeAPowerError("cannot evaluate at a = 0: term with a_exp < 0");
            if (k.a_exp == 0) r.add_term(0, k.q_exp, c);
        }
        return r;
    }

    /// a = 1: sums coefficients by q exponent.
    TruncatedSeries eval_at_one() const {
        TruncatedSeries r(q_order_);
        for (const auto& [k, c] : terms_) r.add_term(0, k.q_exp, c);
        return r;
    }

    /// a = q^t: maps a^i q^j to q^{j + t i}.
    TruncatedSeries eval_at_q_power(int t) const {
        TruncatedSeries r(q_order_);
        for (const auto& [k, c] : terms_) r.add_term(0, k.q_exp + t * k.a_exp, c);
        return r;
    }

    /// First coefficient mismatch between two series, compared up to the
    /// minimum of the truncation orders; nullopt when they agree.
    static std::optional<Divergence> first_divergence(const TruncatedSeries& lhs,
                                                      const TruncatedSeries& rhs) {
        int qmax = std::min(lhs.q_order_, rhs.q_order_);
        std::optional<int> amax = min_a_order(lhs.a_order_, rhs.a_order_);
        std::map<std::pair<int, int>, char> keys;  // (q_exp, a_exp)
        auto collect = [&](const TruncatedSeries& s) {
            for (const auto& [k, c] : s.terms_) {
                if (k.q_exp > qmax) continue;
                if (amax && k.a_exp > *amax) continue;
                keys.try_emplace({k.q_exp, k.a_exp});
            }
        };
        collect(lhs);
        collect(rhs);
        for (const auto& [qa, unused] : keys) {
            Int cl = lhs.coeff(qa.second, qa.first);
            Int cr = rhs.coeff(qa.second, qa.first);
            if (cl != cr) return Divergence{qa.second, qa.first, cl, cr};
        }
        return std::nullopt;
    }

    bool agrees_with(const TruncatedSeries& other) const {
        return !first_divergence(*this, other).has_value();
    }

    int min_q_exp() const {
        int m = 0;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (first || k.q_exp < m) m = k.q_exp;
            first = false;
        }
        return m;
    }

    /// Rendering such as "1 -1q +2q^2 -1a*q^3", ordered by (q_exp, a_exp).
    std::string to_string(int max_q = -1) const {
        std::map<std::pair<int, int>, Int> ordered;
        for (const auto& [k, c] : terms_) {
            if (max_q >= 0 && k.q_exp > max_q) continue;
            ordered[{k.q_exp, k.a_exp}] = c;
        }
        if (ordered.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [qa, c] : ordered) {
            if (!first) os << ' ';
            if (c >= 0 && !first) os << '+';
            os << c.get_str();
            first = false;
            if (qa.second != 0) {
                os << 'a';
                if (qa.second != 1) os << '^' << qa.second;
                if (qa.first != 0) os << '*';
            }
            if (qa.first != 0) {
                os << 'q';
                if (qa.first != 1) os << '^' << qa.first;
            }
        }
        return os.str();
    }

private:
    static std::optional<int> min_a_order(std::optional<int> x, std::optional<int> y) {
        if (x && y) return std::min(*x, *y);
        return x ? x : y;
    }

    std::map<TermKey, Int> terms_;
    int q_order_;
    std::optional<int> a_order_;
};

/// Symbolic description of a rising q-factorial
/// prod_{j=0}^{length-1} (1 - sign * a^{a_power} q^{q_offset + j*q_step});
/// length == nullopt means the infinite product.
struct PochhammerSpec {
    int sign = +1;
    int a_power = 0;
    int q_offset = 0;
    int q_step = 1;
    std::optional<long> length;  // nullopt = infinite

    static PochhammerSpec finite(int sign, int a_power, int q_offset, int q_step, long length) {
        return {sign, a_power, q_offset, q_step, length};
    }
    static PochhammerSpec infinite(int sign, int a_power, int q_offset, int q_step) {
        return {sign, a_power, q_offset, q_step, std::nullopt};
    }
};

inline TruncatedSeries pochhammer(const PochhammerSpec& spec, int q_order,
                                  std::optional<int> a_order = std::nullopt) {
    if (spec.q_step <= 0) throw ValidationError("pochhammer q_step must be positive");
    TruncatedSeries r = TruncatedSeries::one(q_order, a_order);
    if (!spec.length) {
        if (spec.q_offset <= 0 && spec.a_power == 0)
            throw NonTruncatingError("infinite pochhammer with q_offset <= 0 and no a power");
        for (long j = 0;; ++j) {
            long e = spec.q_offset + j * spec.q_step;
            if (e > q_order) break;
            TruncatedSeries f = TruncatedSeries::one(q_order, a_order);
            f.add_term(spec.a_power, static_cast<int>(e), Int(-spec.sign));
            r *= f;
        }
        return r;
    }
    if (*spec.length < 0)
        throw ValidationError("pochhammer with negative length (use the reciprocal convention)");
    for (long j = 0; j < *spec.length; ++j) {
        long e = spec.q_offset + j * spec.q_step;
        TruncatedSeries f = TruncatedSeries::one(q_order, a_order);
        if (e <= q_order) f.add_term(spec.a_power, static_cast<int>(e), Int(-spec.sign));
        r *= f;
    }
    return r;
}

/// Reciprocal 1 / (spec), expanded as a product of geometric series.  The
/// negative-length convention applies: 1/(q;q)_M = 0 for M < 0.  Every factor
/// must have q exponent >= 1 so the expansion is q-adic.
inline TruncatedSeries pochhammer_inverse(const PochhammerSpec& spec, int q_order,
                                          std::optional<int> a_order = std::nullopt) {
    if (spec.q_step <= 0) throw ValidationError("pochhammer q_step must be positive");
    if (spec.length && *spec.length < 0) return TruncatedSeries(q_order, a_order);  // zero
    if (spec.q_offset < 1)
        throw NotInvertibleError("pochhammer reciprocal needs q_offset >= 1");
    TruncatedSeries r = TruncatedSeries::one(q_order, a_order);
    for (long j = 0; !spec.length || j < *spec.length; ++j) {
        long e = spec.q_offset + j * spec.q_step;
        if (e > q_order) break;  // remaining factors cannot reach the order
        // 1/(1 - s a^p q^e) = sum_t s^t a^{pt} q^{et}
        TruncatedSeries g(q_order, a_order);
        Int c = 1;
        for (long t = 0; e * t <= q_order; ++t) {
            if (a_order && spec.a_power * t > *a_order) break;
            g.add_term(static_cast<int>(spec.a_power * t), static_cast<int>(e * t), c);
            c *= spec.sign;
        }
        r *= g;
    }
    return r;
}

/// sum_{n in Z} (-1)^n q^{A n^2 + B n}, truncated at q_order; requires A > 0
/// and A n^2 + B n integral for every n.
inline TruncatedSeries theta_sum(HalfExponent A, HalfExponent B, int q_order) {
    if (A.numerator <= 0) throw ValidationError("theta_sum needs A > 0");
    TruncatedSeries r(q_order);
    // |n| beyond which A n^2 + B n > q_order for both signs of n.
    long long bound = 1;
    while (A.numerator * bound * bound - 2 * (std::abs(B.numerator) + 1) * bound <=
           2LL * q_order + 2)
        ++bound;
    for (long long n = -bound; n <= bound; ++n) {
        HalfExponent e = A * (n * n) + B * n;
        long long ei = e.to_int();
        if (ei > q_order) continue;
        r.add_term(0, static_cast<int>(ei), (n % 2 == 0) ? Int(1) : Int(-1));
    }
    return r;
}

}  // namespace qrrt
