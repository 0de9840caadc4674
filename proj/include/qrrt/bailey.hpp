#pragma once

// Parametrized Bailey pairs: the cancelled-form alpha, the definitional beta,
// the closed-form betas, and the three limiting insertion transforms.

#include <map>
#include <mutex>
#include <vector>

#include "qrrt/report.hpp"
#include "qrrt/series.hpp"

namespace qrrt {

/// The (d, k) pair selecting a parametrized Bailey pair; lambda is the
/// coefficient of r^2 in the q-exponent of alpha.
struct DKParams {
    int d = 1;
    int k = 1;

    long lambda() const { return static_cast<long>(d) * (2 * k + 1 - 3 * d) / 2; }

    auto operator<=>(const DKParams&) const = default;
};

namespace detail {

/// Orders the series factors of a term must be built at so that multiplying
/// by the monomial prefactor a^{a_pre} q^{q_pre} is exact at `target`.
inline Orders elevated(Orders target, long a_pre, long q_pre) {
    Orders o;
    o.q_order = target.q_order - static_cast<int>(std::min(0L, q_pre));
    if (target.a_order)
        o.a_order = *target.a_order - static_cast<int>(std::min(0L, a_pre));
    return o;
}

/// Orders a cofactor must be built at so that multiplying it with `s`
/// (possibly Laurent) is exact at `target`.
inline Orders elevated_for(Orders target, const TruncatedSeries& s) {
    long qmin = 0, amin = 0;
    for (const auto& [k, c] : s.terms()) {
        qmin = std::min<long>(qmin, k.q_exp);
        amin = std::min<long>(amin, k.a_exp);
    }
    return elevated(target, amin, qmin);
}

inline TruncatedSeries truncate(const TruncatedSeries& s, Orders o) {
    return s.truncated(o.q_order, o.a_order);
}

}  // namespace detail

/// alpha_{d,k,m}(a,q) via the cancelled closed form: for m = dr, r >= 1,
///   (-1)^r a^{(k-d)r} q^{(dk - d^2 + d/2) r^2 - (d/2) r}
///     (1 - a q^{2dr}) (aq^d;q^d)_{r-1} / (q^d;q^d)_r,
/// 1 at m = 0, and 0 when d does not divide m.
inline TruncatedSeries alpha(DKParams p, long m, Orders orders) {
    if (m % p.d != 0) return TruncatedSeries(orders.q_order, orders.a_order);
    long r = m / p.d;
    if (r == 0) return TruncatedSeries::one(orders.q_order, orders.a_order);

    long a_pre = static_cast<long>(p.k - p.d) * r;
    HalfExponent qh =
        HalfExponent::halves((2L * p.d * p.k - 2L * p.d * p.d + p.d) * r * r - p.d * r);
    long q_pre = qh.to_int();
    if (q_pre > orders.q_order) return TruncatedSeries(orders.q_order, orders.a_order);

    Orders eo = detail::elevated(orders, a_pre, q_pre);
    auto prod =
        pochhammer(PochhammerSpec::finite(+1, 1, p.d, p.d, r - 1), eo.q_order, eo.a_order) *
        pochhammer_inverse(PochhammerSpec::finite(+1, 0, p.d, p.d, r), eo.q_order, eo.a_order);
    TruncatedSeries bracket = TruncatedSeries::one(eo.q_order, eo.a_order);
    if (2L * p.d * r <= eo.q_order)
        bracket.add_term(1, static_cast<int>(2 * p.d * r), Int(-1));
    prod *= bracket;
    Int sign = (r % 2 == 0) ? 1 : -1;
    auto term = TruncatedSeries::monomial(sign, static_cast<int>(a_pre),
                                          static_cast<int>(q_pre), eo.q_order, eo.a_order) *
                prod;
    return detail::truncate(term, orders);
}

/// beta_{d,k,n} computed definitionally:
///   beta_n = sum_{r=0}^{n} alpha_r / ((q;q)_{n-r} (aq;q)_{n+r}).
inline TruncatedSeries beta_definitional(DKParams p, long n, Orders orders) {
    TruncatedSeries acc(orders.q_order, orders.a_order);
    for (long r = 0; r <= n; ++r) {
        if (r % p.d != 0) continue;
        auto a_r = alpha(p, r, orders);
        if (a_r.is_zero()) continue;
        Orders eo = detail::elevated_for(orders, a_r);
        auto term = a_r *
                    pochhammer_inverse(PochhammerSpec::finite(+1, 0, 1, 1, n - r),
                                       eo.q_order, eo.a_order) *
                    pochhammer_inverse(PochhammerSpec::finite(+1, 1, 1, 1, n + r),
                                       eo.q_order, eo.a_order);
        acc += detail::truncate(term, orders);
    }
    return acc;
}

inline bool has_closed_beta(DKParams p) {
    return (p.d == 2 && (p.k == 1 || p.k == 4)) || (p.d == 3 && (p.k == 3 || p.k == 5)) ||
           (p.d == 4 && p.k == 6);
}

namespace detail {

// (a;q^s)_L / (a;q)_M with the shared (1-a) factor cancelled symbolically:
// valid whenever L >= 1 and M >= 1 (both products start with 1-a), and
// trivially 1/1 when L == M == 0.
inline TruncatedSeries cancelled_a_poch_ratio(int s, long L, long M, Orders o) {
    if (L == 0 && M == 0) return TruncatedSeries::one(o.q_order, o.a_order);
    if (L < 1 || M < 1)
        throw UnsupportedParamsError("(a;q^s)_L/(a;q)_M needs L,M >= 1 to cancel (1-a)");
    return pochhammer(PochhammerSpec::finite(+1, 1, s, s, L - 1), o.q_order, o.a_order) *
           pochhammer_inverse(PochhammerSpec::finite(+1, 1, 1, 1, M - 1), o.q_order,
                              o.a_order);
}

}  // namespace detail

/// Closed-form beta_{d,k,n} for (d,k) in {(2,1),(2,4),(3,3),(3,5),(4,6)}.
inline TruncatedSeries beta_closed(DKParams p, long n, Orders orders) {
    if (!has_closed_beta(p)) throw UnsupportedParamsError("no closed-form beta for this (d,k)");
    TruncatedSeries acc(orders.q_order, orders.a_order);

    if (p.d == 2 && p.k == 4) {
        // 1/(aq;q^2)_n * sum_r a^r q^{2r^2} / ((q^2;q^2)_r (q;q)_{n-2r})
        for (long r = 0; 2 * r <= n; ++r) {
            long q_pre = 2 * r * r;
            if (q_pre > orders.q_order) break;
            auto term =
                TruncatedSeries::monomial(1, static_cast<int>(r), static_cast<int>(q_pre),
                                          orders.q_order, orders.a_order) *
                pochhammer_inverse(PochhammerSpec::finite(+1, 0, 2, 2, r), orders.q_order,
                                   orders.a_order) *
                pochhammer_inverse(PochhammerSpec::finite(+1, 0, 1, 1, n - 2 * r),
                                   orders.q_order, orders.a_order) *
                pochhammer_inverse(PochhammerSpec::finite(+1, 1, 1, 2, n), orders.q_order,
                                   orders.a_order);
            acc += term;
        }
        return acc;
    }

    if (p.d == 2 && p.k == 1) {
        // q^{n(n-1)/2}/(aq;q^2)_n * sum_r (-1)^r a^{-r} q^{r^2-2nr} /
        //   ((q^2;q^2)_r (q;q)_{n-2r})
        for (long r = 0; 2 * r <= n; ++r) {
            long q_pre = n * (n - 1) / 2 + r * r - 2 * n * r;
            long a_pre = -r;
            if (q_pre > orders.q_order) continue;
            Orders eo = detail::elevated(orders, a_pre, q_pre);
            auto term =
                TruncatedSeries::monomial((r % 2 == 0) ? 1 : -1, static_cast<int>(a_pre),
                                          static_cast<int>(q_pre), eo.q_order, eo.a_order) *
                pochhammer_inverse(PochhammerSpec::finite(+1, 0, 2, 2, r), eo.q_order,
                                   eo.a_order) *
                pochhammer_inverse(PochhammerSpec::finite(+1, 0, 1, 1, n - 2 * r),
                                   eo.q_order, eo.a_order) *
                pochhammer_inverse(PochhammerSpec::finite(+1, 1, 1, 2, n), eo.q_order,
                                   eo.a_order);
            acc += detail::truncate(term, orders);
        }
        return acc;
    }

    if (p.d == 3) {
        // (3,3): sum_r (-1)^r q^{3r(r-1)/2} (a;q^3)_{n-r} /
        //          ((a;q)_{2n} (q^3;q^3)_r (q;q)_{n-3r})
        // (3,5): sum_r a^r q^{3r^2} (a;q^3)_{n-r} / (same denominators)
        for (long r = 0; 3 * r <= n; ++r) {
            long q_pre = (p.k == 3) ? 3 * r * (r - 1) / 2 : 3 * r * r;
            long a_pre = (p.k == 3) ? 0 : r;
            Int sign = (p.k == 3 && r % 2 != 0) ? -1 : 1;
            if (q_pre > orders.q_order) break;
            auto term =
                TruncatedSeries::monomial(sign, static_cast<int>(a_pre),
                                          static_cast<int>(q_pre), orders.q_order,
                                          orders.a_order) *
                detail::cancelled_a_poch_ratio(3, n - r, 2 * n, orders) *
                pochhammer_inverse(PochhammerSpec::finite(+1, 0, 3, 3, r), orders.q_order,
                                   orders.a_order) *
                pochhammer_inverse(PochhammerSpec::finite(+1, 0, 1, 1, n - 3 * r),
                                   orders.q_order, orders.a_order);
            acc += term;
        }
        return acc;
    }

    // (4,6), split by parity of n
    long m = n / 2;
    bool even = (n % 2 == 0);
    for (long r = 0; r <= m; ++r) {
        long q_pre = even ? (r * r - m * m + r - 2 * m * r)
                          : (r * r - m * m + r - 2 * m - 2 * m * r);
        Orders eo = detail::elevated(orders, 0, q_pre);
        if (q_pre > orders.q_order) continue;
        auto term =
            TruncatedSeries::monomial(((m + r) % 2 == 0) ? 1 : -1, 0,
                                      static_cast<int>(q_pre), eo.q_order, eo.a_order) *
            detail::cancelled_a_poch_ratio(4, even ? m + r : m + r + 1,
                                           even ? 4 * m : 4 * m + 2, eo) *
            pochhammer_inverse(PochhammerSpec::finite(+1, 0, 1, 1, even ? 2 * r : 2 * r + 1),
                               eo.q_order, eo.a_order) *
            pochhammer_inverse(PochhammerSpec::finite(+1, 0, 2, 2, m - r), eo.q_order,
                               eo.a_order);
        acc += detail::truncate(term, orders);
    }
    return acc;
}

/// Memoized alpha sequence for one (d,k); safe for concurrent reads.
class AlphaSequence {
public:
    AlphaSequence(DKParams p, Orders orders) : params_(p), orders_(orders) {}

    const TruncatedSeries& at(long m) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(m);
        if (it == cache_.end())
            it = cache_.emplace(m, alpha(params_, m, orders_)).first;
        return it->second;
    }

    DKParams params() const { return params_; }
    Orders orders() const { return orders_; }

private:
    DKParams params_;
    Orders orders_;
    mutable std::mutex mu_;
    mutable std::map<long, TruncatedSeries> cache_;
};

enum class BetaSource { Definitional, Closed };

/// Memoized beta sequence for one (d,k); safe for concurrent reads.
class BetaSequence {
public:
    BetaSequence(DKParams p, Orders orders, BetaSource src = BetaSource::Definitional)
        : params_(p), orders_(orders), source_(src) {}

    const TruncatedSeries& at(long n) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(n);
        if (it == cache_.end()) {
            auto s = source_ == BetaSource::Definitional ? beta_definitional(params_, n, orders_)
                                                         : beta_closed(params_, n, orders_);
            it = cache_.emplace(n, std::move(s)).first;
        }
        return it->second;
    }

private:
    DKParams params_;
    Orders orders_;
    BetaSource source_;
    mutable std::mutex mu_;
    mutable std::map<long, TruncatedSeries> cache_;
};

enum class Transform { WBL, ATNSBL, SSBL };

namespace detail {

// Lower bound, in half-exponents, on the minimal q-exponent of beta_j: every
// summand of the defining sum is an alpha monomial prefactor times factors
// whose expansions start at q^0, so the smallest prefactor exponent bounds
// the sum from below.  Negative for pairs whose beta is a Laurent series.
inline long long min_beta_qexp_halves(DKParams p, long j) {
    long long c2 = 2LL * p.d * p.k - 2LL * p.d * p.d + p.d;
    long long m = 0;
    for (long s = 1; s * p.d <= j; ++s)
        m = std::min(m, c2 * s * s - static_cast<long long>(p.d) * s);
    return m;
}

}  // namespace detail

struct InsertResult {
    TruncatedSeries lhs;
    TruncatedSeries rhs;
};

/// Applies one of the three limiting Bailey-lemma corollaries to the (d,k)
/// pair, returning the two sides of the resulting a-generalized identity.
inline InsertResult insert(Transform t, DKParams p, Orders orders,
                           BetaSource src = BetaSource::Definitional) {
    auto beta = [&](long j, Orders o) {
        return src == BetaSource::Definitional ? beta_definitional(p, j, o)
                                               : beta_closed(p, j, o);
    };

    TruncatedSeries lhs(orders.q_order, orders.a_order);
    TruncatedSeries alpha_sum(orders.q_order, orders.a_order);

    // Loop cutoffs compare a lower bound on each term's minimal q-exponent
    // (in halves) against the truncation order; beta can be a Laurent series
    // (e.g. (d,k) = (2,1)), so the bare prefix exponent is not enough.
    // `beta_scale` is 2 for the transform that feeds beta the variable q^2.
    auto lhs_done = [&](long j, auto prefix_halves, int beta_scale) {
        if (j == 0) return false;
        auto bound = [&](long i) {
            return prefix_halves(i) + beta_scale * detail::min_beta_qexp_halves(p, i);
        };
        long long b = bound(j);
        return b > 2LL * orders.q_order && b >= bound(j - 1);
    };

    if (t == Transform::WBL) {
        auto prefix = [](long j) { return 2LL * j * j; };
        for (long j = 0; !lhs_done(j, prefix, 1); ++j) {
            auto b = beta(j, orders);
            // the prefactor monomial may exceed the base orders while the
            // (possibly Laurent) beta pulls the product back below them
            Orders eo = detail::elevated_for(orders, b);
            auto term = TruncatedSeries::monomial(1, static_cast<int>(j),
                                                  static_cast<int>(j * j), eo.q_order,
                                                  eo.a_order) *
                        b;
            lhs += detail::truncate(term, orders);
        }
        for (long r = 0;; ++r) {
            long m = static_cast<long>(p.d) * r;
            // net minimal q-exponent of a^m q^{m^2} alpha_m is (dk+d/2)r^2-(d/2)r
            HalfExponent net = HalfExponent::halves((2L * p.d * p.k + p.d) * r * r - p.d * r);
            if (r > 0 && net.numerator > 2L * orders.q_order) break;
            auto a_m = alpha(p, m, orders);
            Orders eo = detail::elevated_for(orders, a_m);
            auto term = TruncatedSeries::monomial(1, static_cast<int>(m),
                                                  static_cast<int>(m * m), eo.q_order,
                                                  eo.a_order) *
                        a_m;
            alpha_sum += detail::truncate(term, orders);
        }
        Orders eo = detail::elevated_for(orders, alpha_sum);
        auto rhs = pochhammer_inverse(PochhammerSpec::infinite(+1, 1, 1, 1), eo.q_order,
                                      eo.a_order) *
                   alpha_sum;
        return {lhs, detail::truncate(rhs, orders)};
    }

    if (t == Transform::ATNSBL) {
        Orders doubled{2 * orders.q_order, orders.a_order};
        auto prefix = [](long j) { return 2LL * j * j; };
        for (long j = 0; !lhs_done(j, prefix, 2); ++j) {
            auto beta_q2 = beta(j, doubled).substitute(0, 2);
            Orders eo = detail::elevated_for(orders, beta_q2);
            auto term = TruncatedSeries::monomial(1, static_cast<int>(j),
                                                  static_cast<int>(j * j), eo.q_order,
                                                  eo.a_order) *
                        pochhammer(PochhammerSpec::finite(-1, 0, 1, 2, j), eo.q_order,
                                   eo.a_order) *
                        beta_q2;
            lhs += detail::truncate(term, orders);
        }
        for (long r = 0;; ++r) {
            long m = static_cast<long>(p.d) * r;
            // net minimal q-exponent: (2dk - d^2 + d) r^2 - d r
            long net = (2L * p.d * p.k - 1L * p.d * p.d + p.d) * r * r - p.d * r;
            if (r > 0 && net > orders.q_order) break;
            auto alpha_q2 = alpha(p, m, Orders{2 * orders.q_order, orders.a_order})
                                .substitute(0, 2);
            Orders eo = detail::elevated_for(orders, alpha_q2);
            auto term =
                TruncatedSeries::monomial(1, static_cast<int>(m), static_cast<int>(m * m),
                                          eo.q_order, eo.a_order) *
                pochhammer(PochhammerSpec::finite(-1, 0, 1, 2, m), eo.q_order, eo.a_order) *
                pochhammer_inverse(PochhammerSpec::finite(-1, 1, 1, 2, m), eo.q_order,
                                   eo.a_order) *
                alpha_q2;
            alpha_sum += detail::truncate(term, orders);
        }
        Orders eo = detail::elevated_for(orders, alpha_sum);
        auto rhs = pochhammer(PochhammerSpec::infinite(-1, 1, 1, 2), eo.q_order, eo.a_order) *
                   pochhammer_inverse(PochhammerSpec::infinite(+1, 1, 2, 2), eo.q_order,
                                      eo.a_order) *
                   alpha_sum;
        return {lhs, detail::truncate(rhs, orders)};
    }

    // SSBL
    auto prefix = [](long j) { return j * (j + 1); };
    for (long j = 0; !lhs_done(j, prefix, 1); ++j) {
        auto b = beta(j, orders);
        Orders eo = detail::elevated_for(orders, b);
        auto term = TruncatedSeries::monomial(1, static_cast<int>(j),
                                              static_cast<int>(j * (j + 1) / 2),
                                              eo.q_order, eo.a_order) *
                    pochhammer(PochhammerSpec::finite(-1, 0, 0, 1, j), eo.q_order,
                               eo.a_order) *
                    b;
        lhs += detail::truncate(term, orders);
    }
    for (long r = 0;; ++r) {
        long m = static_cast<long>(p.d) * r;
        // net minimal q-exponent: (dk - d^2/2 + d/2) r^2
        HalfExponent net = HalfExponent::halves((2L * p.d * p.k - 1L * p.d * p.d + p.d) * r * r);
        if (r > 0 && net.numerator > 2L * orders.q_order) break;
        auto a_m = alpha(p, m, orders);
        Orders eo = detail::elevated_for(orders, a_m);
        auto term =
            TruncatedSeries::monomial(1, static_cast<int>(m),
                                      static_cast<int>(m * (m + 1) / 2), eo.q_order,
                                      eo.a_order) *
            pochhammer(PochhammerSpec::finite(-1, 0, 0, 1, m), eo.q_order, eo.a_order) *
            pochhammer_inverse(PochhammerSpec::finite(-1, 1, 1, 1, m), eo.q_order,
                               eo.a_order) *
            a_m;
        alpha_sum += detail::truncate(term, orders);
    }
    Orders eo = detail::elevated_for(orders, alpha_sum);
    auto rhs = pochhammer(PochhammerSpec::infinite(-1, 1, 1, 1), eo.q_order, eo.a_order) *
               pochhammer_inverse(PochhammerSpec::infinite(+1, 1, 1, 1), eo.q_order,
                                  eo.a_order) *
               alpha_sum;
    return {lhs, detail::truncate(rhs, orders)};
}

/// Cross-checks the definitional beta against the closed form (or the
/// classical forms for d = 1) for every n <= n_max.
inline VerificationReport verify_bailey_pair(DKParams p, long n_max, Orders orders) {
    Stopwatch sw;
    VerificationReport rep;
    rep.target = "bailey(" + std::to_string(p.d) + "," + std::to_string(p.k) + ")";
    rep.checked_q_order = orders.q_order;
    rep.checked_a_order = orders.a_order;

    for (long n = 0; n <= n_max && rep.status == Status::Pass; ++n) {
        auto def = beta_definitional(p, n, orders);
        std::optional<TruncatedSeries> other;
        if (has_closed_beta(p)) {
            other = beta_closed(p, n, orders);
        } else if (p.d == 1 && p.k == 1) {
            // unit Bailey pair: beta_n = [n == 0]
            other = n == 0 ? TruncatedSeries::one(orders.q_order, orders.a_order)
                           : TruncatedSeries(orders.q_order, orders.a_order);
        } else if (p.d == 1 && p.k == 2) {
            // unit Bailey chain: beta_n = 1/(q;q)_n
            other = pochhammer_inverse(PochhammerSpec::finite(+1, 0, 1, 1, n),
                                       orders.q_order, orders.a_order);
        }
        if (!other) break;  // no independent form; beta_0 = 1 checked below
        if (auto div = TruncatedSeries::first_divergence(def, *other))
            rep.record_divergence("n=" + std::to_string(n), *div);
    }

    // always-available sanity: beta_0 = alpha_0 = 1
    if (rep.status == Status::Pass) {
        auto one = TruncatedSeries::one(orders.q_order, orders.a_order);
        if (auto div = TruncatedSeries::first_divergence(beta_definitional(p, 0, orders), one))
            rep.record_divergence("n=0", *div);
        if (auto div = TruncatedSeries::first_divergence(alpha(p, 0, orders), one))
            rep.record_divergence("alpha m=0", *div);
    }
    rep.elapsed_ms = sw.elapsed_ms();
    return rep;
}

}  // namespace qrrt
