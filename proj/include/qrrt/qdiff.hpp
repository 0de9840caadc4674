#pragma once

// The two-parameter family Q_{d,k,i}(a,q), its q-difference system, the
// explicit sum-side families F_{d,k,i}(a,q), and the a = 1 product sides.

#include <string>

#include "qrrt/bailey.hpp"
#include "qrrt/report.hpp"
#include "qrrt/series.hpp"

namespace qrrt {

struct FamilyIndex {
    int d = 1;
    int k = 1;
    int i = 1;  // 1 <= i <= k

    auto operator<=>(const FamilyIndex&) const = default;
};

namespace detail {

inline void require_family_index(FamilyIndex f) {
    if (f.d < 1 || f.k < 1 || f.i < 1 || f.i > f.k)
        throw ValidationError("family index needs d,k >= 1 and 1 <= i <= k");
}

}  // namespace detail

/// Q_{d,k,i}(a,q) = 1/(aq;q)_inf * sum_{n>=0} (-1)^n a^{kn}
///   q^{(dk+d/2)n^2 + (k-i+1/2)dn} (1 - a^i q^{(2n+1)di})
///   (aq^d;q^d)_n / (q^d;q^d)_n.
inline TruncatedSeries q_family(FamilyIndex f, Orders orders) {
    detail::require_family_index(f);
    long d = f.d, k = f.k, i = f.i;
    TruncatedSeries sum(orders.q_order, orders.a_order);
    auto num = TruncatedSeries::one(orders.q_order, orders.a_order);   // (aq^d;q^d)_n
    auto den = TruncatedSeries::one(orders.q_order, orders.a_order);   // 1/(q^d;q^d)_n
    for (long n = 0;; ++n) {
        HalfExponent qe = HalfExponent::halves((2 * d * k + d) * n * n + (2 * k - 2 * i + 1) * d * n);
        long q_pre = qe.to_int();
        if (q_pre > orders.q_order) break;
        if (n > 0) {
            num *= pochhammer(PochhammerSpec::finite(+1, 1, static_cast<int>(d * n),
                                                     static_cast<int>(d), 1),
                              orders.q_order, orders.a_order);
            den *= pochhammer_inverse(PochhammerSpec::finite(+1, 0, static_cast<int>(d * n),
                                                             static_cast<int>(d), 1),
                                      orders.q_order, orders.a_order);
        }
        TruncatedSeries bracket = TruncatedSeries::one(orders.q_order, orders.a_order);
        bracket.add_term(static_cast<int>(i), static_cast<int>((2 * n + 1) * d * i), Int(-1));
        auto term = TruncatedSeries::monomial((n % 2 == 0) ? 1 : -1, static_cast<int>(k * n),
                                              static_cast<int>(q_pre), orders.q_order,
                                              orders.a_order) *
                    bracket * num * den;
        sum += term;
    }
    return pochhammer_inverse(PochhammerSpec::infinite(+1, 1, 1, 1), orders.q_order,
                              orders.a_order) *
           sum;
}

/// Alternate expression for Q_{d,k,k}, with the (1-a) in the denominator
/// cancelled against (a;q^d)_n: the n = 0 term is 1 and for n >= 1 the
/// summand is (-1)^n a^{kn} q^{(dk+d/2)n^2 - (d/2)n} (1-aq^{2dn})
/// (aq^d;q^d)_{n-1} / (q^d;q^d)_n.
inline TruncatedSeries q_kk_alternate(int d, int k, Orders orders) {
    detail::require_family_index({d, k, k});
    TruncatedSeries sum = TruncatedSeries::one(orders.q_order, orders.a_order);
    auto num = TruncatedSeries::one(orders.q_order, orders.a_order);   // (aq^d;q^d)_{n-1}
    auto den = TruncatedSeries::one(orders.q_order, orders.a_order);   // 1/(q^d;q^d)_n
    for (long n = 1;; ++n) {
        HalfExponent qe = HalfExponent::halves((2L * d * k + d) * n * n - static_cast<long>(d) * n);
        long q_pre = qe.to_int();
        if (q_pre > orders.q_order) break;
        if (n > 1)
            num *= pochhammer(PochhammerSpec::finite(+1, 1, static_cast<int>(d * (n - 1)), d, 1),
                              orders.q_order, orders.a_order);
        den *= pochhammer_inverse(PochhammerSpec::finite(+1, 0, static_cast<int>(d * n), d, 1),
                                  orders.q_order, orders.a_order);
        TruncatedSeries bracket = TruncatedSeries::one(orders.q_order, orders.a_order);
        bracket.add_term(1, static_cast<int>(2L * d * n), Int(-1));
        auto term = TruncatedSeries::monomial((n % 2 == 0) ? 1 : -1,
                                              static_cast<int>(static_cast<long>(k) * n),
                                              static_cast<int>(q_pre), orders.q_order,
                                              orders.a_order) *
                    bracket * num * den;
        sum += term;
    }
    return pochhammer_inverse(PochhammerSpec::infinite(+1, 1, 1, 1), orders.q_order,
                              orders.a_order) *
           sum;
}

/// Q_{d,k,i}(1,q) as the closed product
/// (q^{id}, q^{(2k-i+1)d}, q^{(2k+1)d}; q^{(2k+1)d})_inf / (q;q)_inf,
/// computed via the triple product as a theta sum over (q;q)_inf.
inline TruncatedSeries product_side(FamilyIndex f, int q_order) {
    detail::require_family_index(f);
    long d = f.d, k = f.k, i = f.i;
    auto theta = theta_sum(HalfExponent::halves(d * (2 * k + 1)),
                           HalfExponent::halves(d * (2 * k + 1) - 2 * d * i), q_order);
    return theta * pochhammer_inverse(PochhammerSpec::infinite(+1, 0, 1, 1), q_order);
}

inline bool has_f_family(int d, int k) {
    return (d == 2 && (k == 2 || k == 3 || k == 4)) || (d == 3 && (k == 3 || k == 4 || k == 5));
}

namespace detail {

// Accumulates sign * a^{a_pre} q^{q_pre} * factors into acc, building the
// factors at orders elevated past any negative prefactor exponent.
template <typename FactorFn>
void add_summand(TruncatedSeries& acc, Orders orders, Int sign, long a_pre, long q_pre,
                 FactorFn&& factors) {
    Orders eo = elevated(orders, a_pre, q_pre);
    if (q_pre > eo.q_order) return;  // cannot reach the truncation order
    auto term = TruncatedSeries::monomial(sign, static_cast<int>(a_pre),
                                          static_cast<int>(q_pre), eo.q_order, eo.a_order);
    factors(term, eo);
    acc += truncate(term, orders);
}

}  // namespace detail

TruncatedSeries f_family(FamilyIndex f, Orders orders);

/// F*_{2,2,2}(a,q) = sum a^n q^{(3n^2+n)/2} / ((aq;q^2)_{n+1} (q;q)_n),
/// an alternate expression equal to F_{2,2,2}.
inline TruncatedSeries f_star_222(Orders orders) {
    TruncatedSeries acc(orders.q_order, orders.a_order);
    for (long n = 0; n * n <= orders.q_order; ++n) {
        detail::add_summand(acc, orders, 1, n, (3 * n * n + n) / 2,
                            [&](TruncatedSeries& t, Orders eo) {
                                t *= pochhammer_inverse(PochhammerSpec::finite(+1, 1, 1, 2, n + 1),
                                                        eo.q_order, eo.a_order);
                                t *= pochhammer_inverse(PochhammerSpec::finite(+1, 0, 1, 1, n),
                                                        eo.q_order, eo.a_order);
                            });
    }
    return acc;
}

/// The explicit sum sides F_{d,k,i}(a,q) for
/// (d,k) in {(2,2),(2,3),(2,4),(3,3),(3,4),(3,5)}.
inline TruncatedSeries f_family(FamilyIndex f, Orders orders) {
    detail::require_family_index(f);
    if (!has_f_family(f.d, f.k))
        throw UnsupportedParamsError("no explicit F family for this (d,k)");
    const int d = f.d, k = f.k, i = f.i;
    TruncatedSeries acc(orders.q_order, orders.a_order);
    auto inv = [&](int sign, int a_pow, int off, int step, long len, Orders eo) {
        return pochhammer_inverse(PochhammerSpec::finite(sign, a_pow, off, step, len),
                                  eo.q_order, eo.a_order);
    };
    auto poch = [&](int sign, int a_pow, int off, int step, long len, Orders eo) {
        return pochhammer(PochhammerSpec::finite(sign, a_pow, off, step, len), eo.q_order,
                          eo.a_order);
    };

    if (d == 2 && k == 2) {
        for (long n = 0; n * n <= orders.q_order; ++n) {
            long q_pre = (i == 1) ? (3 * n * n + 3 * n) / 2 : (3 * n * n - n) / 2;
            long aqlen = (i == 1) ? n + 1 : n;
            detail::add_summand(acc, orders, 1, n, q_pre, [&](TruncatedSeries& t, Orders eo) {
                t *= inv(+1, 1, 1, 2, aqlen, eo);
                t *= inv(+1, 0, 1, 1, n, eo);
            });
        }
        return acc;
    }

    if (d == 2 && k == 3) {
        for (long n = 0; n * n <= orders.q_order; ++n) {
            long q_pre = n * n + (3 - i) * n;
            long aqlen = (i == 3) ? n : n + 1;
            detail::add_summand(acc, orders, 1, n, q_pre, [&](TruncatedSeries& t, Orders eo) {
                t *= inv(+1, 1, 1, 2, aqlen, eo);
                t *= inv(+1, 0, 1, 1, n, eo);
            });
        }
        return acc;
    }

    if (d == 2 && k == 4) {
        for (long n = 0; n * n <= orders.q_order; ++n) {
            for (long r = 0; 2 * r <= n; ++r) {
                long q_pre = n * n + 2 * r * r;
                if (i == 1 || i == 2) q_pre += 2 * n + 2 * r;
                if (i == 3) q_pre += 2 * r;
                long aqlen = (i <= 2) ? n + 1 : n;
                detail::add_summand(acc, orders, 1, n + r, q_pre,
                                    [&](TruncatedSeries& t, Orders eo) {
                                        if (i == 2) {
                                            TruncatedSeries b =
                                                TruncatedSeries::one(eo.q_order, eo.a_order);
                                            b.add_term(1, static_cast<int>(2 * r + 2), Int(1));
                                            t *= b;
                                        }
                                        t *= inv(+1, 1, 1, 2, aqlen, eo);
                                        t *= inv(+1, 0, 1, 1, n - 2 * r, eo);
                                        t *= inv(+1, 0, 2, 2, r, eo);
                                    });
            }
        }
        return acc;
    }

    if (d == 3 && k == 3) {
        // the i = 2 and i = 3 sums have their n = 0 summand equal to 1 after
        // the (1-a) cancellations
        if (i >= 2) acc += TruncatedSeries::one(orders.q_order, orders.a_order);
        for (long n = (i >= 2) ? 1 : 0; n * n - 3 <= orders.q_order; ++n) {
            for (long r = 0; 3 * r <= n; ++r) {
                if (i == 1) {
                    long q_pre = n * n + 3 * n + 3 * r * (r - 1) / 2;
                    detail::add_summand(acc, orders, (r % 2 == 0) ? 1 : -1, n, q_pre,
                                        [&](TruncatedSeries& t, Orders eo) {
                                            t *= poch(+1, 1, 3, 3, n - r, eo);
                                            t *= inv(+1, 1, 1, 1, 2 * n + 2, eo);
                                            t *= inv(+1, 0, 1, 1, n - 3 * r, eo);
                                            t *= inv(+1, 0, 3, 3, r, eo);
                                        });
                } else if (i == 2) {
                    // (a;q^3)_{n-r}/(a;q)_{2n} = (aq^3;q^3)_{n-r-1}/(aq;q)_{2n-1}
                    long q_pre = n * n + 3 * r * (r - 3) / 2;
                    detail::add_summand(acc, orders, (r % 2 == 0) ? 1 : -1, n - 1, q_pre,
                                        [&](TruncatedSeries& t, Orders eo) {
                                            TruncatedSeries b =
                                                TruncatedSeries::one(eo.q_order, eo.a_order);
                                            b.add_term(1, static_cast<int>(3 * r), Int(1));
                                            b.add_term(0, static_cast<int>(3 * r), Int(-1));
                                            t *= b;
                                            t *= poch(+1, 1, 3, 3, n - r - 1, eo);
                                            t *= inv(+1, 1, 1, 1, 2 * n - 1, eo);
                                            t *= inv(+1, 0, 1, 1, n - 3 * r, eo);
                                            t *= inv(+1, 0, 3, 3, r, eo);
                                        });
                } else {
                    // (a;q^3)_{n-r}/(a;q)_{2n} = (aq^3;q^3)_{n-r-1}/(aq;q)_{2n-1};
                    // the denominator must be (a;q)_{2n} for the i = 3 member
                    // to satisfy the system (it is the plain beta sum)
                    long q_pre = n * n + 3 * r * (r - 1) / 2;
                    detail::add_summand(acc, orders, (r % 2 == 0) ? 1 : -1, n, q_pre,
                                        [&](TruncatedSeries& t, Orders eo) {
                                            t *= poch(+1, 1, 3, 3, n - r - 1, eo);
                                            t *= inv(+1, 1, 1, 1, 2 * n - 1, eo);
                                            t *= inv(+1, 0, 1, 1, n - 3 * r, eo);
                                            t *= inv(+1, 0, 3, 3, r, eo);
                                        });
                }
            }
        }
        return acc;
    }

    if (d == 3 && k == 4) {
        if (i == 4) {
            // n = 0 summand is 1 after the (1-a) cancellation
            acc += TruncatedSeries::one(orders.q_order, orders.a_order);
            for (long n = 1; n * n <= orders.q_order; ++n)
                detail::add_summand(acc, orders, 1, n, n * n,
                                    [&](TruncatedSeries& t, Orders eo) {
                                        t *= poch(+1, 1, 3, 3, n - 1, eo);
                                        t *= inv(+1, 1, 1, 1, 2 * n - 1, eo);
                                        t *= inv(+1, 0, 1, 1, n, eo);
                                    });
            return acc;
        }
        for (long n = 0; n * n <= orders.q_order; ++n) {
            long q_pre = n * (n + 4 - i);
            long aqlen = (i == 3) ? 2 * n + 1 : 2 * n + 2;
            detail::add_summand(acc, orders, 1, n, q_pre, [&](TruncatedSeries& t, Orders eo) {
                t *= poch(+1, 1, 3, 3, n, eo);
                t *= inv(+1, 1, 1, 1, aqlen, eo);
                t *= inv(+1, 0, 1, 1, n, eo);
            });
        }
        return acc;
    }

    // (3,5)
    if (i >= 3) acc += TruncatedSeries::one(orders.q_order, orders.a_order);
    for (long n = (i >= 3) ? 1 : 0; n * n - 3 <= orders.q_order; ++n) {
        for (long r = 0; 3 * r <= n; ++r) {
            if (i <= 2) {
                long q_pre = n * n + 3 * r * r + 3 * n + 3 * r;
                detail::add_summand(acc, orders, 1, n + r, q_pre,
                                    [&](TruncatedSeries& t, Orders eo) {
                                        if (i == 2) {
                                            TruncatedSeries b =
                                                TruncatedSeries::one(eo.q_order, eo.a_order);
                                            b.add_term(1, static_cast<int>(3 * r + 3), Int(1));
                                            t *= b;
                                        }
                                        t *= poch(+1, 1, 3, 3, n - r, eo);
                                        t *= inv(+1, 1, 1, 1, 2 * n + 2, eo);
                                        t *= inv(+1, 0, 1, 1, n - 3 * r, eo);
                                        t *= inv(+1, 0, 3, 3, r, eo);
                                    });
            } else if (i == 3) {
                long q_pre = n * n + 3 * r * r - 3;
                detail::add_summand(acc, orders, 1, n + r - 1, q_pre,
                                    [&](TruncatedSeries& t, Orders eo) {
                                        TruncatedSeries b(eo.q_order, eo.a_order);
                                        b.add_term(0, static_cast<int>(3 * r), Int(1));
                                        b.add_term(1, static_cast<int>(6 * r + 3), Int(1));
                                        b.add_term(0, 0, Int(-1));
                                        t *= b;
                                        t *= poch(+1, 1, 3, 3, n - r - 1, eo);
                                        t *= inv(+1, 1, 1, 1, 2 * n - 1, eo);
                                        t *= inv(+1, 0, 1, 1, n - 3 * r, eo);
                                        t *= inv(+1, 0, 3, 3, r, eo);
                                    });
            } else {
                long q_pre = n * n + 3 * r * r + ((i == 4) ? 3 * r : 0);
                detail::add_summand(acc, orders, 1, n + r, q_pre,
                                    [&](TruncatedSeries& t, Orders eo) {
                                        t *= poch(+1, 1, 3, 3, n - r - 1, eo);
                                        t *= inv(+1, 1, 1, 1, 2 * n - 1, eo);
                                        t *= inv(+1, 0, 1, 1, n - 3 * r, eo);
                                        t *= inv(+1, 0, 3, 3, r, eo);
                                    });
            }
        }
    }
    return acc;
}

namespace detail {

// Shared shape of the q-difference system satisfied by Q_{d,k,i},
// F_{d,k,i}, and the partition generating functions: family(1) vs the
// d-shifted family(k), and consecutive differences.
template <typename FamilyFn>
VerificationReport verify_recurrence_system(const std::string& target, int d, int k,
                                            Orders orders, FamilyFn&& family) {
    Stopwatch sw;
    VerificationReport rep;
    rep.target = target;
    rep.checked_q_order = orders.q_order;
    rep.checked_a_order = orders.a_order;

    std::vector<TruncatedSeries> G;  // family members, index i-1
    for (int i = 1; i <= k; ++i) G.push_back(family(i));

    auto inv_prefix = pochhammer_inverse(PochhammerSpec::finite(+1, 1, 1, 1, d - 1),
                                         orders.q_order, orders.a_order);
    auto one = TruncatedSeries::one(orders.q_order, orders.a_order);

    for (int i = 1; i <= k && rep.status == Status::Pass; ++i) {
        if (auto div = TruncatedSeries::first_divergence(G[i - 1].eval_at_zero(),
                                                         one.eval_at_zero()))
            rep.record_divergence("i=" + std::to_string(i) + " at a=0", *div);
    }
    if (rep.status == Status::Pass) {
        auto rhs = inv_prefix * G[k - 1].substitute(d, 1);
        if (auto div = TruncatedSeries::first_divergence(G[0], rhs))
            rep.record_divergence("i=1 relation", *div);
    }
    for (int i = 2; i <= k && rep.status == Status::Pass; ++i) {
        auto rhs = G[i - 2] +
                   TruncatedSeries::monomial(1, i - 1, d * (i - 1), orders.q_order,
                                             orders.a_order) *
                       inv_prefix * G[k - i].substitute(d, 1);
        if (auto div = TruncatedSeries::first_divergence(G[i - 1], rhs))
            rep.record_divergence("i=" + std::to_string(i) + " relation", *div);
    }
    rep.elapsed_ms = sw.elapsed_ms();
    return rep;
}

}  // namespace detail

/// Checks the Q_{d,k,i} q-difference system, the alternate Q_{d,k,k}
/// expression, Q(0) = 1, and the a = 1 product evaluation.
inline VerificationReport verify_q_system(int d, int k, Orders orders) {
    auto rep = detail::verify_recurrence_system(
        "qsystem(" + std::to_string(d) + "," + std::to_string(k) + ")", d, k, orders,
        [&](int i) { return q_family({d, k, i}, orders); });
    if (!rep.passed()) return rep;

    Stopwatch sw;
    if (auto div = TruncatedSeries::first_divergence(q_family({d, k, k}, orders),
                                                     q_kk_alternate(d, k, orders)))
        rep.record_divergence("alternate i=k form", *div);
    // the a = 1 evaluation needs every power of a, so drop the a bound
    Orders uo{orders.q_order, std::nullopt};
    for (int i = 1; i <= k && rep.status == Status::Pass; ++i) {
        auto lhs = q_family({d, k, i}, uo).eval_at_one();
        if (auto div = TruncatedSeries::first_divergence(lhs, product_side({d, k, i},
                                                                           orders.q_order)))
            rep.record_divergence("i=" + std::to_string(i) + " product at a=1", *div);
    }
    rep.elapsed_ms += sw.elapsed_ms();
    return rep;
}

/// Checks that the F_{d,k,i} satisfy the same q-difference system and agree
/// with Q_{d,k,i} coefficientwise (and F* with F for (2,2)).
inline VerificationReport verify_f_system(int d, int k, Orders orders) {
    auto rep = detail::verify_recurrence_system(
        "fsystem(" + std::to_string(d) + "," + std::to_string(k) + ")", d, k, orders,
        [&](int i) { return f_family({d, k, i}, orders); });
    if (!rep.passed()) return rep;

    Stopwatch sw;
    for (int i = 1; i <= k && rep.status == Status::Pass; ++i) {
        if (auto div = TruncatedSeries::first_divergence(f_family({d, k, i}, orders),
                                                         q_family({d, k, i}, orders)))
            rep.record_divergence("i=" + std::to_string(i) + " F=Q", *div);
    }
    if (d == 2 && k == 2 && rep.status == Status::Pass) {
        if (auto div = TruncatedSeries::first_divergence(f_family({2, 2, 2}, orders),
                                                         f_star_222(orders)))
            rep.record_divergence("F*222", *div);
    }
    rep.elapsed_ms += sw.elapsed_ms();
    return rep;
}

}  // namespace qrrt
