#pragma once

// Partition-theoretic side: the counting functions A_{d,k,i}(n) and
// B_{d,k,i}(n), the refined counts b_{d,k,i}(m,n), their two-variable
// generating function, and the Andrews-Gordon multisum.

#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "qrrt/qdiff.hpp"
#include "qrrt/report.hpp"
#include "qrrt/series.hpp"

namespace qrrt {

namespace detail {

inline void require_partition_index(int d, int k, int i) {
    if (d < 1 || k < 1 || i < 1 || i > k)
        throw ValidationError("partition family needs d,k >= 1 and 1 <= i <= k");
}

}  // namespace detail

/// A_{d,k,i}(n): partitions of n into parts not congruent to 0 or +-di
/// modulo (2k+1)d.
inline Int count_A(int d, int k, int i, int n) {
    detail::require_partition_index(d, k, i);
    if (n < 0) return 0;
    int m = (2 * k + 1) * d;
    std::vector<Int> dp(n + 1, 0);
    dp[0] = 1;
    for (int p = 1; p <= n; ++p) {
        int r = p % m;
        if (r == 0 || r == (d * i) % m || r == (m - d * i % m) % m) continue;
        for (int t = p; t <= n; ++t) dp[t] += dp[t - p];
    }
    return dp[n];
}

namespace detail {

// Exhaustive enumeration over part frequencies, from the largest part down.
// State: the frequency chosen for the next multiple of d above the current
// part (the pair constraint couples consecutive multiples only).  When
// m_left < 0 the number of parts is unconstrained.
class BEnumerator {
public:
    BEnumerator(int d, int k, int i) : d_(d), k_(k), i_(i) {}

    Int count(int n, int m_parts) {  // m_parts < 0: any number of parts
        if (n < 0) return 0;
        return rec(n, n, 0, m_parts);
    }

private:
    Int rec(int p, int rem, int fnext, int m_left) {
        if (rem == 0) return m_left <= 0 ? Int(1) : Int(0);
        if (p <= 0) return 0;
        auto key = std::make_tuple(p, rem, fnext, m_left);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;

        Int total = 0;
        int fmax = rem / p;
        if (m_left >= 0) fmax = std::min(fmax, m_left);
        if (p % d_ == 0) {
            fmax = std::min(fmax, k_ - 1 - fnext);
            if (p == d_) fmax = std::min(fmax, i_ - 1);
            for (int f = 0; f <= fmax; ++f)
                total += rec(p - 1, rem - f * p, f, m_left < 0 ? -1 : m_left - f);
        } else {
            for (int f = 0; f <= fmax; ++f)
                total += rec(p - 1, rem - f * p, fnext, m_left < 0 ? -1 : m_left - f);
        }
        memo_.emplace(key, total);
        return total;
    }

    int d_, k_, i_;
    std::map<std::tuple<int, int, int, int>, Int> memo_;
};

}  // namespace detail

/// B_{d,k,i}(n): partitions of n where the part d appears at most i-1 times,
/// consecutive multiples dj and dj+d together appear at most k-1 times, and
/// nonmultiples of d are unrestricted.
inline Int count_B(int d, int k, int i, int n) {
    detail::require_partition_index(d, k, i);
    return detail::BEnumerator(d, k, i).count(n, -1);
}

/// b_{d,k,i}(m,n): as count_B but with exactly m parts.
inline Int count_b(int d, int k, int i, int m, int n) {
    detail::require_partition_index(d, k, i);
    if (m < 0) return 0;
    return detail::BEnumerator(d, k, i).count(n, m);
}

/// The generating function sum_{m,n} b_{d,k,i}(m,n) a^m q^n, built directly
/// from the part-frequency structure: an unrestricted product over
/// nonmultiples of d times a transfer recursion over the multiples.
inline TruncatedSeries b_genfun(int d, int k, int i, Orders orders) {
    detail::require_partition_index(d, k, i);
    auto one = TruncatedSeries::one(orders.q_order, orders.a_order);

    // transfer recursion over the multiples dj, largest first; index is the
    // frequency of the previous (higher) multiple
    int jmax = orders.q_order / d;
    std::vector<TruncatedSeries> next(k, one);
    for (int j = jmax; j >= 1; --j) {
        std::vector<TruncatedSeries> cur(static_cast<size_t>(k),
                                         TruncatedSeries(orders.q_order, orders.a_order));
        for (int fprev = 0; fprev < k; ++fprev) {
            int fmax = k - 1 - fprev;
            if (j == 1) fmax = std::min(fmax, i - 1);
            for (int f = 0; f <= fmax; ++f) {
                long e = static_cast<long>(d) * j * f;
                if (e > orders.q_order) break;
                cur[fprev] += TruncatedSeries::monomial(1, f, static_cast<int>(e),
                                                        orders.q_order, orders.a_order) *
                              next[f];
            }
        }
        next = std::move(cur);
    }
    auto result = next[0];

    for (int p = 1; p <= orders.q_order; ++p)
        if (p % d != 0)
            result *= pochhammer_inverse(PochhammerSpec::finite(+1, 1, p, 1, 1),
                                         orders.q_order, orders.a_order);
    return result;
}

/// Checks A_{d,k,i}(n) = B_{d,k,i}(n) for all n <= n_max, and that both
/// match the coefficients of the a = 1 generating function.
inline VerificationReport verify_partition_theorem(int d, int k, int i, int n_max) {
    detail::require_partition_index(d, k, i);
    Stopwatch sw;
    VerificationReport rep;
    rep.target = "partitions(" + std::to_string(d) + "," + std::to_string(k) + "," +
                 std::to_string(i) + ")";
    rep.checked_q_order = n_max;

    auto genfun_at_one = b_genfun(d, k, i, Orders{n_max, std::nullopt}).eval_at_one();
    for (int n = 0; n <= n_max && rep.status == Status::Pass; ++n) {
        Int a = count_A(d, k, i, n);
        Int b = count_B(d, k, i, n);
        if (a != b)
            rep.record_divergence("n=" + std::to_string(n) + " A vs B",
                                  Divergence{0, n, a, b});
        else if (Int g = genfun_at_one.q_coeff(n); g != b)
            rep.record_divergence("n=" + std::to_string(n) + " genfun vs B",
                                  Divergence{0, n, g, b});
    }
    rep.elapsed_ms = sw.elapsed_ms();
    return rep;
}

/// Checks that the generating functions satisfy the shared q-difference
/// system and agree with Q_{d,k,i} coefficientwise.
inline VerificationReport verify_B_recurrences(int d, int k, Orders orders) {
    auto rep = detail::verify_recurrence_system(
        "bsystem(" + std::to_string(d) + "," + std::to_string(k) + ")", d, k, orders,
        [&](int i) { return b_genfun(d, k, i, orders); });
    if (!rep.passed()) return rep;

    Stopwatch sw;
    for (int i = 1; i <= k && rep.status == Status::Pass; ++i) {
        if (auto div = TruncatedSeries::first_divergence(b_genfun(d, k, i, orders),
                                                         q_family({d, k, i}, orders)))
            rep.record_divergence("i=" + std::to_string(i) + " genfun=Q", *div);
    }
    rep.elapsed_ms += sw.elapsed_ms();
    return rep;
}

/// The Andrews-Gordon multisum
/// sum over n_1..n_{k-1} of q^{N_1^2+...+N_{k-1}^2 + N_i+...+N_{k-1}} /
/// ((q;q)_{n_1} ... (q;q)_{n_{k-1}}) with N_j = n_j + ... + n_{k-1}.
inline TruncatedSeries andrews_gordon_lhs(int k, int i, int q_order) {
    if (k < 2 || i < 1 || i > k) throw ValidationError("andrews_gordon needs k >= 2, 1 <= i <= k");
    TruncatedSeries acc(q_order);

    // enumerate N_{k-1} <= N_{k-2} <= ... <= N_1 with the partial exponent
    // pruned against the truncation order
    std::function<void(int, long, long, const TruncatedSeries&)> rec =
        [&](int j, long n_below, long exponent, const TruncatedSeries& denom) {
            // j runs from k-1 down to 1; n_below = N_{j+1}
            if (j == 0) {
                acc += TruncatedSeries::monomial(1, 0, static_cast<int>(exponent), q_order) *
                       denom;
                return;
            }
            for (long N = n_below;; ++N) {
                long e = exponent + N * N + (j >= i ? N : 0);
                if (e > q_order) break;
                rec(j - 1, N, e,
                    denom * pochhammer_inverse(PochhammerSpec::finite(+1, 0, 1, 1, N - n_below),
                                               q_order));
            }
        };
    rec(k - 1, 0, 0, TruncatedSeries::one(q_order));
    return acc;
}

}  // namespace qrrt
