#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "qrrt/series.hpp"

using namespace qrrt;

namespace {

// --- independent oracles (dense univariate arithmetic, no TruncatedSeries) ---

using Dense = std::vector<long>;  // index = q exponent

Dense dense_mul(const Dense& x, const Dense& y, int order) {
    Dense r(order + 1, 0);
    for (int i = 0; i < static_cast<int>(x.size()) && i <= order; ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < static_cast<int>(y.size()) && i + j <= order; ++j)
            r[i + j] += x[i] * y[j];
    }
    return r;
}

// prod over e in exps of (1 - q^e), truncated
Dense dense_poch(const std::vector<int>& exps, int order) {
    Dense r(order + 1, 0);
    r[0] = 1;
    for (int e : exps) {
        Dense f(order + 1, 0);
        f[0] = 1;
        if (e <= order) f[e] = -1;
        r = dense_mul(r, f, order);
    }
    return r;
}

// number of partitions of n, by exhaustive recursive enumeration
long count_partitions(int n, int max_part) {
    if (n == 0) return 1;
    long total = 0;
    for (int p = std::min(n, max_part); p >= 1; --p) total += count_partitions(n - p, p);
    return total;
}

bool matches_dense(const TruncatedSeries& s, const Dense& d, int order) {
    for (int j = 0; j <= order; ++j)
        if (s.q_coeff(j) != d[j]) return false;
    for (const auto& [k, c] : s.terms())
        if (k.a_exp != 0 || k.q_exp > order) return false;
    return true;
}

TruncatedSeries random_series(std::mt19937& rng, int q_order) {
    std::uniform_int_distribution<int> nterms(0, 6), ae(0, 3), qe(0, q_order),
        coef(-4, 4);
    TruncatedSeries s(q_order);
    int n = nterms(rng);
    for (int t = 0; t < n; ++t) s.add_term(ae(rng), qe(rng), Int(coef(rng)));
    return s;
}

}  // namespace

TEST_CASE("monomial basics") {
    auto one = TruncatedSeries::monomial(1, 0, 0, 10);
    CHECK(one.coeff(0, 0) == 1);
    CHECK(one.terms().size() == 1);

    auto m = TruncatedSeries::monomial(-3, 1, 2, 10);
    CHECK(m.coeff(1, 2) == -3);
    CHECK(m.terms().size() == 1);

    auto beyond = TruncatedSeries::monomial(5, 0, 11, 10);
    CHECK(beyond.is_zero());
}

TEST_CASE("ring operations") {
    int N = 10;
    auto q = TruncatedSeries::monomial(1, 0, 1, N);
    auto one = TruncatedSeries::one(N);
    CHECK(((one + q) * (one - q)).agrees_with(one - q * q));

    auto aq = TruncatedSeries::monomial(1, 1, 1, N);
    CHECK(((one - aq) + aq).agrees_with(one));
}

TEST_CASE("(q;q)_3 matches direct polynomial expansion") {
    int N = 10;
    auto s = pochhammer(PochhammerSpec::finite(+1, 0, 1, 1, 3), N);
    Dense expect = dense_poch({1, 2, 3}, N);
    CHECK(matches_dense(s, expect, N));
    // frozen: 1 - q - q^2 + q^4 + q^5 - q^6
    CHECK(s.q_coeff(0) == 1);
    CHECK(s.q_coeff(1) == -1);
    CHECK(s.q_coeff(2) == -1);
    CHECK(s.q_coeff(3) == 0);
    CHECK(s.q_coeff(4) == 1);
    CHECK(s.q_coeff(5) == 1);
    CHECK(s.q_coeff(6) == -1);
}

TEST_CASE("invert simple series") {
    auto s = TruncatedSeries::one(4) - TruncatedSeries::monomial(1, 0, 1, 4);
    auto inv = s.invert();
    for (int j = 0; j <= 4; ++j) CHECK(inv.q_coeff(j) == 1);

    auto t = TruncatedSeries::one(3) - TruncatedSeries::monomial(1, 1, 1, 3);
    auto tinv = t.invert();
    for (int j = 0; j <= 3; ++j) CHECK(tinv.coeff(j, j) == 1);
    CHECK(tinv.terms().size() == 4);
}

TEST_CASE("invert (q;q)_inf gives partition numbers") {
    int N = 8;
    auto euler = pochhammer(PochhammerSpec::infinite(+1, 0, 1, 1), N);
    auto inv = euler.invert();
    for (int n = 0; n <= N; ++n)
        CHECK(inv.q_coeff(n) == count_partitions(n, n == 0 ? 1 : n));
    // frozen partition numbers
    std::vector<long> p = {1, 1, 2, 3, 5, 7, 11, 15, 22};
    for (int n = 0; n <= N; ++n) CHECK(inv.q_coeff(n) == p[n]);
}

TEST_CASE("invert precondition violations") {
    // (a;q)_1 = 1 - a has constant q-slice 1 - a: not q-adically invertible
    auto s = TruncatedSeries::one(5) - TruncatedSeries::monomial(1, 1, 0, 5);
    CHECK_THROWS_AS(s.invert(), NotInvertibleError);
    auto two = TruncatedSeries::monomial(2, 0, 0, 5);
    CHECK_THROWS_AS(two.invert(), NotInvertibleError);
}

TEST_CASE("pochhammer cases") {
    CHECK(pochhammer(PochhammerSpec::finite(+1, 0, 1, 1, 0), 10)
              .agrees_with(TruncatedSeries::one(10)));

    // (-1;q)_2 = (1+1)(1+q) = 2 + 2q
    auto s = pochhammer(PochhammerSpec::finite(-1, 0, 0, 1, 2), 10);
    CHECK(s.q_coeff(0) == 2);
    CHECK(s.q_coeff(1) == 2);
    CHECK(s.terms().size() == 2);

    CHECK_THROWS_AS(pochhammer(PochhammerSpec::infinite(+1, 0, 0, 1), 10),
                    NonTruncatingError);
    CHECK_THROWS_AS(pochhammer(PochhammerSpec::finite(+1, 0, 1, 1, -1), 10),
                    ValidationError);
}

TEST_CASE("reciprocal of negative length is zero") {
    auto z = pochhammer_inverse(PochhammerSpec::finite(+1, 0, 1, 1, -2), 10);
    CHECK(z.is_zero());
}

TEST_CASE("(q^2,q^8,q^10;q^10)_inf triple product") {
    int N = 40;
    auto s = pochhammer(PochhammerSpec::infinite(+1, 0, 2, 10), N) *
             pochhammer(PochhammerSpec::infinite(+1, 0, 8, 10), N) *
             pochhammer(PochhammerSpec::infinite(+1, 0, 10, 10), N);
    std::vector<int> exps;
    for (int e = 1; e <= N; ++e)
        if (e % 10 == 2 || e % 10 == 8 || e % 10 == 0) exps.push_back(e);
    CHECK(matches_dense(s, dense_poch(exps, N), N));
}

TEST_CASE("substitute") {
    int N = 10;
    auto aq = TruncatedSeries::monomial(1, 1, 1, N);
    CHECK(aq.substitute(2, 1).agrees_with(TruncatedSeries::monomial(1, 1, 3, N)));

    auto s = TruncatedSeries::one(N) + TruncatedSeries::monomial(1, 0, 1, N);
    auto sub = s.substitute(0, 2);
    CHECK(sub.coeff(0, 0) == 1);
    CHECK(sub.coeff(0, 2) == 1);
    CHECK(sub.terms().size() == 2);

    auto a2q = TruncatedSeries::monomial(1, 2, 1, N);
    CHECK(a2q.substitute(3, 1).agrees_with(TruncatedSeries::monomial(1, 2, 7, N)));
}

TEST_CASE("substitute composition property") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = random_series(rng, 30);
        std::uniform_int_distribution<int> sh(0, 3);
        int d1 = sh(rng), d2 = sh(rng);
        CHECK(s.substitute(d1, 1).substitute(d2, 1).agrees_with(s.substitute(d1 + d2, 1)));
    }
}

TEST_CASE("eval_a") {
    int N = 10;
    auto s = TruncatedSeries::one(N) + TruncatedSeries::monomial(1, 1, 1, N) +
             TruncatedSeries::monomial(1, 2, 3, N);
    auto at1 = s.eval_at_one();
    CHECK(at1.q_coeff(0) == 1);
    CHECK(at1.q_coeff(1) == 1);
    CHECK(at1.q_coeff(3) == 1);

    auto t = TruncatedSeries::one(N) + TruncatedSeries::monomial(1, 1, 1, N);
    auto at0 = t.eval_at_zero();
    CHECK(at0.agrees_with(TruncatedSeries::one(N)));

    auto aq = TruncatedSeries::monomial(1, 1, 1, N);
    CHECK(aq.eval_at_q_power(1).agrees_with(TruncatedSeries::monomial(1, 0, 2, N)));

    auto laurent = TruncatedSeries::monomial(1, -1, 0, N);
    CHECK_THROWS_AS(laurent.eval_at_zero(), NegativeAPowerError);
}

TEST_CASE("theta_sum pentagonal and squares") {
    auto pent = theta_sum(HalfExponent::halves(3), HalfExponent::halves(-1), 12);
    // direct summation: n from -4..4 covers exponents <= 12
    TruncatedSeries direct(12);
    for (int n = -5; n <= 5; ++n) {
        long long e2 = 3LL * n * n - n;
        if (e2 % 2 == 0 && e2 / 2 <= 12)
            direct.add_term(0, static_cast<int>(e2 / 2), (n % 2 == 0) ? 1 : -1);
    }
    CHECK(pent.agrees_with(direct));
    CHECK(pent.q_coeff(0) == 1);
    CHECK(pent.q_coeff(1) == -1);
    CHECK(pent.q_coeff(2) == -1);
    CHECK(pent.q_coeff(5) == 1);
    CHECK(pent.q_coeff(7) == 1);
    CHECK(pent.q_coeff(12) == -1);

    auto sq = theta_sum(HalfExponent::of(1), HalfExponent::of(0), 10);
    CHECK(sq.q_coeff(0) == 1);
    CHECK(sq.q_coeff(1) == -2);
    CHECK(sq.q_coeff(4) == 2);
    CHECK(sq.q_coeff(9) == -2);
    CHECK(sq.terms().size() == 4);
}

TEST_CASE("theta_sum A=5/2 equals (q^2,q^3,q^5;q^5)_inf") {
    int N = 30;
    auto t = theta_sum(HalfExponent::halves(5), HalfExponent::halves(-1), N);
    auto p = pochhammer(PochhammerSpec::infinite(+1, 0, 2, 5), N) *
             pochhammer(PochhammerSpec::infinite(+1, 0, 3, 5), N) *
             pochhammer(PochhammerSpec::infinite(+1, 0, 5, 5), N);
    CHECK(t.agrees_with(p));
}

TEST_CASE("theta_sum equals triple product for all in-scope families") {
    // A = dk + d/2, B = di - dk - d/2 for every (d,k) pair in scope, 1<=i<=k
    const std::pair<int, int> pairs[] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {2, 3},
                                         {2, 4}, {3, 3}, {3, 4}, {3, 5}, {4, 6}};
    int N = 50;
    for (auto [d, k] : pairs) {
        for (int i = 1; i <= k; ++i) {
            HalfExponent A = HalfExponent::halves(2 * d * k + d);
            HalfExponent B = HalfExponent::halves(2 * d * i - 2 * d * k - d);
            int m = (A * 2).to_int();          // modulus 2A
            int x = (A - B).to_int();          // A - B
            int y = (A + B).to_int();          // A + B
            auto prod = pochhammer(PochhammerSpec::infinite(+1, 0, x, m), N) *
                        pochhammer(PochhammerSpec::infinite(+1, 0, y, m), N) *
                        pochhammer(PochhammerSpec::infinite(+1, 0, m, m), N);
            INFO("d=" << d << " k=" << k << " i=" << i);
            CHECK(theta_sum(A, B, N).agrees_with(prod));
        }
    }
}

TEST_CASE("non-integral theta exponent is an error") {
    CHECK_THROWS_AS(theta_sum(HalfExponent::halves(3), HalfExponent::of(0), 10),
                    NonIntegerExponentError);
}

TEST_CASE("ring laws on random series") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        auto x = random_series(rng, 20), y = random_series(rng, 20),
             z = random_series(rng, 20);
        CHECK((x + y).agrees_with(y + x));
        CHECK((x * y).agrees_with(y * x));
        CHECK(((x + y) + z).agrees_with(x + (y + z)));
        CHECK(((x * y) * z).agrees_with(x * (y * z)));
        CHECK((x * (y + z)).agrees_with(x * y + x * z));
        CHECK((x - x).is_zero());
    }
}

TEST_CASE("invert round-trip on random invertible series") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        TruncatedSeries s = TruncatedSeries::one(25);
        std::uniform_int_distribution<int> nterms(0, 5), ae(0, 2), qe(1, 25), coef(-3, 3);
        int n = nterms(rng);
        for (int t = 0; t < n; ++t) s.add_term(ae(rng), qe(rng), Int(coef(rng)));
        CHECK((s.invert() * s).agrees_with(TruncatedSeries::one(25)));
    }
}

TEST_CASE("pochhammer splitting property") {
    // (x;q)_m * (x q^m; q)_n = (x;q)_{m+n}
    std::mt19937 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<int> len(0, 6), off(1, 3), step(1, 3), ap(0, 1);
        int m = len(rng), n = len(rng), e = off(rng), st = step(rng), p = ap(rng);
        auto left = pochhammer(PochhammerSpec::finite(+1, p, e, st, m), 30) *
                    pochhammer(PochhammerSpec::finite(+1, p, e + m * st, st, n), 30);
        auto full = pochhammer(PochhammerSpec::finite(+1, p, e, st, m + n), 30);
        CHECK(left.agrees_with(full));
    }
}

TEST_CASE("pochhammer_inverse agrees with generic invert") {
    int N = 30;
    auto spec = PochhammerSpec::finite(+1, 1, 1, 1, 5);  // (aq;q)_5
    CHECK(pochhammer_inverse(spec, N).agrees_with(pochhammer(spec, N).invert()));
    auto inf = PochhammerSpec::infinite(+1, 0, 1, 1);
    CHECK(pochhammer_inverse(inf, N).agrees_with(pochhammer(inf, N).invert()));
}
