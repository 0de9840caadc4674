#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "qrrt/bailey.hpp"

using namespace qrrt;

namespace {

// Independent partition-counting oracle: number of partitions of n into parts
// from the given multiset-free list (each part usable any number of times).
std::vector<long> count_with_parts(const std::vector<int>& parts, int n_max) {
    std::vector<long> dp(n_max + 1, 0);
    dp[0] = 1;
    for (int p : parts)
        for (int n = p; n <= n_max; ++n) dp[n] += dp[n - p];
    return dp;
}

TruncatedSeries poch_inv(int sign, int a_pow, int off, int step, long len, Orders o) {
    return pochhammer_inverse(PochhammerSpec::finite(sign, a_pow, off, step, len), o.q_order,
                              o.a_order);
}

}  // namespace

TEST_CASE("lambda values") {
    CHECK(DKParams{1, 1}.lambda() == 0);
    CHECK(DKParams{1, 2}.lambda() == 1);
    CHECK(DKParams{2, 1}.lambda() == -3);
    CHECK(DKParams{2, 4}.lambda() == 3);
    CHECK(DKParams{3, 3}.lambda() == -3);
    CHECK(DKParams{3, 5}.lambda() == 3);
    CHECK(DKParams{4, 6}.lambda() == 2);
}

TEST_CASE("alpha basic structure") {
    Orders o{30, 10};
    DKParams p{3, 5};
    CHECK(alpha(p, 0, o).agrees_with(TruncatedSeries::one(o.q_order, o.a_order)));
    CHECK(alpha(p, 1, o).is_zero());
    CHECK(alpha(p, 2, o).is_zero());
    CHECK_FALSE(alpha(p, 3, o).is_zero());
}

TEST_CASE("alpha (1,2) r=1 against hand expansion") {
    // alpha_{1,2,1} = -a q (1 - a q^2) / (q;q)_1, so
    // alpha * (q;q)_1 should equal -aq + a^2 q^3 exactly.
    Orders o{20, 10};
    auto a1 = alpha(DKParams{1, 2}, 1, o);
    auto prod = a1 * pochhammer(PochhammerSpec::finite(+1, 0, 1, 1, 1), o.q_order, o.a_order);
    TruncatedSeries expect(o.q_order, o.a_order);
    expect.add_term(1, 1, Int(-1));
    expect.add_term(2, 3, Int(1));
    CHECK(prod.agrees_with(expect));
}

TEST_CASE("definitional beta of the unit chain is 1/(q;q)_n") {
    Orders o{30, 10};
    for (long n = 0; n <= 8; ++n) {
        auto def = beta_definitional(DKParams{1, 2}, n, o);
        CHECK(def.agrees_with(poch_inv(+1, 0, 1, 1, n, o)));
    }
}

TEST_CASE("definitional beta of the unit pair is the delta sequence") {
    Orders o{30, 10};
    CHECK(beta_definitional(DKParams{1, 1}, 0, o)
              .agrees_with(TruncatedSeries::one(o.q_order, o.a_order)));
    for (long n = 1; n <= 8; ++n) CHECK(beta_definitional(DKParams{1, 1}, n, o).is_zero());
}

TEST_CASE("closed beta matches definitional beta at a spot check") {
    Orders o{40, 12};
    auto def = beta_definitional(DKParams{2, 4}, 3, o);
    auto closed = beta_closed(DKParams{2, 4}, 3, o);
    auto div = TruncatedSeries::first_divergence(def, closed);
    INFO(def.to_string(12));
    INFO(closed.to_string(12));
    CHECK_FALSE(div.has_value());
}

TEST_CASE("closed beta matches definitional beta for every supported pair") {
    Orders o{40, 12};
    for (DKParams p : {DKParams{2, 1}, DKParams{2, 4}, DKParams{3, 3}, DKParams{3, 5},
                       DKParams{4, 6}}) {
        for (long n = 0; n <= 12; ++n) {
            auto def = beta_definitional(p, n, o);
            auto closed = beta_closed(p, n, o);
            INFO("d=" << p.d << " k=" << p.k << " n=" << n);
            auto div = TruncatedSeries::first_divergence(def, closed);
            if (div) {
                INFO("a^" << div->a_exp << " q^" << div->q_exp << ": " << div->lhs.get_str()
                          << " vs " << div->rhs.get_str());
            }
            CHECK_FALSE(div.has_value());
        }
    }
}

TEST_CASE("closed beta (4,6) exercises both parities") {
    Orders o{40, 12};
    for (long n : {0L, 1L, 2L, 3L, 8L, 9L}) {
        auto def = beta_definitional(DKParams{4, 6}, n, o);
        auto closed = beta_closed(DKParams{4, 6}, n, o);
        INFO("n=" << n);
        CHECK(def.agrees_with(closed));
    }
}

TEST_CASE("closed beta rejects unsupported parameters") {
    Orders o{10, 5};
    CHECK_THROWS_AS(beta_closed(DKParams{1, 2}, 1, o), UnsupportedParamsError);
    CHECK_THROWS_AS(beta_closed(DKParams{2, 3}, 1, o), UnsupportedParamsError);
    CHECK_THROWS_AS(beta_closed(DKParams{3, 4}, 1, o), UnsupportedParamsError);
}

TEST_CASE("memoized sequences return the same series") {
    Orders o{25, 8};
    AlphaSequence as(DKParams{2, 4}, o);
    CHECK(as.at(4).agrees_with(alpha(DKParams{2, 4}, 4, o)));
    CHECK(as.at(4).agrees_with(as.at(4)));
    BetaSequence bs(DKParams{2, 4}, o, BetaSource::Closed);
    CHECK(bs.at(3).agrees_with(beta_closed(DKParams{2, 4}, 3, o)));
}

TEST_CASE("insertion transforms balance for every pair") {
    Orders o{30, 10};
    for (DKParams p : {DKParams{1, 1}, DKParams{1, 2}, DKParams{2, 1}, DKParams{2, 2},
                       DKParams{2, 3}, DKParams{2, 4}, DKParams{3, 3}, DKParams{3, 4},
                       DKParams{3, 5}, DKParams{4, 6}}) {
        for (Transform t : {Transform::WBL, Transform::ATNSBL, Transform::SSBL}) {
            auto [lhs, rhs] = insert(t, p, o);
            INFO("d=" << p.d << " k=" << p.k << " transform=" << static_cast<int>(t));
            auto div = TruncatedSeries::first_divergence(lhs, rhs);
            if (div) {
                INFO("a^" << div->a_exp << " q^" << div->q_exp << ": " << div->lhs.get_str()
                          << " vs " << div->rhs.get_str());
            }
            CHECK_FALSE(div.has_value());
        }
    }
}

TEST_CASE("insertion with closed-form beta agrees with definitional") {
    Orders o{30, 10};
    for (DKParams p : {DKParams{2, 4}, DKParams{3, 3}}) {
        auto d = insert(Transform::WBL, p, o, BetaSource::Definitional);
        auto c = insert(Transform::WBL, p, o, BetaSource::Closed);
        CHECK(d.lhs.agrees_with(c.lhs));
        CHECK(d.rhs.agrees_with(c.rhs));
    }
}

TEST_CASE("unit chain through WBL counts parts congruent to +-1 mod 5") {
    Orders o{40, std::nullopt};
    auto [lhs, rhs] = insert(Transform::WBL, DKParams{1, 2}, o);
    auto at1 = lhs.eval_at_one();
    std::vector<int> parts;
    for (int p = 1; p <= o.q_order; ++p)
        if (p % 5 == 1 || p % 5 == 4) parts.push_back(p);
    auto dp = count_with_parts(parts, o.q_order);
    // begins 1,1,1,1,2,2,3,...
    CHECK(dp[0] == 1);
    CHECK(dp[4] == 2);
    CHECK(dp[6] == 3);
    for (int n = 0; n <= o.q_order; ++n) {
        INFO("n=" << n);
        CHECK(at1.q_coeff(n) == dp[n]);
    }
    CHECK(rhs.eval_at_one().agrees_with(at1));
}

TEST_CASE("unit pair alpha sum at a=1 is the pentagonal number series") {
    Orders o{60, std::nullopt};
    TruncatedSeries s(o.q_order);
    for (long m = 0; m * m <= o.q_order; ++m) {
        auto term = TruncatedSeries::monomial(1, static_cast<int>(m),
                                              static_cast<int>(m * m), o.q_order, std::nullopt) *
                    alpha(DKParams{1, 1}, m, o);
        s += term;
    }
    auto pent = theta_sum(HalfExponent::halves(3), HalfExponent::halves(1), o.q_order);
    CHECK(s.eval_at_one().agrees_with(pent));
}

TEST_CASE("verify_bailey_pair reports pass with orders recorded") {
    Orders o{30, 10};
    auto rep = verify_bailey_pair(DKParams{2, 4}, 6, o);
    CHECK(rep.passed());
    CHECK(rep.checked_q_order == 30);
    CHECK(rep.checked_a_order == 10);
    CHECK(rep.target == "bailey(2,4)");
    CHECK_FALSE(rep.first_divergence.has_value());
    CHECK(verify_bailey_pair(DKParams{1, 2}, 6, o).passed());
    CHECK(verify_bailey_pair(DKParams{1, 1}, 6, o).passed());
    CHECK(verify_bailey_pair(DKParams{2, 3}, 6, o).passed());
}

TEST_CASE("fault injection is pinpointed at the first divergence") {
    Orders o{30, 10};
    auto good = beta_definitional(DKParams{3, 3}, 4, o);
    auto bad = good;
    bad.add_term(2, 7, Int(5));  // corrupt exactly one coefficient
    auto div = TruncatedSeries::first_divergence(good, bad);
    REQUIRE(div.has_value());
    CHECK(div->a_exp == 2);
    CHECK(div->q_exp == 7);
    CHECK(div->rhs - div->lhs == 5);

    VerificationReport rep;
    rep.target = "t";
    rep.checked_q_order = o.q_order;
    rep.record_divergence("n=4", *div);
    CHECK_FALSE(rep.passed());
    CHECK(rep.summary().find("n=4") != std::string::npos);
}
