#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "qrrt/partitions.hpp"

using namespace qrrt;

namespace {

// Brute-force oracle: enumerate all partitions of n (parts nonincreasing) and
// apply the predicate to the multiset of parts.
template <typename Pred>
long count_partitions_where(int n, Pred&& pred) {
    long count = 0;
    std::vector<int> parts;
    auto rec = [&](auto&& self, int rem, int maxp) -> void {
        if (rem == 0) {
            if (pred(parts)) ++count;
            return;
        }
        for (int p = std::min(rem, maxp); p >= 1; --p) {
            parts.push_back(p);
            self(self, rem - p, p);
            parts.pop_back();
        }
    };
    rec(rec, n, n);
    return count;
}

long freq_of(const std::vector<int>& parts, int p) {
    long f = 0;
    for (int x : parts) f += (x == p);
    return f;
}

bool satisfies_B(const std::vector<int>& parts, int d, int k, int i) {
    if (freq_of(parts, d) > i - 1) return false;
    int maxp = parts.empty() ? 0 : parts.front();
    for (int j = 1; d * (j + 1) <= maxp + d; ++j)
        if (freq_of(parts, d * j) + freq_of(parts, d * j + d) > k - 1) return false;
    return true;
}

bool satisfies_A(const std::vector<int>& parts, int d, int k, int i) {
    int m = (2 * k + 1) * d;
    for (int x : parts) {
        int r = x % m;
        if (r == 0 || r == d * i || r == m - d * i) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("count_A against brute-force enumeration") {
    for (auto [d, k, i] : {std::tuple{1, 2, 2}, {2, 2, 1}, {3, 3, 2}}) {
        for (int n = 0; n <= 18; ++n) {
            long expect = count_partitions_where(n, [&](const std::vector<int>& p) {
                return satisfies_A(p, d, k, i);
            });
            INFO("d=" << d << " k=" << k << " i=" << i << " n=" << n);
            CHECK(count_A(d, k, i, n) == expect);
        }
    }
}

TEST_CASE("count_B against brute-force enumeration") {
    for (auto [d, k, i] : {std::tuple{1, 2, 2}, {1, 3, 1}, {2, 2, 1}, {2, 3, 2}, {3, 3, 3}}) {
        for (int n = 0; n <= 16; ++n) {
            long expect = count_partitions_where(n, [&](const std::vector<int>& p) {
                return satisfies_B(p, d, k, i);
            });
            INFO("d=" << d << " k=" << k << " i=" << i << " n=" << n);
            CHECK(count_B(d, k, i, n) == expect);
        }
    }
}

TEST_CASE("classic values for the first Rogers-Ramanujan case") {
    // parts congruent to +-1 mod 5: 1,1,1,1,2,2,3,3,4,5,6
    std::vector<long> expect{1, 1, 1, 1, 2, 2, 3, 3, 4, 5, 6};
    for (int n = 0; n < static_cast<int>(expect.size()); ++n) {
        CHECK(count_A(1, 2, 2, n) == expect[n]);
        CHECK(count_B(1, 2, 2, n) == expect[n]);
    }
}

TEST_CASE("refined counts sum to the total") {
    for (auto [d, k, i] : {std::tuple{2, 3, 2}, {3, 4, 4}}) {
        for (int n = 0; n <= 14; ++n) {
            Int total = 0;
            for (int m = 0; m <= n; ++m) total += count_b(d, k, i, m, n);
            INFO("d=" << d << " k=" << k << " i=" << i << " n=" << n);
            CHECK(total == count_B(d, k, i, n));
        }
    }
    CHECK(count_b(2, 3, 2, 5, 3) == 0);
    CHECK(count_b(2, 3, 2, -1, 3) == 0);
    CHECK(count_A(2, 3, 2, -1) == 0);
}

TEST_CASE("b_genfun coefficients are the refined counts") {
    Orders o{16, 16};
    for (auto [d, k, i] : {std::tuple{1, 2, 2}, {2, 2, 1}, {2, 4, 3}, {3, 3, 2}}) {
        auto G = b_genfun(d, k, i, o);
        INFO("d=" << d << " k=" << k << " i=" << i);
        for (int n = 0; n <= o.q_order; ++n)
            for (int m = 0; m <= n; ++m) {
                INFO("m=" << m << " n=" << n);
                CHECK(G.coeff(m, n) == count_b(d, k, i, m, n));
            }
    }
}

TEST_CASE("generating function factors through the d=1 case") {
    int q_order = 30;
    for (auto [d, k, i] : {std::tuple{2, 3, 2}, {3, 3, 3}}) {
        auto lhs = b_genfun(d, k, i, Orders{q_order, std::nullopt}).eval_at_one();
        auto rhs = b_genfun(1, k, i, Orders{q_order, std::nullopt})
                       .eval_at_one()
                       .substitute(0, d);
        for (int p = 1; p <= q_order; ++p)
            if (p % d != 0)
                rhs *= pochhammer_inverse(PochhammerSpec::finite(+1, 0, p, 1, 1), q_order);
        INFO("d=" << d << " k=" << k << " i=" << i);
        CHECK(lhs.agrees_with(rhs));
    }
}

TEST_CASE("counts are monotone in i") {
    for (int n = 0; n <= 20; ++n)
        for (int i = 1; i < 4; ++i) {
            CHECK(count_B(2, 4, i, n) <= count_B(2, 4, i + 1, n));
            CHECK(count_A(2, 4, i, n) <= count_A(2, 4, i + 1, n));
        }
}

TEST_CASE("partition theorem verifies") {
    for (auto [d, k, i] : {std::tuple{1, 2, 1}, {2, 2, 2}, {2, 3, 1}, {3, 4, 2}, {4, 2, 1}}) {
        auto rep = verify_partition_theorem(d, k, i, 25);
        INFO(rep.summary());
        CHECK(rep.passed());
    }
}

TEST_CASE("generating functions satisfy the q-difference system and match Q") {
    Orders o{25, 10};
    for (auto [d, k] : {std::pair{1, 2}, {2, 2}, {2, 4}, {3, 3}, {4, 2}}) {
        auto rep = verify_B_recurrences(d, k, o);
        INFO(rep.summary());
        CHECK(rep.passed());
    }
}

TEST_CASE("Andrews-Gordon multisum equals the excluded-residue product") {
    int q_order = 40;
    for (int k = 2; k <= 4; ++k)
        for (int i = 1; i <= k; ++i) {
            auto lhs = andrews_gordon_lhs(k, i, q_order);
            auto rhs = product_side({1, k, i}, q_order);
            INFO("k=" << k << " i=" << i);
            CHECK(lhs.agrees_with(rhs));
        }
    CHECK_THROWS_AS(andrews_gordon_lhs(1, 1, 10), ValidationError);
}

TEST_CASE("Andrews-Gordon multisum counts the restricted partitions") {
    int q_order = 30;
    auto lhs = andrews_gordon_lhs(3, 3, q_order);
    auto gen = b_genfun(1, 3, 3, Orders{q_order, std::nullopt}).eval_at_one();
    CHECK(lhs.agrees_with(gen));
}
