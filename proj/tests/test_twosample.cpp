#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "ibt/twosample.hpp"
#include "support.hpp"

using namespace ibt;
using V = std::vector<double>;

TEST_CASE("normal CDF matches high-precision values") {
    // Frozen from a 40-digit evaluation.
    const std::pair<double, double> cases[] = {
        {-8.0, 6.2209605742717841235e-16}, {-5.0, 2.8665157187919391167e-7}, {-3.0, 0.0013498980316300945267},
        {-1.0, 0.15865525393145705141},    {-0.5, 0.30853753872598689636},   {0.0, 0.5},
        {0.25, 0.59870632568292372424},    {1.0, 0.84134474606854294859},    {2.5, 0.99379033467422386483},
        {6.0, 0.99999999901341235496},
    };
    for (auto [z, p] : cases) {
        CAPTURE(z);
        CHECK(std::fabs(normal_cdf(z) - p) <= 1e-12);
        if (p < 1e-3) {
            CHECK(normal_cdf(z) == doctest::Approx(p).epsilon(1e-12));
        }
    }
}

TEST_CASE("Student-t CDF matches high-precision values") {
    const std::tuple<double, double, double> cases[] = {
        {-1.224744871391589, 4, 0.14393206736334533931}, {0.5, 1, 0.64758361765043327418},
        {-2.0, 3, 0.069662984279421588424},              {1.7, 10, 0.94001532704548980163},
        {-0.3, 29, 0.38315854666448387281},              {3.5, 58, 0.99954931506241986612},
        {-12.0, 7, 3.1791551890925501353e-6},            {0.0, 5, 0.5},
    };
    for (auto [t, df, p] : cases) {
        CAPTURE(t);
        CAPTURE(df);
        CHECK(std::fabs(student_t_cdf(t, df) - p) <= 1e-12);
    }
    CHECK_THROWS(student_t_cdf(1.0, 0.0));
}

TEST_CASE("WMW worked example") {
    const auto out = wmw_one_sided(V{1, 2}, V{3, 4});
    CHECK(out.statistic == 0.0);
    REQUIRE(out.z.has_value());
    CHECK(*out.z == doctest::Approx(-1.5491933384829668).epsilon(1e-14));
    CHECK(std::fabs(out.p - 0.060667625179241073) <= 1e-12);
    CHECK(out.m == 2);
    CHECK(out.n == 2);
}

TEST_CASE("WMW identical samples give z = 0") {
    const auto out = wmw_one_sided(V{1, 2, 2, 5}, V{5, 2, 1, 2});
    CHECK(out.statistic == 8.0);
    CHECK(*out.z == 0.0);
    CHECK(out.p == 0.5);
}

namespace {

/// Exact permutation tails over all label assignments; lower = P(U <= u_obs), upper = P(U >= u_obs).
std::pair<double, double> exact_wmw_tails(const V& gx, const V& gy) {
    V pooled(gx);
    pooled.insert(pooled.end(), gy.begin(), gy.end());
    const std::size_t total = pooled.size();
    const std::size_t m = gx.size();
    auto u_of = [&](std::uint32_t mask) {
        double u = 0.0;
        for (std::size_t i = 0; i < total; ++i) {
            if (!((mask >> i) & 1u)) continue;
            for (std::size_t j = 0; j < total; ++j) {
                if ((mask >> j) & 1u) continue;
                u += pooled[i] > pooled[j] ? 1.0 : (pooled[i] == pooled[j] ? 0.5 : 0.0);
            }
        }
        return u;
    };
    const double observed = u_of((1u << m) - 1);
    std::size_t lower = 0, upper = 0, all = 0;
    for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
        ++all;
        const double u = u_of(mask);
        lower += u <= observed ? 1 : 0;
        upper += u >= observed ? 1 : 0;
    }
    return {static_cast<double>(lower) / static_cast<double>(all), static_cast<double>(upper) / static_cast<double>(all)};
}

}  // namespace

TEST_CASE("WMW direction agrees with the exact permutation test") {
    CHECK(exact_wmw_tails(V{1, 2, 3}, V{4, 5, 6}).first == doctest::Approx(0.05));
    CHECK(wmw_one_sided(V{1, 2, 3}, V{4, 5, 6}).statistic == 0.0);
    CHECK(wmw_one_sided(V{1, 2, 3}, V{4, 5, 6}).p < 0.5);

    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto gx = testing::uniform(gen, testing::draw(gen, 1, 7));
        const auto gy = testing::uniform(gen, testing::draw(gen, 1, 7));
        const auto [lower, upper] = exact_wmw_tails(gx, gy);
        const auto out = wmw_one_sided(gx, gy);
        CHECK((lower < upper) == (*out.z < 0.0));
        CHECK((lower == upper) == (*out.z == 0.0));
        CHECK((lower < upper) == (out.p < 0.5));
    }
}

TEST_CASE("WMW antisymmetry, bounds and decision equivalence") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 500; ++trial) {
        const auto gx = testing::uniform(gen, testing::draw(gen, 1, 30));
        const auto gy = testing::uniform(gen, testing::draw(gen, 1, 30));
        const auto a = wmw_one_sided(gx, gy);
        const auto b = wmw_one_sided(gy, gx);
        const double mn = static_cast<double>(gx.size() * gy.size());
        CHECK(a.statistic >= 0.0);
        CHECK(a.statistic <= mn);
        CHECK(a.statistic + b.statistic == mn);
        CHECK(*a.z == -*b.z);
        CHECK((a.p < b.p) == (a.statistic < mn / 2.0));
    }
}

TEST_CASE("WMW with ties keeps midranks and bounds") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 300; ++trial) {
        const auto gx = testing::gritty(gen, testing::draw(gen, 1, 20));
        const auto gy = testing::gritty(gen, testing::draw(gen, 1, 20));
        const auto a = wmw_one_sided(gx, gy);
        const auto b = wmw_one_sided(gy, gx);
        CHECK(a.statistic + b.statistic == static_cast<double>(gx.size() * gy.size()));
        CHECK(a.p >= 0.0);
        CHECK(a.p <= 1.0);
    }
}

TEST_CASE("WMW monotone in a positive shift of the first sample") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 200; ++trial) {
        auto gx = testing::gritty(gen, testing::draw(gen, 1, 15));
        const auto gy = testing::gritty(gen, testing::draw(gen, 1, 15));
        const double before = wmw_one_sided(gx, gy).p;
        for (auto& v : gx) v += 0.5 + static_cast<double>(trial % 3);
        CHECK(wmw_one_sided(gx, gy).p >= before);
    }
}

TEST_CASE("pooled t examples and degenerate convention") {
    const auto out = pooled_t_one_sided(V{1, 2, 3}, V{2, 3, 4});
    CHECK(out.statistic == doctest::Approx(-1.224744871391589).epsilon(1e-14));
    CHECK(std::fabs(out.p - 0.14393206736334533931) <= 1e-12);

    CHECK(pooled_t_one_sided(V{1, 3}, V{0, 4}).p == 0.5);
    CHECK(pooled_t_one_sided(V{0, 0}, V{1, 1}).p == 0.0);
    CHECK(pooled_t_one_sided(V{1, 1}, V{0, 0}).p == 1.0);
    CHECK(pooled_t_one_sided(V{0.1, 0.1, 0.1}, V{0.1, 0.1}).p == 0.5);
    CHECK(pooled_t_one_sided(V{1}, V{2}).p == 0.0);
    CHECK(pooled_t_one_sided(V{2}, V{2}).p == 0.5);
    CHECK_THROWS_AS(pooled_t_one_sided(V{}, V{1}), DegenerateSample);
}

TEST_CASE("pooled t is order-insensitive and antisymmetric") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 200; ++trial) {
        auto gx = testing::uniform(gen, testing::draw(gen, 2, 20));
        auto gy = testing::uniform(gen, testing::draw(gen, 2, 20));
        const auto a = pooled_t_one_sided(gx, gy);
        std::shuffle(gx.begin(), gx.end(), gen);
        std::shuffle(gy.begin(), gy.end(), gen);
        CHECK(pooled_t_one_sided(gx, gy).p == a.p);
        CHECK(pooled_t_one_sided(gy, gx).statistic == -a.statistic);
    }
}

TEST_CASE("KS examples") {
    CHECK(ks_one_sided(V{1, 2}, V{1, 2}).p == 1.0);
    const auto sep = ks_one_sided(V{1, 2}, V{3, 4});
    CHECK(sep.statistic == 1.0);
    CHECK(sep.p == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(sep.p == doctest::Approx(0.1353).epsilon(1e-3));
    const auto above = ks_one_sided(V{5, 6}, V{3, 4});
    CHECK(above.statistic == 0.0);
    CHECK(above.p == 1.0);
    // Partial overlap: F_x - F_y peaks at 2/3 - 0 after x = 2.
    CHECK(ks_one_sided(V{1, 2, 5}, V{3, 4}).statistic == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("precedence examples") {
    const auto out = precedence_one_sided(V{1, 2}, V{3, 4}, 1);
    CHECK(out.statistic == 2.0);
    CHECK(out.p == 1.0 / 6.0);
    const auto none = precedence_one_sided(V{10, 11}, V{3, 4}, 2);
    CHECK(none.statistic == 0.0);
    CHECK(none.p == 1.0);
    // An x tied with y_(r) counts as preceding it.
    CHECK(precedence_one_sided(V{3, 9}, V{3, 4}, 1).statistic == 1.0);
    CHECK_THROWS_AS(precedence_one_sided(V{1}, V{3, 4}, 3), std::out_of_range);
    CHECK_THROWS_AS(precedence_one_sided(V{1}, V{3, 4}, 0), std::out_of_range);
    CHECK_THROWS_AS(run_test({TestKind::precedence, 0}, V{1}, V{2}), std::invalid_argument);
}

TEST_CASE("precedence closed form equals enumeration for m, n <= 8") {
    for (std::size_t m = 1; m <= 8; ++m) {
        for (std::size_t n = 1; n <= 8; ++n) {
            for (std::size_t r = 1; r <= n; ++r) {
                for (std::size_t w = 0; w <= m + 1; ++w) {
                    CAPTURE(m);
                    CAPTURE(n);
                    CAPTURE(r);
                    CAPTURE(w);
                    CHECK(precedence_tail(m, n, r, w) == precedence_tail_enumerated(m, n, r, w));
                }
            }
        }
    }
}

TEST_CASE("precedence closed form stays a probability for large samples") {
    for (std::size_t m : {30, 70, 200}) {
        double prev = 1.0;
        for (std::size_t w = 0; w <= m; w += 5) {
            const double p = precedence_tail(m, m + 3, 4, w);
            CHECK(p >= 0.0);
            CHECK(p <= prev + 1e-12);
            prev = p;
        }
    }
}

TEST_CASE("precedence: exchanging roles gives complementary decisions for m = n") {
    // Over every arrangement with m = n and matching r = s, both nulls coincide,
    // so comparing p-values is the same as comparing the two counts.
    for (std::size_t m = 1; m <= 6; ++m) {
        const std::size_t total = 2 * m;
        for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
            V gx, gy;
            for (std::size_t pos = 0; pos < total; ++pos) {
                ((mask >> pos) & 1u ? gx : gy).push_back(static_cast<double>(pos));
            }
            for (std::size_t r = 1; r <= m; ++r) {
                const auto a = precedence_one_sided(gx, gy, r);
                const auto b = precedence_one_sided(gy, gx, r);
                CHECK((a.p < b.p) == (a.statistic > b.statistic));
                CHECK((a.p == b.p) == (a.statistic == b.statistic));
            }
        }
    }
}

TEST_CASE("every engine returns probabilities on random input") {
    std::mt19937_64 gen(29);
    for (int trial = 0; trial < 400; ++trial) {
        const auto gx = trial % 2 ? testing::gritty(gen, testing::draw(gen, 1, 25))
                                  : testing::uniform(gen, testing::draw(gen, 1, 25));
        const auto gy = testing::uniform(gen, testing::draw(gen, 1, 25));
        for (auto kind : {TestKind::wmw, TestKind::pooled_t, TestKind::ks, TestKind::precedence}) {
            const auto out = run_test({kind, testing::draw(gen, 1, gy.size())}, gx, gy);
            CHECK(out.p >= 0.0);
            CHECK(out.p <= 1.0);
        }
    }
    CHECK_THROWS_AS(wmw_one_sided(V{}, V{1}), DegenerateSample);
    CHECK_THROWS_AS(ks_one_sided(V{1}, V{}), DegenerateSample);
}

TEST_CASE("engine names round-trip") {
    for (auto kind : {TestKind::wmw, TestKind::pooled_t, TestKind::ks, TestKind::precedence}) {
        CHECK(parse_test_kind(to_string(kind)) == kind);
    }
    CHECK_THROWS(parse_test_kind("anova"));
}
