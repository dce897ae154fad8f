#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "ibt/fdr.hpp"
#include "support.hpp"

using namespace ibt;

namespace {

std::vector<PValue> ids(const std::vector<double>& p) {
    std::vector<PValue> out;
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back({i, p[i]});
    return out;
}

/// Direct scan of every rank for the step-up condition.
std::size_t brute_i_max(std::vector<double> p, double alpha, std::size_t u) {
    std::sort(p.begin(), p.end());
    std::size_t best = 0;
    for (std::size_t i = 1; i <= p.size(); ++i) {
        if (p[i - 1] <= static_cast<double>(i) * alpha / static_cast<double>(u)) best = i;
    }
    return best;
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("BH examples") {
    const auto r = bh_accept(ids({0.01, 0.02, 0.2}), 0.05, 3);
    CHECK(r.i_max == 2);
    CHECK(sorted(r.accepted) == std::vector<std::size_t>{0, 1});

    // A later rank can rescue an earlier one that fails its own threshold.
    const auto step_up = bh_accept(ids({0.04, 0.03, 0.045}), 0.05, 3);
    CHECK(step_up.i_max == 3);

    CHECK(bh_accept(ids({1, 1, 1}), 0.05, 3).accepted.empty());
    CHECK(bh_accept(ids({0, 0, 0}), 0.05, 3).accepted.size() == 3);
    CHECK(bh_accept(ids({0, 0, 0}), 0.0, 3).accepted.empty());
    CHECK(bh_accept({}, 0.05, 0).i_max == 0);

    // u larger than the list tightens every threshold.
    CHECK(bh_accept(ids({0.01, 0.02}), 0.05, 2).i_max == 2);
    CHECK(bh_accept(ids({0.01, 0.02}), 0.05, 10).i_max == 0);

    CHECK_THROWS(bh_accept(ids({0.5}), 1.5, 1));
    CHECK_THROWS(bh_accept(ids({0.5, 0.5}), 0.05, 1));
    CHECK_THROWS(bh_accept(ids({-0.1}), 0.05, 1));
}

TEST_CASE("BH ordering breaks p ties by id") {
    const auto r = bh_accept(std::vector<PValue>{{7, 0.2}, {3, 0.2}, {5, 0.1}}, 0.5, 3);
    CHECK(r.sorted[0].id == 5);
    CHECK(r.sorted[1].id == 3);
    CHECK(r.sorted[2].id == 7);
}

TEST_CASE("BH matches a brute-force scan") {
    std::mt19937_64 gen(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = testing::draw(gen, 0, 40);
        auto p = testing::uniform(gen, n);
        for (auto& v : p) v = v * v * v;  // mass near zero so acceptances happen
        if (trial % 3 == 0) {
            for (auto& v : p) v = std::round(v * 20.0) / 20.0;
        }
        const double alpha = testing::uniform(gen, 1)[0] * 0.3;
        const auto u = n + testing::draw(gen, 0, 3);
        if (u == 0) continue;
        const auto r = bh_accept(ids(p), alpha, u);
        CHECK(r.i_max == brute_i_max(p, alpha, u));
        CHECK(r.accepted.size() == r.i_max);
        for (auto id : r.accepted) CHECK(p[id] <= r.sorted[r.i_max - 1].p);
    }
}

TEST_CASE("BH acceptance grows with alpha and ignores input order") {
    std::mt19937_64 gen(103);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = testing::draw(gen, 1, 30);
        auto p = testing::uniform(gen, n);
        for (auto& v : p) v *= v;
        const double a1 = testing::uniform(gen, 1)[0] * 0.2, a2 = a1 + testing::uniform(gen, 1)[0] * 0.2;
        const auto lo = bh_accept(ids(p), a1, n), hi = bh_accept(ids(p), a2, n);
        CHECK(lo.i_max <= hi.i_max);
        const auto lo_set = sorted(lo.accepted), hi_set = sorted(hi.accepted);
        CHECK(std::includes(hi_set.begin(), hi_set.end(), lo_set.begin(), lo_set.end()));

        auto shuffled = ids(p);
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        CHECK(sorted(bh_accept(shuffled, a1, n).accepted) == lo_set);
    }
}

TEST_CASE("BH under the global null keeps any false discovery rare") {
    // With every hypothesis null, FDR equals P(any rejection) and BH bounds it by alpha.
    std::mt19937_64 gen(107);
    const int runs = 4000;
    int any = 0;
    for (int run = 0; run < runs; ++run) {
        const auto r = bh_accept(ids(testing::uniform(gen, 20)), 0.1, 20);
        any += r.i_max > 0;
    }
    const double rate = static_cast<double>(any) / runs;
    // alpha = 0.1, 4000 runs: binomial sd about 0.005.
    CHECK(rate <= 0.1 + 0.015);
    CHECK(rate >= 0.1 - 0.015);
}

TEST_CASE("per-class FDR classification") {
    std::vector<Prediction> preds(4);
    preds[0].per_class_p = {0.001, 0.9};
    preds[1].per_class_p = {0.8, 0.002};
    preds[2].per_class_p = {0.6, 0.7};
    preds[3].per_class_p = {0.004, 0.003};
    const auto r = classify_with_fdr(preds, 0.05);
    CHECK(r.u == 4);
    CHECK(r.assigned[0] == 0);
    CHECK(r.assigned[1] == 1);
    CHECK(r.assigned[2] == kOutlier);
    CHECK(r.assigned[3] == 1);  // accepted by both; smaller p wins
    CHECK(r.conflicts == 1);
    CHECK(r.outliers == std::vector<std::size_t>{2});
    CHECK(preds[2].outlier);
    CHECK_FALSE(preds[0].outlier);

    const auto none = classify_with_fdr(preds, 0.0);
    CHECK(none.outliers.size() == 4);
    CHECK(std::all_of(preds.begin(), preds.end(), [](const Prediction& p) { return p.outlier; }));

    preds[1].per_class_p = {0.5};
    CHECK_THROWS(classify_with_fdr(preds, 0.05));
}
