#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ibt/dataset.hpp"
#include "support.hpp"

using namespace ibt;

namespace {

Dataset keel(const std::string& text) {
    std::istringstream in(text);
    return parse_keel(in, "t");
}

Dataset csv(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in, "t");
}

const char* kTiny =
    "@relation tiny\n"
    "@attribute a real [0.0, 9.0]\n"
    "@attribute b integer[0,3]\n"
    "@attribute class {yes, no}\n"
    "@inputs a, b\n"
    "@outputs class\n"
    "@data\n"
    "1.5, 2, no\n"
    "3, 0, yes\n"
    "?, 1, yes\n";

}  // namespace

TEST_CASE("keel loader reads headers and rows") {
    const auto ds = keel(kTiny);
    CHECK(ds.rows() == 3);
    CHECK(ds.n_features == 2);
    CHECK(ds.class_names == std::vector<std::string>{"no", "yes"});
    CHECK(ds.labels == std::vector<std::size_t>{0, 1, 1});
    CHECK(ds.values[0] == 1.5);
    CHECK(std::isnan(ds.values[4]));
    CHECK(ds.has_missing());
}

TEST_CASE("keel loader tolerates comments, case and quoting") {
    const auto ds = keel(
        "% comment\n"
        "@RELATION x\n"
        "@Attribute 'odd name' REAL\n"
        "@attribute colour {red,green}\n"
        "@attribute Class{p,n}\n"
        "@DATA\n"
        "0.5,green,p\n"
        "% inside data\n"
        "1e-1,red,n\n");
    CHECK(ds.rows() == 2);
    CHECK(ds.feature_names == std::vector<std::string>{"odd name", "colour"});
    // Categorical levels are coded by first appearance, not declaration order.
    CHECK(ds.categories[1] == std::vector<std::string>{"green", "red"});
    CHECK(ds.values[1] == 0.0);
    CHECK(ds.values[3] == 1.0);
}

TEST_CASE("keel declared-only classes come after observed ones") {
    const auto ds = keel("@attribute a real\n@attribute c {z, y, x}\n@data\n1,x\n2,y\n");
    CHECK(ds.class_names == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("keel errors carry line numbers") {
    SUBCASE("unknown class token") {
        try {
            keel("@attribute a real\n@attribute c {p,n}\n@data\n1,p\n2,q\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 5);
            CHECK(std::string(e.what()).find("q") != std::string::npos);
        }
    }
    SUBCASE("ragged row") {
        try {
            keel("@attribute a real\n@attribute c {p,n}\n@data\n1,p\n2\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 5);
        }
    }
    SUBCASE("malformed header") {
        CHECK_THROWS_AS(keel("@attribute a\n@data\n"), ParseError);
        CHECK_THROWS_AS(keel("@attribute a complex\n@attribute c {p}\n@data\n"), ParseError);
        CHECK_THROWS_AS(keel("@bogus\n@data\n"), ParseError);
        CHECK_THROWS_AS(keel("@attribute a real\n@attribute c {p,n}\n"), ParseError);
    }
    SUBCASE("non-numeric value in numeric column") {
        try {
            keel("@attribute a real\n@attribute c {p,n}\n@data\nabc,p\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
    }
}

TEST_CASE("empty data section loads; fold planning rejects it") {
    const auto ds = keel("@attribute a real\n@attribute c {p,n}\n@data\n");
    CHECK(ds.rows() == 0);
    CHECK_THROWS_AS(make_folds(ds, 10, 1, 1), DataError);
    CHECK_THROWS_AS(preprocess(ds), DataError);
}

TEST_CASE("csv loader: label last, text columns become categorical") {
    const auto ds = csv("1,a,x\n2,b,y\n3,a,x\n,b,y\n");
    CHECK(ds.rows() == 4);
    CHECK(ds.n_features == 2);
    CHECK(ds.categories[0].empty());
    CHECK(ds.categories[1] == std::vector<std::string>{"a", "b"});
    CHECK(std::isnan(ds.values[6]));
    CHECK_THROWS_AS(csv("1,2,x\n1,x\n"), ParseError);
}

TEST_CASE("iris fixture shape") {
    const auto raw = load_dataset(testing::fixture("iris.dat"), FileFormat::keel);
    CHECK(raw.rows() == 150);
    CHECK(raw.n_features == 4);
    CHECK(raw.classes() == 3);
    CHECK(raw.class_counts() == std::vector<std::size_t>{50, 50, 50});
}

TEST_CASE("hepatitis: 155 raw rows, 80 after dropping missing values") {
    const auto raw = load_dataset(testing::fixture("hepatitis.dat"), FileFormat::keel);
    CHECK(raw.rows() == 155);
    const auto ds = preprocess(raw);
    CHECK(ds.rows() == 80);
    CHECK_FALSE(ds.has_missing());
}

TEST_CASE("min-max scaling and constant columns") {
    const auto ds = preprocess(testing::make_dataset({2, 1, 2, 3, 2, 5}, 2, {0, 1, 0}, 2));
    CHECK(ds.values == std::vector<double>{0, 0, 0, 0.5, 0, 1});
}

TEST_CASE("preprocess drops missing rows and re-indexes classes") {
    auto raw = keel(kTiny);
    const auto ds = preprocess(raw);
    CHECK(ds.rows() == 2);
    CHECK(ds.class_names == std::vector<std::string>{"no", "yes"});

    auto gone = keel("@attribute a real\n@attribute c {p,n}\n@data\n?,p\n1,n\n2,n\n");
    CHECK_THROWS_AS(preprocess(gone), DataError);
    auto none = keel("@attribute a real\n@attribute c {p,n}\n@data\n?,p\n?,n\n");
    CHECK_THROWS_AS(preprocess(none), DataError);
}

TEST_CASE("missing class labels drop the row") {
    const auto ds = preprocess(csv("1,x\n2,?\n3,y\n4,\n"));
    CHECK(ds.rows() == 2);
}

TEST_CASE("preprocess invariants on fixtures") {
    for (const char* name : {"iris.dat", "hepatitis.dat", "heart.dat", "cleveland.dat", "balance.dat"}) {
        CAPTURE(name);
        const auto raw = load_dataset(testing::fixture(name), FileFormat::keel);
        const auto ds = preprocess(raw);
        for (std::size_t f = 0; f < ds.n_features; ++f) {
            double lo = 1.0, hi = 0.0;
            std::set<double> distinct;
            for (std::size_t i = 0; i < ds.rows(); ++i) {
                const double v = ds.values[i * ds.n_features + f];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                distinct.insert(v);
            }
            CHECK(lo == 0.0);
            if (distinct.size() >= 2) {
                CHECK(hi == 1.0);
            }
        }
        const auto again = preprocess(ds);
        CHECK(again.values == ds.values);
        CHECK(again.labels == ds.labels);
        CHECK(again.class_names == ds.class_names);

        std::ostringstream out;
        write_csv(ds, out);
        std::istringstream in(out.str());
        const auto back = parse_csv(in, ds.name);
        CHECK(back.values == ds.values);
        CHECK(back.labels == ds.labels);
        CHECK(back.class_names == ds.class_names);
    }
}

TEST_CASE("iris folds are perfectly stratified") {
    const auto ds = testing::load_fixture("iris.dat");
    const auto plan = make_folds(ds, 10, 3, 42);
    CHECK(plan.warnings.empty());
    for (std::size_t r = 0; r < plan.repeats; ++r) {
        std::vector<std::vector<int>> per(10, std::vector<int>(3, 0));
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            const auto f = plan.fold_of(r, i);
            REQUIRE(f < 10);
            ++per[f][ds.labels[i]];
        }
        for (const auto& fold : per) {
            CHECK(fold == std::vector<int>{5, 5, 5});
        }
    }
}

TEST_CASE("folds: determinism, seed sensitivity, stratification bounds") {
    const auto ds = testing::load_fixture("wine.dat");
    const auto a = make_folds(ds, 10, 5, 7);
    const auto b = make_folds(ds, 10, 5, 7);
    const auto c = make_folds(ds, 10, 5, 8);
    CHECK(a.assignment == b.assignment);
    CHECK(a.assignment != c.assignment);
    for (std::size_t r = 0; r < a.repeats; ++r) {
        std::vector<std::vector<int>> per(ds.classes(), std::vector<int>(10, 0));
        std::vector<int> total(10, 0);
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            ++per[ds.labels[i]][a.fold_of(r, i)];
            ++total[a.fold_of(r, i)];
        }
        for (const auto& cls : per) {
            CHECK(*std::max_element(cls.begin(), cls.end()) - *std::min_element(cls.begin(), cls.end()) <= 1);
        }
        CHECK(*std::max_element(total.begin(), total.end()) - *std::min_element(total.begin(), total.end()) <= 1);
    }
    // Repeats are independent streams.
    CHECK(std::vector<std::uint32_t>(a.repeat_assignment(0).begin(), a.repeat_assignment(0).end()) !=
          std::vector<std::uint32_t>(a.repeat_assignment(1).begin(), a.repeat_assignment(1).end()));
}

TEST_CASE("folds: more folds than a class has members warns but succeeds") {
    const auto ds = testing::make_dataset({0, 0.1, 0.2, 0.3, 0.9, 1}, 1, {0, 0, 0, 0, 1, 1}, 2);
    const auto plan = make_folds(ds, 3, 1, 1);
    CHECK(plan.warnings.size() == 1);
    CHECK_THROWS_AS(make_folds(ds, 1, 1, 1), DataError);
}
