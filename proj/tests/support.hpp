#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ibt/dataset.hpp"

namespace ibt::testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(IBT_FIXTURE_DIR) / name; }

inline Dataset load_fixture(const std::string& name) {
    return preprocess(load_dataset(fixture(name), FileFormat::keel));
}

inline std::vector<double> uniform(std::mt19937_64& gen, std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(gen);
    return out;
}

/// Small integers so ties are common.
inline std::vector<double> gritty(std::mt19937_64& gen, std::size_t n, int levels = 6) {
    std::uniform_int_distribution<int> dist(0, levels - 1);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(gen);
    return out;
}

inline std::size_t draw(std::mt19937_64& gen, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
}

/// Row-major dataset from values and labels (already in [0, 1]).
inline Dataset make_dataset(std::vector<double> values, std::size_t features, std::vector<std::size_t> labels,
                            std::size_t classes) {
    Dataset ds;
    ds.name = "synthetic";
    ds.n_features = features;
    ds.values = std::move(values);
    ds.labels = std::move(labels);
    for (std::size_t c = 0; c < classes; ++c) ds.class_names.push_back("c" + std::to_string(c));
    ds.feature_names.assign(features, "f");
    ds.categories.assign(features, {});
    return ds;
}

}  // namespace ibt::testing
